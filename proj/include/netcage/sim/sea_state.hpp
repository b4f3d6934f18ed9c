#pragma once

#include <cstdint>
#include <vector>

#include "netcage/core/types.hpp"

namespace netcage::sim {

/// Directions are in degrees, counter-clockwise from +x, and give the
/// heading the current (or wave train) travels toward.
struct SeaState {
  double current_speed = 0.0;   // m/s
  double current_dir = 0.0;     // deg
  double sig_wave_height = 0.0; // m
  double peak_period = 0.0;     // s
  double wave_dir = 0.0;        // deg

  bool operator==(const SeaState&) const = default;
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

struct SeaStateRanges {
  Range current_speed{0.0, 1.0};
  Range current_dir{0.0, 360.0};
  Range sig_wave_height{0.0, 3.0};
  Range peak_period{0.0, 8.66};
  Range wave_dir{0.0, 360.0};
  bool waves = true;  // false pins Hs and Tp to zero
};

/// True when the state lies inside the generation ranges.
bool in_generation_domain(const SeaState& s, const SeaStateRanges& r = {});

/// Latin hypercube sample: each dimension is split into n equal strata, each
/// stratum used exactly once, with a uniform offset inside the stratum.
std::vector<SeaState> sample_sea_states(int n, const SeaStateRanges& ranges, std::uint64_t seed);

/// Current-only features (speed, sin dir, cos dir) for a list of states.
Matrix current_features(const std::vector<SeaState>& states);

}  // namespace netcage::sim
