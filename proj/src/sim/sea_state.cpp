#include "netcage/sim/sea_state.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

#include "netcage/core/angles.hpp"
#include "netcage/core/error.hpp"
#include "netcage/core/rng.hpp"

namespace netcage::sim {

namespace {

bool inside(double v, const Range& r) { return v >= r.lo && v <= r.hi; }

void check_range(const Range& r, const char* name, double floor, double ceil) {
  if (!(r.lo <= r.hi) || r.lo < floor || r.hi > ceil)
    raise(ErrorCode::InvalidRange, std::string("invalid ") + name + " range [" + std::to_string(r.lo) + ", " +
                                       std::to_string(r.hi) + "]");
}

}  // namespace

bool in_generation_domain(const SeaState& s, const SeaStateRanges& r) {
  return inside(s.current_speed, r.current_speed) && inside(s.sig_wave_height, r.sig_wave_height) &&
         inside(s.peak_period, r.peak_period);
}

std::vector<SeaState> sample_sea_states(int n, const SeaStateRanges& ranges, std::uint64_t seed) {
  if (n < 1) raise(ErrorCode::InvalidRange, "sample count must be at least 1");
  const double inf = std::numeric_limits<double>::infinity();
  check_range(ranges.current_speed, "current speed", 0.0, inf);
  check_range(ranges.sig_wave_height, "wave height", 0.0, inf);
  check_range(ranges.peak_period, "peak period", 0.0, inf);
  check_range(ranges.current_dir, "current direction", -inf, inf);
  check_range(ranges.wave_dir, "wave direction", -inf, inf);

  auto rng = make_rng(seed, 0x5ea);
  const std::array<const Range*, 5> dims{&ranges.current_speed, &ranges.current_dir, &ranges.sig_wave_height,
                                         &ranges.peak_period, &ranges.wave_dir};
  std::array<std::vector<double>, 5> cols;
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (std::size_t d = 0; d < dims.size(); ++d) {
    std::iota(perm.begin(), perm.end(), 0);
    // Fisher-Yates with our own uniform draw keeps the stream portable.
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(uniform01(rng) * (i + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(std::min(j, i))]);
    }
    cols[d].resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double u = (perm[static_cast<std::size_t>(i)] + uniform01(rng)) / n;
      cols[d][static_cast<std::size_t>(i)] = dims[d]->lo + u * (dims[d]->hi - dims[d]->lo);
    }
  }

  std::vector<SeaState> out(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& s = out[i];
    s.current_speed = cols[0][i];
    s.current_dir = wrap_degrees(cols[1][i]);
    s.sig_wave_height = ranges.waves ? cols[2][i] : 0.0;
    s.peak_period = ranges.waves ? cols[3][i] : 0.0;
    s.wave_dir = wrap_degrees(cols[4][i]);
  }
  return out;
}

Matrix current_features(const std::vector<SeaState>& states) {
  Matrix X(static_cast<Index>(states.size()), 3);
  for (std::size_t i = 0; i < states.size(); ++i)
    X.row(static_cast<Index>(i)) = encode_current(states[i].current_speed, states[i].current_dir).transpose();
  return X;
}

}  // namespace netcage::sim
