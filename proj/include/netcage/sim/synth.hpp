#pragma once

#include <array>
#include <cstdint>

#include "netcage/sim/solver.hpp"

namespace netcage::sim {

struct SensorReadings {
  Vector shackle_loads;        // kShackles, kN
  Vector depth_displacements;  // kDepthSensors, m (z displacement, up positive)
};

/// Node nearest each configured depth among the ring nodes on the sensor
/// azimuth and the apex. Throws InvalidSensorIndex for a bad configuration.
std::array<Index, kDepthSensors> depth_sensor_nodes(const Matrix& rest_positions, const SensorConfig& cfg);

SensorReadings sensor_extract(const CageDeformation& def, const MooringLoads& loads, const SensorConfig& cfg,
                              const Matrix& rest_positions);

struct HighFidelity {
  CageDeformation deformation;
  MooringLoads loads;
};

/// Applies the discrepancy map entrywise to every displacement component and
/// line tension; noise is drawn from a generator seeded by `seed` only.
HighFidelity synth_high_fidelity(const CageDeformation& def, const MooringLoads& loads, const SeaState& sea,
                                 const DiscrepancyParams& disc, std::uint64_t seed);

/// Per-scenario (3N x steps) series in the node-major x, y, z row layout: a
/// linear ramp over the transient steps, then the equilibrium with a small
/// seeded oscillation whose amplitude grows with Hs.
Matrix scenario_series(const Matrix& displacements, const SeaState& sea, const SeriesParams& series,
                       std::uint64_t seed);

}  // namespace netcage::sim
