#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netcage/core/table.hpp"
#include "netcage/sim/synth.hpp"

namespace netcage::sim {

/// Simulated responses, one row per scenario.
struct LfDataset {
  std::vector<int> scenario;  // 1-based ids
  std::vector<SeaState> states;
  Matrix displacements;  // S x 3N, node-major x, y, z
  Matrix tensions;       // S x 12
  std::string param_hash;
  std::uint64_t seed = 0;

  Index size() const { return static_cast<Index>(states.size()); }
  /// Displacements of one scenario as N x 3.
  Matrix deformation(Index row) const;
  LfDataset subset(const std::vector<Index>& rows) const;
};

/// Synthetic field records at the sensor positions.
struct HfDataset {
  std::vector<int> scenario;
  std::vector<SeaState> states;
  Matrix shackles;  // S x 5, kN
  Matrix depths;    // S x 3, m
  std::string param_hash;
  std::uint64_t seed = 0;

  Index size() const { return static_cast<Index>(states.size()); }
  HfDataset subset(const std::vector<Index>& rows) const;
};

struct SimulationRun {
  LfDataset lf;
  HfDataset hf;
  std::vector<int> failures;  // scenario ids whose solve did not converge
  int max_iterations = 0;
  double max_residual = 0.0;
};

/// Samples n sea states, solves each, and synthesizes the field records.
/// Scenario s uses generator streams derived from (seed, s) only, so the
/// result is independent of `threads` (0 picks the hardware count).
SimulationRun simulate(int n, std::uint64_t seed, const CageParams& params, const SeaStateRanges& ranges = {},
                       int threads = 0);

/// Same, for a given list of states (ids 1..n).
SimulationRun simulate_states(const std::vector<SeaState>& states, std::uint64_t seed, const CageParams& params,
                              int threads = 0);

/// Sensor readings of the simulated (low-fidelity) responses, S x 5 and S x 3.
SensorReadings lf_sensor_row(const LfDataset& lf, Index row, const SensorConfig& cfg, const Matrix& rest);

/// Time series of one scenario (3N x steps), regenerated from its
/// equilibrium with a stream keyed by the dataset seed and scenario id.
Matrix lf_series(const LfDataset& lf, Index row, const SeriesParams& series);

Table to_table(const LfDataset& lf);
Table to_table(const HfDataset& hf);
LfDataset lf_from_table(const Table& t);
HfDataset hf_from_table(const Table& t);

/// Column names shared by both schemas.
std::vector<std::string> sea_state_columns();

}  // namespace netcage::sim
