#include "netcage/sim/synth.hpp"

#include <cmath>

#include "netcage/core/angles.hpp"
#include "netcage/core/error.hpp"
#include "netcage/core/rng.hpp"

namespace netcage::sim {

std::array<Index, kDepthSensors> depth_sensor_nodes(const Matrix& rest, const SensorConfig& cfg) {
  if (rest.rows() != kNodeCount || rest.cols() != 3)
    raise(ErrorCode::InvalidSensorIndex, "rest positions must be 321 x 3");
  if (cfg.azimuth_position < 0 || cfg.azimuth_position >= kRingNodes)
    raise(ErrorCode::InvalidSensorIndex, "sensor azimuth position " + std::to_string(cfg.azimuth_position));
  for (int k = 0; k < kDepthSensors; ++k) {
    const double d = cfg.depths[static_cast<std::size_t>(k)];
    if (!(d >= 0.0) || (k > 0 && !(d > cfg.depths[static_cast<std::size_t>(k - 1)])))
      raise(ErrorCode::InvalidSensorIndex, "sensor depths must be nonnegative and strictly increasing");
  }
  std::array<Index, kDepthSensors> nodes{};
  for (int k = 0; k < kDepthSensors; ++k) {
    const double target = -cfg.depths[static_cast<std::size_t>(k)];
    Index best = kApex;
    double gap = std::abs(rest(kApex, 2) - target);
    for (Index l = 1; l <= kLayers; ++l) {
      const Index n = node_index(l, cfg.azimuth_position);
      const double g = std::abs(rest(n, 2) - target);
      if (g < gap) best = n, gap = g;
    }
    nodes[static_cast<std::size_t>(k)] = best;
  }
  return nodes;
}

SensorReadings sensor_extract(const CageDeformation& def, const MooringLoads& loads, const SensorConfig& cfg,
                              const Matrix& rest) {
  if (def.displacements.rows() != kNodeCount || def.displacements.cols() != 3)
    raise(ErrorCode::InvalidSensorIndex, "deformation must be 321 x 3");
  SensorReadings r{Vector(kShackles), Vector(kDepthSensors)};
  for (int k = 0; k < kShackles; ++k) {
    const int line = cfg.shackles[static_cast<std::size_t>(k)];
    if (line < 0 || line >= loads.tensions.size())
      raise(ErrorCode::InvalidSensorIndex, "shackle " + std::to_string(k + 1) + " names line " + std::to_string(line));
    r.shackle_loads(k) = loads.tensions(line);
  }
  const auto nodes = depth_sensor_nodes(rest, cfg);
  for (int k = 0; k < kDepthSensors; ++k) r.depth_displacements(k) = def.displacements(nodes[static_cast<std::size_t>(k)], 2);
  return r;
}

namespace {

double distort(double y, double dir_factor, const DiscrepancyTerms& t, Rng& rng) {
  double v = y * (1.0 + t.inflation + t.direction_bias * dir_factor) + t.quadratic * std::abs(y) * y;
  const double sd = t.noise_rel * std::abs(v) + t.noise_abs;
  const double z = standard_normal(rng);
  return v + sd * z;
}

}  // namespace

HighFidelity synth_high_fidelity(const CageDeformation& def, const MooringLoads& loads, const SeaState& sea,
                                 const DiscrepancyParams& disc, std::uint64_t seed) {
  auto rng = make_rng(seed, 0x4846);
  const double dir_factor = std::cos(deg2rad(sea.current_dir - disc.bias_direction_deg));
  HighFidelity hf{def, loads};
  Matrix& D = hf.deformation.displacements;
  for (Index i = 0; i < D.rows(); ++i)
    for (Index c = 0; c < D.cols(); ++c) D(i, c) = distort(D(i, c), dir_factor, disc.displacement, rng);
  for (Index j = 0; j < hf.loads.tensions.size(); ++j)
    hf.loads.tensions(j) = std::max(0.0, distort(hf.loads.tensions(j), dir_factor, disc.load, rng));
  return hf;
}

Matrix scenario_series(const Matrix& displacements, const SeaState& sea, const SeriesParams& series,
                       std::uint64_t seed) {
  if (series.steps < 1) raise(ErrorCode::InvalidParams, "series needs at least one step");
  const Index N = displacements.rows();
  Vector eq(3 * N);
  for (Index i = 0; i < N; ++i) eq.segment<3>(3 * i) = displacements.row(i).transpose();

  auto rng = make_rng(seed, 0x7473);
  const double phase = 2.0 * kPi * uniform01(rng);
  const double amp = series.oscillation * std::min(sea.sig_wave_height, 3.0) / 3.0;
  const auto transient = static_cast<int>(std::floor(series.transient_fraction * series.steps));
  Matrix S(3 * N, series.steps);
  for (int t = 0; t < series.steps; ++t) {
    double f;
    if (t < transient)
      f = static_cast<double>(t + 1) / static_cast<double>(transient + 1);
    else
      f = 1.0 + amp * std::sin(0.5 * kPi * t + phase);
    S.col(t) = f * eq;
  }
  return S;
}

}  // namespace netcage::sim
