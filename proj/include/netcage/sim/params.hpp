#pragma once

#include <array>
#include <string>

#include "netcage/sim/topology.hpp"

namespace netcage::sim {

inline constexpr int kMooringLines = 12;
inline constexpr int kShackles = 5;
inline constexpr int kDepthSensors = 3;

// Units: m, s, kN, t/m^3 (so 1/2 rho A U^2 comes out in kN).
struct NetParams {
  double water_density = 1.025;
  double solidity = 0.21;
  double cd_normal = 1.2;       // multiplied by solidity for the panel normal load
  double cd_tangential = 0.1;   // multiplied by solidity for the in-plane load
  double ring_axial_stiffness = 2000.0;      // EA, kN
  double vertical_axial_stiffness = 2000.0;  // EA, kN
  double ring_pretension = 5.0;              // kN
  double vertical_pretension = 15.0;         // kN, also used for apex lines
  double wave_drift = 0.03;     // fraction of orbital-velocity drag kept as mean drift
};

struct MooringParams {
  double pretension = 80.0;  // kN per line
  double stiffness = 13.0;   // kN/m per line
  double azimuth_offset_deg = 0.0;  // line j sits at offset + 30 j
};

struct SolverParams {
  double tolerance = 1e-10;  // relative force residual
  int max_iterations = 60;
  int max_load_steps = 64;
};

/// Map from simulated ("low-fidelity") to synthetic field ("high-fidelity")
/// responses: y_hf = y (1 + inflation + bias cos(dir - bias_dir)) + quadratic |y| y + noise
/// with noise std = noise_rel |y_hf| + noise_abs.
struct DiscrepancyTerms {
  double inflation = 0.0;
  double direction_bias = 0.0;
  double quadratic = 0.0;
  double noise_rel = 0.0;
  double noise_abs = 0.0;
};

struct DiscrepancyParams {
  double bias_direction_deg = 200.0;
  DiscrepancyTerms displacement{0.25, 0.08, 0.03, 0.01, 0.003};
  DiscrepancyTerms load{0.15, 0.06, 2e-4, 0.005, 0.2};

  static DiscrepancyParams none() { return {0.0, {}, {}}; }
};

struct SeriesParams {
  int steps = 10;
  double transient_fraction = 0.2;
  double oscillation = 0.02;  // relative amplitude at Hs = 3 m
};

struct SensorConfig {
  std::array<int, kShackles> shackles{0, 1, 2, 3, 4};
  std::array<double, kDepthSensors> depths{7.0, 15.0, 31.0};
  int azimuth_position = 0;  // ring position carrying the depth sensors
};

struct CageParams {
  int version = 1;
  GeometryParams geometry;
  NetParams net;
  MooringParams mooring;
  SolverParams solver;
  DiscrepancyParams discrepancy;
  SeriesParams series;
  SensorConfig sensors;

  /// CRC32 (hex) of the canonical JSON form.
  std::string hash() const;
};

CageParams load_params(const std::string& path);
void save_params(const CageParams& params, const std::string& path);
std::string params_to_json(const CageParams& params);
CageParams params_from_json(const std::string& text);

/// Default parameter file shipped with the sources.
std::string default_params_path();

}  // namespace netcage::sim
