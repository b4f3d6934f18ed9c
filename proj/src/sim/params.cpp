#include "netcage/sim/params.hpp"

#include <cstdio>
#include <json.hpp>

#include "netcage/core/archive.hpp"
#include "netcage/core/error.hpp"

namespace netcage::sim {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GeometryParams, diameter, cyl_depth, bottom_depth, cylinder_layers)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(NetParams, water_density, solidity, cd_normal, cd_tangential,
                                                ring_axial_stiffness, vertical_axial_stiffness, ring_pretension,
                                                vertical_pretension, wave_drift)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MooringParams, pretension, stiffness, azimuth_offset_deg)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SolverParams, tolerance, max_iterations, max_load_steps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DiscrepancyTerms, inflation, direction_bias, quadratic, noise_rel,
                                                noise_abs)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DiscrepancyParams, bias_direction_deg, displacement, load)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SeriesParams, steps, transient_fraction, oscillation)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SensorConfig, shackles, depths, azimuth_position)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CageParams, version, geometry, net, mooring, solver, discrepancy,
                                                series, sensors)

std::string params_to_json(const CageParams& params) { return nlohmann::json(params).dump(2) + "\n"; }

CageParams params_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    CageParams p = j.get<CageParams>();
    if (p.version != 1) raise(ErrorCode::VersionUnsupported, "parameter file version " + std::to_string(p.version));
    return p;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::SchemaViolation, std::string("parameter file: ") + e.what());
  }
}

CageParams load_params(const std::string& path) { return params_from_json(read_file(path)); }

void save_params(const CageParams& params, const std::string& path) {
  write_file_atomic(path, params_to_json(params));
}

std::string CageParams::hash() const {
  const std::string canon = nlohmann::json(*this).dump();
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", crc32_of(canon));
  return buf;
}

std::string default_params_path() { return std::string(NETCAGE_SOURCE_DIR) + "/config/cage_params.json"; }

}  // namespace netcage::sim
