#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netcage/gcn/gcn.hpp"
#include "netcage/gp/gp.hpp"
#include "netcage/nargp/nargp.hpp"
#include "netcage/pca/pca.hpp"
#include "netcage/sim/dataset.hpp"

namespace netcage::twin {

inline constexpr std::uint32_t kBundleVersion = 1;
inline constexpr std::array<char, 8> kBundleMagic{'N', 'C', 'T', 'W', 'I', 'N', 0, 0};

enum class DeformationMode { GpPca, Gcn };

std::string to_string(DeformationMode mode);
DeformationMode parse_mode(const std::string& text);  // "gp-pca" | "gcn"

struct TrainConfig {
  std::uint64_t seed = 0;
  DeformationMode mode = DeformationMode::GpPca;
  double pca_threshold = 0.93;
  Index lf_cap = 250;                 // LF scenarios per low-fidelity GP
  double hf_depth_fraction = 0.02;    // share of HF records used per depth model
  double hf_shackle_fraction = 0.015;
  Index hf_min_records = 4;
  gp::FitOptions lf_fit;
  gp::FitOptions hf_fit;
  Index gcn_scenarios = 100;  // LF scenarios used to train the GCN
  gcn::GcnConfig gcn;
};

/// Sealed set of trained models. Immutable once built or loaded.
struct TwinBundle {
  std::uint32_t version = kBundleVersion;
  std::string id;          // CRC-32 of the model sections
  std::string param_hash;  // cage parameters behind the training data
  std::uint64_t lf_seed = 0;
  std::uint64_t hf_seed = 0;
  std::uint64_t train_seed = 0;
  DeformationMode mode = DeformationMode::GpPca;

  std::vector<gp::GpModel> lf_load_models;      // one per mooring line
  std::vector<gp::GpModel> lf_coeff_models;     // one per retained component
  std::vector<gp::GpModel> lf_depth_models;     // one per depth sensor
  std::vector<nargp::NargpModel> hf_load_models;   // one per shackle
  std::vector<nargp::NargpModel> hf_depth_models;  // one per depth sensor
  pca::PcaBasis basis;
  std::optional<gcn::GcnModel> gcn;
  sim::CageTopology topology;
  sim::SensorConfig sensors;
  std::array<Index, sim::kDepthSensors> depth_nodes{};
  std::vector<std::vector<Index>> hf_rows;  // HF records each level-2 model saw, per quantity
};

/// Runs the low-fidelity stage (PCA, load, coefficient and depth GPs) and the
/// per-sensor autoregressive stage. Stage failures are rethrown with the
/// stage name prefixed.
TwinBundle train_bundle(const sim::LfDataset& lf, const sim::HfDataset& hf, const sim::CageParams& params,
                        const TrainConfig& config = {});

/// Refits the level-2 models only, keeping the low-fidelity models.
TwinBundle retrain_high_fidelity(const TwinBundle& base, const sim::HfDataset& hf, const sim::SensorConfig& sensors,
                                 const TrainConfig& config);

struct Provenance {
  std::string bundle_id;
  DeformationMode mode = DeformationMode::GpPca;
  double latency_ms = 0.0;
};

struct TwinSnapshot {
  std::string timestamp;
  sim::SeaState sea;
  Vector shackle_loads;  // kN, corrected
  Vector shackle_std;
  Vector depth_displacements;  // m, corrected
  Vector depth_std;
  Vector lf_shackle_loads;  // low-fidelity posterior means
  Vector lf_depth_displacements;
  Matrix deformation;  // N x 3, m
  Provenance provenance;
};

struct PredictOptions {
  std::optional<DeformationMode> mode;  // defaults to the bundle's
  bool deformation = true;
};

/// Full two-stage prediction for one sea state.
TwinSnapshot pipeline_predict(const TwinBundle& bundle, const sim::SeaState& sea, const PredictOptions& options = {});

/// Deformation field only, N x 3.
Matrix predict_deformation(const TwinBundle& bundle, const sim::SeaState& sea, DeformationMode mode);

std::string serialize_bundle(const TwinBundle& bundle);
TwinBundle deserialize_bundle(std::string_view bytes);
void save_bundle(const TwinBundle& bundle, const std::string& path);
TwinBundle load_bundle(const std::string& path);

/// Quantity names in snapshot order: shackle1..5, depth1..3.
std::vector<std::string> quantity_names();

}  // namespace netcage::twin
