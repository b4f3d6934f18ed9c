#include "netcage/twin/bundle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <tuple>

#include <json.hpp>

#include "netcage/core/angles.hpp"
#include "netcage/core/error.hpp"
#include "netcage/core/log.hpp"
#include "netcage/core/rng.hpp"

namespace netcage::twin {

std::string to_string(DeformationMode mode) { return mode == DeformationMode::Gcn ? "gcn" : "gp-pca"; }

DeformationMode parse_mode(const std::string& text) {
  if (text == "gp-pca") return DeformationMode::GpPca;
  if (text == "gcn") return DeformationMode::Gcn;
  raise(ErrorCode::InvalidArgument, "unknown deformation mode '" + text + "' (gp-pca or gcn)");
}

std::vector<std::string> quantity_names() {
  std::vector<std::string> q;
  for (int k = 1; k <= sim::kShackles; ++k) q.push_back("shackle" + std::to_string(k));
  for (int k = 1; k <= sim::kDepthSensors; ++k) q.push_back("depth" + std::to_string(k));
  return q;
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    raise(e.code(), std::string("stage ") + name + ": " + e.what());
  }
}

Matrix features_of(const std::vector<sim::SeaState>& states, const std::vector<Index>& rows) {
  Matrix X(static_cast<Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& s = states[static_cast<std::size_t>(rows[i])];
    X.row(static_cast<Index>(i)) = encode_current(s.current_speed, s.current_dir).transpose();
  }
  return X;
}

std::vector<Index> seeded_subset(Index n, Index count, std::uint64_t seed, std::uint64_t stream) {
  auto rng = make_rng(seed, stream);
  auto perm = random_permutation<Index>(n, rng);
  perm.resize(static_cast<std::size_t>(std::min(count, n)));
  std::sort(perm.begin(), perm.end());
  return perm;
}

gp::GpModel fit_lf(const Matrix& X, const Vector& y, const gp::FitOptions& base, std::uint64_t seed) {
  gp::FitOptions o = base;
  o.seed = seed;
  return gp::fit_gp(X, y, gp::KernelKind::SeArd, o);
}

// HF rows for one quantity: the first records of a seeded order that carry a
// finite value, `fraction` of what is available but at least `minimum`.
std::vector<Index> pick_hf_rows(const Vector& values, double fraction, Index minimum, std::uint64_t seed,
                                std::uint64_t stream, const std::string& quantity) {
  std::vector<Index> finite;
  for (Index r = 0; r < values.size(); ++r)
    if (std::isfinite(values(r))) finite.push_back(r);
  const auto avail = static_cast<Index>(finite.size());
  if (avail < minimum)
    raise(ErrorCode::InsufficientHfData, quantity + " has " + std::to_string(avail) + " record(s), needs " +
                                             std::to_string(minimum));
  const Index want =
      std::clamp(static_cast<Index>(std::ceil(fraction * static_cast<double>(avail))), minimum, avail);
  auto rng = make_rng(seed, stream);
  const auto perm = random_permutation<Index>(avail, rng);
  std::vector<Index> rows;
  for (Index i = 0; i < want; ++i) rows.push_back(finite[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
  std::sort(rows.begin(), rows.end());
  return rows;
}

nargp::NargpModel fit_level2(const gp::GpModel& lowest, const Matrix& X, const Vector& y,
                             const gp::FitOptions& base, std::uint64_t seed) {
  gp::FidelityDataset d;
  d.level = 2;
  d.inputs = X;
  d.outputs = y;
  nargp::NargpConfig cfg;
  cfg.fit = base;
  cfg.fit.seed = seed;
  cfg.surrogate_lower_level = true;
  return nargp::fit_nargp_on(lowest, std::span(&d, 1), cfg);
}

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

void fit_high_fidelity(TwinBundle& b, const sim::HfDataset& hf, const TrainConfig& cfg) {
  if (hf.size() < cfg.hf_min_records)
    raise(ErrorCode::InsufficientHfData, "HF dataset has " + std::to_string(hf.size()) + " record(s)");
  const auto names = quantity_names();
  b.hf_rows.assign(names.size(), {});
  b.hf_load_models.clear();
  b.hf_depth_models.clear();
  stage("hf-loads", [&] {
    for (int k = 0; k < sim::kShackles; ++k) {
      const auto K = static_cast<std::size_t>(k);
      auto rows = pick_hf_rows(hf.shackles.col(k), cfg.hf_shackle_fraction, cfg.hf_min_records, cfg.seed,
                               0x5300 + K, names[K]);
      Vector y(static_cast<Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Index>(i)) = hf.shackles(rows[i], k);
      const auto line = static_cast<std::size_t>(b.sensors.shackles[K]);
      b.hf_load_models.push_back(
          fit_level2(b.lf_load_models[line], features_of(hf.states, rows), y, cfg.hf_fit, mix_seed(cfg.seed, 0x2000 + K)));
      b.hf_rows[K] = std::move(rows);
    }
    return 0;
  });
  stage("hf-depths", [&] {
    for (int k = 0; k < sim::kDepthSensors; ++k) {
      const auto K = static_cast<std::size_t>(k);
      const auto q = static_cast<std::size_t>(sim::kShackles + k);
      auto rows = pick_hf_rows(hf.depths.col(k), cfg.hf_depth_fraction, cfg.hf_min_records, cfg.seed, 0x5400 + K,
                               names[q]);
      Vector y(static_cast<Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Index>(i)) = hf.depths(rows[i], k);
      b.hf_depth_models.push_back(
          fit_level2(b.lf_depth_models[K], features_of(hf.states, rows), y, cfg.hf_fit, mix_seed(cfg.seed, 0x2100 + K)));
      b.hf_rows[q] = std::move(rows);
    }
    return 0;
  });
}

std::string model_sections_digest(const Container& c) {
  std::string all;
  for (const auto& [tag, payload] : c.sections) {
    if (tag == "META") continue;
    all += tag;
    all += payload;
  }
  return hex32(crc32_of(all));
}

Container build_container(const TwinBundle& b);

void seal(TwinBundle& b) { b.id = model_sections_digest(build_container(b)); }

}  // namespace

TwinBundle train_bundle(const sim::LfDataset& lf, const sim::HfDataset& hf, const sim::CageParams& params,
                        const TrainConfig& cfg) {
  const std::string hash = params.hash();
  if (lf.param_hash != hash)
    raise(ErrorCode::InvalidParams, "LF dataset was generated with parameters " + lf.param_hash + ", not " + hash);
  if (hf.param_hash != hash)
    raise(ErrorCode::InvalidParams, "HF dataset was generated with parameters " + hf.param_hash + ", not " + hash);
  if (lf.size() < 2) raise(ErrorCode::EmptyDataset, "LF dataset needs at least two scenarios");

  TwinBundle b;
  b.param_hash = hash;
  b.lf_seed = lf.seed;
  b.hf_seed = hf.seed;
  b.train_seed = cfg.seed;
  b.mode = cfg.mode;
  b.topology = sim::build_topology(params.geometry);
  b.sensors = params.sensors;
  b.depth_nodes = sim::depth_sensor_nodes(b.topology.rest_positions, b.sensors);
  for (int k = 0; k < sim::kShackles; ++k) {
    const int line = b.sensors.shackles[static_cast<std::size_t>(k)];
    if (line < 0 || line >= sim::kMooringLines) raise(ErrorCode::InvalidSensorIndex, "shackle on line " + std::to_string(line));
  }

  // Per-scenario mean coefficients; column r belongs to LF row r.
  Matrix Bbar;
  std::tie(b.basis, Bbar) = stage("pca", [&] {
    std::vector<Matrix> series;
    series.reserve(static_cast<std::size_t>(lf.size()));
    for (Index r = 0; r < lf.size(); ++r) series.push_back(sim::lf_series(lf, r, params.series));
    const auto M = pca::assemble_data_matrix(series, params.series.transient_fraction);
    auto basis = pca::fit_pca(M, cfg.pca_threshold);
    Matrix means = pca::mean_coefficients(pca::project(M.values, basis), M.scenario_index);
    return std::make_pair(std::move(basis), std::move(means));
  });
  log::info("pca: retained " + std::to_string(b.basis.retained) + " of " + std::to_string(b.basis.total_components()));

  const auto rows = seeded_subset(lf.size(), cfg.lf_cap, cfg.seed, 0x4c46);
  const Matrix X = features_of(lf.states, rows);
  auto column = [&](auto&& value) {
    Vector y(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Index>(i)) = value(rows[i]);
    return y;
  };

  stage("lf-loads", [&] {
    for (int j = 0; j < sim::kMooringLines; ++j) {
      b.lf_load_models.push_back(fit_lf(X, column([&](Index r) { return lf.tensions(r, j); }), cfg.lf_fit,
                                        mix_seed(cfg.seed, 0x1000 + static_cast<std::uint64_t>(j))));
    }
    return 0;
  });
  stage("lf-coefficients", [&] {
    for (Index j = 0; j < b.basis.retained; ++j) {
      const Vector y = column([&](Index r) { return Bbar(j, r); });
      b.lf_coeff_models.push_back(fit_lf(X, y, cfg.lf_fit, mix_seed(cfg.seed, 0x1100 + static_cast<std::uint64_t>(j))));
    }
    return 0;
  });
  stage("lf-depths", [&] {
    for (int k = 0; k < sim::kDepthSensors; ++k) {
      const Index col = 3 * b.depth_nodes[static_cast<std::size_t>(k)] + 2;
      b.lf_depth_models.push_back(fit_lf(X, column([&](Index r) { return lf.displacements(r, col); }), cfg.lf_fit,
                                         mix_seed(cfg.seed, 0x1200 + static_cast<std::uint64_t>(k))));
    }
    return 0;
  });

  fit_high_fidelity(b, hf, cfg);

  if (cfg.mode == DeformationMode::Gcn) {
    b.gcn = stage("gcn", [&] {
      const auto gr = seeded_subset(lf.size(), cfg.gcn_scenarios, cfg.seed, 0x6763);
      std::vector<sim::CageDeformation> data;
      for (Index r : gr) data.push_back({lf.deformation(r), lf.states[static_cast<std::size_t>(r)]});
      auto gc = cfg.gcn;
      gc.seed = mix_seed(cfg.seed, 0x3000);
      return gcn::train_gcn(b.topology, data, gc).model;
    });
  }
  seal(b);
  return b;
}

TwinBundle retrain_high_fidelity(const TwinBundle& base, const sim::HfDataset& hf, const sim::SensorConfig& sensors,
                                 const TrainConfig& cfg) {
  if (hf.param_hash != base.param_hash)
    raise(ErrorCode::InvalidParams, "HF dataset parameters " + hf.param_hash + " differ from the bundle's");
  TwinBundle b = base;
  b.sensors = sensors;
  b.hf_seed = hf.seed;
  b.train_seed = cfg.seed;
  const auto nodes = sim::depth_sensor_nodes(b.topology.rest_positions, sensors);
  if (nodes != b.depth_nodes)
    raise(ErrorCode::ModelMissing, "moved depth sensors need low-fidelity depth models; retrain the bundle");
  fit_high_fidelity(b, hf, cfg);
  seal(b);
  return b;
}

TwinSnapshot pipeline_predict(const TwinBundle& b, const sim::SeaState& sea, const PredictOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (b.hf_load_models.size() != sim::kShackles || b.hf_depth_models.size() != sim::kDepthSensors ||
      b.lf_load_models.size() != sim::kMooringLines || b.lf_depth_models.size() != sim::kDepthSensors)
    raise(ErrorCode::ModelMissing, "bundle is incomplete");
  TwinSnapshot s;
  s.sea = sea;
  const Matrix x = encode_current(sea.current_speed, sea.current_dir).transpose();
  const auto names = quantity_names();
  auto checked = [&](double v, const std::string& what) {
    if (!std::isfinite(v)) raise(ErrorCode::NonFiniteOutput, what + " is not finite");
    return v;
  };
  s.shackle_loads.resize(sim::kShackles);
  s.shackle_std.resize(sim::kShackles);
  s.lf_shackle_loads.resize(sim::kShackles);
  for (int k = 0; k < sim::kShackles; ++k) {
    const auto K = static_cast<std::size_t>(k);
    const auto& name = names[K];
    const auto line = static_cast<std::size_t>(b.sensors.shackles[K]);
    s.lf_shackle_loads(k) = checked(gp::predict(b.lf_load_models[line], x).mean(0), name + " LF mean");
    const auto p = nargp::predict_nargp(b.hf_load_models[K], x);
    s.shackle_loads(k) = checked(p.mean(0), name + " mean");
    s.shackle_std(k) = checked(std::sqrt(std::max(0.0, p.variance(0))), name + " std");
  }
  s.depth_displacements.resize(sim::kDepthSensors);
  s.depth_std.resize(sim::kDepthSensors);
  s.lf_depth_displacements.resize(sim::kDepthSensors);
  for (int k = 0; k < sim::kDepthSensors; ++k) {
    const auto K = static_cast<std::size_t>(k);
    const auto& name = names[static_cast<std::size_t>(sim::kShackles + k)];
    s.lf_depth_displacements(k) = checked(gp::predict(b.lf_depth_models[K], x).mean(0), name + " LF mean");
    const auto p = nargp::predict_nargp(b.hf_depth_models[K], x);
    s.depth_displacements(k) = checked(p.mean(0), name + " mean");
    s.depth_std(k) = checked(std::sqrt(std::max(0.0, p.variance(0))), name + " std");
  }
  const DeformationMode mode = options.mode.value_or(b.mode);
  if (options.deformation) {
    s.deformation = predict_deformation(b, sea, mode);
    if (!s.deformation.allFinite()) raise(ErrorCode::NonFiniteOutput, "deformation field is not finite");
  }
  s.provenance.bundle_id = b.id;
  s.provenance.mode = mode;
  s.provenance.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

Matrix predict_deformation(const TwinBundle& b, const sim::SeaState& sea, DeformationMode mode) {
  if (mode == DeformationMode::Gcn) {
    if (!b.gcn) raise(ErrorCode::ModelMissing, "bundle has no GCN model");
    return gcn::gcn_predict(*b.gcn, sea);
  }
  if (static_cast<Index>(b.lf_coeff_models.size()) != b.basis.retained)
    raise(ErrorCode::ModelMissing, "coefficient models do not cover the retained components");
  const Matrix x = encode_current(sea.current_speed, sea.current_dir).transpose();
  Vector c(b.basis.retained);
  for (Index j = 0; j < c.size(); ++j) c(j) = gp::predict(b.lf_coeff_models[static_cast<std::size_t>(j)], x).mean(0);
  return pca::unflatten_nodes(pca::reconstruct(c, b.basis));
}

namespace {

std::string pack_models(const std::vector<gp::GpModel>& models) {
  ByteWriter w;
  w.put<std::uint32_t>(static_cast<std::uint32_t>(models.size()));
  for (const auto& m : models) gp::write_gp(w, m);
  return w.bytes();
}

std::vector<gp::GpModel> unpack_models(std::string_view bytes) {
  ByteReader r(bytes);
  const auto n = r.get<std::uint32_t>();
  if (n > 4096) raise(ErrorCode::CorruptBundle, "implausible model count");
  std::vector<gp::GpModel> out;
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(gp::read_gp(r));
  if (!r.done()) raise(ErrorCode::CorruptBundle, "trailing bytes in model section");
  return out;
}

bool same_model(const gp::GpModel& a, const gp::GpModel& b) {
  return a.training_inputs.rows() == b.training_inputs.rows() && a.alpha.size() == b.alpha.size() &&
         (a.training_inputs.array() == b.training_inputs.array()).all() && (a.alpha.array() == b.alpha.array()).all();
}

std::string pack_upper(const std::vector<nargp::NargpModel>& models, const std::vector<gp::GpModel>& lower,
                       const std::vector<Index>& refs) {
  ByteWriter w;
  w.put<std::uint32_t>(static_cast<std::uint32_t>(models.size()));
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto ref = static_cast<std::size_t>(refs[k]);
    if (models[k].levels.empty() || ref >= lower.size() || !same_model(models[k].levels[0], lower[ref]))
      raise(ErrorCode::ModelMissing, "level-2 model " + std::to_string(k + 1) + " does not sit on a bundled model");
    w.put<std::int64_t>(refs[k]);
    nargp::write_upper_levels(w, models[k]);
  }
  return w.bytes();
}

std::vector<nargp::NargpModel> unpack_upper(std::string_view bytes, const std::vector<gp::GpModel>& lower) {
  ByteReader r(bytes);
  const auto n = r.get<std::uint32_t>();
  if (n > 64) raise(ErrorCode::CorruptBundle, "implausible model count");
  std::vector<nargp::NargpModel> out;
  for (std::uint32_t k = 0; k < n; ++k) {
    const auto ref = r.get<std::int64_t>();
    if (ref < 0 || ref >= static_cast<std::int64_t>(lower.size()))
      raise(ErrorCode::CorruptBundle, "level-2 model references missing model " + std::to_string(ref));
    out.push_back(nargp::read_upper_levels(r, lower[static_cast<std::size_t>(ref)]));
  }
  if (!r.done()) raise(ErrorCode::CorruptBundle, "trailing bytes in level-2 section");
  return out;
}

Container build_container(const TwinBundle& b) {
  Container c;
  c.magic = kBundleMagic;
  c.version = b.version;

  nlohmann::json meta{{"format", "netcage-twin"},
                      {"version", b.version},
                      {"id", b.id},
                      {"param_hash", b.param_hash},
                      {"lf_seed", b.lf_seed},
                      {"hf_seed", b.hf_seed},
                      {"train_seed", b.train_seed},
                      {"mode", to_string(b.mode)},
                      {"pca_retained", b.basis.retained},
                      {"pca_threshold", b.basis.threshold}};
  c.add("META", meta.dump());

  ByteWriter topo;
  topo.put<std::int64_t>(b.topology.node_count);
  std::vector<Index> flat;
  for (const auto& [i, j] : b.topology.edges) flat.push_back(i), flat.push_back(j);
  topo.put_indices(flat);
  topo.put_matrix(b.topology.rest_positions);
  c.add("TOPO", topo.bytes());

  ByteWriter basis;
  pca::write_pca(basis, b.basis);
  c.add("PCAB", basis.bytes());
  c.add("LFLD", pack_models(b.lf_load_models));
  c.add("LFCF", pack_models(b.lf_coeff_models));
  c.add("LFDP", pack_models(b.lf_depth_models));

  std::vector<Index> load_refs, depth_refs;
  for (int k = 0; k < sim::kShackles; ++k) load_refs.push_back(b.sensors.shackles[static_cast<std::size_t>(k)]);
  for (int k = 0; k < sim::kDepthSensors; ++k) depth_refs.push_back(k);
  c.add("HFLD", pack_upper(b.hf_load_models, b.lf_load_models, load_refs));
  c.add("HFDP", pack_upper(b.hf_depth_models, b.lf_depth_models, depth_refs));
  if (b.gcn) {
    ByteWriter g;
    gcn::write_gcn(g, *b.gcn);
    c.add("GCNW", g.bytes());
  }

  ByteWriter sens;
  for (int line : b.sensors.shackles) sens.put<std::int64_t>(line);
  for (double d : b.sensors.depths) sens.put<double>(d);
  sens.put<std::int64_t>(b.sensors.azimuth_position);
  for (Index n : b.depth_nodes) sens.put<std::int64_t>(n);
  sens.put<std::uint32_t>(static_cast<std::uint32_t>(b.hf_rows.size()));
  for (const auto& rows : b.hf_rows) sens.put_indices(rows);
  c.add("SENS", sens.bytes());
  return c;
}

}  // namespace

std::string serialize_bundle(const TwinBundle& b) { return serialize(build_container(b)); }

TwinBundle deserialize_bundle(std::string_view bytes) {
  const Container c = deserialize(bytes, kBundleMagic, kBundleVersion);
  TwinBundle b;
  b.version = c.version;
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(c.section("META"));
    b.id = meta.at("id").get<std::string>();
    b.param_hash = meta.at("param_hash").get<std::string>();
    b.lf_seed = meta.at("lf_seed").get<std::uint64_t>();
    b.hf_seed = meta.at("hf_seed").get<std::uint64_t>();
    b.train_seed = meta.at("train_seed").get<std::uint64_t>();
    b.mode = parse_mode(meta.at("mode").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::CorruptBundle, std::string("bundle metadata: ") + e.what());
  }
  if (model_sections_digest(c) != b.id) raise(ErrorCode::CorruptBundle, "bundle id does not match its contents");

  {
    ByteReader r(c.section("TOPO"));
    b.topology.node_count = static_cast<Index>(r.get<std::int64_t>());
    const auto flat = r.get_indices();
    b.topology.rest_positions = r.get_matrix();
    const Index n = b.topology.node_count;
    if (n < 1 || flat.size() % 2 != 0 || b.topology.rest_positions.rows() != n)
      raise(ErrorCode::CorruptBundle, "topology section malformed");
    b.topology.adjacency = Matrix::Zero(n, n);
    for (std::size_t e = 0; e < flat.size(); e += 2) {
      const Index i = flat[e], j = flat[e + 1];
      if (i < 0 || j < 0 || i >= n || j >= n) raise(ErrorCode::CorruptBundle, "edge index out of range");
      b.topology.edges.emplace_back(i, j);
      b.topology.adjacency(i, j) = b.topology.adjacency(j, i) = 1.0;
    }
  }
  {
    ByteReader r(c.section("PCAB"));
    b.basis = pca::read_pca(r);
  }
  b.lf_load_models = unpack_models(c.section("LFLD"));
  b.lf_coeff_models = unpack_models(c.section("LFCF"));
  b.lf_depth_models = unpack_models(c.section("LFDP"));
  b.hf_load_models = unpack_upper(c.section("HFLD"), b.lf_load_models);
  b.hf_depth_models = unpack_upper(c.section("HFDP"), b.lf_depth_models);
  if (c.has("GCNW")) {
    ByteReader r(c.section("GCNW"));
    b.gcn = gcn::read_gcn(r);
  }
  {
    ByteReader r(c.section("SENS"));
    for (int& line : b.sensors.shackles) line = static_cast<int>(r.get<std::int64_t>());
    for (double& d : b.sensors.depths) d = r.get<double>();
    b.sensors.azimuth_position = static_cast<int>(r.get<std::int64_t>());
    for (Index& n : b.depth_nodes) n = static_cast<Index>(r.get<std::int64_t>());
    const auto q = r.get<std::uint32_t>();
    if (q > 64) raise(ErrorCode::CorruptBundle, "implausible quantity count");
    for (std::uint32_t i = 0; i < q; ++i) b.hf_rows.push_back(r.get_indices());
  }
  if (b.lf_load_models.size() != sim::kMooringLines || b.lf_depth_models.size() != sim::kDepthSensors ||
      b.hf_load_models.size() != sim::kShackles || b.hf_depth_models.size() != sim::kDepthSensors ||
      static_cast<Index>(b.lf_coeff_models.size()) != b.basis.retained)
    raise(ErrorCode::CorruptBundle, "bundle model counts are inconsistent");
  for (int k = 0; k < sim::kShackles; ++k)
    if (!same_model(b.hf_load_models[static_cast<std::size_t>(k)].levels[0],
                    b.lf_load_models[static_cast<std::size_t>(b.sensors.shackles[static_cast<std::size_t>(k)])]))
      raise(ErrorCode::CorruptBundle, "shackle model does not sit on its mooring-line model");
  if (b.mode == DeformationMode::Gcn && !b.gcn) raise(ErrorCode::CorruptBundle, "GCN mode without GCN weights");
  return b;
}

void save_bundle(const TwinBundle& b, const std::string& path) { write_file_atomic(path, serialize_bundle(b)); }

TwinBundle load_bundle(const std::string& path) { return deserialize_bundle(read_file(path)); }

}  // namespace netcage::twin
