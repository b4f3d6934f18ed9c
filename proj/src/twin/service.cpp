#include "netcage/twin/service.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>

#include <json.hpp>

#include "netcage/core/error.hpp"
#include "netcage/core/log.hpp"
#include "netcage/core/table.hpp"

namespace netcage::twin {

TwinService::TwinService(std::shared_ptr<const TwinBundle> bundle) : bundle_(std::move(bundle)) {
  if (!bundle_) raise(ErrorCode::ModelMissing, "service started without a bundle");
}

std::shared_ptr<const TwinBundle> TwinService::bundle() const {
  std::lock_guard lock(mu_);
  return bundle_;
}

void TwinService::replace(std::shared_ptr<const TwinBundle> bundle) {
  if (!bundle) raise(ErrorCode::ModelMissing, "cannot swap in an empty bundle");
  std::lock_guard lock(mu_);
  bundle_ = std::move(bundle);
}

TwinSnapshot TwinService::predict(const MetoceanRecord& record, const PredictOptions& options) const {
  const auto b = bundle();
  auto s = pipeline_predict(*b, record.sea, options);
  s.timestamp = record.timestamp;
  return s;
}

namespace {

std::vector<double> to_list(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_list(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

std::string snapshot_to_json(const TwinSnapshot& s, bool inline_deformation, const std::string& deformation_file) {
  nlohmann::json j{{"ts", s.timestamp},
                   {"cs", s.sea.current_speed},
                   {"cd", s.sea.current_dir},
                   {"hs", s.sea.sig_wave_height},
                   {"tp", s.sea.peak_period},
                   {"wd", s.sea.wave_dir},
                   {"shackle_loads", to_list(s.shackle_loads)},
                   {"shackle_std", to_list(s.shackle_std)},
                   {"depth_displacements", to_list(s.depth_displacements)},
                   {"depth_std", to_list(s.depth_std)},
                   {"lf_shackle_loads", to_list(s.lf_shackle_loads)},
                   {"lf_depth_displacements", to_list(s.lf_depth_displacements)},
                   {"bundle", s.provenance.bundle_id},
                   {"mode", to_string(s.provenance.mode)},
                   {"latency_ms", s.provenance.latency_ms}};
  if (inline_deformation && s.deformation.size() > 0) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < s.deformation.rows(); ++i)
      rows.push_back({s.deformation(i, 0), s.deformation(i, 1), s.deformation(i, 2)});
    j["deformation"] = std::move(rows);
  }
  if (!deformation_file.empty()) j["deformation_file"] = deformation_file;
  return j.dump();
}

TwinSnapshot snapshot_from_json(const std::string& line) {
  TwinSnapshot s;
  try {
    const auto j = nlohmann::json::parse(line);
    s.timestamp = j.at("ts").get<std::string>();
    s.sea = {j.at("cs").get<double>(), j.at("cd").get<double>(), j.at("hs").get<double>(), j.at("tp").get<double>(),
             j.at("wd").get<double>()};
    s.shackle_loads = from_list(j.at("shackle_loads"));
    s.shackle_std = from_list(j.at("shackle_std"));
    s.depth_displacements = from_list(j.at("depth_displacements"));
    s.depth_std = from_list(j.at("depth_std"));
    s.lf_shackle_loads = from_list(j.at("lf_shackle_loads"));
    s.lf_depth_displacements = from_list(j.at("lf_depth_displacements"));
    s.provenance.bundle_id = j.at("bundle").get<std::string>();
    s.provenance.mode = parse_mode(j.at("mode").get<std::string>());
    s.provenance.latency_ms = j.at("latency_ms").get<double>();
    if (j.contains("deformation")) {
      const auto& rows = j["deformation"];
      s.deformation.resize(static_cast<Index>(rows.size()), 3);
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < 3; ++c) s.deformation(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][c];
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::SchemaViolation, std::string("snapshot: ") + e.what());
  }
  if (s.shackle_loads.size() != sim::kShackles || s.depth_displacements.size() != sim::kDepthSensors)
    raise(ErrorCode::SchemaViolation, "snapshot has the wrong number of sensor values");
  return s;
}

namespace {

std::string sidecar_name(const std::string& ts) {
  std::string s = ts;
  for (char& c : s)
    if (c == ':' || c == '/' || c == ' ') c = '-';
  return s + ".csv";
}

void write_deformation(const Matrix& D, const std::filesystem::path& path) {
  Table t;
  t.add_column("node", "");
  t.add_column("ux", "m");
  t.add_column("uy", "m");
  t.add_column("uz", "m");
  t.values.resize(D.rows(), 4);
  t.values.col(0) = Vector::LinSpaced(D.rows(), 1.0, static_cast<double>(D.rows()));
  t.values.rightCols(3) = D;
  write_table(t, path);
}

}  // namespace

ServeStats serve(const TwinService& service, std::istream& in, std::ostream& out, const ServeOptions& options) {
  ServeStats st;
  std::string line;
  bool first = true;
  double last = -std::numeric_limits<double>::infinity();
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (first) {
      first = false;
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_object() && j.contains("schema")) {
        if (!j["schema"].is_string() || j["schema"].get<std::string>() != kMetoceanSchema)
          raise(ErrorCode::SchemaViolation, "unsupported stream schema " + j["schema"].dump());
        continue;
      }
    }
    MetoceanRecord rec;
    try {
      rec = parse_metocean_line(line);
    } catch (const Error& e) {
      ++st.skipped;
      log::warn("line " + std::to_string(lineno) + ": " + e.what());
      continue;
    }
    if (rec.epoch_seconds < last) {
      ++st.skipped;
      log::warn("line " + std::to_string(lineno) + ": timestamp " + rec.timestamp + " is out of order");
      continue;
    }
    last = rec.epoch_seconds;
    if (rec.out_of_range) ++st.out_of_range;
    auto s = service.predict(rec, options.predict);
    std::string sidecar;
    if (!options.deformation_dir.empty() && s.deformation.size() > 0) {
      const auto path = std::filesystem::path(options.deformation_dir) / sidecar_name(s.timestamp);
      write_deformation(s.deformation, path);
      sidecar = path.string();
    }
    out << snapshot_to_json(s, options.inline_deformation, sidecar) << '\n';
    out.flush();
    ++st.records;
    st.latency_ms.push_back(s.provenance.latency_ms);
    if (options.between_records) options.between_records();
  }
  return st;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) raise(ErrorCode::LengthMismatch, "percentile of nothing");
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const auto j = std::min(i + 1, v.size() - 1);
  return v[i] + (pos - static_cast<double>(i)) * (v[j] - v[i]);
}

}  // namespace netcage::twin
