#include "netcage/twin/metocean.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <regex>

#include <json.hpp>

#include "netcage/core/angles.hpp"
#include "netcage/core/error.hpp"
#include "netcage/core/log.hpp"

namespace netcage::twin {

bool parse_rfc3339(const std::string& text, double& epoch_seconds) {
  static const std::regex re(R"(^(\d{4})-(\d{2})-(\d{2})[Tt ](\d{2}):(\d{2}):(\d{2})(\.\d+)?([Zz]|[+-]\d{2}:\d{2})$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) return false;
  using namespace std::chrono;
  const year_month_day ymd{year{std::stoi(m[1])}, month{static_cast<unsigned>(std::stoi(m[2]))},
                           day{static_cast<unsigned>(std::stoi(m[3]))}};
  if (!ymd.ok()) return false;
  const int hh = std::stoi(m[4]), mm = std::stoi(m[5]), ss = std::stoi(m[6]);
  if (hh > 23 || mm > 59 || ss > 60) return false;
  double t = static_cast<double>(sys_days{ymd}.time_since_epoch().count()) * 86400.0 + hh * 3600.0 + mm * 60.0 + ss;
  if (m[7].matched) t += std::stod("0" + m[7].str());
  const std::string tz = m[8];
  if (tz != "Z" && tz != "z") {
    const int oh = std::stoi(tz.substr(1, 2)), om = std::stoi(tz.substr(4, 2));
    if (oh > 23 || om > 59) return false;
    const double off = oh * 3600.0 + om * 60.0;
    t += tz[0] == '+' ? -off : off;
  }
  epoch_seconds = t;
  return true;
}

namespace {

double number(const nlohmann::json& j, const char* key, bool required, double fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) raise(ErrorCode::SchemaViolation, std::string("missing field ") + key);
    return fallback;
  }
  if (!it->is_number()) raise(ErrorCode::SchemaViolation, std::string("field ") + key + " is not a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) raise(ErrorCode::SchemaViolation, std::string("field ") + key + " is not finite");
  return v;
}

}  // namespace

MetoceanRecord parse_metocean_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::SchemaViolation, std::string("not JSON: ") + e.what());
  }
  if (!j.is_object()) raise(ErrorCode::SchemaViolation, "record is not an object");
  MetoceanRecord r;
  const auto ts = j.find("ts");
  if (ts == j.end() || !ts->is_string()) raise(ErrorCode::SchemaViolation, "missing timestamp");
  r.timestamp = ts->get<std::string>();
  if (!parse_rfc3339(r.timestamp, r.epoch_seconds)) raise(ErrorCode::SchemaViolation, "bad timestamp " + r.timestamp);
  r.sea.current_speed = number(j, "cs", true, 0.0);
  r.sea.current_dir = wrap_degrees(number(j, "cd", true, 0.0));
  r.sea.sig_wave_height = number(j, "hs", false, 0.0);
  r.sea.peak_period = number(j, "tp", false, 0.0);
  r.sea.wave_dir = wrap_degrees(number(j, "wd", false, 0.0));
  if (r.sea.current_speed < 0.0 || r.sea.sig_wave_height < 0.0 || r.sea.peak_period < 0.0)
    raise(ErrorCode::SchemaViolation, "negative speed, height or period");
  r.out_of_range = !sim::in_generation_domain(r.sea);
  return r;
}

IngestResult ingest_metocean(std::istream& in) {
  IngestResult out;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (first) {
      first = false;
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_object() && j.contains("schema")) {
        if (!j["schema"].is_string() || j["schema"].get<std::string>() != kMetoceanSchema)
          raise(ErrorCode::SchemaViolation, "line 1: unsupported schema " + j["schema"].dump());
        continue;
      }
    }
    try {
      auto r = parse_metocean_line(line);
      if (r.out_of_range) ++out.out_of_range;
      out.records.push_back(std::move(r));
    } catch (const Error& e) {
      ++out.skipped;
      out.problems.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const MetoceanRecord& a, const MetoceanRecord& b) { return a.epoch_seconds < b.epoch_seconds; });
  if (out.skipped > 0) log::warn("metocean: skipped " + std::to_string(out.skipped) + " malformed line(s)");
  if (out.out_of_range > 0)
    log::warn("metocean: " + std::to_string(out.out_of_range) + " record(s) outside the training domain");
  return out;
}

IngestResult ingest_metocean_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::UnreadableSource, "cannot open " + path);
  return ingest_metocean(in);
}

std::vector<MetoceanRecord> records_from_states(const std::vector<int>& ids, const std::vector<sim::SeaState>& states) {
  if (ids.size() != states.size()) raise(ErrorCode::LengthMismatch, "ids and states differ in length");
  std::vector<MetoceanRecord> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    out[i].timestamp = "scenario-" + std::to_string(ids[i]);
    out[i].epoch_seconds = static_cast<double>(i);
    out[i].sea = states[i];
    out[i].out_of_range = !sim::in_generation_domain(states[i]);
  }
  return out;
}

}  // namespace netcage::twin
