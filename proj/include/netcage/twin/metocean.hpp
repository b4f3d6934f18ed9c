#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "netcage/sim/sea_state.hpp"

namespace netcage::twin {

/// One line of the metocean stream:
///   {"ts": "2024-05-01T12:00:00Z", "cs": 0.4, "cd": 215, "hs": 1.2, "tp": 5.5, "wd": 190}
/// hs, tp and wd are optional. An optional first line {"schema": "metocean/1"}
/// declares the format.
struct MetoceanRecord {
  std::string timestamp;
  double epoch_seconds = 0.0;
  sim::SeaState sea;
  bool out_of_range = false;  // outside the generation domain of the twin
};

struct IngestResult {
  std::vector<MetoceanRecord> records;  // timestamp order
  int skipped = 0;
  int out_of_range = 0;
  std::vector<std::string> problems;  // "line N: reason"
};

inline constexpr const char* kMetoceanSchema = "metocean/1";

/// Parses an RFC 3339 timestamp into seconds since the Unix epoch; false on
/// malformed input.
bool parse_rfc3339(const std::string& text, double& epoch_seconds);

/// Parses one record; throws SchemaViolation with the reason.
MetoceanRecord parse_metocean_line(const std::string& line);

/// Reads the whole stream. Malformed lines are skipped and counted; a header
/// naming another schema throws SchemaViolation.
IngestResult ingest_metocean(std::istream& in);
IngestResult ingest_metocean_file(const std::string& path);  // UnreadableSource

/// Records for the rows of a dataset table, stamped "scenario-<id>".
std::vector<MetoceanRecord> records_from_states(const std::vector<int>& ids,
                                                const std::vector<sim::SeaState>& states);

}  // namespace netcage::twin
