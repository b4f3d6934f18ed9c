#pragma once

#include <functional>
#include <istream>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "netcage/twin/bundle.hpp"
#include "netcage/twin/metocean.hpp"

namespace netcage::twin {

/// Shares one immutable bundle among any number of predicting threads;
/// replace() swaps it atomically, so a reader sees the old or the new
/// bundle and never a mix.
class TwinService {
 public:
  explicit TwinService(std::shared_ptr<const TwinBundle> bundle);

  std::shared_ptr<const TwinBundle> bundle() const;
  void replace(std::shared_ptr<const TwinBundle> bundle);
  TwinSnapshot predict(const MetoceanRecord& record, const PredictOptions& options = {}) const;

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const TwinBundle> bundle_;
};

/// One JSON object per snapshot. The deformation is written inline only when
/// `inline_deformation` is set; `deformation_file` names a sidecar instead.
std::string snapshot_to_json(const TwinSnapshot& s, bool inline_deformation = false,
                             const std::string& deformation_file = {});
TwinSnapshot snapshot_from_json(const std::string& line);

struct ServeOptions {
  PredictOptions predict;
  bool inline_deformation = false;
  std::string deformation_dir;  // one table per timestamp when non-empty
  std::function<void()> between_records;  // polled after every record (bundle reload hook)
};

struct ServeStats {
  Index records = 0;
  Index skipped = 0;
  Index out_of_range = 0;
  std::vector<double> latency_ms;
};

/// Reads records line by line as they arrive and writes one snapshot line per
/// record, flushing each. Records older than their predecessor are skipped.
ServeStats serve(const TwinService& service, std::istream& in, std::ostream& out, const ServeOptions& options = {});

/// q in [0, 1], linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

}  // namespace netcage::twin
