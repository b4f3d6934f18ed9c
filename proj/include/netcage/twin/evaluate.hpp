#pragma once

#include <string>
#include <vector>

#include "netcage/core/table.hpp"
#include "netcage/twin/bundle.hpp"

namespace netcage::twin {

/// Counts of (truth, prediction) pairs on a square grid over their joint range.
struct DensityGrid {
  Vector edges;    // bins + 1, shared by both axes
  Matrix counts;   // rows: truth bin, cols: prediction bin
};

struct EvalReport {
  double mae = 0.0;
  double slope = 0.0;      // least-squares prediction = intercept + slope * truth
  double intercept = 0.0;  // NaN when the truth is constant
  Index count = 0;
  DensityGrid density;
};

EvalReport evaluate(const Vector& predictions, const Vector& truth, Index bins = 60);

/// LF-only and corrected accuracy of one sensor quantity.
struct QuantityReport {
  std::string name;
  std::string unit;
  EvalReport lf;
  EvalReport nargp;

  double ratio() const { return lf.mae > 0.0 ? nargp.mae / lf.mae : 0.0; }
};

/// Predicts every holdout record and scores the eight sensor quantities.
std::vector<QuantityReport> evaluate_sensors(const TwinBundle& bundle, const sim::HfDataset& holdout, Index bins = 60);

/// Per-scenario, per-axis mean absolute deformation error against the
/// simulated fields; rows are scenarios, columns x, y, z.
Matrix deformation_errors(const TwinBundle& bundle, const sim::LfDataset& holdout, DeformationMode mode);

struct AxisSummary {
  Vector mean;  // 3
  Vector std;   // 3, spread across scenarios
  Vector max;   // 3
};
AxisSummary summarize_axes(const Matrix& errors);

/// Plot-ready tables.
Table mae_table(const std::vector<QuantityReport>& reports);
Table density_table(const EvalReport& report);
Table deformation_table(const std::vector<std::pair<DeformationMode, AxisSummary>>& rows);

}  // namespace netcage::twin
