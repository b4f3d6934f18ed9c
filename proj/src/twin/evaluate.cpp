#include "netcage/twin/evaluate.hpp"

#include <cmath>
#include <limits>

#include "netcage/core/error.hpp"

namespace netcage::twin {

EvalReport evaluate(const Vector& pred, const Vector& truth, Index bins) {
  if (pred.size() != truth.size())
    raise(ErrorCode::LengthMismatch, std::to_string(pred.size()) + " predictions for " + std::to_string(truth.size()) +
                                         " truth values");
  if (pred.size() < 1) raise(ErrorCode::LengthMismatch, "nothing to evaluate");
  if (bins < 1) raise(ErrorCode::InvalidArgument, "density grid needs at least one bin");
  EvalReport r;
  r.count = pred.size();
  r.mae = (pred - truth).cwiseAbs().mean();

  const double mt = truth.mean(), mp = pred.mean();
  const double sxx = (truth.array() - mt).square().sum();
  if (sxx > 0.0) {
    r.slope = ((truth.array() - mt) * (pred.array() - mp)).sum() / sxx;
    r.intercept = mp - r.slope * mt;
  } else {
    r.slope = r.intercept = std::numeric_limits<double>::quiet_NaN();
  }

  double lo = std::min(truth.minCoeff(), pred.minCoeff());
  double hi = std::max(truth.maxCoeff(), pred.maxCoeff());
  if (!(hi > lo)) lo -= 0.5, hi += 0.5;
  r.density.edges = Vector::LinSpaced(bins + 1, lo, hi);
  r.density.counts = Matrix::Zero(bins, bins);
  auto bin = [&](double v) {
    const auto b = static_cast<Index>(std::floor((v - lo) / (hi - lo) * static_cast<double>(bins)));
    return std::clamp<Index>(b, 0, bins - 1);
  };
  for (Index i = 0; i < r.count; ++i) r.density.counts(bin(truth(i)), bin(pred(i))) += 1.0;
  return r;
}

std::vector<QuantityReport> evaluate_sensors(const TwinBundle& bundle, const sim::HfDataset& holdout, Index bins) {
  const Index n = holdout.size();
  const auto names = quantity_names();
  const auto q = static_cast<Index>(names.size());
  Matrix nargp(n, q), lf(n, q), truth(n, q);
  truth.leftCols(sim::kShackles) = holdout.shackles;
  truth.rightCols(sim::kDepthSensors) = holdout.depths;
  PredictOptions opt;
  opt.deformation = false;
  for (Index r = 0; r < n; ++r) {
    const auto s = pipeline_predict(bundle, holdout.states[static_cast<std::size_t>(r)], opt);
    nargp.row(r) << s.shackle_loads.transpose(), s.depth_displacements.transpose();
    lf.row(r) << s.lf_shackle_loads.transpose(), s.lf_depth_displacements.transpose();
  }
  std::vector<QuantityReport> out;
  for (Index k = 0; k < q; ++k) {
    QuantityReport rep;
    rep.name = names[static_cast<std::size_t>(k)];
    rep.unit = k < sim::kShackles ? "kN" : "m";
    rep.lf = evaluate(lf.col(k), truth.col(k), bins);
    rep.nargp = evaluate(nargp.col(k), truth.col(k), bins);
    out.push_back(std::move(rep));
  }
  return out;
}

Matrix deformation_errors(const TwinBundle& bundle, const sim::LfDataset& holdout, DeformationMode mode) {
  Matrix E(holdout.size(), 3);
  for (Index r = 0; r < holdout.size(); ++r) {
    const Matrix P = predict_deformation(bundle, holdout.states[static_cast<std::size_t>(r)], mode);
    E.row(r) = (P - holdout.deformation(r)).cwiseAbs().colwise().mean();
  }
  return E;
}

AxisSummary summarize_axes(const Matrix& E) {
  if (E.rows() < 1) raise(ErrorCode::LengthMismatch, "no scenarios to summarize");
  AxisSummary s;
  s.mean = E.colwise().mean().transpose();
  s.std = ((E.rowwise() - s.mean.transpose()).colwise().squaredNorm() / static_cast<double>(E.rows()))
              .cwiseSqrt()
              .transpose();
  s.max = E.colwise().maxCoeff().transpose();
  return s;
}

Table mae_table(const std::vector<QuantityReport>& reports) {
  Table t;
  for (const char* c : {"quantity", "count", "mae_lf", "mae_nargp", "ratio", "slope_lf", "intercept_lf",
                        "slope_nargp", "intercept_nargp"})
    t.add_column(c, "");
  t.values.resize(static_cast<Index>(reports.size()), static_cast<Index>(t.names.size()));
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    t.values.row(static_cast<Index>(i)) << static_cast<double>(i + 1), static_cast<double>(r.nargp.count), r.lf.mae,
        r.nargp.mae, r.ratio(), r.lf.slope, r.lf.intercept, r.nargp.slope, r.nargp.intercept;
    t.comments.push_back("quantity " + std::to_string(i + 1) + " = " + r.name + " [" + r.unit + "]");
  }
  return t;
}

Table density_table(const EvalReport& r) {
  Table t;
  for (const char* c : {"truth_lo", "truth_hi", "pred_lo", "pred_hi", "count", "log10_count"}) t.add_column(c, "");
  const Index bins = r.density.counts.rows();
  t.values.resize(bins * bins, 6);
  for (Index i = 0; i < bins; ++i)
    for (Index j = 0; j < bins; ++j) {
      const double c = r.density.counts(i, j);
      t.values.row(i * bins + j) << r.density.edges(i), r.density.edges(i + 1), r.density.edges(j),
          r.density.edges(j + 1), c, c > 0.0 ? std::log10(c) : std::numeric_limits<double>::quiet_NaN();
    }
  return t;
}

Table deformation_table(const std::vector<std::pair<DeformationMode, AxisSummary>>& rows) {
  Table t;
  t.add_column("mode", "");
  for (const char* stat : {"mean", "std", "max"})
    for (const char* ax : {"x", "y", "z"}) t.add_column(std::string(stat) + "_" + ax, "m");
  t.values.resize(static_cast<Index>(rows.size()), 10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [mode, s] = rows[i];
    t.values.row(static_cast<Index>(i)) << (mode == DeformationMode::Gcn ? 2.0 : 1.0), s.mean.transpose(),
        s.std.transpose(), s.max.transpose();
  }
  t.comments.push_back("mode 1 = gp-pca, 2 = gcn");
  return t;
}

}  // namespace netcage::twin
