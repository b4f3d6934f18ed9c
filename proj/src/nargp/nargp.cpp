#include "netcage/nargp/nargp.hpp"

#include <cmath>
#include <sstream>

#include "netcage/core/rng.hpp"

namespace netcage::nargp {

NargpHyperparams NargpModel::hyperparams(Index level) const {
  if (level < 2 || level > num_levels())
    raise(ErrorCode::InvalidArgument, "hyperparams: level " + std::to_string(level) + " has no autoregressive kernel");
  const auto& gp = levels[static_cast<std::size_t>(level - 1)];
  const auto& k = std::get<gp::NargpKernel<double>>(gp.hyperparams.kernel);
  return {k.rho, k.f_weight, k.delta, gp.hyperparams.noise_var};
}

namespace {

void check_order(std::span<const gp::FidelityDataset> datasets, int first_level) {
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const int expected = first_level + static_cast<int>(i);
    if (datasets[i].level != expected)
      raise(ErrorCode::LevelOrder, "dataset at position " + std::to_string(i) + " has level " +
                                       std::to_string(datasets[i].level) + ", expected " + std::to_string(expected));
  }
}

Vector top_mean(const std::vector<gp::GpModel>& levels, const Matrix& X) {
  Vector m = gp::predict(levels.front(), X, gp::VarianceKind::Latent).mean;
  for (std::size_t t = 1; t < levels.size(); ++t) m = gp::predict(levels[t], augment(X, m), gp::VarianceKind::Latent).mean;
  return m;
}

gp::FitOptions level_options(const gp::FitOptions& base, Index level) {
  gp::FitOptions o = base;
  o.seed = mix_seed(base.seed, static_cast<std::uint64_t>(level));
  return o;
}

gp::GpModel fit_level(const Matrix& X, const Vector& y, gp::KernelKind kind, const gp::FitOptions& opt, Index level) {
  try {
    return gp::fit_gp(X, y, kind, opt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::FitFailure) throw;
    raise(ErrorCode::FitFailure, "level " + std::to_string(level) + ": " + e.what());
  }
}

void extend(std::vector<gp::GpModel>& levels, std::span<const gp::FidelityDataset> higher, Index d,
            const NargpConfig& config) {
  for (const auto& data : higher) {
    const Index level = static_cast<Index>(levels.size()) + 1;
    if (data.input_dim() != d)
      raise(ErrorCode::DimensionMismatch, "level " + std::to_string(level) + " has " +
                                              std::to_string(data.input_dim()) + " inputs, expected " +
                                              std::to_string(d));
    if (data.size() < 2) raise(ErrorCode::EmptyLevel, "level " + std::to_string(level) + " has fewer than 2 rows");
    gp::validate_dataset(data, 2, config.fit.duplicate_tolerance);
    const Matrix U = augment(data.inputs, top_mean(levels, data.inputs));
    levels.push_back(fit_level(U, data.outputs, gp::KernelKind::Nargp, level_options(config.fit, level), level));
  }
}

}  // namespace

NestedReport validate_nested(std::span<const gp::FidelityDataset> datasets, bool surrogate_mode, double tolerance) {
  if (datasets.empty()) raise(ErrorCode::EmptyLevel, "no fidelity levels given");
  check_order(datasets, 1);
  for (const auto& d : datasets)
    if (d.size() < 2) raise(ErrorCode::EmptyLevel, "level " + std::to_string(d.level) + " has fewer than 2 rows");
  const Index dim = datasets.front().input_dim();
  for (const auto& d : datasets)
    if (d.input_dim() != dim) raise(ErrorCode::DimensionMismatch, "levels disagree on input dimension");

  NestedReport report;
  report.surrogate_mode = surrogate_mode;
  if (surrogate_mode) {
    report.note = "lower level is a trained surrogate; nestedness holds by construction";
    return report;
  }

  const auto norm = gp::fit_normalization(datasets.front().inputs, datasets.front().outputs);
  std::ostringstream bad;
  bool violated = false;
  Matrix lower = norm.to_unit(datasets.front().inputs);
  for (std::size_t t = 1; t < datasets.size(); ++t) {
    const Matrix upper = norm.to_unit(datasets[t].inputs);
    for (Index i = 0; i < upper.rows(); ++i) {
      bool found = false;
      for (Index j = 0; j < lower.rows() && !found; ++j)
        found = (lower.row(j) - upper.row(i)).cwiseAbs().maxCoeff() <= tolerance;
      if (!found) {
        bad << (violated ? ", " : "") << "level " << datasets[t].level << " row " << i;
        violated = true;
      }
    }
    lower = upper;
  }
  if (violated) raise(ErrorCode::NestedViolation, "inputs not contained in the level below: " + bad.str());
  report.note = "nested";
  return report;
}

Matrix augment(const Matrix& X, const Vector& lower_mean) {
  if (lower_mean.size() != X.rows()) raise(ErrorCode::DimensionMismatch, "augment: mean length differs from row count");
  Matrix U(X.rows(), X.cols() + 1);
  U.leftCols(X.cols()) = X;
  U.col(X.cols()) = lower_mean;
  return U;
}

NargpModel fit_nargp(std::span<const gp::FidelityDataset> datasets, const NargpConfig& config) {
  validate_nested(datasets, config.surrogate_lower_level);
  NargpModel model;
  model.input_dim = datasets.front().input_dim();
  model.levels.push_back(fit_level(datasets.front().inputs, datasets.front().outputs, gp::KernelKind::SeArd,
                                   config.fit, 1));
  extend(model.levels, datasets.subspan(1), model.input_dim, config);
  return model;
}

NargpModel fit_nargp_on(gp::GpModel lowest, std::span<const gp::FidelityDataset> higher, const NargpConfig& config) {
  if (lowest.kind() != gp::KernelKind::SeArd)
    raise(ErrorCode::InvalidArgument, "fit_nargp_on: lowest level must use the SE-ARD kernel");
  check_order(higher, 2);
  NargpModel model;
  model.input_dim = lowest.input_dim();
  model.levels.push_back(std::move(lowest));
  extend(model.levels, higher, model.input_dim, config);
  return model;
}

gp::Prediction predict_nargp(const NargpModel& model, const Matrix& X_star, const PredictOptions& options) {
  if (model.levels.empty()) raise(ErrorCode::InvalidArgument, "predict_nargp: empty model");
  if (X_star.cols() != model.input_dim)
    raise(ErrorCode::DimensionMismatch, "predict_nargp: query has " + std::to_string(X_star.cols()) +
                                            " columns, model expects " + std::to_string(model.input_dim));
  if (options.mode == Propagation::MonteCarlo) {
    if (options.samples < 2) raise(ErrorCode::InvalidSampleCount, "monte-carlo propagation needs at least 2 samples");
    const auto base = gp::predict(model.levels.front(), X_star, gp::VarianceKind::Latent);
    return propagate_samples(model, X_star, base.mean, base.variance, options.samples, options.seed);
  }
  if (model.levels.size() == 1) return gp::predict(model.levels.front(), X_star);
  Vector m = gp::predict(model.levels.front(), X_star, gp::VarianceKind::Latent).mean;
  for (std::size_t t = 1; t + 1 < model.levels.size(); ++t)
    m = gp::predict(model.levels[t], augment(X_star, m), gp::VarianceKind::Latent).mean;
  return gp::predict(model.levels.back(), augment(X_star, m));
}

gp::Prediction propagate_samples(const NargpModel& model, const Matrix& X_star, const Vector& level1_mean,
                                 const Vector& level1_variance, int samples, std::uint64_t seed) {
  if (samples < 2) raise(ErrorCode::InvalidSampleCount, "monte-carlo propagation needs at least 2 samples");
  const Index m = X_star.rows();
  if (level1_mean.size() != m || level1_variance.size() != m)
    raise(ErrorCode::DimensionMismatch, "propagate_samples: moment vectors must match the query rows");
  if (X_star.cols() != model.input_dim) raise(ErrorCode::DimensionMismatch, "propagate_samples: query width");

  auto rng = make_rng(seed, 0x6d63);
  const Index S = samples;
  gp::Prediction out{Vector(m), Vector(m)};
  for (Index i = 0; i < m; ++i) {
    const Matrix Xi = X_star.row(i).replicate(S, 1);
    Vector f(S);
    const double sd = std::sqrt(std::max(level1_variance(i), 0.0));
    for (Index s = 0; s < S; ++s) f(s) = level1_mean(i) + sd * standard_normal(rng);
    if (model.levels.size() == 1) {
      const double noise = model.levels.front().hyperparams.noise_var *
                           model.levels.front().normalization.output_scale *
                           model.levels.front().normalization.output_scale;
      out.mean(i) = f.mean();
      out.variance(i) = (f.array() - f.mean()).square().mean() + noise;
      continue;
    }
    for (std::size_t t = 1; t + 1 < model.levels.size(); ++t) {
      const auto p = gp::predict(model.levels[t], augment(Xi, f), gp::VarianceKind::Latent);
      for (Index s = 0; s < S; ++s) f(s) = p.mean(s) + std::sqrt(p.variance(s)) * standard_normal(rng);
    }
    const auto top = gp::predict(model.levels.back(), augment(Xi, f));
    const double mu = top.mean.mean();
    out.mean(i) = mu;
    out.variance(i) = top.variance.mean() + (top.mean.array() - mu).square().mean();
  }
  return out;
}

void write_upper_levels(ByteWriter& out, const NargpModel& model) {
  out.put<std::int64_t>(model.input_dim);
  out.put<std::uint32_t>(static_cast<std::uint32_t>(model.levels.size()));
  for (std::size_t t = 1; t < model.levels.size(); ++t) gp::write_gp(out, model.levels[t]);
}

NargpModel read_upper_levels(ByteReader& in, gp::GpModel lowest) {
  NargpModel m;
  m.input_dim = static_cast<Index>(in.get<std::int64_t>());
  const auto count = in.get<std::uint32_t>();
  if (count < 1 || count > 64) raise(ErrorCode::CorruptBundle, "implausible level count " + std::to_string(count));
  if (lowest.input_dim() != m.input_dim) raise(ErrorCode::CorruptBundle, "lowest level input dimension disagrees");
  m.levels.push_back(std::move(lowest));
  for (std::uint32_t t = 1; t < count; ++t) {
    m.levels.push_back(gp::read_gp(in));
    if (m.levels.back().kind() != gp::KernelKind::Nargp || m.levels.back().input_dim() != m.input_dim + 1)
      raise(ErrorCode::CorruptBundle, "level " + std::to_string(t + 1) + " is not an autoregressive level");
  }
  return m;
}

}  // namespace netcage::nargp
