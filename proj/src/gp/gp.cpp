#include "netcage/gp/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "netcage/core/log.hpp"
#include "netcage/core/rng.hpp"
#include "netcage/gp/lbfgs.hpp"

namespace netcage::gp {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kJitterStart = 1e-8;
constexpr double kJitterMax = 1e-4;
constexpr double kLogParamLower = -13.815510557964274;  // log 1e-6
constexpr double kLogParamUpper = 13.815510557964274;
constexpr double kNoiseEtaLower = -40.0;
constexpr double kNoiseEtaUpper = 2.302585092994046;    // log 10

struct Factorization {
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;
};

// Factorizes K + noise I, escalating a diagonal jitter when needed.
bool factorize(const Matrix& K, double noise, Factorization& out) {
  Matrix A = K;
  A.diagonal().array() += noise;
  out.llt.compute(A);
  if (out.llt.info() == Eigen::Success) {
    out.jitter = 0.0;
    return true;
  }
  for (double j = kJitterStart; j <= kJitterMax * 1.0000001; j *= 10.0) {
    Matrix B = A;
    B.diagonal().array() += j;
    out.llt.compute(B);
    if (out.llt.info() == Eigen::Success) {
      out.jitter = j;
      return true;
    }
  }
  return false;
}

void check_finite(const Matrix& X, const Vector& y) {
  if (!X.allFinite() || !y.allFinite()) raise(ErrorCode::InvalidArgument, "non-finite training data");
}

// Lexicographic order over (inputs..., output) so fits do not depend on row order.
std::vector<Index> canonical_order(const Matrix& X, const Vector& y) {
  std::vector<Index> idx(static_cast<std::size_t>(X.rows()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    for (Index j = 0; j < X.cols(); ++j) {
      if (X(a, j) < X(b, j)) return true;
      if (X(b, j) < X(a, j)) return false;
    }
    return y(a) < y(b);
  });
  return idx;
}

double population_std(const Eigen::Ref<const Vector>& v, double mean) {
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size()));
}

}  // namespace

void validate_dataset(const FidelityDataset& data, Index min_rows, double duplicate_tolerance) {
  if (data.outputs.size() != data.inputs.rows())
    raise(ErrorCode::DimensionMismatch, "dataset has " + std::to_string(data.inputs.rows()) + " input rows but " +
                                            std::to_string(data.outputs.size()) + " outputs");
  if (data.size() < min_rows)
    raise(ErrorCode::EmptyLevel, "level " + std::to_string(data.level) + " has " + std::to_string(data.size()) +
                                     " rows; need at least " + std::to_string(min_rows));
  check_finite(data.inputs, data.outputs);
  const Matrix& X = data.inputs;
  auto order = canonical_order(X, data.outputs);
  // Sorted by the first column, so only nearby rows need comparing.
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (X.cols() > 0 && X(order[b], 0) - X(order[a], 0) > duplicate_tolerance) break;
      if ((X.row(order[a]) - X.row(order[b])).cwiseAbs().maxCoeff() <= duplicate_tolerance)
        raise(ErrorCode::DegenerateData, "duplicate input rows " + std::to_string(order[a]) + " and " +
                                             std::to_string(order[b]) + " in level " + std::to_string(data.level));
    }
  }
}

Matrix Normalization::to_unit(const Matrix& X) const {
  if (X.cols() != input_mean.size())
    raise(ErrorCode::DimensionMismatch, "expected " + std::to_string(input_mean.size()) + " input columns, got " +
                                            std::to_string(X.cols()));
  return (X.rowwise() - input_mean.transpose()).array().rowwise() / input_scale.transpose().array();
}

Normalization identity_normalization(Index d) {
  Normalization n;
  n.input_mean = Vector::Zero(d);
  n.input_scale = Vector::Ones(d);
  return n;
}

Normalization fit_normalization(const Matrix& X, const Vector& y) {
  Normalization n;
  const double rows = static_cast<double>(X.rows());
  n.input_mean = X.colwise().sum().transpose() / rows;
  n.input_scale.resize(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const double s = population_std(X.col(j), n.input_mean(j));
    n.input_scale(j) = s > 1e-12 * (1.0 + std::abs(n.input_mean(j))) ? s : 1.0;
  }
  n.output_mean = y.mean();
  const double sy = population_std(y, n.output_mean);
  n.output_scale = sy > 1e-12 * (1.0 + std::abs(n.output_mean)) ? sy : 1.0;
  return n;
}

LmlResult log_marginal_likelihood(const Matrix& X, const Vector& y, const KernelParams& kernel, double noise_var) {
  if (X.rows() != y.size()) raise(ErrorCode::DimensionMismatch, "log_marginal_likelihood: X/y row mismatch");
  if (X.cols() != input_dim(kernel)) raise(ErrorCode::DimensionMismatch, "log_marginal_likelihood: input dimension");
  const Index n = X.rows();
  const Matrix K = covariance_matrix(X, X, kernel);
  Factorization fac;
  if (!factorize(K, noise_var, fac))
    raise(ErrorCode::NotPositiveDefinite, "K + noise I not positive definite after jitter " + std::to_string(kJitterMax));
  const Vector alpha = fac.llt.solve(y);
  const Matrix& L = fac.llt.matrixLLT();
  LmlResult r;
  r.jitter = fac.jitter;
  r.value = -0.5 * y.dot(alpha) - L.diagonal().array().log().sum() - 0.5 * static_cast<double>(n) * kLog2Pi;

  Matrix W = -fac.llt.solve(Matrix::Identity(n, n));
  W.noalias() += alpha * alpha.transpose();
  const Vector gk = log_param_gradient(X, kernel, W);
  r.gradient.resize(gk.size() + 1);
  r.gradient.head(gk.size()) = gk;
  r.gradient(gk.size()) = 0.5 * W.trace() * noise_var;
  return r;
}

LmlResult log_marginal_likelihood(const Matrix& X, const Vector& y, const GpHyperparams& hp) {
  return log_marginal_likelihood(X, y, KernelParams{hp.kernel()}, hp.noise_var);
}

GpModel condition_gp(const Matrix& X, const Vector& y, const Hyperparams& hp, const Normalization& norm) {
  if (X.rows() != y.size()) raise(ErrorCode::DimensionMismatch, "condition_gp: X/y row mismatch");
  if (X.cols() != input_dim(hp.kernel)) raise(ErrorCode::DimensionMismatch, "condition_gp: input dimension");
  check_finite(X, y);
  GpModel m;
  m.hyperparams = hp;
  m.training_inputs = X;
  m.training_outputs = y;
  m.normalization = norm;
  m.unit_inputs = norm.to_unit(X);
  const Vector yu = (y.array() - norm.output_mean) / norm.output_scale;
  const Matrix K = covariance_matrix(m.unit_inputs, m.unit_inputs, hp.kernel);
  Factorization fac;
  if (!factorize(K, hp.noise_var, fac))
    raise(ErrorCode::NotPositiveDefinite, "condition_gp: factorization failed after maximum jitter");
  m.jitter = fac.jitter;
  m.chol_factor = fac.llt.matrixL();
  m.alpha = fac.llt.solve(yu);
  m.log_likelihood = -0.5 * yu.dot(m.alpha) - m.chol_factor.diagonal().array().log().sum() -
                     0.5 * static_cast<double>(X.rows()) * kLog2Pi;
  return m;
}

GpModel fit_gp(const Matrix& X_in, const Vector& y_in, KernelKind kind, const FitOptions& opt) {
  if (X_in.rows() != y_in.size()) raise(ErrorCode::DimensionMismatch, "fit_gp: X/y row mismatch");
  if (X_in.rows() < 2) raise(ErrorCode::EmptyLevel, "fit_gp needs at least two rows");
  if (kind == KernelKind::Nargp && X_in.cols() < 2)
    raise(ErrorCode::DimensionMismatch, "autoregressive kernel needs at least one input plus the lower-level column");
  check_finite(X_in, y_in);

  const auto order = canonical_order(X_in, y_in);
  Matrix X(X_in.rows(), X_in.cols());
  Vector y(y_in.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    X.row(static_cast<Index>(i)) = X_in.row(order[i]);
    y(static_cast<Index>(i)) = y_in(order[i]);
  }

  const Normalization norm = opt.standardize ? fit_normalization(X, y) : identity_normalization(X.cols());
  const Matrix Xu = norm.to_unit(X);
  const Vector yu = (y.array() - norm.output_mean) / norm.output_scale;
  const Index d = X.cols();
  const Index nk = free_param_count(kind, d);

  auto default_kernel = [&]() { return unpack_log(kind, d, Vector::Zero(nk)); };

  if (yu.cwiseAbs().maxCoeff() == 0.0) {
    log::warn("fit_gp: outputs are constant; returning constant-mean fallback model");
    GpModel m = condition_gp(X, y, Hyperparams{default_kernel(), std::max(opt.noise_floor, 1e-6)}, norm);
    m.constant_fallback = true;
    return m;
  }

  const Index np = nk + (opt.learn_noise ? 1 : 0);
  Vector lower = Vector::Constant(np, kLogParamLower);
  Vector upper = Vector::Constant(np, kLogParamUpper);
  if (opt.learn_noise) {
    lower(nk) = kNoiseEtaLower;
    upper(nk) = kNoiseEtaUpper;
  }

  auto noise_of = [&](const Vector& theta) {
    return opt.learn_noise ? opt.noise_floor + std::exp(theta(nk)) : opt.fixed_noise;
  };

  auto objective = [&](const Vector& theta, Vector& grad) -> double {
    const KernelParams kp = unpack_log(kind, d, theta.head(nk));
    const double noise = noise_of(theta);
    try {
      LmlResult r = log_marginal_likelihood(Xu, yu, kp, noise);
      grad.resize(np);
      grad.head(nk) = -r.gradient.head(nk);
      if (opt.learn_noise) grad(nk) = -r.gradient(nk) * std::exp(theta(nk)) / noise;
      return std::isfinite(r.value) ? -r.value : std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      grad = Vector::Zero(np);
      return std::numeric_limits<double>::infinity();
    }
  };

  LbfgsOptions lo;
  lo.max_iterations = opt.max_iterations;
  lo.gradient_tolerance = opt.gradient_tolerance;

  Rng rng = make_rng(opt.seed, 0x6770);
  const double a = std::log(opt.init_low), b = std::log(opt.init_high);
  const double na = std::log(opt.noise_init_low), nb = std::log(opt.noise_init_high);
  bool have_best = false;
  Vector best_theta;
  double best_value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    Vector theta0(np);
    for (Index i = 0; i < nk; ++i) theta0(i) = a + (b - a) * uniform01(rng);
    if (opt.learn_noise) {
      const double noise0 = std::exp(na + (nb - na) * uniform01(rng));
      theta0(nk) = std::log(std::max(noise0 - opt.noise_floor, 1e-300));
    }
    LbfgsResult res = minimize_lbfgs(objective, theta0, lower, upper, lo);
    if (!std::isfinite(res.value)) continue;
    const double tie = 1e-9 * (1.0 + std::abs(best_value));
    if (!have_best || res.value < best_value - tie ||
        (std::abs(res.value - best_value) <= tie && res.x.norm() < best_theta.norm())) {
      have_best = true;
      best_value = res.value;
      best_theta = res.x;
    }
  }
  if (!have_best) raise(ErrorCode::FitFailure, "all " + std::to_string(opt.restarts) + " restarts failed");

  Hyperparams hp{unpack_log(kind, d, best_theta.head(nk)), noise_of(best_theta)};
  return condition_gp(X, y, hp, norm);
}

GpModel fit_gp(const FidelityDataset& data, const FitOptions& opt) {
  validate_dataset(data, 2, opt.duplicate_tolerance);
  return fit_gp(data.inputs, data.outputs, KernelKind::SeArd, opt);
}

Prediction predict(const GpModel& model, const Matrix& X_star, VarianceKind kind) {
  if (X_star.cols() != model.input_dim())
    raise(ErrorCode::DimensionMismatch, "predict: expected " + std::to_string(model.input_dim()) +
                                            " input columns, got " + std::to_string(X_star.cols()));
  const Matrix Xu = model.normalization.to_unit(X_star);
  const Matrix Ks = covariance_matrix(Xu, model.unit_inputs, model.hyperparams.kernel);
  Prediction p;
  p.mean = (Ks * model.alpha).array() * model.normalization.output_scale + model.normalization.output_mean;
  const Matrix V = model.chol_factor.triangularView<Eigen::Lower>().solve(Ks.transpose());
  const double prior = prior_variance(model.hyperparams.kernel);
  const double scale2 = model.normalization.output_scale * model.normalization.output_scale;
  p.variance.resize(X_star.rows());
  for (Index i = 0; i < X_star.rows(); ++i) {
    double v = prior - V.col(i).squaredNorm();
    if (v < 0.0) {
      if (v < -1e-10) log::warn("predict: clamped negative posterior variance " + std::to_string(v));
      v = 0.0;
    }
    if (kind == VarianceKind::Observed) v += model.hyperparams.noise_var;
    p.variance(i) = v * scale2;
  }
  return p;
}

GpHyperparams se_ard_hyperparams(const GpModel& model) {
  const auto* se = std::get_if<SeArd<double>>(&model.hyperparams.kernel);
  if (!se) raise(ErrorCode::InvalidArgument, "model does not use the SE-ARD kernel");
  return {se->amplitude_var, se->ard_weights, model.hyperparams.noise_var};
}

namespace {

void write_se(ByteWriter& out, const SeArd<double>& k) {
  out.put<double>(k.amplitude_var);
  out.put_vector(k.ard_weights);
}

SeArd<double> read_se(ByteReader& in) {
  SeArd<double> k;
  k.amplitude_var = in.get<double>();
  k.ard_weights = in.get_vector();
  return k;
}

}  // namespace

void write_gp(ByteWriter& out, const GpModel& m) {
  out.put<std::uint8_t>(static_cast<std::uint8_t>(m.kind()));
  if (const auto* se = std::get_if<SeArd<double>>(&m.hyperparams.kernel)) {
    write_se(out, *se);
  } else {
    const auto& nk = std::get<NargpKernel<double>>(m.hyperparams.kernel);
    write_se(out, nk.rho);
    out.put<double>(nk.f_weight);
    write_se(out, nk.delta);
  }
  out.put<double>(m.hyperparams.noise_var);
  out.put<double>(m.jitter);
  out.put_matrix(m.training_inputs);
  out.put_vector(m.training_outputs);
  out.put_vector(m.normalization.input_mean);
  out.put_vector(m.normalization.input_scale);
  out.put<double>(m.normalization.output_mean);
  out.put<double>(m.normalization.output_scale);
  out.put_matrix(m.unit_inputs);
  out.put_matrix(m.chol_factor);
  out.put_vector(m.alpha);
  out.put<double>(m.log_likelihood);
  out.put<std::uint8_t>(m.constant_fallback ? 1 : 0);
}

GpModel read_gp(ByteReader& in) {
  GpModel m;
  const auto kind = in.get<std::uint8_t>();
  if (kind == static_cast<std::uint8_t>(KernelKind::SeArd)) {
    m.hyperparams.kernel = read_se(in);
  } else if (kind == static_cast<std::uint8_t>(KernelKind::Nargp)) {
    NargpKernel<double> nk;
    nk.rho = read_se(in);
    nk.f_weight = in.get<double>();
    nk.delta = read_se(in);
    if (nk.rho.input_dim() != nk.delta.input_dim()) raise(ErrorCode::CorruptBundle, "kernel parts disagree in dimension");
    m.hyperparams.kernel = nk;
  } else {
    raise(ErrorCode::CorruptBundle, "unknown kernel kind " + std::to_string(kind));
  }
  m.hyperparams.noise_var = in.get<double>();
  m.jitter = in.get<double>();
  m.training_inputs = in.get_matrix();
  m.training_outputs = in.get_vector();
  m.normalization.input_mean = in.get_vector();
  m.normalization.input_scale = in.get_vector();
  m.normalization.output_mean = in.get<double>();
  m.normalization.output_scale = in.get<double>();
  m.unit_inputs = in.get_matrix();
  m.chol_factor = in.get_matrix();
  m.alpha = in.get_vector();
  m.log_likelihood = in.get<double>();
  m.constant_fallback = in.get<std::uint8_t>() != 0;
  const Index n = m.training_inputs.rows(), d = m.training_inputs.cols();
  if (d != input_dim(m.hyperparams.kernel) || m.training_outputs.size() != n || m.unit_inputs.rows() != n ||
      m.unit_inputs.cols() != d || m.chol_factor.rows() != n || m.chol_factor.cols() != n || m.alpha.size() != n ||
      m.normalization.input_mean.size() != d || m.normalization.input_scale.size() != d)
    raise(ErrorCode::CorruptBundle, "GP model sections disagree in shape");
  return m;
}

}  // namespace netcage::gp
