#include "netcage/gp/kernel.hpp"

namespace netcage::gp {

KernelKind kind_of(const KernelParams& k) {
  return std::holds_alternative<SeArd<double>>(k) ? KernelKind::SeArd : KernelKind::Nargp;
}

Index input_dim(const KernelParams& k) {
  return std::visit([](const auto& p) { return p.input_dim(); }, k);
}

double prior_variance(const KernelParams& k) {
  if (const auto* se = std::get_if<SeArd<double>>(&k)) return se->amplitude_var;
  const auto& ar = std::get<NargpKernel<double>>(k);
  return ar.rho.amplitude_var + ar.delta.amplitude_var;
}

Matrix covariance_matrix(const Matrix& X, const Matrix& Xp, const KernelParams& k) {
  return std::visit([&](const auto& p) -> Matrix { return kernel_matrix(X, Xp, p); }, k);
}

Index free_param_count(KernelKind kind, Index input_dim) {
  if (kind == KernelKind::SeArd) return input_dim + 1;
  return 2 * (input_dim - 1) + 3;
}

Vector pack_log(const KernelParams& k) {
  if (const auto* se = std::get_if<SeArd<double>>(&k)) {
    Vector t(se->input_dim() + 1);
    t(0) = std::log(se->amplitude_var);
    t.tail(se->input_dim()) = se->ard_weights.array().log();
    return t;
  }
  const auto& ar = std::get<NargpKernel<double>>(k);
  const Index d = ar.base_dim();
  Vector t(2 * d + 3);
  t(0) = std::log(ar.rho.amplitude_var);
  t.segment(1, d) = ar.rho.ard_weights.array().log();
  t(d + 1) = std::log(ar.f_weight);
  t(d + 2) = std::log(ar.delta.amplitude_var);
  t.tail(d) = ar.delta.ard_weights.array().log();
  return t;
}

KernelParams unpack_log(KernelKind kind, Index input_dim, const Vector& t) {
  if (t.size() != free_param_count(kind, input_dim))
    raise(ErrorCode::DimensionMismatch, "unpack_log: parameter vector length " + std::to_string(t.size()));
  if (kind == KernelKind::SeArd) {
    SeArd<double> se;
    se.amplitude_var = std::exp(t(0));
    se.ard_weights = t.tail(input_dim).array().exp();
    return se;
  }
  const Index d = input_dim - 1;
  NargpKernel<double> ar;
  ar.rho.amplitude_var = std::exp(t(0));
  ar.rho.ard_weights = t.segment(1, d).array().exp();
  ar.f_weight = std::exp(t(d + 1));
  ar.delta.amplitude_var = std::exp(t(d + 2));
  ar.delta.ard_weights = t.tail(d).array().exp();
  return ar;
}

namespace {

// Visits each unordered pair (k <= l) once with multiplicity 1 (diagonal) or 2.
template <typename PairFn>
void for_each_pair(Index n, PairFn&& fn) {
  for (Index l = 0; l < n; ++l) {
    fn(l, l, 1.0);
    for (Index k = l + 1; k < n; ++k) fn(k, l, 2.0);
  }
}

}  // namespace

Vector log_param_gradient(const Matrix& X, const KernelParams& kp, const Matrix& W) {
  const Index n = X.rows();
  if (W.rows() != n || W.cols() != n) raise(ErrorCode::DimensionMismatch, "log_param_gradient: W shape");

  if (const auto* se = std::get_if<SeArd<double>>(&kp)) {
    const Index d = se->input_dim();
    Vector g = Vector::Zero(d + 1);
    Vector dsq(d);
    for_each_pair(n, [&](Index k, Index l, double mult) {
      double s = 0;
      for (Index i = 0; i < d; ++i) {
        const double diff = X(k, i) - X(l, i);
        dsq(i) = diff * diff;
        s += se->ard_weights(i) * dsq(i);
      }
      const double kv = se->amplitude_var * std::exp(-0.5 * s);
      const double wk = mult * W(k, l) * kv;
      g(0) += wk;
      for (Index i = 0; i < d; ++i) g(1 + i) += wk * (-0.5 * se->ard_weights(i) * dsq(i));
    });
    return 0.5 * g;
  }

  const auto& ar = std::get<NargpKernel<double>>(kp);
  const Index d = ar.base_dim();
  Vector g = Vector::Zero(2 * d + 3);
  Vector dsq(d);
  for_each_pair(n, [&](Index k, Index l, double mult) {
    double sr = 0, sd = 0;
    for (Index i = 0; i < d; ++i) {
      const double diff = X(k, i) - X(l, i);
      dsq(i) = diff * diff;
      sr += ar.rho.ard_weights(i) * dsq(i);
      sd += ar.delta.ard_weights(i) * dsq(i);
    }
    const double df = X(k, d) - X(l, d);
    const double kf = std::exp(-0.5 * ar.f_weight * df * df);
    const double prod = ar.rho.amplitude_var * std::exp(-0.5 * sr) * kf;
    const double kd = ar.delta.amplitude_var * std::exp(-0.5 * sd);
    const double wp = mult * W(k, l) * prod;
    const double wd = mult * W(k, l) * kd;
    g(0) += wp;
    for (Index i = 0; i < d; ++i) g(1 + i) += wp * (-0.5 * ar.rho.ard_weights(i) * dsq(i));
    g(d + 1) += wp * (-0.5 * ar.f_weight * df * df);
    g(d + 2) += wd;
    for (Index i = 0; i < d; ++i) g(d + 3 + i) += wd * (-0.5 * ar.delta.ard_weights(i) * dsq(i));
  });
  return 0.5 * g;
}

}  // namespace netcage::gp
