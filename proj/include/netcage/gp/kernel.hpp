#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>

#include "netcage/core/error.hpp"
#include "netcage/core/types.hpp"

namespace netcage::gp {

/// Squared-exponential kernel with automatic relevance determination:
///   k(x, x') = amplitude_var * exp(-1/2 * sum_i w_i (x_i - x'_i)^2)
/// `ard_weights` are inverse squared length scales and may be zero (the
/// dimension is then ignored).
template <typename Scalar>
struct SeArd {
  Scalar amplitude_var = Scalar(1);
  VectorX<Scalar> ard_weights;

  Index input_dim() const { return ard_weights.size(); }
};

/// Nonlinear autoregressive kernel over augmented inputs u = (x, f):
///   k(u, u') = k_rho(x, x') * k_f(f, f') + k_delta(x, x')
/// k_f is a unit-amplitude squared exponential with a single weight; its
/// variance is absorbed into k_rho, leaving 2d + 3 free parameters.
template <typename Scalar>
struct NargpKernel {
  SeArd<Scalar> rho;
  Scalar f_weight = Scalar(1);
  SeArd<Scalar> delta;

  Index base_dim() const { return rho.input_dim(); }
  Index input_dim() const { return rho.input_dim() + 1; }
};

/// Single-fidelity hyperparameters: SE-ARD kernel plus observation noise.
struct GpHyperparams {
  double amplitude_var = 1.0;
  Vector ard_weights;
  double noise_var = 1e-6;

  SeArd<double> kernel() const { return {amplitude_var, ard_weights}; }
};

namespace detail {

template <typename DA, typename DB, typename Scalar>
Scalar weighted_sqdist(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& xp,
                       const VectorX<Scalar>& w, Index offset = 0) {
  Scalar s(0);
  for (Index i = 0; i < w.size(); ++i) {
    const Scalar d = x(offset + i) - xp(offset + i);
    s += w(i) * d * d;
  }
  return s;
}

}  // namespace detail

template <typename DA, typename DB, typename Scalar>
Scalar se_ard_kernel(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& xp,
                     const SeArd<Scalar>& hp) {
  if (x.size() != hp.input_dim() || xp.size() != hp.input_dim())
    raise(ErrorCode::DimensionMismatch, "se_ard_kernel: input length " + std::to_string(x.size()) + "/" +
                                            std::to_string(xp.size()) + " vs " +
                                            std::to_string(hp.input_dim()) + " ARD weights");
  using std::exp;
  return hp.amplitude_var * exp(Scalar(-0.5) * detail::weighted_sqdist(x, xp, hp.ard_weights));
}

template <typename DA, typename DB>
double se_ard_kernel(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& xp,
                     const GpHyperparams& hp) {
  return se_ard_kernel(x, xp, hp.kernel());
}

template <typename DA, typename DB, typename Scalar>
Scalar composite_kernel(const Eigen::MatrixBase<DA>& u, const Eigen::MatrixBase<DB>& up,
                        const NargpKernel<Scalar>& hp) {
  const Index d = hp.base_dim();
  if (u.size() != d + 1 || up.size() != d + 1 || hp.delta.input_dim() != d)
    raise(ErrorCode::DimensionMismatch, "composite_kernel: augmented inputs must have length " +
                                            std::to_string(d + 1));
  using std::exp;
  const Scalar rho = hp.rho.amplitude_var * exp(Scalar(-0.5) * detail::weighted_sqdist(u, up, hp.rho.ard_weights));
  const Scalar df = u(d) - up(d);
  const Scalar kf = exp(Scalar(-0.5) * hp.f_weight * df * df);
  const Scalar delta = hp.delta.amplitude_var * exp(Scalar(-0.5) * detail::weighted_sqdist(u, up, hp.delta.ard_weights));
  return rho * kf + delta;
}

/// Covariance between the rows of X (n x d) and X' (m x d).
template <typename DA, typename DB, typename Scalar>
MatrixX<Scalar> kernel_matrix(const Eigen::MatrixBase<DA>& X, const Eigen::MatrixBase<DB>& Xp,
                              const SeArd<Scalar>& hp) {
  if (X.cols() != hp.input_dim() || Xp.cols() != hp.input_dim())
    raise(ErrorCode::DimensionMismatch, "kernel_matrix: column count does not match ARD weights");
  MatrixX<Scalar> K(X.rows(), Xp.rows());
  for (Index j = 0; j < Xp.rows(); ++j)
    for (Index i = 0; i < X.rows(); ++i) K(i, j) = se_ard_kernel(X.row(i), Xp.row(j), hp);
  return K;
}

template <typename DA, typename DB>
Matrix kernel_matrix(const Eigen::MatrixBase<DA>& X, const Eigen::MatrixBase<DB>& Xp, const GpHyperparams& hp) {
  return kernel_matrix(X, Xp, hp.kernel());
}

template <typename DA, typename DB, typename Scalar>
MatrixX<Scalar> kernel_matrix(const Eigen::MatrixBase<DA>& X, const Eigen::MatrixBase<DB>& Xp,
                              const NargpKernel<Scalar>& hp) {
  if (X.cols() != hp.input_dim() || Xp.cols() != hp.input_dim())
    raise(ErrorCode::DimensionMismatch, "kernel_matrix: column count does not match augmented dimension");
  MatrixX<Scalar> K(X.rows(), Xp.rows());
  for (Index j = 0; j < Xp.rows(); ++j)
    for (Index i = 0; i < X.rows(); ++i) K(i, j) = composite_kernel(X.row(i), Xp.row(j), hp);
  return K;
}

// Runtime-polymorphic kernel used by the fitted models.

enum class KernelKind : std::uint8_t { SeArd = 1, Nargp = 2 };

using KernelParams = std::variant<SeArd<double>, NargpKernel<double>>;

KernelKind kind_of(const KernelParams& k);
Index input_dim(const KernelParams& k);
/// k(u, u) for any u; both kernels are stationary.
double prior_variance(const KernelParams& k);
Matrix covariance_matrix(const Matrix& X, const Matrix& Xp, const KernelParams& k);

/// Number of free kernel hyperparameters (noise excluded): d + 1 for SE-ARD
/// over d inputs, 2d + 3 for the autoregressive kernel over d + 1 inputs.
Index free_param_count(KernelKind kind, Index input_dim);

/// Log-space parameter vector. SE-ARD: [log s2, log w_1..d]. Autoregressive:
/// [log s2_rho, log w_rho(d), log w_f, log s2_delta, log w_delta(d)].
Vector pack_log(const KernelParams& k);
KernelParams unpack_log(KernelKind kind, Index input_dim, const Vector& theta);

/// Returns g_j = 1/2 * sum_kl W_kl * dK_kl / dtheta_j for symmetric W,
/// where theta is the log-space vector of pack_log.
Vector log_param_gradient(const Matrix& X, const KernelParams& k, const Matrix& W);

}  // namespace netcage::gp
