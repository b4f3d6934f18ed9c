#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netcage/core/rng.hpp"
#include "netcage/gp/gp.hpp"

namespace netcage::gp {
namespace {

constexpr double kPi = 3.14159265358979323846;

FitOptions noiseless() {
  FitOptions o;
  o.learn_noise = false;
  o.fixed_noise = 1e-10;
  return o;
}

Matrix uniform_points(Rng& rng, Index n, Index d, double lo = 0.0, double hi = 1.0) {
  Matrix X(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) X(i, j) = lo + (hi - lo) * uniform01(rng);
  return X;
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * uniform01(rng));
}

// ---- se_ard_kernel -------------------------------------------------------

TEST(SeArdKernel, CoincidentPointsGiveAmplitude) {
  SeArd<double> hp{2.0, Vector::Constant(3, 0.7)};
  Vector x(3);
  x << 0.3, -1.2, 4.0;
  EXPECT_DOUBLE_EQ(se_ard_kernel(x, x, hp), 2.0);
}

TEST(SeArdKernel, UnitDiagonalSeparation) {
  GpHyperparams hp{2.0, Vector::Ones(2), 1e-6};
  Vector x = Vector::Zero(2), xp = Vector::Ones(2);
  EXPECT_NEAR(se_ard_kernel(x, xp, hp), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(se_ard_kernel(x, xp, hp), 0.73576, 1e-5);
}

TEST(SeArdKernel, HugeWeightsUnderflow) {
  SeArd<double> hp{1.0, Vector::Constant(2, 1e6)};
  Vector x = Vector::Zero(2), xp(2);
  xp << 1.0, 0.0;
  EXPECT_LT(se_ard_kernel(x, xp, hp), 1e-300);
}

TEST(SeArdKernel, DimensionMismatchThrows) {
  SeArd<double> hp{1.0, Vector::Ones(2)};
  Vector x = Vector::Zero(3);
  try {
    se_ard_kernel(x, x, hp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(SeArdKernel, WorksForOtherScalarTypes) {
  SeArd<float> hp{2.0f, Eigen::VectorXf::Ones(2)};
  Eigen::VectorXf x = Eigen::VectorXf::Zero(2), xp = Eigen::VectorXf::Ones(2);
  EXPECT_NEAR(se_ard_kernel(x, xp, hp), 0.73576f, 1e-5f);
}

// ---- kernel_matrix -------------------------------------------------------

TEST(KernelMatrix, SinglePoint) {
  SeArd<double> hp{1.7, Vector::Ones(2)};
  Matrix X(1, 2);
  X << 0.5, 0.25;
  Matrix K = kernel_matrix(X, X, hp);
  ASSERT_EQ(K.rows(), 1);
  EXPECT_DOUBLE_EQ(K(0, 0), 1.7);
}

TEST(KernelMatrix, SelfCovarianceIsExactlySymmetric) {
  Rng rng = make_rng(11);
  Matrix X = uniform_points(rng, 30, 3);
  SeArd<double> hp{1.3, (Vector(3) << 0.5, 3.0, 10.0).finished()};
  Matrix K = kernel_matrix(X, X, hp);
  EXPECT_TRUE(K == K.transpose());
  EXPECT_TRUE((K.diagonal().array() == 1.3).all());
}

TEST(KernelMatrix, DuplicatedRowsAreSingular) {
  Rng rng = make_rng(12);
  Matrix X = uniform_points(rng, 6, 2);
  X.row(4) = X.row(1);
  Matrix K = kernel_matrix(X, X, SeArd<double>{1.0, Vector::Ones(2)});
  Eigen::SelfAdjointEigenSolver<Matrix> es(K);
  EXPECT_LT(std::abs(es.eigenvalues()(0)), 1e-10);
}

TEST(KernelMatrix, EntriesMatchPointwiseKernel) {
  Rng rng = make_rng(13);
  Matrix X = uniform_points(rng, 5, 2), Y = uniform_points(rng, 4, 2);
  SeArd<double> hp{0.9, (Vector(2) << 2.0, 0.1).finished()};
  Matrix K = kernel_matrix(X, Y, hp);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 4; ++j) EXPECT_EQ(K(i, j), se_ard_kernel(X.row(i), Y.row(j), hp));
}

// ---- log_marginal_likelihood ---------------------------------------------

TEST(LogMarginalLikelihood, SinglePointClosedForm) {
  GpHyperparams hp{1.5, Vector::Ones(1), 0.25};
  Matrix X(1, 1);
  X << 0.3;
  Vector y = Vector::Zero(1);
  LmlResult r = log_marginal_likelihood(X, y, hp);
  EXPECT_NEAR(r.value, -0.5 * std::log(1.75) - 0.5 * std::log(2 * kPi), 1e-14);
}

// Central differences in log space: the independent oracle for the analytic gradient.
Vector finite_difference_gradient(const Matrix& X, const Vector& y, KernelKind kind, const Vector& theta,
                                  double log_noise, double h) {
  const Index nk = theta.size();
  Vector g(nk + 1);
  const Index d = X.cols();
  auto eval = [&](const Vector& t, double ln) {
    return log_marginal_likelihood(X, y, unpack_log(kind, d, t), std::exp(ln)).value;
  };
  for (Index i = 0; i < nk; ++i) {
    Vector tp = theta, tm = theta;
    tp(i) += h;
    tm(i) -= h;
    g(i) = (eval(tp, log_noise) - eval(tm, log_noise)) / (2 * h);
  }
  g(nk) = (eval(theta, log_noise + h) - eval(theta, log_noise - h)) / (2 * h);
  return g;
}

double gradient_check(Rng& rng, KernelKind kind) {
  const Index n = 20, d = 2;
  const Index dim = kind == KernelKind::SeArd ? d : d + 1;
  Matrix X = uniform_points(rng, n, dim, -1.0, 1.0);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = std::sin(3 * X(i, 0)) + X.row(i).sum() + 0.1 * standard_normal(rng);
  Vector theta(free_param_count(kind, dim));
  for (Index i = 0; i < theta.size(); ++i) theta(i) = std::log(log_uniform(rng, 0.1, 10.0));
  const double log_noise = std::log(log_uniform(rng, 1e-3, 1e-1));
  LmlResult r = log_marginal_likelihood(X, y, unpack_log(kind, dim, theta), std::exp(log_noise));
  EXPECT_EQ(r.jitter, 0.0);
  Vector fd = finite_difference_gradient(X, y, kind, theta, log_noise, 1e-5);
  return (r.gradient - fd).norm() / fd.norm();
}

TEST(LogMarginalLikelihood, GradientMatchesFiniteDifferences) {
  Rng rng = make_rng(2024);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) worst = std::max(worst, gradient_check(rng, KernelKind::SeArd));
  EXPECT_LT(worst, 1e-5);
}

TEST(LogMarginalLikelihood, AutoregressiveKernelGradientMatchesFiniteDifferences) {
  Rng rng = make_rng(2025);
  double worst = 0;
  for (int trial = 0; trial < 30; ++trial) worst = std::max(worst, gradient_check(rng, KernelKind::Nargp));
  EXPECT_LT(worst, 1e-5);
}

TEST(LogMarginalLikelihood, PermutationInvariant) {
  Rng rng = make_rng(5);
  Matrix X = uniform_points(rng, 15, 2);
  Vector y = X.col(0).array().sin() + X.col(1).array();
  GpHyperparams hp{1.2, (Vector(2) << 3.0, 0.5).finished(), 1e-3};
  const double base = log_marginal_likelihood(X, y, hp).value;
  std::vector<Index> perm(15);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[2], perm[9]);
  Matrix Xp(15, 2);
  Vector yp(15);
  for (Index i = 0; i < 15; ++i) {
    Xp.row(i) = X.row(perm[i]);
    yp(i) = y(perm[i]);
  }
  EXPECT_NEAR(log_marginal_likelihood(Xp, yp, hp).value, base, 1e-10);
}

TEST(LogMarginalLikelihood, SingularWithoutNoiseUsesJitter) {
  Matrix X(3, 1);
  X << 0.0, 0.0, 1.0;
  Vector y(3);
  y << 1.0, 1.0, 0.0;
  LmlResult r = log_marginal_likelihood(X, y, GpHyperparams{1.0, Vector::Ones(1), 0.0});
  EXPECT_GT(r.jitter, 0.0);
  EXPECT_LE(r.jitter, 1e-4);
  EXPECT_TRUE(std::isfinite(r.value));
}

// ---- fit_gp / predict ----------------------------------------------------

TEST(FitGp, NoiselessLinearInterpolatesTrainingPoints) {
  Matrix X(5, 1);
  X << 0.0, 0.25, 0.5, 0.75, 1.0;
  Vector y = X.col(0);
  GpModel m = fit_gp(X, y, KernelKind::SeArd, noiseless());
  Prediction p = predict(m, X);
  EXPECT_LT((p.mean - y).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(p.variance.maxCoeff(), 1e-6);
}

TEST(FitGp, RecoversSinusoidOnDenseGrid) {
  const Index n = 50;
  Matrix X(n, 1);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    X(i, 0) = static_cast<double>(i) / (n - 1);
    y(i) = std::sin(8 * kPi * X(i, 0));
  }
  GpModel m = fit_gp(X, y, KernelKind::SeArd);
  Matrix G(1000, 1);
  Vector truth(1000);
  for (Index i = 0; i < 1000; ++i) {
    G(i, 0) = static_cast<double>(i) / 999;
    truth(i) = std::sin(8 * kPi * G(i, 0));
  }
  Prediction p = predict(m, G);
  const double rmse = std::sqrt((p.mean - truth).squaredNorm() / 1000);
  EXPECT_LT(rmse, 0.05);
}

TEST(FitGp, ConstantOutputsGiveFlaggedFallback) {
  Matrix X(6, 2);
  X << 0, 0, 1, 0, 0, 1, 1, 1, 0.5, 0.5, 0.2, 0.9;
  Vector y = Vector::Constant(6, 3.0);
  GpModel m = fit_gp(X, y, KernelKind::SeArd);
  EXPECT_TRUE(m.constant_fallback);
  Prediction p = predict(m, X);
  EXPECT_LT((p.mean.array() - 3.0).abs().maxCoeff(), 1e-6);
}

TEST(FitGp, DatasetValidation) {
  FidelityDataset d;
  d.inputs = Matrix::Zero(1, 2);
  d.outputs = Vector::Zero(1);
  try {
    fit_gp(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyLevel);
  }
  d.inputs = Matrix(3, 1);
  d.inputs << 0.0, 1.0, 0.0;
  d.outputs = Vector::Zero(3);
  EXPECT_THROW(fit_gp(d), Error);
  d.inputs(1, 0) = std::nan("");
  EXPECT_THROW(fit_gp(d), Error);
}

TEST(FitGp, FarFieldRevertsToPrior) {
  Rng rng = make_rng(8);
  Matrix X = uniform_points(rng, 12, 2);
  Vector y = (3 * X.col(0)).array().sin() + X.col(1).array().square();
  GpModel m = fit_gp(X, y, KernelKind::SeArd);
  Matrix far = Matrix::Constant(1, 2, 1e4);
  Prediction p = predict(m, far);
  const auto& se = std::get<SeArd<double>>(m.hyperparams.kernel);
  const double s2 = m.normalization.output_scale * m.normalization.output_scale;
  EXPECT_NEAR(p.mean(0), m.normalization.output_mean, 1e-6 * m.normalization.output_scale);
  EXPECT_NEAR(p.variance(0) / s2, se.amplitude_var + m.hyperparams.noise_var, 1e-6);
}

TEST(FitGp, SymmetricDataGivesSymmetricPosterior) {
  Matrix X(8, 1);
  X << -1.0, -0.7, -0.4, -0.15, 0.15, 0.4, 0.7, 1.0;
  Vector y = (2.5 * X.col(0)).array().cos();
  GpModel m = fit_gp(X, y, KernelKind::SeArd);
  Matrix Q(21, 1), Qm(21, 1);
  for (Index i = 0; i < 21; ++i) {
    Q(i, 0) = 0.05 * i;
    Qm(i, 0) = -Q(i, 0);
  }
  Prediction a = predict(m, Q), b = predict(m, Qm);
  EXPECT_LT((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(FitGp, SameSeedSameModel) {
  Rng rng = make_rng(21);
  Matrix X = uniform_points(rng, 15, 2);
  Vector y = X.rowwise().sum();
  FitOptions o;
  o.seed = 99;
  GpModel a = fit_gp(X, y, KernelKind::SeArd, o), b = fit_gp(X, y, KernelKind::SeArd, o);
  EXPECT_TRUE(a.alpha == b.alpha);
  EXPECT_TRUE(pack_log(a.hyperparams.kernel) == pack_log(b.hyperparams.kernel));
}

// ---- properties ----------------------------------------------------------

TEST(GpProperties, VarianceNonnegativeAndBelowPrior) {
  Rng rng = make_rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix X = uniform_points(rng, 25, 3);
    Vector y(25);
    for (Index i = 0; i < 25; ++i) y(i) = std::sin(4 * X(i, 0)) * X(i, 1) + 0.05 * standard_normal(rng);
    GpModel m = fit_gp(X, y, KernelKind::SeArd);
    Matrix Q = uniform_points(rng, 200, 3, -0.5, 1.5);
    Prediction p = predict(m, Q);
    const double s2 = m.normalization.output_scale * m.normalization.output_scale;
    const double bound = (prior_variance(m.hyperparams.kernel) + m.hyperparams.noise_var + 1e-8) * s2;
    EXPECT_GE(p.variance.minCoeff(), 0.0);
    EXPECT_LE(p.variance.maxCoeff(), bound);
  }
}

TEST(GpProperties, PredictionInvariantUnderRowPermutation) {
  Rng rng = make_rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix X = uniform_points(rng, 20, 2);
    Vector y = (5 * X.col(0)).array().sin() * X.col(1).array();
    std::vector<Index> perm(20);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix Xp(20, 2);
    Vector yp(20);
    for (Index i = 0; i < 20; ++i) {
      Xp.row(i) = X.row(perm[i]);
      yp(i) = y(perm[i]);
    }
    Matrix Q = uniform_points(rng, 50, 2);
    Prediction a = predict(fit_gp(X, y, KernelKind::SeArd), Q);
    Prediction b = predict(fit_gp(Xp, yp, KernelKind::SeArd), Q);
    EXPECT_LT((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((a.variance - b.variance).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(GpProperties, StandardizationRoundTrip) {
  Rng rng = make_rng(33);
  Matrix X = uniform_points(rng, 20, 2);
  Vector y = (4 * X.col(0)).array().sin() + X.col(1).array().square();
  GpModel base = fit_gp(X, y, KernelKind::SeArd);
  GpModel scaled = fit_gp(X * 10.0, y * 10.0, KernelKind::SeArd);
  Matrix Q = uniform_points(rng, 40, 2);
  Prediction a = predict(base, Q), b = predict(scaled, Q * 10.0);
  EXPECT_LT((a.mean - b.mean / 10.0).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(GpProperties, CholeskyReproducesCovariance) {
  Rng rng = make_rng(34);
  Matrix X = uniform_points(rng, 30, 2);
  Vector y = X.col(0).array().exp();
  GpModel m = fit_gp(X, y, KernelKind::SeArd);
  Matrix K = covariance_matrix(m.unit_inputs, m.unit_inputs, m.hyperparams.kernel);
  K.diagonal().array() += m.hyperparams.noise_var + m.jitter;
  const Matrix LLt = m.chol_factor * m.chol_factor.transpose();
  EXPECT_LT((LLt - K).norm() / K.norm(), 1e-8);
}

}  // namespace
}  // namespace netcage::gp
