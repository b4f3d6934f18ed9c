#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "netcage/core/rng.hpp"
#include "netcage/nargp/nargp.hpp"

namespace netcage::nargp {
namespace {

using gp::FidelityDataset;

constexpr double kPi = 3.14159265358979323846;

double f_low(double x) { return std::sin(8.0 * kPi * x); }
double f_high(double x) { return (x - std::sqrt(2.0)) * f_low(x) * f_low(x); }

gp::FitOptions noiseless() {
  gp::FitOptions o;
  o.learn_noise = false;
  o.fixed_noise = 1e-10;
  return o;
}

Matrix linspace(Index n, double lo = 0.0, double hi = 1.0) {
  Matrix X(n, 1);
  for (Index i = 0; i < n; ++i) X(i, 0) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return X;
}

// Evenly spread subset of rows.
Matrix nested_subset(const Matrix& X, Index k) {
  Matrix S(k, X.cols());
  for (Index i = 0; i < k; ++i) {
    const auto r = static_cast<Index>(std::lround(static_cast<double>(i) * (X.rows() - 1) / (k - 1)));
    S.row(i) = X.row(r);
  }
  return S;
}

FidelityDataset make_level(int level, const Matrix& X, double (*f)(double)) {
  FidelityDataset d;
  d.level = level;
  d.inputs = X;
  d.outputs.resize(X.rows());
  for (Index i = 0; i < X.rows(); ++i) d.outputs(i) = f(X(i, 0));
  return d;
}

std::vector<FidelityDataset> benchmark_levels(Index n_low = 50, Index n_high = 14) {
  const Matrix XL = linspace(n_low);
  return {make_level(1, XL, f_low), make_level(2, nested_subset(XL, n_high), f_high)};
}

double rmse(const Vector& a, const Vector& b) { return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size())); }

Vector truth(const Matrix& X, double (*f)(double)) {
  Vector y(X.rows());
  for (Index i = 0; i < X.rows(); ++i) y(i) = f(X(i, 0));
  return y;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

// ---- composite kernel ----------------------------------------------------

TEST(CompositeKernel, CoincidentInputsGiveSummedAmplitudes) {
  gp::NargpKernel<double> k{{1.7, Vector::Constant(2, 3.0)}, 0.4, {0.3, Vector::Constant(2, 5.0)}};
  Vector u(3);
  u << 0.1, -0.2, 2.0;
  EXPECT_NEAR(gp::composite_kernel(u, u, k), 2.0, 1e-15);
}

TEST(CompositeKernel, ZeroFWeightIsSumOfSeArd) {
  gp::NargpKernel<double> k{{1.7, Vector::Constant(2, 3.0)}, 0.0, {0.3, Vector::Constant(2, 5.0)}};
  Vector u(3), v(3);
  u << 0.1, -0.2, 2.0;
  v << 0.4, 0.3, -7.0;
  const double expected = gp::se_ard_kernel(u.head(2), v.head(2), k.rho) + gp::se_ard_kernel(u.head(2), v.head(2), k.delta);
  EXPECT_NEAR(gp::composite_kernel(u, v, k), expected, 1e-15);
}

TEST(CompositeKernel, Symmetric) {
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    gp::NargpKernel<double> k{{1 + uniform01(rng), Vector::Constant(2, 4 * uniform01(rng))},
                              uniform01(rng),
                              {uniform01(rng), Vector::Constant(2, 4 * uniform01(rng))}};
    Vector u(3), v(3);
    for (int i = 0; i < 3; ++i) u(i) = uniform01(rng), v(i) = uniform01(rng);
    EXPECT_NEAR(gp::composite_kernel(u, v, k), gp::composite_kernel(v, u, k), 1e-12);
  }
}

TEST(CompositeKernel, WrongLengthThrows) {
  gp::NargpKernel<double> k{{1.0, Vector::Ones(2)}, 1.0, {1.0, Vector::Ones(2)}};
  Vector u = Vector::Zero(2);
  EXPECT_EQ(code_of([&] { gp::composite_kernel(u, u, k); }), ErrorCode::DimensionMismatch);
}

// ---- validate_nested -----------------------------------------------------

TEST(ValidateNested, AcceptsSubset) {
  const auto levels = benchmark_levels();
  const auto report = validate_nested(levels);
  EXPECT_FALSE(report.surrogate_mode);
}

TEST(ValidateNested, NamesOffendingRow) {
  auto levels = benchmark_levels();
  levels[1].inputs(5, 0) += 0.013;
  try {
    validate_nested(levels);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NestedViolation);
    EXPECT_NE(std::string(e.what()).find("row 5"), std::string::npos) << e.what();
  }
}

TEST(ValidateNested, EmptyLevel) {
  auto levels = benchmark_levels();
  levels[1].inputs.resize(0, 1);
  levels[1].outputs.resize(0);
  EXPECT_EQ(code_of([&] { validate_nested(levels); }), ErrorCode::EmptyLevel);
}

TEST(ValidateNested, SurrogateModeOnlyNotes) {
  auto levels = benchmark_levels();
  levels[1].inputs.array() += 0.0071;
  const auto report = validate_nested(levels, true);
  EXPECT_TRUE(report.surrogate_mode);
  EXPECT_FALSE(report.note.empty());
}

TEST(ValidateNested, ShuffledLevelsRejected) {
  auto levels = benchmark_levels();
  std::swap(levels[0], levels[1]);
  EXPECT_EQ(code_of([&] { validate_nested(levels); }), ErrorCode::LevelOrder);
  EXPECT_EQ(code_of([&] { fit_nargp(levels); }), ErrorCode::LevelOrder);
}

// ---- fit_nargp -----------------------------------------------------------

TEST(FitNargp, SingleLevelMatchesPlainGp) {
  const auto levels = benchmark_levels();
  NargpConfig cfg;
  cfg.fit.seed = 17;
  const auto model = fit_nargp(std::span(levels).first(1), cfg);
  const auto plain = gp::fit_gp(levels[0], cfg.fit);
  ASSERT_EQ(model.num_levels(), 1);
  EXPECT_LT((gp::pack_log(model.levels[0].hyperparams.kernel) - gp::pack_log(plain.hyperparams.kernel)).norm(), 1e-12);
  const Matrix Xs = linspace(200);
  const auto a = predict_nargp(model, Xs);
  const auto b = gp::predict(plain, Xs);
  EXPECT_LT((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((a.variance - b.variance).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitNargp, TwoFidelityBenchmark) {
  const auto levels = benchmark_levels();
  NargpConfig cfg;
  cfg.fit = noiseless();
  const auto model = fit_nargp(levels, cfg);
  const Matrix grid = linspace(1000);
  const Vector exact = truth(grid, f_high);
  const double err_nargp = rmse(predict_nargp(model, grid).mean, exact);
  const auto hf_only = gp::fit_gp(levels[1], cfg.fit);
  const double err_hf = rmse(gp::predict(hf_only, grid).mean, exact);
  EXPECT_LT(err_nargp, 0.05);
  EXPECT_GT(err_hf, 0.2);
}

TEST(FitNargp, FreeParameterCountIs2dPlus3) {
  for (Index d : {1, 2, 3}) {
    Rng rng = make_rng(11, static_cast<std::uint64_t>(d));
    Matrix XL(30, d);
    for (Index i = 0; i < XL.size(); ++i) XL.data()[i] = uniform01(rng);
    FidelityDataset lo{1, XL, XL.rowwise().sum().array().sin().matrix(), {}, {}, {}, {}};
    Matrix XH = XL.topRows(8);
    FidelityDataset hi{2, XH, 2.0 * XH.rowwise().sum().array().sin().matrix(), {}, {}, {}, {}};
    NargpConfig cfg;
    cfg.fit.restarts = 2;
    const std::vector<FidelityDataset> levels{lo, hi};
    const auto model = fit_nargp(levels, cfg);
    EXPECT_EQ(gp::pack_log(model.levels[1].hyperparams.kernel).size(), 2 * d + 3);
    EXPECT_EQ(model.hyperparams(2).free_param_count(), 2 * d + 3);
    EXPECT_EQ(model.levels[1].training_inputs.cols(), d + 1);
  }
}

TEST(FitNargp, StoresAugmentedInputs) {
  const auto levels = benchmark_levels();
  const auto model = fit_nargp(levels);
  const auto& lvl2 = model.levels[1];
  const Vector lower = gp::predict(model.levels[0], lvl2.training_inputs.leftCols(1), gp::VarianceKind::Latent).mean;
  EXPECT_LT((lvl2.training_inputs.col(1) - lower).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FitNargp, IdentityCrossCorrelationLearned) {
  const Matrix XL = linspace(40);
  std::vector<FidelityDataset> levels{make_level(1, XL, [](double x) { return std::sin(3.0 * x); })};
  const auto base = gp::fit_gp(levels[0]);
  FidelityDataset hi;
  hi.level = 2;
  hi.inputs = nested_subset(XL, 10);
  hi.outputs = gp::predict(base, hi.inputs, gp::VarianceKind::Latent).mean;
  levels.push_back(hi);
  const auto model = fit_nargp(levels);
  const Matrix grid = linspace(300);
  const Vector l1 = gp::predict(model.levels[0], grid, gp::VarianceKind::Latent).mean;
  const Vector l2 = predict_nargp(model, grid).mean;
  const double scale = std::sqrt((l1.array() - l1.mean()).square().mean());
  EXPECT_LT(rmse(l1, l2) / scale, 1e-2);
}

TEST(FitNargp, SurrogateLowerLevel) {
  const auto levels = benchmark_levels();
  const auto lowest = gp::fit_gp(levels[0], noiseless());
  FidelityDataset hi = make_level(2, linspace(12, 0.013, 0.987), f_high);
  NargpConfig cfg;
  cfg.fit = noiseless();
  const auto model = fit_nargp_on(lowest, std::span(&hi, 1), cfg);
  ASSERT_EQ(model.num_levels(), 2);
  const auto p = predict_nargp(model, hi.inputs);
  EXPECT_LT((p.mean - hi.outputs).cwiseAbs().maxCoeff(), 1e-5);

  FidelityDataset wrong = hi;
  wrong.level = 3;
  EXPECT_EQ(code_of([&] { fit_nargp_on(lowest, std::span(&wrong, 1), cfg); }), ErrorCode::LevelOrder);
}

// ---- predict_nargp -------------------------------------------------------

class BenchmarkModel : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    levels_ = new std::vector<FidelityDataset>(benchmark_levels());
    NargpConfig cfg;
    cfg.fit = noiseless();
    model_ = new NargpModel(fit_nargp(*levels_, cfg));
  }
  static void TearDownTestSuite() {
    delete model_;
    delete levels_;
  }
  static std::vector<FidelityDataset>* levels_;
  static NargpModel* model_;
};
std::vector<FidelityDataset>* BenchmarkModel::levels_ = nullptr;
NargpModel* BenchmarkModel::model_ = nullptr;

TEST_F(BenchmarkModel, InterpolatesHighFidelityTrainingData) {
  const auto p = predict_nargp(*model_, (*levels_)[1].inputs);
  EXPECT_LT((p.mean - (*levels_)[1].outputs).cwiseAbs().maxCoeff(), 1e-5);
}

TEST_F(BenchmarkModel, VarianceNonNegative) {
  Rng rng = make_rng(5);
  Matrix Xs(1000, 1);
  for (Index i = 0; i < Xs.rows(); ++i) Xs(i, 0) = -0.2 + 1.4 * uniform01(rng);
  EXPECT_GE(predict_nargp(*model_, Xs).variance.minCoeff(), 0.0);
  PredictOptions mc{Propagation::MonteCarlo, 20, 1};
  EXPECT_GE(predict_nargp(*model_, Xs.topRows(50), mc).variance.minCoeff(), 0.0);
}

TEST_F(BenchmarkModel, ZeroLevelOneVarianceCollapsesMonteCarlo) {
  const Matrix Xs = (*levels_)[0].inputs;
  const Vector m1 = gp::predict(model_->levels[0], Xs, gp::VarianceKind::Latent).mean;
  const auto mc = propagate_samples(*model_, Xs, m1, Vector::Zero(Xs.rows()), 100, 9);
  const auto mp = predict_nargp(*model_, Xs);
  EXPECT_LT((mc.mean - mp.mean).cwiseAbs().maxCoeff(), 1e-8);
}

TEST_F(BenchmarkModel, MonteCarloDeterministicPerSeed) {
  const Matrix Xs = linspace(17, 0.01, 0.99);
  PredictOptions mc{Propagation::MonteCarlo, 50, 42};
  const auto a = predict_nargp(*model_, Xs, mc);
  const auto b = predict_nargp(*model_, Xs, mc);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
  mc.seed = 43;
  EXPECT_NE(predict_nargp(*model_, Xs, mc).mean, a.mean);
}

TEST_F(BenchmarkModel, RejectsBadSampleCountAndWidth) {
  const Matrix Xs = linspace(3);
  EXPECT_EQ(code_of([&] { predict_nargp(*model_, Xs, {Propagation::MonteCarlo, 1, 0}); }),
            ErrorCode::InvalidSampleCount);
  EXPECT_EQ(code_of([&] { predict_nargp(*model_, Matrix::Zero(3, 2)); }), ErrorCode::DimensionMismatch);
}

TEST_F(BenchmarkModel, ZeroFWeightMatchesSumKernelGp) {
  // Refit level 2 with k_f switched off and compare against a direct solve
  // with k_rho + k_delta on x alone.
  NargpModel m = *model_;
  auto& lvl = m.levels[1];
  auto k = std::get<gp::NargpKernel<double>>(lvl.hyperparams.kernel);
  k.f_weight = 0.0;
  gp::Hyperparams hp{k, std::max(lvl.hyperparams.noise_var, 1e-6)};
  lvl = gp::condition_gp(lvl.training_inputs, lvl.training_outputs, hp, lvl.normalization);

  const auto& nrm = lvl.normalization;
  auto to_x = [&](const Matrix& X) {
    Matrix U = X.col(0);
    U.array() = (U.array() - nrm.input_mean(0)) / nrm.input_scale(0);
    return U;
  };
  const Matrix Xt = to_x(lvl.training_inputs);
  const Vector yt = (lvl.training_outputs.array() - nrm.output_mean) / nrm.output_scale;
  Matrix K = gp::kernel_matrix(Xt, Xt, k.rho) + gp::kernel_matrix(Xt, Xt, k.delta);
  K.diagonal().array() += hp.noise_var + lvl.jitter;
  const Vector a = K.ldlt().solve(yt);

  const Matrix grid = linspace(101);
  const Matrix Xg = to_x(grid);
  const Matrix Ks = gp::kernel_matrix(Xg, Xt, k.rho) + gp::kernel_matrix(Xg, Xt, k.delta);
  const Vector expected = (Ks * a).array() * nrm.output_scale + nrm.output_mean;
  const Vector got = predict_nargp(m, grid).mean;
  EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(MonteCarlo, ConvergesWithSampleCount) {
  // Sparse level 1 so its posterior variance is not negligible.
  const Matrix XL = linspace(15);
  const std::vector<FidelityDataset> levels{make_level(1, XL, [](double x) { return std::sin(4.0 * x); }),
                                            make_level(2, nested_subset(XL, 6), [](double x) {
                                              return 1.5 * std::sin(4.0 * x) * std::sin(4.0 * x) + x;
                                            })};
  const auto model = fit_nargp(levels);
  const Matrix Xs = linspace(5, 0.03, 0.97);
  const auto small = predict_nargp(model, Xs, {Propagation::MonteCarlo, 1000, 1});
  const auto large = predict_nargp(model, Xs, {Propagation::MonteCarlo, 10000, 2});
  for (Index i = 0; i < Xs.rows(); ++i) {
    const double se = std::sqrt(small.variance(i) / 1000.0 + large.variance(i) / 10000.0);
    EXPECT_LT(std::abs(small.mean(i) - large.mean(i)), 3.0 * se) << "query " << i;
  }
}

}  // namespace
}  // namespace netcage::nargp
