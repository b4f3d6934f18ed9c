#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "netcage/core/angles.hpp"
#include "netcage/core/error.hpp"
#include "netcage/sim/dataset.hpp"

namespace netcage::sim {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

// ---- topology --------------------------------------------------------------

TEST(Topology, EdgeCountAndDegrees) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto topo = build_topology();
  EXPECT_EQ(topo.edges.size(), 640u);
  const auto deg = topo.degrees();
  std::map<Index, int> hist;
  for (Index d : deg) ++hist[d];
  EXPECT_EQ(hist[3], 32);
  EXPECT_EQ(hist[4], 32 * 9);
  EXPECT_EQ(hist[32], 1);
  EXPECT_EQ(hist.size(), 3u);
  for (Index p = 0; p < 32; ++p) EXPECT_EQ(deg[static_cast<std::size_t>(p)], 3);
  EXPECT_EQ(deg[static_cast<std::size_t>(kApex)], 32);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
}

TEST(Topology, AdjacencyMatchesRules) {
  const auto topo = build_topology();
  const Matrix& A = topo.adjacency;
  EXPECT_EQ(A, A.transpose());
  EXPECT_EQ(A.diagonal(), Vector::Zero(kNodeCount));
  EXPECT_EQ(A.sum(), 2.0 * 640);
  // Exhaustive check against the construction rules.
  for (Index i = 0; i < kNodeCount; ++i)
    for (Index j = 0; j < kNodeCount; ++j) {
      bool expect = false;
      if (i != j && i != kApex && j != kApex) {
        const Index li = layer_of(i), lj = layer_of(j), pi = position_of(i), pj = position_of(j);
        if (li == lj) expect = (pi - pj + 32) % 32 == 1 || (pj - pi + 32) % 32 == 1;
        if (pi == pj) expect = expect || std::abs(li - lj) == 1;
      } else if (i != j) {
        const Index other = i == kApex ? j : i;
        expect = layer_of(other) == kLayers;
      }
      ASSERT_EQ(A(i, j), expect ? 1.0 : 0.0) << i << "," << j;
    }
  EXPECT_EQ(A(32, 0), 1.0);  // node 33 sits below node 1
}

TEST(Geometry, DefaultDimensions) {
  const Matrix P = rest_geometry();
  for (Index p = 0; p < 32; ++p) EXPECT_NEAR(P.row(p).head<2>().norm(), 25.0, 1e-12);
  EXPECT_EQ(P.row(kApex), Eigen::RowVector3d(0, 0, -31));
  for (Index p = 0; p < 32; ++p) {
    const double a = rad2deg(std::atan2(P(p, 1), P(p, 0)));
    EXPECT_NEAR(wrap_degrees(a + 1e-9), 11.25 * static_cast<double>(p), 1e-8);
  }
  EXPECT_NEAR(P(node_index(8, 0), 2), -18.0, 1e-12);
  for (Index l = 2; l <= kLayers; ++l) EXPECT_LT(P(node_index(l, 0), 2), P(node_index(l - 1, 0), 2));
}

TEST(Geometry, RejectsInvalid) {
  EXPECT_EQ(code_of([] { rest_geometry({50, 18, 10, 8}); }), ErrorCode::InvalidGeometry);
  EXPECT_EQ(code_of([] { rest_geometry({-1, 18, 31, 8}); }), ErrorCode::InvalidGeometry);
}

// ---- sensors ---------------------------------------------------------------

TEST(Sensors, DefaultNodes) {
  const auto nodes = depth_sensor_nodes(rest_geometry(), SensorConfig{});
  EXPECT_EQ(nodes[0], node_index(4, 0));
  EXPECT_EQ(nodes[1], node_index(7, 0));
  EXPECT_EQ(nodes[2], kApex);
}

TEST(Sensors, ExtractShapesAndZero) {
  const Matrix rest = rest_geometry();
  CageDeformation def{Matrix::Zero(kNodeCount, 3), {}};
  MooringLoads loads{Vector::LinSpaced(12, 1, 12)};
  const auto r = sensor_extract(def, loads, SensorConfig{}, rest);
  EXPECT_EQ(r.shackle_loads.size(), 5);
  EXPECT_EQ(r.depth_displacements, Vector::Zero(3));
  EXPECT_EQ(r.shackle_loads(4), 5.0);
  def.displacements(kApex, 2) = 0.7;
  EXPECT_EQ(sensor_extract(def, loads, SensorConfig{}, rest).depth_displacements(2), 0.7);

  SensorConfig bad;
  bad.shackles[2] = 12;
  EXPECT_EQ(code_of([&] { sensor_extract(def, loads, bad, rest); }), ErrorCode::InvalidSensorIndex);
  SensorConfig unordered;
  unordered.depths = {15, 7, 31};
  EXPECT_EQ(code_of([&] { sensor_extract(def, loads, unordered, rest); }), ErrorCode::InvalidSensorIndex);
}

// ---- solver ----------------------------------------------------------------

class Solver : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { solver_ = new CageSolver(build_topology(), CageParams{}); }
  static void TearDownTestSuite() { delete solver_; }
  static CageSolver* solver_;
};
CageSolver* Solver::solver_ = nullptr;

TEST_F(Solver, RestIsEquilibrium) {
  const auto eq = solver_->solve({0.0, 123.0, 0.0, 0.0, 0.0});
  EXPECT_LT(eq.deformation.displacements.cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((eq.loads.tensions.array() - CageParams{}.mooring.pretension).abs().maxCoeff(), 1e-8);
}

Eigen::Matrix3d rot_z(double deg) {
  return Eigen::AngleAxisd(deg2rad(deg), Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

TEST_F(Solver, RingRotationEquivariance) {
  for (double speed : {0.4, 1.0}) {
    const auto a = solver_->solve({speed, 20.0, 0, 0, 0});
    const auto b = solver_->solve({speed, 31.25, 0, 0, 0});
    const Eigen::Matrix3d R = rot_z(11.25);
    double worst = 0;
    for (Index i = 0; i < kNodeCount; ++i) {
      const Index j = i == kApex ? kApex : node_index(layer_of(i), (position_of(i) + 1) % kRingNodes);
      const Eigen::Vector3d da = a.deformation.displacements.row(i).transpose();
      const Eigen::Vector3d db = b.deformation.displacements.row(j).transpose();
      worst = std::max(worst, (R * da - db).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-6) << "speed " << speed;
  }
}

TEST_F(Solver, MirrorSymmetry) {
  const auto a = solver_->solve({0.8, 40.0, 0, 0, 0});
  const auto b = solver_->solve({0.8, 320.0, 0, 0, 0});
  double worst = 0;
  for (Index i = 0; i < kNodeCount; ++i) {
    const Index j = i == kApex ? kApex : node_index(layer_of(i), (kRingNodes - position_of(i)) % kRingNodes);
    Eigen::RowVector3d da = a.deformation.displacements.row(i);
    da(1) = -da(1);
    worst = std::max(worst, (da - b.deformation.displacements.row(j)).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST_F(Solver, SpeedSweepMonotone) {
  const MooringParams mp;
  double prev_load = -1, prev_energy = -1;
  for (int k = 0; k <= 20; ++k) {
    const auto eq = solver_->solve({0.05 * k, 75.0, 0, 0, 0});
    EXPECT_LT(eq.residual, 1e-6);
    EXPECT_GE(eq.loads.tensions.minCoeff(), 0.0);
    EXPECT_TRUE(std::isfinite(eq.strain_energy));
    const double load = eq.loads.horizontal_resultant(mp);
    if (k > 0) {
      EXPECT_GT(load, prev_load) << "step " << k;
      EXPECT_GT(eq.strain_energy, prev_energy) << "step " << k;
    }
    prev_load = load;
    prev_energy = eq.strain_energy;
  }
}

TEST_F(Solver, MooringBalancesDrag) {
  const SeaState sea{0.9, 10.0, 0, 0, 0};
  const auto eq = solver_->solve(sea);
  const Matrix F = solver_->hydrodynamic_load(sea);
  EXPECT_NEAR(eq.loads.horizontal_resultant(MooringParams{}), F.leftCols(2).colwise().sum().norm(), 1e-6);
}

TEST_F(Solver, WavesAddDriftAndStayFinite) {
  const auto calm = solver_->solve({0.3, 0.0, 0.0, 0.0, 0.0});
  const auto rough = solver_->solve({0.3, 0.0, 3.0, 8.66, 0.0});
  EXPECT_GT(rough.collar_offset.x(), calm.collar_offset.x());
  const auto degenerate = solver_->solve({0.3, 0.0, 3.0, 0.0, 0.0});
  EXPECT_EQ(degenerate.deformation.displacements, calm.deformation.displacements);
}

TEST(SolverParams, RejectsInvalid) {
  CageParams p;
  p.net.solidity = 1.5;
  EXPECT_EQ(code_of([&] { CageSolver(build_topology(), p); }), ErrorCode::InvalidParams);
}

// ---- high fidelity ---------------------------------------------------------

TEST(HighFidelity, IdentityWhenDiscrepancyOff) {
  const auto eq = solve_equilibrium(build_topology(), {0.7, 45, 1, 5, 10}, CageParams{});
  const auto hf = synth_high_fidelity(eq.deformation, eq.loads, eq.deformation.sea, DiscrepancyParams::none(), 3);
  EXPECT_EQ(hf.deformation.displacements, eq.deformation.displacements);
  EXPECT_EQ(hf.loads.tensions, eq.loads.tensions);
}

TEST(HighFidelity, SeededAndBiased) {
  const auto eq = solve_equilibrium(build_topology(), {0.7, 45, 1, 5, 10}, CageParams{});
  const DiscrepancyParams d;
  const auto a = synth_high_fidelity(eq.deformation, eq.loads, eq.deformation.sea, d, 3);
  const auto b = synth_high_fidelity(eq.deformation, eq.loads, eq.deformation.sea, d, 3);
  const auto c = synth_high_fidelity(eq.deformation, eq.loads, eq.deformation.sea, d, 4);
  EXPECT_EQ(a.deformation.displacements, b.deformation.displacements);
  EXPECT_EQ(a.loads.tensions, b.loads.tensions);
  EXPECT_NE(a.loads.tensions, c.loads.tensions);
  EXPECT_GE(a.loads.tensions.minCoeff(), 0.0);
}

TEST(HighFidelity, MeanRelativeDepthDiscrepancyInBand) {
  const CageParams p;
  const auto run = simulate(200, 21, p, {}, 1);
  const auto rest = rest_geometry(p.geometry);
  double num = 0, den = 0;
  for (Index r = 0; r < run.lf.size(); ++r) {
    const auto lf = lf_sensor_row(run.lf, r, p.sensors, rest);
    num += (run.hf.depths.row(r).transpose() - lf.depth_displacements).cwiseAbs().sum();
    den += lf.depth_displacements.cwiseAbs().sum();
  }
  const double rel = num / den;
  RecordProperty("mean_relative_depth_discrepancy", std::to_string(rel));
  EXPECT_GE(rel, 0.10);
  EXPECT_LE(rel, 0.40);
}

// ---- sampling --------------------------------------------------------------

TEST(Sampling, BoundsCoverageAndDeterminism) {
  const SeaStateRanges r;
  const auto a = sample_sea_states(1000, r, 5);
  const auto b = sample_sea_states(1000, r, 5);
  ASSERT_EQ(a.size(), 1000u);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_sea_states(1000, r, 6));
  auto check = [&](auto get, double lo, double hi) {
    double mn = 1e300, mx = -1e300;
    for (const auto& s : a) {
      const double v = get(s);
      EXPECT_GE(v, lo);
      EXPECT_LT(v, hi + 1e-12);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    EXPECT_LT(mn - lo, 0.02 * (hi - lo));
    EXPECT_LT(hi - mx, 0.02 * (hi - lo));
  };
  check([](const SeaState& s) { return s.current_speed; }, 0.0, 1.0);
  check([](const SeaState& s) { return s.current_dir; }, 0.0, 360.0);
  check([](const SeaState& s) { return s.sig_wave_height; }, 0.0, 3.0);
  check([](const SeaState& s) { return s.peak_period; }, 0.0, 8.66);
  check([](const SeaState& s) { return s.wave_dir; }, 0.0, 360.0);
}

TEST(Sampling, StratifiedPerDimension) {
  const auto a = sample_sea_states(50, {}, 9);
  std::vector<int> hits(50, 0);
  for (const auto& s : a) ++hits[static_cast<std::size_t>(std::min(49.0, std::floor(s.current_speed * 50)))];
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Sampling, InvalidRanges) {
  SeaStateRanges r;
  r.current_speed = {1.0, 0.0};
  EXPECT_EQ(code_of([&] { sample_sea_states(10, r, 1); }), ErrorCode::InvalidRange);
  EXPECT_EQ(code_of([&] { sample_sea_states(0, {}, 1); }), ErrorCode::InvalidRange);
}

// ---- series and datasets ---------------------------------------------------

TEST(Series, LayoutAndTransient) {
  Matrix D = Matrix::Zero(kNodeCount, 3);
  D(1, 0) = 2.0;
  const SeriesParams sp;
  const Matrix S = scenario_series(D, {0.5, 0, 0, 0, 0}, sp, 1);
  EXPECT_EQ(S.rows(), 963);
  EXPECT_EQ(S.cols(), sp.steps);
  EXPECT_LT(S(3, 0), 2.0);
  EXPECT_EQ(S(3, sp.steps - 1), 2.0);  // no waves, no oscillation
  EXPECT_EQ(S.row(0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dataset, ThreadIndependentAndRoundTrips) {
  const CageParams p;
  const auto a = simulate(12, 77, p, {}, 1);
  const auto b = simulate(12, 77, p, {}, 3);
  EXPECT_TRUE(a.failures.empty());
  EXPECT_EQ(a.lf.displacements, b.lf.displacements);
  EXPECT_EQ(a.lf.tensions, b.lf.tensions);
  EXPECT_EQ(a.hf.shackles, b.hf.shackles);
  EXPECT_EQ(a.hf.depths, b.hf.depths);
  EXPECT_LT(a.max_residual, 1e-6);

  const auto lf = lf_from_table(parse_table_text(format_table_text(to_table(a.lf))));
  EXPECT_EQ(lf.displacements, a.lf.displacements);
  EXPECT_EQ(lf.tensions, a.lf.tensions);
  EXPECT_EQ(lf.states, a.lf.states);
  EXPECT_EQ(lf.param_hash, p.hash());
  EXPECT_EQ(lf.seed, 77u);
  const auto hf = hf_from_table(parse_table_text(format_table_text(to_table(a.hf))));
  EXPECT_EQ(hf.depths, a.hf.depths);
  EXPECT_EQ(hf.scenario, a.hf.scenario);
}

TEST(Params, JsonRoundTripAndShippedDefaults) {
  CageParams p;
  p.net.solidity = 0.3;
  const auto q = params_from_json(params_to_json(p));
  EXPECT_EQ(q.hash(), p.hash());
  EXPECT_NE(q.hash(), CageParams{}.hash());
  EXPECT_EQ(load_params(default_params_path()).hash(), CageParams{}.hash());
  EXPECT_EQ(code_of([] { params_from_json("{\"version\": 2}"); }), ErrorCode::VersionUnsupported);
  EXPECT_EQ(code_of([] { params_from_json("{"); }), ErrorCode::SchemaViolation);
}

}  // namespace
}  // namespace netcage::sim
