#include "netcage/sim/solver.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

#include "netcage/core/angles.hpp"
#include "netcage/core/error.hpp"

namespace netcage::sim {

namespace {

constexpr double kGravity = 9.81;

// Smooth cable law: linear above, asymptotically slack below.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

struct DofMap {
  // (component, dof) pairs for one node.
  std::array<std::pair<int, Index>, 3> entries;
  int count = 0;
};

}  // namespace

double MooringLoads::horizontal_resultant(const MooringParams& p) const {
  Eigen::Vector2d f = Eigen::Vector2d::Zero();
  for (Index j = 0; j < tensions.size(); ++j) {
    const double a = deg2rad(p.azimuth_offset_deg + 30.0 * static_cast<double>(j));
    f += tensions(j) * Eigen::Vector2d(std::cos(a), std::sin(a));
  }
  return f.norm();
}

CageSolver::CageSolver(const CageTopology& topo, const CageParams& params) : params_(params) {
  const auto& n = params.net;
  if (!(n.water_density > 0 && n.solidity > 0 && n.solidity < 1 && n.cd_normal >= 0 && n.cd_tangential >= 0 &&
        n.ring_axial_stiffness > 0 && n.vertical_axial_stiffness > 0 && n.ring_pretension > 0 &&
        n.vertical_pretension > 0 && n.wave_drift >= 0))
    raise(ErrorCode::InvalidParams, "net parameters out of range");
  if (!(params.mooring.pretension > 0 && params.mooring.stiffness > 0))
    raise(ErrorCode::InvalidParams, "mooring pretension and stiffness must be positive");
  if (!(params.solver.tolerance > 0 && params.solver.max_iterations > 0 && params.solver.max_load_steps > 0))
    raise(ErrorCode::InvalidParams, "solver settings must be positive");
  if (topo.node_count != kNodeCount || topo.rest_positions.rows() != kNodeCount)
    raise(ErrorCode::InvalidParams, "solver expects the 321-node cage topology with rest positions");

  rest_ = topo.rest_positions;
  free_nodes_ = kNodeCount - kRingNodes;

  for (const auto& [i, j] : topo.edges) {
    const double L0 = (rest_.row(j) - rest_.row(i)).norm();
    const bool ring = layer_of(i) == layer_of(j);
    const double EA = ring ? n.ring_axial_stiffness : n.vertical_axial_stiffness;
    edges_.push_back({i, j, L0, EA / L0, ring ? n.ring_pretension : n.vertical_pretension});
  }

  dead_load_ = Matrix::Zero(kNodeCount, 3);
  for (const auto& e : edges_) {
    const Eigen::RowVector3d d = rest_.row(e.j) - rest_.row(e.i);
    const double T = tension(e, e.rest_length, nullptr);
    dead_load_.row(e.i) -= T * d / e.rest_length;
    dead_load_.row(e.j) += T * d / e.rest_length;
  }

  panels_ = net_panels();
  const auto P = static_cast<Index>(panels_.size());
  panel_normal_.resize(P, 3);
  panel_area_.resize(P);
  panel_depth_.resize(P);
  for (Index k = 0; k < P; ++k) {
    const auto& c = panels_[static_cast<std::size_t>(k)];
    Eigen::Vector3d a;
    Eigen::Vector3d centroid;
    if (c[2] == c[3]) {
      const Eigen::Vector3d x0 = rest_.row(c[0]), x1 = rest_.row(c[1]), x2 = rest_.row(c[2]);
      a = 0.5 * (x1 - x0).cross(x2 - x0);
      centroid = (x0 + x1 + x2) / 3.0;
    } else {
      const Eigen::Vector3d x0 = rest_.row(c[0]), x1 = rest_.row(c[1]), x2 = rest_.row(c[2]), x3 = rest_.row(c[3]);
      a = 0.5 * (x2 - x0).cross(x3 - x1);
      centroid = 0.25 * (x0 + x1 + x2 + x3);
    }
    panel_area_(k) = a.norm();
    panel_normal_.row(k) = a.transpose() / a.norm();
    panel_depth_(k) = centroid.z();
  }

  line_dirs_.resize(kMooringLines, 2);
  for (int j = 0; j < kMooringLines; ++j) {
    const double ang = deg2rad(params.mooring.azimuth_offset_deg + 30.0 * j);
    line_dirs_.row(j) << std::cos(ang), std::sin(ang);
  }
}

double CageSolver::tension(const Edge& e, double L, double* slope) const {
  const double s = 0.05 * e.pretension;
  const double x = (e.pretension + e.stiffness * (L - e.rest_length)) / s;
  if (slope) *slope = e.stiffness * sigmoid(x);
  return s * softplus(x);
}

Matrix CageSolver::hydrodynamic_load(const SeaState& sea) const {
  const auto& n = params_.net;
  const double th = deg2rad(sea.current_dir);
  const Eigen::Vector3d U(sea.current_speed * std::cos(th), sea.current_speed * std::sin(th), 0.0);

  double uw0 = 0.0, kw = 0.0;
  Eigen::Vector3d ew = Eigen::Vector3d::Zero();
  if (sea.peak_period > 0.0 && sea.sig_wave_height > 0.0) {
    // Deep-water linear wave, height capped at the breaking steepness 1/7.
    const double L = kGravity * sea.peak_period * sea.peak_period / (2.0 * kPi);
    const double H = std::min(sea.sig_wave_height, L / 7.0);
    kw = 2.0 * kPi / L;
    uw0 = kPi * H / sea.peak_period;
    const double wd = deg2rad(sea.wave_dir);
    ew << std::cos(wd), std::sin(wd), 0.0;
  }

  Matrix F = Matrix::Zero(kNodeCount, 3);
  const double q = 0.5 * n.water_density * n.solidity;
  for (Index k = 0; k < panel_area_.size(); ++k) {
    const Eigen::Vector3d nk = panel_normal_.row(k).transpose();
    const double un = U.dot(nk);
    const Eigen::Vector3d ut = U - un * nk;
    Eigen::Vector3d f = q * panel_area_(k) * (n.cd_normal * un * std::abs(un) * nk + n.cd_tangential * ut.norm() * ut);
    if (uw0 > 0.0) {
      const double uw = uw0 * std::exp(kw * std::min(panel_depth_(k), 0.0));
      f += q * panel_area_(k) * n.cd_normal * n.wave_drift * uw * uw * std::abs(nk.dot(ew)) * ew;
    }
    const auto& c = panels_[static_cast<std::size_t>(k)];
    if (c[2] == c[3]) {
      for (int m = 0; m < 3; ++m) F.row(c[static_cast<std::size_t>(m)]) += f.transpose() / 3.0;
    } else {
      for (Index idx : c) F.row(idx) += 0.25 * f.transpose();
    }
  }
  return F;
}

Vector CageSolver::mooring_tensions(const Eigen::Vector2d& u) const {
  Vector T(kMooringLines);
  for (int j = 0; j < kMooringLines; ++j) {
    const double stretch = -line_dirs_.row(j).dot(u);
    T(j) = std::max(0.0, params_.mooring.pretension + params_.mooring.stiffness * stretch);
  }
  return T;
}

Vector CageSolver::collar_force(const Eigen::Vector2d& u, Matrix* dF) const {
  const Vector T = mooring_tensions(u);
  Vector f = Vector::Zero(2);
  if (dF) *dF = Matrix::Zero(2, 2);
  for (int j = 0; j < kMooringLines; ++j) {
    const Eigen::Vector2d e = line_dirs_.row(j).transpose();
    f += T(j) * e;
    if (dF && T(j) > 0.0) *dF += params_.mooring.stiffness * e * e.transpose();
  }
  return f;
}

Matrix CageSolver::positions(const Vector& q) const {
  Matrix X = rest_;
  const Index c = 3 * free_nodes_;
  for (Index p = 0; p < kRingNodes; ++p) {
    X(p, 0) += q(c);
    X(p, 1) += q(c + 1);
  }
  for (Index f = 0; f < free_nodes_; ++f) X.row(kRingNodes + f) += q.segment<3>(3 * f).transpose();
  return X;
}

Vector CageSolver::residual(const Vector& q, const Matrix& f_ext) const {
  const Matrix X = positions(q);
  Matrix F = dead_load_ + f_ext;
  for (const auto& e : edges_) {
    const Eigen::RowVector3d d = X.row(e.j) - X.row(e.i);
    const double L = d.norm();
    const Eigen::RowVector3d f = tension(e, L, nullptr) * d / L;
    F.row(e.i) += f;
    F.row(e.j) -= f;
  }
  Vector R(dof_count());
  for (Index f = 0; f < free_nodes_; ++f) R.segment<3>(3 * f) = F.row(kRingNodes + f).transpose();
  Eigen::Vector2d collar = Eigen::Vector2d::Zero();
  for (Index p = 0; p < kRingNodes; ++p) collar += F.row(p).head<2>().transpose();
  const Index c = 3 * free_nodes_;
  R.segment<2>(c) = collar + collar_force(q.segment<2>(c), nullptr);
  return R;
}

Eigen::SparseMatrix<double> CageSolver::stiffness(const Vector& q) const {
  const Matrix X = positions(q);
  const Index c = 3 * free_nodes_;
  auto dofs = [&](Index node) {
    DofMap m;
    if (node < kRingNodes) {
      m.entries[0] = {0, c};
      m.entries[1] = {1, c + 1};
      m.count = 2;
    } else {
      const Index f = node - kRingNodes;
      for (int k = 0; k < 3; ++k) m.entries[static_cast<std::size_t>(k)] = {k, 3 * f + k};
      m.count = 3;
    }
    return m;
  };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(edges_.size() * 36 + 4);
  auto add_block = [&](const DofMap& a, const DofMap& b, const Eigen::Matrix3d& K, double sign) {
    for (int r = 0; r < a.count; ++r)
      for (int s = 0; s < b.count; ++s) {
        const auto [ca, da] = a.entries[static_cast<std::size_t>(r)];
        const auto [cb, db] = b.entries[static_cast<std::size_t>(s)];
        trip.emplace_back(da, db, sign * K(ca, cb));
      }
  };
  for (const auto& e : edges_) {
    const Eigen::Vector3d d = (X.row(e.j) - X.row(e.i)).transpose();
    const double L = d.norm();
    double slope = 0.0;
    const double T = tension(e, L, &slope);
    const Eigen::Vector3d u = d / L;
    const Eigen::Matrix3d nn = u * u.transpose();
    const Eigen::Matrix3d Ke = slope * nn + (T / L) * (Eigen::Matrix3d::Identity() - nn);
    const DofMap a = dofs(e.i), b = dofs(e.j);
    add_block(a, a, Ke, 1.0);
    add_block(b, b, Ke, 1.0);
    add_block(a, b, Ke, -1.0);
    add_block(b, a, Ke, -1.0);
  }
  Matrix dF;
  collar_force(q.segment<2>(c), &dF);
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s) trip.emplace_back(c + r, c + s, dF(r, s));

  Eigen::SparseMatrix<double> K(dof_count(), dof_count());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

Equilibrium CageSolver::solve(const SeaState& sea) const {
  if (!(sea.current_speed >= 0 && sea.sig_wave_height >= 0 && sea.peak_period >= 0) ||
      !std::isfinite(sea.current_speed + sea.current_dir + sea.sig_wave_height + sea.peak_period + sea.wave_dir))
    raise(ErrorCode::InvalidParams, "sea state must be finite and nonnegative");

  const Matrix hydro = hydrodynamic_load(sea);
  const double ref = dead_load_.norm() + hydro.norm();
  const double tol = params_.solver.tolerance;

  Vector q = Vector::Zero(dof_count());
  Equilibrium out;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool pattern = false;

  auto newton = [&](Vector& x, double lambda, double& rel) {
    const Matrix f_ext = lambda * hydro;
    Vector R = residual(x, f_ext);
    double norm = R.norm();
    for (int it = 0; it < params_.solver.max_iterations; ++it) {
      rel = norm / ref;
      if (rel <= tol) return true;
      const auto K = stiffness(x);
      if (!pattern) {
        ldlt.analyzePattern(K);
        pattern = true;
      }
      ldlt.factorize(K);
      if (ldlt.info() != Eigen::Success) return false;
      const Vector dx = ldlt.solve(R);
      if (!dx.allFinite()) return false;
      ++out.iterations;
      double alpha = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 30; ++bt, alpha *= 0.5) {
        const Vector trial = x + alpha * dx;
        const Vector Rt = residual(trial, f_ext);
        const double nt = Rt.norm();
        if (std::isfinite(nt) && nt < norm) {
          x = trial;
          R = Rt;
          norm = nt;
          moved = true;
          break;
        }
      }
      if (!moved) {
        rel = norm / ref;
        return rel <= tol;
      }
    }
    rel = norm / ref;
    return rel <= tol;
  };

  double lambda = 0.0, step = 1.0, rel = 0.0;
  int attempts = 0;
  while (true) {
    const double target = std::min(1.0, lambda + step);
    Vector trial = q;
    if (newton(trial, target, rel)) {
      q = trial;
      lambda = target;
      ++out.load_steps;
      if (lambda >= 1.0) break;
      step = std::min(2.0 * step, 1.0 - lambda);
    } else {
      step *= 0.5;
    }
    if (++attempts > params_.solver.max_load_steps || step < 1e-6)
      raise(ErrorCode::NoConvergence, "equilibrium did not converge: relative residual " + std::to_string(rel) +
                                          " after " + std::to_string(out.iterations) + " iterations at load factor " +
                                          std::to_string(lambda));
  }

  const Matrix X = positions(q);
  out.deformation.displacements = X - rest_;
  out.deformation.sea = sea;
  const Eigen::Vector2d u = q.segment<2>(3 * free_nodes_);
  out.collar_offset = u;
  out.loads.tensions = mooring_tensions(u);
  out.residual = rel;
  for (const auto& e : edges_) {
    const double dL = (X.row(e.j) - X.row(e.i)).norm() - e.rest_length;
    out.strain_energy += 0.5 * e.stiffness * dL * dL;
  }
  if (!out.deformation.displacements.allFinite()) raise(ErrorCode::NoConvergence, "non-finite equilibrium");
  return out;
}

Equilibrium solve_equilibrium(const CageTopology& topo, const SeaState& sea, const CageParams& params) {
  return CageSolver(topo, params).solve(sea);
}

}  // namespace netcage::sim
