#pragma once

#include <Eigen/Sparse>

#include "netcage/sim/params.hpp"
#include "netcage/sim/sea_state.hpp"
#include "netcage/sim/topology.hpp"

namespace netcage::sim {

struct CageDeformation {
  Matrix displacements;  // N x 3, from rest
  SeaState sea;
};

struct MooringLoads {
  Vector tensions;  // kMooringLines, kN; line j at azimuth offset + 30 j deg

  double horizontal_resultant(const MooringParams& p) const;
};

struct Equilibrium {
  CageDeformation deformation;
  MooringLoads loads;
  Eigen::Vector2d collar_offset = Eigen::Vector2d::Zero();
  double residual = 0.0;       // |R| / reference force
  double strain_energy = 0.0;  // sum 1/2 k (L - L0)^2, kJ
  int iterations = 0;
  int load_steps = 0;
};

/// Quasi-static net cage: elastic edge network with pretension balanced by
/// dead loads at rest, per-panel drag from the rest panel orientation, a
/// rigid collar translating horizontally and 12 linear mooring lines that can
/// go slack. Solved by Newton's method with load continuation.
class CageSolver {
 public:
  CageSolver(const CageTopology& topo, const CageParams& params);

  Equilibrium solve(const SeaState& sea) const;

  /// Nodal hydrodynamic load (N x 3, kN) for a sea state.
  Matrix hydrodynamic_load(const SeaState& sea) const;

  /// Mooring tensions for a collar offset.
  Vector mooring_tensions(const Eigen::Vector2d& u) const;

  Index dof_count() const { return 3 * free_nodes_ + 2; }

 private:
  struct Edge {
    Index i, j;
    double rest_length, stiffness, pretension;
  };

  double tension(const Edge& e, double L, double* slope) const;
  Matrix positions(const Vector& q) const;
  Vector residual(const Vector& q, const Matrix& f_ext) const;
  Eigen::SparseMatrix<double> stiffness(const Vector& q) const;
  Vector collar_force(const Eigen::Vector2d& u, Matrix* dF) const;

  CageParams params_;
  Matrix rest_;
  std::vector<Edge> edges_;
  Matrix dead_load_;  // N x 3, balances edge pretension at rest
  std::vector<std::array<Index, 4>> panels_;
  Matrix panel_normal_;    // P x 3, unit
  Vector panel_area_;      // P
  Vector panel_depth_;     // P, centroid z
  Matrix line_dirs_;       // 12 x 2, unit vectors toward the anchors
  Index free_nodes_ = 0;   // all nodes below layer 1
};

Equilibrium solve_equilibrium(const CageTopology& topo, const SeaState& sea, const CageParams& params);

}  // namespace netcage::sim
