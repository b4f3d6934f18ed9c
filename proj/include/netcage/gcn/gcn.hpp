#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Sparse>

#include "netcage/core/archive.hpp"
#include "netcage/core/types.hpp"
#include "netcage/sim/solver.hpp"
#include "netcage/sim/topology.hpp"

namespace netcage::gcn {

using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr int kLayerCount = 3;
constexpr Index kFeatureCount = 6;  // x0, y0, z0, speed, sin dir, cos dir
constexpr Index kOutputCount = 3;

template <typename Scalar>
  requires std::is_floating_point_v<Scalar>
Scalar swish(Scalar x) {
  return x / (Scalar(1) + std::exp(-x));
}

template <typename Scalar>
  requires std::is_floating_point_v<Scalar>
Scalar swish_derivative(Scalar x) {
  const Scalar s = Scalar(1) / (Scalar(1) + std::exp(-x));
  return s + x * s * (Scalar(1) - s);
}

template <typename Derived>
auto swish(const Eigen::MatrixBase<Derived>& x) {
  return x.unaryExpr([](typename Derived::Scalar v) { return swish(v); });
}

/// D^-1/2 (A + I) D^-1/2 for a symmetric 0/1 adjacency with zero diagonal.
Matrix normalized_adjacency(const Matrix& A);

/// Affine standardization of features and targets; columns are
/// (x - mean) / scale.
struct Standardization {
  RowVector feature_mean;
  RowVector feature_scale;
  RowVector target_mean;
  RowVector target_scale;

  static Standardization identity(Index features, Index targets);
};

using Weights = std::array<Matrix, kLayerCount>;

struct GcnModel {
  Weights layer_weights;                 // W^l is F_l x F_{l+1}
  std::array<Index, kLayerCount + 1> hidden_dims{};
  SparseMatrix norm_adjacency;
  Standardization feature_norm;
  Vector node_weights;
  Matrix rest_positions;  // N x 3, empty for graphs without coordinates
  std::uint64_t seed = 0;

  Index node_count() const { return norm_adjacency.rows(); }
};

/// Network output in standardized units. X stacks S graphs of N rows each.
Matrix network_forward(const SparseMatrix& A_hat, const Weights& W, const Matrix& X);

/// Raw features in, displacements (m) out. X is N x F0 or S*N x F0.
Matrix gcn_forward(const GcnModel& model, const Matrix& X);

/// Rest coordinates with the current broadcast to every node.
Matrix gcn_features(const Matrix& rest, const sim::SeaState& sea);

/// Displacement field for one sea state, N x 3.
Matrix gcn_predict(const GcnModel& model, const sim::SeaState& sea);

/// (1/N) sum_i w_i (1/3) sum_j (pred_ij - truth_ij)^2. Stacked inputs of S
/// graphs are averaged over the graphs.
double weighted_mse_loss(const Matrix& pred, const Matrix& truth, const Vector& w);

/// Layers 1-5 weigh 1, layers 6-10 weigh 2, the apex 4.
Vector default_node_weights(const sim::CageTopology& topo);

struct LossGradient {
  double loss = 0.0;
  Weights gradient;
};

/// Weighted loss of the standardized network and its gradient in every W^l.
LossGradient loss_gradient(const SparseMatrix& A_hat, const Weights& W, const Matrix& X, const Matrix& T,
                           const Vector& w);

/// Glorot-uniform weights for dims F0..F3.
Weights init_weights(const std::array<Index, kLayerCount + 1>& dims, std::uint64_t seed);

struct GcnConfig {
  Index hidden = 64;
  double learning_rate = 1e-2;
  int epochs = 5000;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
  Vector node_weights;  // empty selects default_node_weights
  bool standardize = true;
};

struct GcnTraining {
  GcnModel model;
  std::vector<double> train_loss;       // per epoch, before the update
  std::vector<double> validation_loss;  // empty without a holdout
  int best_epoch = 0;
  std::vector<Index> validation_rows;
};

/// Full-batch gradient descent; keeps the weights of the epoch with the
/// lowest validation loss (training loss when the holdout is empty).
GcnTraining train_gcn(const sim::CageTopology& topo, std::span<const sim::CageDeformation> data,
                      const GcnConfig& config = {});

void write_gcn(ByteWriter& out, const GcnModel& model);
GcnModel read_gcn(ByteReader& in);

}  // namespace netcage::gcn
