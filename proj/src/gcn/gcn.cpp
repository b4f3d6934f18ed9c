#include "netcage/gcn/gcn.hpp"

#include <limits>
#include <string>

#include "netcage/core/angles.hpp"
#include "netcage/core/error.hpp"
#include "netcage/core/log.hpp"
#include "netcage/core/rng.hpp"

namespace netcage::gcn {

Matrix normalized_adjacency(const Matrix& A) {
  if (A.rows() != A.cols()) raise(ErrorCode::DimensionMismatch, "adjacency must be square");
  const Index n = A.rows();
  for (Index i = 0; i < n; ++i) {
    if (A(i, i) != 0.0) raise(ErrorCode::AsymmetricInput, "adjacency has a self loop at node " + std::to_string(i + 1));
    for (Index j = i + 1; j < n; ++j) {
      if (A(i, j) != A(j, i))
        raise(ErrorCode::AsymmetricInput,
              "adjacency differs at (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
      if (A(i, j) != 0.0 && A(i, j) != 1.0) raise(ErrorCode::AsymmetricInput, "adjacency entries must be 0 or 1");
    }
  }
  Matrix At = A + Matrix::Identity(n, n);
  const Vector d = At.rowwise().sum().cwiseSqrt().cwiseInverse();
  return d.asDiagonal() * At * d.asDiagonal();
}

Standardization Standardization::identity(Index features, Index targets) {
  return {RowVector::Zero(features), RowVector::Ones(features), RowVector::Zero(targets), RowVector::Ones(targets)};
}

namespace {

// Applies A_hat to each N-row block of a stacked matrix.
Matrix propagate(const SparseMatrix& A, const Matrix& H) {
  const Index n = A.rows();
  if (n == 0 || H.rows() % n != 0)
    raise(ErrorCode::DimensionMismatch, "stacked rows are not a multiple of the node count");
  Matrix out(H.rows(), H.cols());
  for (Index s = 0; s < H.rows() / n; ++s) out.middleRows(s * n, n).noalias() = A * H.middleRows(s * n, n);
  return out;
}

void check_weights(const Weights& W, Index features) {
  if (W[0].rows() != features)
    raise(ErrorCode::DimensionMismatch,
          "feature count " + std::to_string(features) + " does not match F0 = " + std::to_string(W[0].rows()));
  for (int l = 1; l < kLayerCount; ++l)
    if (W[static_cast<std::size_t>(l)].rows() != W[static_cast<std::size_t>(l - 1)].cols())
      raise(ErrorCode::DimensionMismatch, "layer " + std::to_string(l + 1) + " does not chain");
}

Vector stacked_weights(const Vector& w, Index rows) {
  const Index n = w.size();
  if (n == 0 || rows % n != 0) raise(ErrorCode::DimensionMismatch, "node weights do not match the row count");
  return w.replicate(rows / n, 1);
}

Matrix sigmoid(const Matrix& Z) { return ((-Z.array()).exp() + 1.0).inverse().matrix(); }

Matrix standardize(const Matrix& X, const RowVector& mean, const RowVector& scale) {
  return (X.rowwise() - mean).array().rowwise() / scale.array();
}

}  // namespace

Matrix network_forward(const SparseMatrix& A_hat, const Weights& W, const Matrix& X) {
  check_weights(W, X.cols());
  Matrix H = X;
  for (int l = 0; l < kLayerCount; ++l) {
    Matrix Z = propagate(A_hat, H) * W[static_cast<std::size_t>(l)];
    H = l + 1 < kLayerCount ? Matrix(Z.cwiseProduct(sigmoid(Z))) : std::move(Z);
  }
  return H;
}

Matrix gcn_forward(const GcnModel& model, const Matrix& X) {
  const auto& fn = model.feature_norm;
  if (X.cols() != fn.feature_mean.size())
    raise(ErrorCode::DimensionMismatch, "expected " + std::to_string(fn.feature_mean.size()) + " features, got " +
                                            std::to_string(X.cols()));
  const Matrix Y = network_forward(model.norm_adjacency, model.layer_weights,
                                   standardize(X, fn.feature_mean, fn.feature_scale));
  return (Y.array().rowwise() * fn.target_scale.array()).rowwise() + fn.target_mean.array();
}

Matrix gcn_features(const Matrix& rest, const sim::SeaState& sea) {
  Matrix X(rest.rows(), kFeatureCount);
  const double a = deg2rad(sea.current_dir);
  X.leftCols(3) = rest;
  X.col(3).setConstant(sea.current_speed);
  X.col(4).setConstant(std::sin(a));
  X.col(5).setConstant(std::cos(a));
  return X;
}

Matrix gcn_predict(const GcnModel& model, const sim::SeaState& sea) {
  if (model.rest_positions.rows() != model.node_count())
    raise(ErrorCode::ModelMissing, "GCN model carries no rest coordinates");
  return gcn_forward(model, gcn_features(model.rest_positions, sea));
}

double weighted_mse_loss(const Matrix& pred, const Matrix& truth, const Vector& w) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
    raise(ErrorCode::DimensionMismatch, "prediction and truth shapes differ");
  const Vector ws = stacked_weights(w, pred.rows());
  const Vector per_node = (pred - truth).rowwise().squaredNorm() / static_cast<double>(pred.cols());
  return ws.dot(per_node) / static_cast<double>(pred.rows());
}

Vector default_node_weights(const sim::CageTopology& topo) {
  Vector w(topo.node_count);
  for (Index i = 0; i < topo.node_count; ++i) {
    const Index layer = sim::layer_of(i);
    w(i) = layer > sim::kLayers ? 4.0 : layer >= 6 ? 2.0 : 1.0;
  }
  return w;
}

LossGradient loss_gradient(const SparseMatrix& A_hat, const Weights& W, const Matrix& X, const Matrix& T,
                           const Vector& w) {
  check_weights(W, X.cols());
  // Forward with cached sigmoids; swish(z) = z s(z), swish'(z) = s + z s (1 - s).
  const Matrix P0 = propagate(A_hat, X);
  const Matrix Z0 = P0 * W[0];
  const Matrix S0 = sigmoid(Z0);
  const Matrix P1 = propagate(A_hat, Z0.cwiseProduct(S0));
  const Matrix Z1 = P1 * W[1];
  const Matrix S1 = sigmoid(Z1);
  const Matrix P2 = propagate(A_hat, Z1.cwiseProduct(S1));
  const Matrix Y = P2 * W[2];

  LossGradient out;
  out.loss = weighted_mse_loss(Y, T, w);
  const Vector ws = stacked_weights(w, Y.rows());
  const double c = 2.0 / (static_cast<double>(Y.cols()) * static_cast<double>(Y.rows()));
  const Matrix dY = c * (ws.asDiagonal() * (Y - T));

  auto dswish = [](const Matrix& Z, const Matrix& S) {
    return (S.array() + Z.array() * S.array() * (1.0 - S.array())).matrix();
  };
  out.gradient[2].noalias() = P2.transpose() * dY;
  const Matrix dZ1 = propagate(A_hat, dY * W[2].transpose()).cwiseProduct(dswish(Z1, S1));
  out.gradient[1].noalias() = P1.transpose() * dZ1;
  const Matrix dZ0 = propagate(A_hat, dZ1 * W[1].transpose()).cwiseProduct(dswish(Z0, S0));
  out.gradient[0].noalias() = P0.transpose() * dZ0;
  return out;
}

Weights init_weights(const std::array<Index, kLayerCount + 1>& dims, std::uint64_t seed) {
  auto rng = make_rng(seed, 0x67636e);
  Weights W;
  for (int l = 0; l < kLayerCount; ++l) {
    const Index fi = dims[static_cast<std::size_t>(l)], fo = dims[static_cast<std::size_t>(l + 1)];
    if (fi < 1 || fo < 1) raise(ErrorCode::InvalidArgument, "layer widths must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(fi + fo));
    Matrix& M = W[static_cast<std::size_t>(l)];
    M.resize(fi, fo);
    for (Index j = 0; j < fo; ++j)
      for (Index i = 0; i < fi; ++i) M(i, j) = limit * (2.0 * uniform01(rng) - 1.0);
  }
  return W;
}

namespace {

void column_stats(const Matrix& M, RowVector& mean, RowVector& scale) {
  mean = M.colwise().mean();
  scale = ((M.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(M.rows())).cwiseSqrt();
  for (Index j = 0; j < scale.size(); ++j)
    if (!(scale(j) > 1e-12)) scale(j) = 1.0;
}

}  // namespace

GcnTraining train_gcn(const sim::CageTopology& topo, std::span<const sim::CageDeformation> data,
                      const GcnConfig& config) {
  if (data.empty()) raise(ErrorCode::EmptyDataset, "no training scenarios");
  if (!(config.learning_rate > 0.0) || config.epochs < 0 || config.hidden < 1 ||
      !(config.validation_fraction >= 0.0 && config.validation_fraction < 1.0))
    raise(ErrorCode::InvalidArgument, "invalid GCN training configuration");
  const Index N = topo.node_count;
  const auto S = static_cast<Index>(data.size());
  for (Index s = 0; s < S; ++s) {
    const Matrix& D = data[static_cast<std::size_t>(s)].displacements;
    if (D.rows() != N || D.cols() != kOutputCount)
      raise(ErrorCode::InconsistentNodeCount, "scenario " + std::to_string(s + 1) + " is " +
                                                  std::to_string(D.rows()) + " x " + std::to_string(D.cols()));
  }
  const Vector w = config.node_weights.size() > 0 ? config.node_weights : default_node_weights(topo);
  if (w.size() != N || !(w.minCoeff() > 0.0)) raise(ErrorCode::InvalidArgument, "node weights must be positive, one per node");

  GcnTraining run;
  auto rng = make_rng(config.seed, 0x76616c);
  const Index n_val = std::min<Index>(static_cast<Index>(config.validation_fraction * static_cast<double>(S)), S - 1);
  auto perm = random_permutation<Index>(S, rng);
  run.validation_rows.assign(perm.begin(), perm.begin() + n_val);
  std::sort(run.validation_rows.begin(), run.validation_rows.end());
  std::vector<Index> train_rows(perm.begin() + n_val, perm.end());
  std::sort(train_rows.begin(), train_rows.end());

  auto stack = [&](const std::vector<Index>& rows, Matrix& X, Matrix& T) {
    X.resize(N * static_cast<Index>(rows.size()), kFeatureCount);
    T.resize(X.rows(), kOutputCount);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& d = data[static_cast<std::size_t>(rows[k])];
      X.middleRows(static_cast<Index>(k) * N, N) = gcn_features(topo.rest_positions, d.sea);
      T.middleRows(static_cast<Index>(k) * N, N) = d.displacements;
    }
  };
  Matrix Xt, Tt, Xv, Tv;
  stack(train_rows, Xt, Tt);
  stack(run.validation_rows, Xv, Tv);

  GcnModel& model = run.model;
  model.hidden_dims = {kFeatureCount, config.hidden, config.hidden, kOutputCount};
  model.norm_adjacency = normalized_adjacency(topo.adjacency).sparseView();
  model.node_weights = w;
  model.rest_positions = topo.rest_positions;
  model.seed = config.seed;
  auto& fn = model.feature_norm;
  if (config.standardize) {
    column_stats(Xt, fn.feature_mean, fn.feature_scale);
    column_stats(Tt, fn.target_mean, fn.target_scale);
  } else {
    fn = Standardization::identity(kFeatureCount, kOutputCount);
  }
  Xt = standardize(Xt, fn.feature_mean, fn.feature_scale);
  Tt = standardize(Tt, fn.target_mean, fn.target_scale);
  if (n_val > 0) {
    Xv = standardize(Xv, fn.feature_mean, fn.feature_scale);
    Tv = standardize(Tv, fn.target_mean, fn.target_scale);
  }

  Weights W = init_weights(model.hidden_dims, config.seed);
  double best = std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch <= config.epochs; ++epoch) {
    const auto lg = loss_gradient(model.norm_adjacency, W, Xt, Tt, w);
    if (!std::isfinite(lg.loss))
      raise(ErrorCode::Divergence, "training loss became non-finite at epoch " + std::to_string(epoch));
    run.train_loss.push_back(lg.loss);
    double score = lg.loss;
    if (n_val > 0) {
      score = weighted_mse_loss(network_forward(model.norm_adjacency, W, Xv), Tv, w);
      run.validation_loss.push_back(score);
    }
    if (score < best) {
      best = score;
      model.layer_weights = W;
      run.best_epoch = epoch;
    }
    if (epoch == config.epochs) break;
    for (int l = 0; l < kLayerCount; ++l)
      W[static_cast<std::size_t>(l)] -= config.learning_rate * lg.gradient[static_cast<std::size_t>(l)];
  }
  if (!std::isfinite(best)) raise(ErrorCode::Divergence, "validation loss never finite");
  log::info("gcn: best epoch " + std::to_string(run.best_epoch) + ", loss " + std::to_string(best));
  return run;
}

void write_gcn(ByteWriter& out, const GcnModel& model) {
  for (Index d : model.hidden_dims) out.put<std::int64_t>(d);
  for (const auto& W : model.layer_weights) out.put_matrix(W);
  Matrix trip(model.norm_adjacency.nonZeros(), 3);
  Index k = 0;
  for (Index c = 0; c < model.norm_adjacency.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(model.norm_adjacency, c); it; ++it, ++k)
      trip.row(k) << static_cast<double>(it.row()), static_cast<double>(it.col()), it.value();
  out.put<std::int64_t>(model.norm_adjacency.rows());
  out.put_matrix(trip);
  const auto& fn = model.feature_norm;
  for (const RowVector* v : {&fn.feature_mean, &fn.feature_scale, &fn.target_mean, &fn.target_scale})
    out.put_vector(v->transpose());
  out.put_vector(model.node_weights);
  out.put_matrix(model.rest_positions);
  out.put<std::uint64_t>(model.seed);
}

GcnModel read_gcn(ByteReader& in) {
  GcnModel m;
  for (auto& d : m.hidden_dims) d = static_cast<Index>(in.get<std::int64_t>());
  for (auto& W : m.layer_weights) W = in.get_matrix();
  const auto n = static_cast<Index>(in.get<std::int64_t>());
  const Matrix trip = in.get_matrix();
  if (n < 1 || trip.cols() != 3) raise(ErrorCode::CorruptBundle, "GCN adjacency malformed");
  std::vector<Eigen::Triplet<double>> t;
  for (Index k = 0; k < trip.rows(); ++k) {
    const auto r = static_cast<Index>(trip(k, 0)), c = static_cast<Index>(trip(k, 1));
    if (r < 0 || r >= n || c < 0 || c >= n) raise(ErrorCode::CorruptBundle, "GCN adjacency index out of range");
    t.emplace_back(r, c, trip(k, 2));
  }
  m.norm_adjacency.resize(n, n);
  m.norm_adjacency.setFromTriplets(t.begin(), t.end());
  auto& fn = m.feature_norm;
  for (RowVector* v : {&fn.feature_mean, &fn.feature_scale, &fn.target_mean, &fn.target_scale})
    *v = in.get_vector().transpose();
  m.node_weights = in.get_vector();
  m.rest_positions = in.get_matrix();
  m.seed = in.get<std::uint64_t>();
  for (int l = 0; l < kLayerCount; ++l) {
    const auto& W = m.layer_weights[static_cast<std::size_t>(l)];
    if (W.rows() != m.hidden_dims[static_cast<std::size_t>(l)] || W.cols() != m.hidden_dims[static_cast<std::size_t>(l + 1)])
      raise(ErrorCode::CorruptBundle, "GCN layer " + std::to_string(l + 1) + " shape disagrees with its dims");
  }
  if (fn.feature_mean.size() != m.hidden_dims[0] || fn.target_mean.size() != m.hidden_dims[kLayerCount] ||
      m.node_weights.size() != n)
    raise(ErrorCode::CorruptBundle, "GCN normalization sizes disagree");
  return m;
}

}  // namespace netcage::gcn
