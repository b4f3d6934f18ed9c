#include "netcage/pca/pca.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace netcage::pca {

Vector flatten_nodes(const Matrix& nodes) {
  if (nodes.cols() != 3) raise(ErrorCode::DimensionMismatch, "flatten_nodes: expected N x 3");
  Vector v(nodes.size());
  for (Index i = 0; i < nodes.rows(); ++i) v.segment<3>(3 * i) = nodes.row(i).transpose();
  return v;
}

Matrix unflatten_nodes(const Vector& column) {
  if (column.size() % 3 != 0) raise(ErrorCode::DimensionMismatch, "unflatten_nodes: length not a multiple of 3");
  Matrix nodes(column.size() / 3, 3);
  for (Index i = 0; i < nodes.rows(); ++i) nodes.row(i) = column.segment<3>(3 * i).transpose();
  return nodes;
}

DisplacementMatrix assemble_data_matrix(std::span<const Matrix> scenarios, double transient_fraction) {
  if (scenarios.empty()) raise(ErrorCode::EmptyScenario, "no scenarios to assemble");
  if (!(transient_fraction >= 0.0 && transient_fraction < 1.0))
    raise(ErrorCode::InvalidArgument, "transient fraction must lie in [0, 1)");
  const Index rows = scenarios.front().rows();
  if (rows == 0 || rows % 3 != 0) raise(ErrorCode::InconsistentNodeCount, "scenario row count must be 3N > 0");

  Index total = 0;
  std::vector<Index> skip(scenarios.size());
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto& S = scenarios[s];
    if (S.rows() != rows)
      raise(ErrorCode::InconsistentNodeCount, "scenario " + std::to_string(s + 1) + " has " +
                                                  std::to_string(S.rows() / 3) + " nodes, expected " +
                                                  std::to_string(rows / 3));
    skip[s] = static_cast<Index>(std::floor(transient_fraction * static_cast<double>(S.cols())));
    if (S.cols() - skip[s] < 1) raise(ErrorCode::EmptyScenario, "scenario " + std::to_string(s + 1) + " has no retained steps");
    if (!S.allFinite()) raise(ErrorCode::InvalidArgument, "scenario " + std::to_string(s + 1) + " has non-finite values");
    total += S.cols() - skip[s];
  }

  DisplacementMatrix M;
  M.node_count = rows / 3;
  M.values.resize(rows, total);
  M.scenario_index.reserve(static_cast<std::size_t>(total));
  Index col = 0;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const Index keep = scenarios[s].cols() - skip[s];
    M.values.middleCols(col, keep) = scenarios[s].rightCols(keep);
    M.scenario_index.insert(M.scenario_index.end(), static_cast<std::size_t>(keep), static_cast<int>(s + 1));
    col += keep;
  }
  return M;
}

PcaBasis eigen_decompose(const Matrix& M_in, bool center) {
  if (M_in.cols() < 1 || M_in.rows() < 1) raise(ErrorCode::InvalidArgument, "eigen_decompose: empty matrix");
  if (!M_in.allFinite()) raise(ErrorCode::NumericalFailure, "eigen_decompose: non-finite entries");

  PcaBasis basis;
  basis.centered = center;
  Matrix centered;
  const Matrix* M = &M_in;
  if (center) {
    basis.center = M_in.rowwise().mean();
    centered = M_in.colwise() - basis.center;
    M = &centered;
  }

  // Wide matrices are first reduced to their square triangular factor:
  // M = R^T Q^T shares left singular vectors and values with R^T.
  Matrix U;
  Vector sigma;
  auto svd_of = [&](const Matrix& A) {
    Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU);
    if (svd.info() != Eigen::Success) raise(ErrorCode::NumericalFailure, "singular value decomposition failed");
    U = svd.matrixU();
    sigma = svd.singularValues();
  };
  if (M->cols() > M->rows()) {
    Eigen::HouseholderQR<Matrix> qr(M->transpose());
    const Matrix R = qr.matrixQR().topRows(M->rows()).triangularView<Eigen::Upper>();
    svd_of(R.transpose());
  } else {
    svd_of(*M);
  }
  if (!U.allFinite() || !sigma.allFinite()) raise(ErrorCode::NumericalFailure, "decomposition produced non-finite values");

  for (Index j = 0; j < U.cols(); ++j) {
    Index arg = 0;
    U.col(j).cwiseAbs().maxCoeff(&arg);
    if (U(arg, j) < 0) U.col(j) = -U.col(j);
  }
  basis.eigenvectors = std::move(U);
  basis.eigenvalues = sigma.array().square();
  basis.retained = basis.eigenvalues.size();
  basis.threshold = 1.0;
  return basis;
}

double explained_variance(const Vector& lambdas, Index k) {
  const double total = lambdas.sum();
  if (!(total > 0.0)) raise(ErrorCode::AllZeroVariance, "all eigenvalues are zero");
  return lambdas.head(k).sum() / total;
}

Index select_components(const Vector& lambdas, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) raise(ErrorCode::InvalidArgument, "threshold must lie in (0, 1]");
  if (lambdas.size() == 0 || (lambdas.array() < 0.0).any())
    raise(ErrorCode::InvalidArgument, "eigenvalues must be nonnegative");
  const double total = lambdas.sum();
  if (!(total > 0.0)) raise(ErrorCode::AllZeroVariance, "all eigenvalues are zero");
  double acc = 0.0;
  for (Index k = 0; k < lambdas.size(); ++k) {
    acc += lambdas(k);
    if (acc / total >= threshold - 1e-12) return k + 1;
  }
  return lambdas.size();
}

PcaBasis fit_pca(const DisplacementMatrix& M, double threshold, bool center) {
  PcaBasis basis = eigen_decompose(M, center);
  basis.retained = select_components(basis.eigenvalues, threshold);
  basis.threshold = threshold;
  return basis;
}

Matrix project(const Matrix& M, const PcaBasis& basis) {
  if (M.rows() != basis.dim())
    raise(ErrorCode::DimensionMismatch, "project: matrix has " + std::to_string(M.rows()) + " rows, basis " +
                                            std::to_string(basis.dim()));
  if (basis.centered) return basis.leading().transpose() * (M.colwise() - basis.center);
  return basis.leading().transpose() * M;
}

Matrix mean_coefficients(const Matrix& B, const std::vector<int>& scenario_index) {
  if (static_cast<Index>(scenario_index.size()) != B.cols())
    raise(ErrorCode::DimensionMismatch, "mean_coefficients: scenario index does not match column count");
  int s = 0;
  for (int h : scenario_index) {
    if (h < 1) raise(ErrorCode::InvalidArgument, "scenario ids are 1-based");
    s = std::max(s, h);
  }
  if (s == 0) raise(ErrorCode::EmptyScenario, "no columns");
  Matrix out = Matrix::Zero(B.rows(), s);
  std::vector<Index> counts(static_cast<std::size_t>(s), 0);
  for (Index c = 0; c < B.cols(); ++c) {
    const int h = scenario_index[static_cast<std::size_t>(c)] - 1;
    out.col(h) += B.col(c);
    ++counts[static_cast<std::size_t>(h)];
  }
  for (int h = 0; h < s; ++h) {
    if (counts[static_cast<std::size_t>(h)] == 0) raise(ErrorCode::EmptyScenario, "scenario " + std::to_string(h + 1) + " has no columns");
    out.col(h) /= static_cast<double>(counts[static_cast<std::size_t>(h)]);
  }
  return out;
}

Vector reconstruct(const Vector& coeffs, const PcaBasis& basis) {
  if (coeffs.size() != basis.retained)
    raise(ErrorCode::DimensionMismatch, "reconstruct: expected " + std::to_string(basis.retained) + " coefficients");
  Vector v = basis.leading() * coeffs;
  if (basis.centered) v += basis.center;
  return v;
}

Matrix reconstruct(const Matrix& coeffs, const PcaBasis& basis) {
  if (coeffs.rows() != basis.retained)
    raise(ErrorCode::DimensionMismatch, "reconstruct: expected " + std::to_string(basis.retained) + " coefficient rows");
  Matrix V = basis.leading() * coeffs;
  if (basis.centered) V.colwise() += basis.center;
  return V;
}

void write_pca(ByteWriter& out, const PcaBasis& b) {
  out.put_matrix(b.eigenvectors);
  out.put_vector(b.eigenvalues);
  out.put<std::int64_t>(b.retained);
  out.put<double>(b.threshold);
  out.put<double>(b.transient_fraction);
  out.put<std::uint8_t>(b.centered ? 1 : 0);
  out.put_vector(b.center);
}

PcaBasis read_pca(ByteReader& in) {
  PcaBasis b;
  b.eigenvectors = in.get_matrix();
  b.eigenvalues = in.get_vector();
  b.retained = static_cast<Index>(in.get<std::int64_t>());
  b.threshold = in.get<double>();
  b.transient_fraction = in.get<double>();
  b.centered = in.get<std::uint8_t>() != 0;
  b.center = in.get_vector();
  if (b.eigenvalues.size() != b.eigenvectors.cols() || b.retained < 1 || b.retained > b.eigenvalues.size() ||
      (b.centered && b.center.size() != b.dim()))
    raise(ErrorCode::CorruptBundle, "PCA basis sections disagree in shape");
  return b;
}

}  // namespace netcage::pca
