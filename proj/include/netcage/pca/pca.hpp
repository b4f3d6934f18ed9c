#pragma once

#include <span>
#include <vector>

#include "netcage/core/archive.hpp"
#include "netcage/core/error.hpp"
#include "netcage/core/types.hpp"

namespace netcage::pca {

/// Snapshot matrix M, (3N) x t_n. Rows are x1, y1, z1, ..., xN, yN, zN and
/// columns run scenario-major, then time.
struct DisplacementMatrix {
  Matrix values;
  std::vector<int> scenario_index;  // 1-based, one per column
  Index node_count = 0;

  Index steps() const { return values.cols(); }
  int scenario_count() const { return scenario_index.empty() ? 0 : scenario_index.back(); }
};

/// Flattens an N x 3 node table into the M row layout, and back.
Vector flatten_nodes(const Matrix& nodes);
Matrix unflatten_nodes(const Vector& column);

/// Stacks per-scenario series (each 3N x steps) after dropping the first
/// floor(transient_fraction * steps) columns of every scenario.
DisplacementMatrix assemble_data_matrix(std::span<const Matrix> scenarios, double transient_fraction = 0.2);

struct PcaBasis {
  Matrix eigenvectors;  // rows x c, orthonormal columns
  Vector eigenvalues;   // c, descending
  Index retained = 0;
  double threshold = 1.0;
  double transient_fraction = 0.2;
  bool centered = false;
  Vector center;  // column mean subtracted before decomposition (centered only)

  Index dim() const { return eigenvectors.rows(); }
  Index total_components() const { return eigenvalues.size(); }
  auto leading() const { return eigenvectors.leftCols(retained); }
};

/// Eigenpairs of M M^T via a thin SVD of M (lambda = sigma^2), descending.
/// Each eigenvector's largest-magnitude entry is made positive. `retained`
/// is set to all components.
PcaBasis eigen_decompose(const Matrix& M, bool center = false);
inline PcaBasis eigen_decompose(const DisplacementMatrix& M, bool center = false) {
  return eigen_decompose(M.values, center);
}

/// Smallest k whose cumulative explained variance reaches `threshold`.
Index select_components(const Vector& lambdas, double threshold);

/// Decomposes and truncates in one step.
PcaBasis fit_pca(const DisplacementMatrix& M, double threshold, bool center = false);

/// B = phi_k^T M (k x t_n).
Matrix project(const Matrix& M, const PcaBasis& basis);

/// Per-scenario column means of B (k x s).
Matrix mean_coefficients(const Matrix& B, const std::vector<int>& scenario_index);

/// sum_j phi_j b_j; the matrix overload maps every column.
Vector reconstruct(const Vector& coeffs, const PcaBasis& basis);
Matrix reconstruct(const Matrix& coeffs, const PcaBasis& basis);

/// Fraction of total variance captured by the first k components.
double explained_variance(const Vector& lambdas, Index k);

void write_pca(ByteWriter& out, const PcaBasis& basis);
PcaBasis read_pca(ByteReader& in);

}  // namespace netcage::pca
