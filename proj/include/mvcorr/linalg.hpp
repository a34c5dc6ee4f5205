#pragma once

#include <Eigen/Dense>
#include <random>

#include "mvcorr/errors.hpp"

namespace mvcorr {

// Column-as-sample convention throughout: a d x n matrix holds n samples of
// dimension d. Loaders transpose into this layout as needed.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Throws NumericError if any entry of `m` is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending,
/// eigenvector column i paired with eigenvalue i.
struct SymEig {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Symmetric eigendecomposition. The input must be square and symmetric to
/// 1e-10 relative; it is symmetrized as (A + A^T)/2 before the solve.
SymEig sym_eig(const Matrix& a);

/// A^{-1/2} for a symmetric PSD matrix via eigendecomposition, with
/// eigenvalues clamped below at `eps` to absorb round-off. An eigenvalue
/// below -eps is a genuine PSD violation and throws.
Matrix inv_sqrt_psd(const Matrix& a, double eps = 1e-10);

/// A^{1/2} for a symmetric PSD matrix, same clamping rules as inv_sqrt_psd.
Matrix sqrt_psd(const Matrix& a, double eps = 1e-10);

struct Centered {
  Matrix centered;
  Vector mean;  // per-row (per-feature) average over columns
};

/// Subtracts the per-row mean from every column.
Centered center_columns(const Matrix& x);

/// (1/denom) * Xc * Yc^T, plus reg * I on the diagonal when reg > 0 (the
/// auto-covariance case; requires a square result). When Xc and Yc alias the
/// same storage the result is symmetrized exactly.
Matrix covariance(const Matrix& xc, const Matrix& yc, double reg, double denom);

/// Random matrix with orthonormal columns (rows >= cols) or orthonormal rows
/// (rows < cols), drawn via QR of a standard normal sample.
Matrix random_orthonormal(Index rows, Index cols, std::mt19937_64& rng);

}  // namespace mvcorr
