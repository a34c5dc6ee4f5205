#include "mvcorr/linalg.hpp"

#include <cmath>
#include <string>

namespace mvcorr {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericError(std::string(what) + ": non-finite entries");
  }
}

SymEig sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("sym_eig: matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
  }
  require_finite(a, "sym_eig");
  const double scale = a.cwiseAbs().maxCoeff();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(scale, 1.0)) {
    throw NumericError("sym_eig: matrix is not symmetric (max asymmetry " +
                       std::to_string(asym) + ")");
  }

  // Symmetrize to remove accumulation asymmetry before the solve.
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("sym_eig: eigensolver failed to converge");
  }

  // Eigen returns ascending order; flip to descending.
  const Index n = a.rows();
  SymEig out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

namespace {

Matrix psd_power(const Matrix& a, double eps, double exponent, const char* what) {
  if (eps <= 0) {
    throw NumericError(std::string(what) + ": eps must be positive");
  }
  SymEig eig = sym_eig(a);
  const double lambda_min = eig.eigenvalues.minCoeff();
  if (lambda_min < -eps) {
    throw NumericError(std::string(what) + ": matrix is not PSD (min eigenvalue " +
                       std::to_string(lambda_min) + ")");
  }
  Vector powered = eig.eigenvalues.cwiseMax(eps).array().pow(exponent);
  Matrix result = eig.eigenvectors * powered.asDiagonal() * eig.eigenvectors.transpose();
  result = 0.5 * (result + result.transpose()).eval();
  return result;
}

}  // namespace

Matrix inv_sqrt_psd(const Matrix& a, double eps) {
  return psd_power(a, eps, -0.5, "inv_sqrt_psd");
}

Matrix sqrt_psd(const Matrix& a, double eps) {
  return psd_power(a, eps, 0.5, "sqrt_psd");
}

Centered center_columns(const Matrix& x) {
  if (x.cols() < 1) {
    throw DimensionError("center_columns: need at least one column");
  }
  require_finite(x, "center_columns");
  Centered out;
  out.mean = x.rowwise().mean();
  out.centered = x.colwise() - out.mean;
  return out;
}

Matrix covariance(const Matrix& xc, const Matrix& yc, double reg, double denom) {
  if (xc.cols() != yc.cols()) {
    throw DimensionError("covariance: sample counts differ (" + std::to_string(xc.cols()) +
                         " vs " + std::to_string(yc.cols()) + ")");
  }
  if (reg < 0) {
    throw NumericError("covariance: negative regularizer");
  }
  if (denom <= 0) {
    throw NumericError("covariance: denominator must be positive");
  }
  const bool same_view = xc.data() == yc.data() && xc.rows() == yc.rows();
  Matrix cov = (xc * yc.transpose()) / denom;
  if (same_view) {
    cov = 0.5 * (cov + cov.transpose()).eval();
  }
  if (reg > 0) {
    if (cov.rows() != cov.cols()) {
      throw DimensionError("covariance: regularizer requires a square result");
    }
    cov.diagonal().array() += reg;
  }
  require_finite(cov, "covariance");
  return cov;
}

Matrix random_orthonormal(Index rows, Index cols, std::mt19937_64& rng) {
  const bool tall = rows >= cols;
  const Index major = tall ? rows : cols;
  const Index minor = tall ? cols : rows;

  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(major, minor);
  for (Index j = 0; j < minor; ++j) {
    for (Index i = 0; i < major; ++i) {
      g(i, j) = gauss(rng);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(major, minor);
  // Fix column signs by the R diagonal so the distribution is Haar and the
  // output deterministic for a given seed.
  Matrix r = qr.matrixQR().topRows(minor).triangularView<Eigen::Upper>();
  for (Index j = 0; j < minor; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return tall ? q : Matrix(q.transpose());
}

}  // namespace mvcorr
