#include "mvcorr/cca.hpp"

#include <string>

namespace mvcorr {

namespace {

// Smallest eigenvalue may legitimately sit at round-off below zero; anything
// smaller than this fraction of the largest means the covariance is singular
// and needs a positive regularizer.
constexpr double kSingularRatio = 1e-12;

void check_not_singular(const Matrix& cov, double reg, const char* view) {
  if (reg > 0) return;
  SymEig eig = sym_eig(cov);
  const double top = eig.eigenvalues.maxCoeff();
  if (top <= 0 || eig.eigenvalues.minCoeff() < kSingularRatio * top) {
    throw NumericError(std::string("fit_cca: ") + view +
                       " covariance is singular; use a positive regularizer");
  }
}

}  // namespace

CcaModel fit_cca(const Matrix& x, const Matrix& y, Index k, double r_x, double r_y) {
  const Index n = x.cols();
  if (y.cols() != n) {
    throw DimensionError("fit_cca: views have different sample counts");
  }
  if (n < 2) {
    throw DimensionError("fit_cca: need at least 2 samples");
  }
  if (k < 1 || k > std::min(x.rows(), y.rows())) {
    throw DimensionError("fit_cca: k = " + std::to_string(k) +
                         " exceeds min view dimension " +
                         std::to_string(std::min(x.rows(), y.rows())));
  }
  if (r_x < 0 || r_y < 0) {
    throw NumericError("fit_cca: regularizers must be nonnegative");
  }

  Centered cx = center_columns(x);
  Centered cy = center_columns(y);
  const double denom = static_cast<double>(n - 1);
  Matrix cxx = covariance(cx.centered, cx.centered, r_x, denom);
  Matrix cyy = covariance(cy.centered, cy.centered, r_y, denom);
  Matrix cxy = covariance(cx.centered, cy.centered, 0.0, denom);
  check_not_singular(cxx, r_x, "view-1");
  check_not_singular(cyy, r_y, "view-2");

  Matrix wx = inv_sqrt_psd(cxx);
  Matrix wy = inv_sqrt_psd(cyy);
  Matrix t = wx * cxy * wy;

  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);

  CcaModel model;
  model.k = k;
  model.r_x = r_x;
  model.r_y = r_y;
  model.mean_x = cx.mean;
  model.mean_y = cy.mean;
  model.corrs = svd.singularValues().head(k);
  model.u = wx * svd.matrixU().leftCols(k);
  model.v = wy * svd.matrixV().leftCols(k);

  // Deterministic sign: largest-|entry| of each u_i positive; v_i flips with
  // it so the pair keeps positive correlation.
  for (Index i = 0; i < k; ++i) {
    Index arg_max = 0;
    model.u.col(i).cwiseAbs().maxCoeff(&arg_max);
    if (model.u(arg_max, i) < 0) {
      model.u.col(i) = -model.u.col(i);
      model.v.col(i) = -model.v.col(i);
    }
  }
  require_finite(model.u, "fit_cca: U");
  require_finite(model.v, "fit_cca: V");
  return model;
}

Matrix cca_transform(const CcaModel& model, const Matrix& z, int view) {
  if (view != 1 && view != 2) {
    throw DimensionError("cca_transform: view must be 1 or 2");
  }
  const Matrix& proj = view == 1 ? model.u : model.v;
  const Vector& mean = view == 1 ? model.mean_x : model.mean_y;
  if (z.rows() != proj.rows()) {
    throw DimensionError("cca_transform: data dimension " + std::to_string(z.rows()) +
                         " does not match view dimension " + std::to_string(proj.rows()));
  }
  return proj.transpose() * (z.colwise() - mean);
}

double cca_reconstruction_objective(const CcaModel& model, const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols()) {
    throw DimensionError("cca_reconstruction_objective: sample counts differ");
  }
  if (x.cols() < 2) {
    throw DimensionError("cca_reconstruction_objective: need at least 2 samples");
  }
  Matrix px = cca_transform(model, x, 1);
  Matrix py = cca_transform(model, y, 2);
  return (px - py).squaredNorm() / static_cast<double>(x.cols() - 1);
}

}  // namespace mvcorr
