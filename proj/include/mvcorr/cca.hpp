#pragma once

#include "mvcorr/linalg.hpp"

namespace mvcorr {

/// Fitted linear CCA: per-view projections, training means, and the canonical
/// correlations. Immutable after fit; freely shareable.
struct CcaModel {
  Matrix u;        // d_x x k
  Matrix v;        // d_y x k
  Vector mean_x;   // d_x
  Vector mean_y;   // d_y
  Vector corrs;    // k canonical correlations, descending, in [0, 1]
  double r_x = 0;
  double r_y = 0;
  Index k = 0;
};

/// Fits linear CCA on two aligned views (columns are samples) via the SVD of
/// (C_xx + r_x I)^{-1/2} C_xy (C_yy + r_y I)^{-1/2}, covariances with the
/// unbiased 1/(n-1) denominator. The projections satisfy
/// U^T (C_xx + r_x I) U = I_k (and the V analogue). Each component's sign is
/// chosen so the largest-magnitude entry of u_i is positive.
CcaModel fit_cca(const Matrix& x, const Matrix& y, Index k, double r_x, double r_y);

/// Projects new data through the chosen view: U^T (Z - mean) for view 1,
/// V^T (Z - mean) for view 2. Output is k x n.
Matrix cca_transform(const CcaModel& model, const Matrix& z, int view);

/// Average squared distance between the projected views,
/// (1/(n-1)) sum_i ||U^T (x_i - mu_x) - V^T (y_i - mu_y)||^2, normalized the
/// same way as the covariance estimates so that a fitted model at r = 0
/// attains 2k - 2 sum_i corr_i.
double cca_reconstruction_objective(const CcaModel& model, const Matrix& x, const Matrix& y);

}  // namespace mvcorr
