#pragma once

#include "mvcorr/linalg.hpp"

namespace mvcorr {

/// Kernel choice for one view.
struct KernelSpec {
  enum class Kind { linear, polynomial, gaussian };

  Kind kind = Kind::linear;
  int degree = 1;         // polynomial
  double offset = 0.0;    // polynomial
  double bandwidth = 1.0; // gaussian sigma

  static KernelSpec linear() { return {}; }
  static KernelSpec polynomial(int degree, double offset);
  static KernelSpec gaussian(double sigma);
};

/// kappa(a, b) for a single pair of vectors.
double kernel_eval(const KernelSpec& spec, const Vector& a, const Vector& b);

/// Gram matrix between the columns of A and B: entry (i, j) = kappa(a_i, b_j).
Matrix gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);

/// Centering statistics of a training Gram matrix, retained so test points can
/// be centered consistently with the (implicit) feature-space centering.
struct GramStats {
  Vector train_mean;  // per-row mean of the training Gram
  double grand_mean = 0;
};

struct CenteredGram {
  Matrix centered;
  GramStats stats;
};

/// Training-side centering K_c = H K H with H = I - (1/n) 1 1^T.
CenteredGram center_gram(const Matrix& k);

/// Centers a train-by-test cross-Gram with the training statistics, matching
/// feature-space centering of both sides.
Matrix center_gram_test(const Matrix& k_test, const GramStats& stats);

/// Fitted kernel CCA. Retains the training data (needed to evaluate kernels
/// against new points), so serialized models scale with n.
struct KccaModel {
  Matrix alpha;  // n x k dual coefficients, view 1
  Matrix beta;   // n x k dual coefficients, view 2
  Matrix x_train, y_train;
  KernelSpec kernel_x, kernel_y;
  GramStats stats_x, stats_y;
  double r_x = 0, r_y = 0;
  Vector corrs;  // k canonical correlations, descending
  Index k = 0;
};

/// Exact regularized dual solve. Works on the centered Grams; the nonsymmetric
/// product (K_x + r_x I)^{-1} K_y (K_y + r_y I)^{-1} K_x is diagonalized
/// through the similar symmetric matrix
///   G_x^{1/2} G_y G_x^{1/2},  G_v = K_v (K_v + r_v I)^{-1},
/// which shares its spectrum. O(n^2) space and O(n^3) time; keep n at desk
/// scale (<= a few thousand).
KccaModel fit_kcca(const Matrix& x, const Matrix& y, Index k, double r_x, double r_y,
                   const KernelSpec& kernel_x, const KernelSpec& kernel_y);

/// Projects new columns of the chosen view: alpha^T (centered cross-Gram).
Matrix kcca_transform(const KccaModel& model, const Matrix& z, int view);

/// Median pairwise distance between columns, the standard Gaussian bandwidth
/// heuristic. Subsamples deterministically above `max_samples` columns.
double median_pairwise_distance(const Matrix& data, Index max_samples = 500);

/// Scale-aware default regularizer, 1e-3 * trace(K) / n.
double default_kcca_reg(const Matrix& gram_matrix);

}  // namespace mvcorr
