#pragma once

#include "mvcorr/linalg.hpp"

namespace mvcorr {

/// Settings for the minibatch correlation objective.
struct CorrConfig {
  double r_x = 1e-4;
  double r_y = 1e-4;
  Index k = 0;  // component count; 0 means "the output dimensionality o"
  double eig_floor = 1e-10;
};

/// Value and gradients of corr(F, G) on one batch.
struct CorrResult {
  double corr = 0;          // sum of the singular values of T
  Vector singular_values;   // descending, each in [0, 1] up to round-off
  Matrix grad_f, grad_g;    // d corr / dF, d corr / dG (same shapes as F, G)
};

/// Batch canonical correlation between network outputs F (o x m) and
/// G (o x m): center the batches, form the regularized covariances with
/// 1/(m-1), whiten into T = S11^{-1/2} S12 S22^{-1/2}, and sum T's singular
/// values. The identity corr = tr(T^T T)^{1/2} requires k = o, which is
/// enforced. Gradients flow through the SVD in closed form; training code
/// minimizes -corr.
CorrResult corr_objective(const Matrix& f, const Matrix& g, const CorrConfig& cfg);

struct CorrCaptured {
  double total = 0;  // sum over all singular values of T
  double top_k = 0;  // sum over the largest k_report
};

/// Correlation captured by two representations, reported as in the evaluation
/// tables. Unlike the training objective this accepts differing output
/// dimensions; T is then rectangular with min(o1, o2) singular values.
CorrCaptured corr_captured(const Matrix& f, const Matrix& g, const CorrConfig& cfg,
                           Index k_report);

}  // namespace mvcorr
