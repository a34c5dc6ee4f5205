#include "mvcorr/corr.hpp"

#include <string>

namespace mvcorr {

namespace {

struct Whitened {
  Matrix f_c, g_c;       // centered batches
  Matrix s11_inv, s22_inv;  // (Sigma_11)^{-1/2}, (Sigma_22)^{-1/2}
  Matrix t;
  double denom = 1;
};

Whitened whiten(const Matrix& f, const Matrix& g, double r_x, double r_y, double eig_floor) {
  const Index m = f.cols();
  if (g.cols() != m) {
    throw DimensionError("corr: batches have different sample counts");
  }
  if (m < 2) {
    throw DimensionError("corr: need at least 2 samples in a batch");
  }
  if (r_x <= 0 || r_y <= 0) {
    throw NumericError("corr: regularizers must be positive");
  }
  require_finite(f, "corr: F");
  require_finite(g, "corr: G");

  Whitened w;
  w.denom = static_cast<double>(m - 1);
  w.f_c = center_columns(f).centered;
  w.g_c = center_columns(g).centered;
  Matrix s11 = covariance(w.f_c, w.f_c, r_x, w.denom);
  Matrix s22 = covariance(w.g_c, w.g_c, r_y, w.denom);
  Matrix s12 = covariance(w.f_c, w.g_c, 0.0, w.denom);
  w.s11_inv = inv_sqrt_psd(s11, eig_floor);
  w.s22_inv = inv_sqrt_psd(s22, eig_floor);
  w.t = w.s11_inv * s12 * w.s22_inv;
  return w;
}

}  // namespace

CorrResult corr_objective(const Matrix& f, const Matrix& g, const CorrConfig& cfg) {
  const Index o = f.rows();
  if (g.rows() != o) {
    throw DimensionError("corr_objective: output dimensions differ (" +
                         std::to_string(o) + " vs " + std::to_string(g.rows()) + ")");
  }
  const Index k = cfg.k == 0 ? o : cfg.k;
  if (k != o) {
    throw DimensionError("corr_objective: the trace-norm identity requires k = o (got k = " +
                         std::to_string(k) + ", o = " + std::to_string(o) + ")");
  }

  Whitened w = whiten(f, g, cfg.r_x, cfg.r_y, cfg.eig_floor);
  Eigen::JacobiSVD<Matrix> svd(w.t, Eigen::ComputeFullU | Eigen::ComputeFullV);

  CorrResult res;
  res.singular_values = svd.singularValues();
  res.corr = res.singular_values.sum();

  // Closed-form gradient of the trace norm through T = S11^{-1/2} S12 S22^{-1/2}:
  //   D12 = S11^{-1/2} P Q^T S22^{-1/2}
  //   D11 = -1/2 S11^{-1/2} P diag(s) P^T S11^{-1/2}   (D22 symmetric in Q)
  //   d corr/dF = (2 D11 Fc + D12 Gc) / (m-1)
  // Centering needs no extra factor: the expression is already column-centered.
  const Matrix& p = svd.matrixU();
  const Matrix& q = svd.matrixV();
  Matrix d12 = w.s11_inv * p * q.transpose() * w.s22_inv;
  Matrix d11 =
      -0.5 * w.s11_inv * p * res.singular_values.asDiagonal() * p.transpose() * w.s11_inv;
  Matrix d22 =
      -0.5 * w.s22_inv * q * res.singular_values.asDiagonal() * q.transpose() * w.s22_inv;
  res.grad_f = (2.0 * d11 * w.f_c + d12 * w.g_c) / w.denom;
  res.grad_g = (2.0 * d22 * w.g_c + d12.transpose() * w.f_c) / w.denom;
  require_finite(res.grad_f, "corr_objective: grad_f");
  require_finite(res.grad_g, "corr_objective: grad_g");
  return res;
}

CorrCaptured corr_captured(const Matrix& f, const Matrix& g, const CorrConfig& cfg,
                           Index k_report) {
  const Index max_k = std::min(f.rows(), g.rows());
  if (k_report < 0 || k_report > max_k) {
    throw DimensionError("corr_captured: k_report must be in [0, " + std::to_string(max_k) +
                         "]");
  }
  Whitened w = whiten(f, g, cfg.r_x, cfg.r_y, cfg.eig_floor);
  Eigen::JacobiSVD<Matrix> svd(w.t);
  CorrCaptured out;
  out.total = svd.singularValues().sum();
  out.top_k = svd.singularValues().head(k_report).sum();
  return out;
}

}  // namespace mvcorr
