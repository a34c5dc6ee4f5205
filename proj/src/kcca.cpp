#include "mvcorr/kcca.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace mvcorr {

KernelSpec KernelSpec::polynomial(int degree, double offset) {
  if (degree < 1) {
    throw ConfigError("polynomial kernel: degree must be >= 1");
  }
  KernelSpec s;
  s.kind = Kind::polynomial;
  s.degree = degree;
  s.offset = offset;
  return s;
}

KernelSpec KernelSpec::gaussian(double sigma) {
  if (sigma <= 0) {
    throw ConfigError("gaussian kernel: bandwidth must be positive");
  }
  KernelSpec s;
  s.kind = Kind::gaussian;
  s.bandwidth = sigma;
  return s;
}

double kernel_eval(const KernelSpec& spec, const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DimensionError("kernel_eval: vector lengths differ");
  }
  switch (spec.kind) {
    case KernelSpec::Kind::linear:
      return a.dot(b);
    case KernelSpec::Kind::polynomial:
      return std::pow(a.dot(b) + spec.offset, spec.degree);
    case KernelSpec::Kind::gaussian: {
      const double d2 = (a - b).squaredNorm();
      return std::exp(-d2 / (2.0 * spec.bandwidth * spec.bandwidth));
    }
  }
  throw ConfigError("kernel_eval: unknown kernel kind");
}

Matrix gram(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("gram: feature dimensions differ (" + std::to_string(a.rows()) +
                         " vs " + std::to_string(b.rows()) + ")");
  }
  Matrix products = a.transpose() * b;
  switch (spec.kind) {
    case KernelSpec::Kind::linear:
      return products;
    case KernelSpec::Kind::polynomial:
      return (products.array() + spec.offset).pow(spec.degree).matrix();
    case KernelSpec::Kind::gaussian: {
      Vector na = a.colwise().squaredNorm();
      Vector nb = b.colwise().squaredNorm();
      Matrix d2 = (-2.0 * products).eval();
      d2.colwise() += na;
      d2.rowwise() += nb.transpose();
      d2 = d2.cwiseMax(0.0);  // round-off can push tiny distances negative
      return (-d2 / (2.0 * spec.bandwidth * spec.bandwidth)).array().exp().matrix();
    }
  }
  throw ConfigError("gram: unknown kernel kind");
}

Matrix center_gram_test(const Matrix& k_test, const GramStats& stats) {
  if (k_test.rows() != stats.train_mean.size()) {
    throw DimensionError("center_gram_test: row count " + std::to_string(k_test.rows()) +
                         " does not match training size " +
                         std::to_string(stats.train_mean.size()));
  }
  Vector col_mean = k_test.colwise().mean();
  Matrix centered = k_test;
  centered.rowwise() -= col_mean.transpose();
  centered.colwise() -= stats.train_mean;
  centered.array() += stats.grand_mean;
  return centered;
}

CenteredGram center_gram(const Matrix& k) {
  if (k.rows() != k.cols()) {
    throw DimensionError("center_gram: training Gram must be square");
  }
  CenteredGram out;
  out.stats.train_mean = k.rowwise().mean();
  out.stats.grand_mean = k.mean();
  out.centered = center_gram_test(k, out.stats);
  return out;
}

namespace {

// Q diag(f(lambda)) Q^T for the eigendecomposition of a centered Gram,
// eigenvalues clamped at zero (valid kernels are PSD up to round-off).
Matrix spectral_map(const SymEig& eig, const std::function<double(double)>& f) {
  Vector mapped(eig.eigenvalues.size());
  for (Index i = 0; i < mapped.size(); ++i) {
    mapped[i] = f(std::max(eig.eigenvalues[i], 0.0));
  }
  Matrix m = eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.transpose();
  return 0.5 * (m + m.transpose()).eval();
}

}  // namespace

KccaModel fit_kcca(const Matrix& x, const Matrix& y, Index k, double r_x, double r_y,
                   const KernelSpec& kernel_x, const KernelSpec& kernel_y) {
  const Index n = x.cols();
  if (y.cols() != n) {
    throw DimensionError("fit_kcca: views have different sample counts");
  }
  if (n < 2) {
    throw DimensionError("fit_kcca: need at least 2 samples");
  }
  if (k < 1 || k > n) {
    throw DimensionError("fit_kcca: k must be in [1, n]");
  }
  if (r_x <= 0 || r_y <= 0) {
    throw NumericError("fit_kcca: centered Grams are singular, regularizers must be > 0");
  }

  CenteredGram kx = center_gram(gram(kernel_x, x, x));
  CenteredGram ky = center_gram(gram(kernel_y, y, y));

  SymEig ex = sym_eig(kx.centered);
  SymEig ey = sym_eig(ky.centered);

  Matrix gx_half = spectral_map(ex, [&](double l) { return std::sqrt(l / (l + r_x)); });
  Matrix gy = spectral_map(ey, [&](double l) { return l / (l + r_y); });

  Matrix w = gx_half * gy * gx_half;
  SymEig ew = sym_eig(w);

  KccaModel model;
  model.k = k;
  model.r_x = r_x;
  model.r_y = r_y;
  model.kernel_x = kernel_x;
  model.kernel_y = kernel_y;
  model.x_train = x;
  model.y_train = y;
  model.stats_x = kx.stats;
  model.stats_y = ky.stats;

  model.corrs.resize(k);
  for (Index i = 0; i < k; ++i) {
    model.corrs[i] = std::sqrt(std::max(ew.eigenvalues[i], 0.0));
  }

  // Recover duals: alpha_i = (K_x + r_x I)^{-1} G_y G_x^{1/2} w_i, then the
  // paper's pairing beta_i = (1/corr_i) (K_y + r_y I)^{-1} K_x alpha_i.
  Matrix reg_x = kx.centered;
  reg_x.diagonal().array() += r_x;
  Matrix reg_y = ky.centered;
  reg_y.diagonal().array() += r_y;
  Eigen::LLT<Matrix> llt_x(reg_x);
  Eigen::LLT<Matrix> llt_y(reg_y);
  if (llt_x.info() != Eigen::Success || llt_y.info() != Eigen::Success) {
    throw NumericError("fit_kcca: regularized Gram is not positive definite");
  }

  model.alpha = llt_x.solve(gy * (gx_half * ew.eigenvectors.leftCols(k)));
  model.beta = llt_y.solve(kx.centered * model.alpha);
  for (Index i = 0; i < k; ++i) {
    if (model.corrs[i] > 1e-12) {
      model.beta.col(i) /= model.corrs[i];
    }
  }

  // Normalize to the regularized unit-variance constraint
  // alpha^T (K^2 + r K) alpha = 1 per component.
  auto normalize = [](Matrix& duals, const Matrix& gram_c, double reg) {
    for (Index i = 0; i < duals.cols(); ++i) {
      Vector s = gram_c * duals.col(i);
      const double norm2 = s.squaredNorm() + reg * duals.col(i).dot(s);
      if (norm2 > 1e-24) {
        duals.col(i) /= std::sqrt(norm2);
      }
    }
  };
  normalize(model.alpha, kx.centered, r_x);
  normalize(model.beta, ky.centered, r_y);

  require_finite(model.alpha, "fit_kcca: alpha");
  require_finite(model.beta, "fit_kcca: beta");
  return model;
}

Matrix kcca_transform(const KccaModel& model, const Matrix& z, int view) {
  if (view != 1 && view != 2) {
    throw DimensionError("kcca_transform: view must be 1 or 2");
  }
  const Matrix& train = view == 1 ? model.x_train : model.y_train;
  const Matrix& duals = view == 1 ? model.alpha : model.beta;
  const KernelSpec& spec = view == 1 ? model.kernel_x : model.kernel_y;
  const GramStats& stats = view == 1 ? model.stats_x : model.stats_y;
  if (z.rows() != train.rows()) {
    throw DimensionError("kcca_transform: data dimension does not match the view");
  }
  Matrix cross = center_gram_test(gram(spec, train, z), stats);
  return duals.transpose() * cross;
}

double median_pairwise_distance(const Matrix& data, Index max_samples) {
  Index n = data.cols();
  if (n < 2) {
    throw DimensionError("median_pairwise_distance: need at least 2 columns");
  }
  // Deterministic stride subsample: bandwidth heuristics do not need
  // randomness, just coverage.
  std::vector<Index> idx;
  const Index stride = std::max<Index>(1, n / std::min(n, max_samples));
  for (Index i = 0; i < n; i += stride) idx.push_back(i);

  std::vector<double> dists;
  dists.reserve(idx.size() * (idx.size() - 1) / 2);
  for (size_t i = 0; i < idx.size(); ++i) {
    for (size_t j = i + 1; j < idx.size(); ++j) {
      dists.push_back((data.col(idx[i]) - data.col(idx[j])).norm());
    }
  }
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
  double med = dists[dists.size() / 2];
  if (med <= 0) med = 1.0;  // constant data; any bandwidth works
  return med;
}

double default_kcca_reg(const Matrix& gram_matrix) {
  if (gram_matrix.rows() == 0) {
    throw DimensionError("default_kcca_reg: empty Gram");
  }
  return 1e-3 * gram_matrix.trace() / static_cast<double>(gram_matrix.rows());
}

}  // namespace mvcorr
