#include "mvcorr/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "mvcorr/corr.hpp"
#include "mvcorr/data.hpp"

namespace mvcorr {

std::string EvalReport::to_metrics() const {
  std::ostringstream out;
  out.precision(17);
  out << "method=" << method << '\n'
      << "knn_accuracy=" << knn_accuracy << '\n'
      << "correlation_total=" << correlation_total << '\n'
      << "correlation_top_k=" << correlation_top_k << '\n'
      << "nn_distance_sum=" << nn_distance_sum << '\n'
      << "reconstruction_error_total=" << reconstruction_error_total << '\n'
      << "reconstruction_error_per_sample=" << reconstruction_error_per_sample << '\n'
      << "reconstruction_error_per_component=" << reconstruction_error_per_component << '\n'
      << "k_components=" << k_components << '\n'
      << "knn_neighbors=" << knn_neighbors << '\n'
      << "train_samples=" << train_samples << '\n'
      << "test_samples=" << test_samples << '\n';
  return out.str();
}

void EvalReport::print_table(std::ostream& out) const {
  auto row = [&](const std::string& name, double value) {
    out << "  " << std::left << std::setw(42) << name << std::right << std::setw(14)
        << std::setprecision(6) << value << '\n';
  };
  out << "Method: " << method << "  (k = " << k_components << ", neighbors = " << knn_neighbors
      << ", train = " << train_samples << ", test = " << test_samples << ")\n";
  row("k-NN Test Accuracy (%)", knn_accuracy);
  row("Correlation Captured", correlation_total);
  row("Correlation of Top " + std::to_string(k_components) + " Components",
      correlation_top_k);
  row("Sum of Distances to Nearest Neighbors", nn_distance_sum);
  row("Reconstruction Error (L2 norm)", reconstruction_error_total);
  row("Per-Sample Reconstruction Error", reconstruction_error_per_sample);
  row("Per-Vector-Per-Component Error", reconstruction_error_per_component);
}

namespace {

// Indices of the k smallest distances, ties toward the lower index. The
// squared-distance column comes from the blocked ||a||^2 + ||b||^2 - 2 a.b
// expansion.
void k_smallest(const Vector& dist2, Index k, std::vector<Index>& out) {
  out.resize(static_cast<size_t>(dist2.size()));
  std::iota(out.begin(), out.end(), Index{0});
  auto cmp = [&](Index a, Index b) {
    if (dist2[a] != dist2[b]) return dist2[a] < dist2[b];
    return a < b;
  };
  std::partial_sort(out.begin(), out.begin() + k, out.end(), cmp);
  out.resize(static_cast<size_t>(k));
}

constexpr Index kChunk = 256;

}  // namespace

KnnResult knn_classify(const Matrix& train_feats, const std::vector<int>& train_labels,
                       const Matrix& test_feats, const std::vector<int>& test_labels,
                       Index neighbors) {
  const Index n = train_feats.cols();
  const Index m = test_feats.cols();
  if (n < 1) {
    throw DimensionError("knn_classify: empty train set");
  }
  if (static_cast<Index>(train_labels.size()) != n) {
    throw DimensionError("knn_classify: train labels do not match train columns");
  }
  if (static_cast<Index>(test_labels.size()) != m) {
    throw DimensionError("knn_classify: test labels do not match test columns");
  }
  if (test_feats.rows() != train_feats.rows()) {
    throw DimensionError("knn_classify: feature dimensions differ");
  }
  if (neighbors < 1 || neighbors > n) {
    throw DimensionError("knn_classify: neighbors must be in [1, n]");
  }

  KnnResult result;
  result.predictions.resize(static_cast<size_t>(m));
  Vector train_norms = train_feats.colwise().squaredNorm();
  Index correct = 0;
  std::vector<Index> nearest;
  for (Index base = 0; base < m; base += kChunk) {
    const Index cols = std::min(kChunk, m - base);
    Matrix cross = train_feats.transpose() * test_feats.middleCols(base, cols);
    for (Index j = 0; j < cols; ++j) {
      Vector dist2 =
          (train_norms.array() - 2.0 * cross.col(j).array() +
           test_feats.col(base + j).squaredNorm())
              .matrix();
      k_smallest(dist2, neighbors, nearest);
      std::map<int, int> votes;
      for (Index idx : nearest) votes[train_labels[static_cast<size_t>(idx)]]++;
      int best_label = nearest.empty() ? 0 : train_labels[static_cast<size_t>(nearest[0])];
      int best_count = 0;
      for (const auto& [label, count] : votes) {
        if (count > best_count) {  // map iterates ascending: ties keep the lowest id
          best_count = count;
          best_label = label;
        }
      }
      result.predictions[static_cast<size_t>(base + j)] = best_label;
      if (best_label == test_labels[static_cast<size_t>(base + j)]) ++correct;
    }
  }
  result.accuracy = m == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(m);
  return result;
}

ReconResult nn_reconstruct(const Matrix& shared_train_v1, const Matrix& train_v2_original,
                           const Matrix& shared_test_v1, const Matrix& test_v2_original) {
  const Index n = shared_train_v1.cols();
  const Index m = shared_test_v1.cols();
  if (n < 1) {
    throw DimensionError("nn_reconstruct: empty train set");
  }
  if (train_v2_original.cols() != n) {
    throw DimensionError("nn_reconstruct: train pairs are not aligned");
  }
  if (shared_test_v1.rows() != shared_train_v1.rows()) {
    throw DimensionError("nn_reconstruct: shared-space dimensions differ");
  }
  if (test_v2_original.cols() != m || test_v2_original.rows() != train_v2_original.rows()) {
    throw DimensionError("nn_reconstruct: ground-truth view-2 shape mismatch");
  }

  ReconResult result;
  result.reconstructions.resize(train_v2_original.rows(), m);
  result.nn_index.resize(static_cast<size_t>(m));
  Vector train_norms = shared_train_v1.colwise().squaredNorm();
  for (Index base = 0; base < m; base += kChunk) {
    const Index cols = std::min(kChunk, m - base);
    Matrix cross = shared_train_v1.transpose() * shared_test_v1.middleCols(base, cols);
    for (Index j = 0; j < cols; ++j) {
      Vector dist2 = (train_norms.array() - 2.0 * cross.col(j).array() +
                      shared_test_v1.col(base + j).squaredNorm())
                         .matrix();
      Index best = 0;
      double best_d = dist2[0];
      for (Index i = 1; i < n; ++i) {
        if (dist2[i] < best_d) {
          best_d = dist2[i];
          best = i;
        }
      }
      result.nn_index[static_cast<size_t>(base + j)] = best;
      result.reconstructions.col(base + j) = train_v2_original.col(best);
      result.nn_distance_sum += std::sqrt(std::max(0.0, best_d));
      result.error_total +=
          (train_v2_original.col(best) - test_v2_original.col(base + j)).norm();
    }
  }
  result.error_per_sample = result.error_total / static_cast<double>(m);
  result.error_per_component =
      result.error_per_sample / static_cast<double>(shared_train_v1.rows());
  return result;
}

EvalReport evaluate_pipeline(const SequenceDataset& downstream, const ViewTransform& repr1,
                             const ViewTransform& repr2, const EvalConfig& cfg) {
  if (downstream.utterances.empty()) {
    throw DimensionError("evaluate_pipeline: empty dataset");
  }
  if (!downstream.has_labels()) {
    throw DimensionError("evaluate_pipeline: k-NN evaluation needs labels");
  }

  // Transform each utterance through the representations; keep the raw
  // (stacked) view 2 as the reconstruction target.
  const Index n = downstream.total_frames();
  Matrix feats1, feats2, target2;
  std::vector<int> labels;
  labels.reserve(static_cast<size_t>(n));
  Index col = 0;
  for (const Utterance& u : downstream.utterances) {
    Matrix f1 = repr1(u.view1);
    Matrix f2 = repr2(u.view2);
    Matrix t2 = stack_frames(u.view2, cfg.recon_context);
    if (f1.rows() != u.view1.rows() || f2.rows() != u.view2.rows()) {
      throw DimensionError("evaluate_pipeline: representation changed the frame count");
    }
    if (feats1.size() == 0) {
      feats1.resize(f1.cols(), n);
      feats2.resize(f2.cols(), n);
      target2.resize(t2.cols(), n);
    }
    feats1.middleCols(col, f1.rows()) = f1.transpose();
    feats2.middleCols(col, f2.rows()) = f2.transpose();
    target2.middleCols(col, t2.rows()) = t2.transpose();
    col += f1.rows();
    labels.insert(labels.end(), u.labels.begin(), u.labels.end());
  }

  // Seeded split: a capped test set, the remaining frames are eval-train.
  std::vector<Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const Index test_n = std::min(cfg.max_test_samples, n / 2);
  const Index train_n = n - test_n;
  if (test_n < 1 || train_n < 2) {
    throw DimensionError("evaluate_pipeline: not enough frames to split");
  }

  auto take = [&](const Matrix& src, Index from, Index count) {
    Matrix out(src.rows(), count);
    for (Index j = 0; j < count; ++j) out.col(j) = src.col(perm[static_cast<size_t>(from + j)]);
    return out;
  };
  Matrix test1 = take(feats1, 0, test_n);
  Matrix test_t2 = take(target2, 0, test_n);
  Matrix train1 = take(feats1, test_n, train_n);
  Matrix train2 = take(feats2, test_n, train_n);
  Matrix train_t2 = take(target2, test_n, train_n);
  std::vector<int> test_labels(static_cast<size_t>(test_n));
  std::vector<int> train_labels(static_cast<size_t>(train_n));
  for (Index j = 0; j < test_n; ++j) {
    test_labels[static_cast<size_t>(j)] = labels[static_cast<size_t>(perm[static_cast<size_t>(j)])];
  }
  for (Index j = 0; j < train_n; ++j) {
    train_labels[static_cast<size_t>(j)] =
        labels[static_cast<size_t>(perm[static_cast<size_t>(test_n + j)])];
  }

  // One CCA fit serves both shared spaces: leading columns are the top
  // components, so the reconstruction space is a prefix of the
  // classification space.
  const Index max_k = std::min(train1.rows(), train2.rows());
  const Index k_class = std::min(cfg.cca_k_class, max_k);
  const Index k_recon = std::min(cfg.cca_k_recon, max_k);
  const Index k_fit = std::max(k_class, k_recon);
  CcaModel cca = fit_cca(train1, train2, k_fit, cfg.r_x, cfg.r_y);

  Matrix proj_train = cca_transform(cca, train1, 1);
  Matrix proj_test = cca_transform(cca, test1, 1);

  EvalReport report;
  report.method = cfg.method_name;
  report.k_components = k_recon;
  report.knn_neighbors = cfg.knn_neighbors;
  report.train_samples = train_n;
  report.test_samples = test_n;

  const Index neighbors = std::min(cfg.knn_neighbors, train_n);
  KnnResult knn = knn_classify(proj_train.topRows(k_class), train_labels,
                               proj_test.topRows(k_class), test_labels, neighbors);
  report.knn_accuracy = knn.accuracy;

  ReconResult recon = nn_reconstruct(proj_train.topRows(k_recon), train_t2,
                                     proj_test.topRows(k_recon), test_t2);
  report.nn_distance_sum = recon.nn_distance_sum;
  report.reconstruction_error_total = recon.error_total;
  report.reconstruction_error_per_sample = recon.error_per_sample;
  report.reconstruction_error_per_component = recon.error_per_component;

  CorrConfig corr_cfg;
  corr_cfg.r_x = cfg.r_x;
  corr_cfg.r_y = cfg.r_y;
  CorrCaptured captured =
      corr_captured(train1, train2, corr_cfg, std::min<Index>(k_recon, max_k));
  report.correlation_total = captured.total;
  report.correlation_top_k = captured.top_k;
  return report;
}

}  // namespace mvcorr
