#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "mvcorr/cca.hpp"
#include "mvcorr/data.hpp"

namespace mvcorr {

/// Metrics bundle for one method, mirroring the downstream evaluation tables:
/// k-NN accuracy, correlation captured (total and top components), and the
/// cross-view nearest-neighbor reconstruction errors.
struct EvalReport {
  std::string method;
  double knn_accuracy = 0;  // percent
  double correlation_total = 0;
  double correlation_top_k = 0;
  double nn_distance_sum = 0;
  double reconstruction_error_total = 0;          // sum of per-sample l2 norms
  double reconstruction_error_per_sample = 0;     // total / test samples
  double reconstruction_error_per_component = 0;  // per-sample / shared dims
  Index k_components = 0;                         // shared CCA dims for reconstruction
  Index knn_neighbors = 0;
  Index train_samples = 0;
  Index test_samples = 0;

  std::string to_metrics() const;  // one `name=value` per line
  void print_table(std::ostream& out) const;
};

struct KnnResult {
  std::vector<int> predictions;
  double accuracy = 0;  // percent correct
};

/// Majority vote among the `neighbors` nearest training columns (Euclidean).
/// Equal distances break toward the lower train index; vote ties toward the
/// lowest label id.
KnnResult knn_classify(const Matrix& train_feats, const std::vector<int>& train_labels,
                       const Matrix& test_feats, const std::vector<int>& test_labels,
                       Index neighbors);

struct ReconResult {
  Matrix reconstructions;  // d2 x m, copied view-2 vectors of the nearest train columns
  std::vector<Index> nn_index;
  double nn_distance_sum = 0;
  double error_total = 0;
  double error_per_sample = 0;
  double error_per_component = 0;  // per-sample / shared dims
};

/// For every test column: nearest train column in the shared space, emit that
/// training sample's original view-2 vector, and score against the ground
/// truth. Distance ties break toward the lower train index.
ReconResult nn_reconstruct(const Matrix& shared_train_v1, const Matrix& train_v2_original,
                           const Matrix& shared_test_v1, const Matrix& test_v2_original);

/// Per-view representation: maps one utterance view (T x d rows) to features
/// (T x o rows). Identity (optionally with frame stacking) gives the baseline.
using ViewTransform = std::function<Matrix(const Matrix&)>;

struct EvalConfig {
  Index cca_k_class = 60;   // shared dims for the classification projection
  Index cca_k_recon = 20;   // shared dims for reconstruction
  Index knn_neighbors = 4;
  double r_x = 1e-4;
  double r_y = 1e-4;
  Index max_test_samples = 10000;
  Index recon_context = 3;  // stacking for the reconstruction target (raw view 2)
  std::uint64_t seed = 11;
  std::string method_name = "baseline";
};

/// The full downstream protocol on held-out speakers: transform both views,
/// split frames into eval-train and a capped test set, fit linear CCA on the
/// transformed train features, then run k-NN classification, nearest-neighbor
/// reconstruction of view 2, and correlation captured.
EvalReport evaluate_pipeline(const SequenceDataset& downstream, const ViewTransform& repr1,
                             const ViewTransform& repr2, const EvalConfig& cfg);

}  // namespace mvcorr
