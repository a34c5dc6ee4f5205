#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mvcorr/linalg.hpp"

namespace mvcorr {

/// One aligned two-view time series. Views are stored time-major (row t is
/// frame t); stack_frames and the loaders keep that convention.
struct Utterance {
  Matrix view1;  // T x d1
  Matrix view2;  // T x d2
  std::vector<int> labels;  // length T or empty
  int speaker = 0;
};

struct SequenceDataset {
  std::vector<Utterance> utterances;

  Index d1() const { return utterances.empty() ? 0 : utterances.front().view1.cols(); }
  Index d2() const { return utterances.empty() ? 0 : utterances.front().view2.cols(); }
  bool has_labels() const {
    return !utterances.empty() && !utterances.front().labels.empty();
  }
  Index total_frames() const;
  std::vector<int> speakers() const;  // distinct ids, ascending
};

enum class Mixing { linear, nonlinear };
enum class Temporal { iid, smoothed };

/// Ground-truth generator: a per-utterance latent AR(1) sequence with
/// class-dependent means, mixed into both views plus independent noise.
/// Defaults echo the target corpus shape (39/16 views, 16 speakers).
struct SynthSpec {
  Index latent_dim = 8;
  Index d1 = 39;
  Index d2 = 16;
  Mixing mixing = Mixing::linear;
  Temporal temporal = Temporal::smoothed;
  double ar_coeff = 0.9;  // rho in [0, 1), used when smoothed
  double noise_std1 = 1.0;
  double noise_std2 = 1.0;
  Index n_classes = 6;
  double class_sep = 2.0;  // spread of the latent class means
  Index utterance_count = 48;
  Index length_min = 40;
  Index length_max = 80;
  Index n_speakers = 16;
  // Probability that a segment is a pause: the latent freezes at the rest
  // class (id 0) and the label marks it. 0 disables pauses.
  double silence_prob = 0.0;
  std::uint64_t seed = 1;
};

/// Deterministic given the spec; utterances draw from seeds derived per index
/// so generation order never matters. View entries are rounded through
/// 32-bit float so a save/load cycle is bit-exact.
SequenceDataset generate_synthetic(const SynthSpec& spec);

/// Row t of the result concatenates frames t-context .. t+context (zero-padded
/// at the edges); the center frame keeps the label. context = 0 is identity.
Matrix stack_frames(const Matrix& view, Index context);

/// Partition by speaker id. Both lists must be disjoint, contain only known
/// speakers, and together cover every utterance.
std::pair<SequenceDataset, SequenceDataset> split_speakers(const SequenceDataset& dataset,
                                                           const std::vector<int>& train_ids,
                                                           const std::vector<int>& heldout_ids);

// MVSEQ1 container: magic, descriptor, then per utterance both views as
// little-endian f32 frames and optional i32 labels.
void save_dataset(const SequenceDataset& dataset, std::ostream& out);
void save_dataset(const SequenceDataset& dataset, const std::string& path);
SequenceDataset load_dataset(std::istream& in);
SequenceDataset load_dataset(const std::string& path);

/// One frame per line, view-1 then view-2 values, label last.
void export_csv(const SequenceDataset& dataset, const std::string& path);

/// Frame-level view of a dataset: stacked frames as columns, utterances
/// concatenated. Feeds the frame-based trainers and the evaluation pipeline.
struct FrameDataset {
  Matrix x;  // D1 x N
  Matrix y;  // D2 x N
  std::vector<int> labels;  // length N or empty
};

FrameDataset to_frames(const SequenceDataset& dataset, Index context);

/// SplitMix64 stream, used to derive independent per-unit seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace mvcorr
