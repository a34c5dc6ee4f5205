#pragma once

#include <random>

#include "mvcorr/corr.hpp"
#include "mvcorr/data.hpp"
#include "mvcorr/params.hpp"

namespace mvcorr {

enum class OptimizerKind { plain, momentum, adam };
enum class InitScheme { uniform, orthogonal };

struct TrainConfig {
  Index batch_size = 200;  // sequences per batch for DCC-LSTM (default 32 there)
  Index epochs = 10;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::adam;
  double momentum = 0.9;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double clip_threshold = 0;  // 0 disables clipping
  Index seq_len_min = 10;
  Index seq_len_max = 30;
  Index tbptt_window = 0;  // 0 = full BPTT
  InitScheme init = InitScheme::uniform;
  std::uint64_t seed = 1;
  Index steps_per_epoch = 0;  // 0 derives from the dataset size
  Index eval_batch = 0;       // 0 = 1000 frames / 200 sequences, capped by data
};

struct TrainHistory {
  std::vector<double> objective;   // mean train objective per epoch
  std::vector<double> validation;  // corr (or loss) on the fixed held-out batch
  std::vector<double> grad_norm;   // mean pre-clip gradient norm
  std::vector<double> seconds;     // cumulative wall clock

  Index epochs() const { return static_cast<Index>(objective.size()); }
  std::string to_csv() const;  // header + one epoch per line
};

/// m aligned frame pairs drawn uniformly with replacement.
struct FrameBatch {
  Matrix x, y;
};
FrameBatch sample_frame_batch(const FrameDataset& data, Index m, std::mt19937_64& rng);

/// m independent (utterance, start, length) draws; length uniform over the
/// range, both views sliced identically, never crossing utterance boundaries.
struct SequenceSlice {
  Matrix view1, view2;  // len x d rows
};
std::vector<SequenceSlice> sample_sequence_batch(const SequenceDataset& data, Index m,
                                                 Index len_min, Index len_max,
                                                 std::mt19937_64& rng);

/// In-place weight init: uniform entries in [-0.1, 0.1], or orthonormal
/// rows/columns. Biases are zeroed by both schemes.
void init_matrix(Matrix& w, InitScheme scheme, std::mt19937_64& rng);
void init_params(MlpParams& p, InitScheme scheme, std::mt19937_64& rng);
void init_params(LstmParams& p, InitScheme scheme, std::mt19937_64& rng);
void init_params(std::vector<LstmParams>& stack, InitScheme scheme, std::mt19937_64& rng);
void init_params(BiLstmParams& p, InitScheme scheme, std::mt19937_64& rng);
void init_params(SplitAeModel& m, InitScheme scheme, std::mt19937_64& rng);

/// Global-norm clipping across all blocks: if ||g|| > threshold every entry
/// is scaled by threshold/||g||. Returns the pre-clip norm. threshold <= 0
/// only measures.
double clip_gradients(const std::vector<ParamBlock>& grads, double threshold);

/// Plain SGD / heavy-ball momentum / adaptive-moments updater over parameter
/// blocks. State buffers are allocated on first step and keyed by position.
class Optimizer {
 public:
  explicit Optimizer(const TrainConfig& cfg);
  void step(const std::vector<ParamBlock>& params, const std::vector<ParamBlock>& grads);

 private:
  OptimizerKind kind_;
  double lr_, momentum_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Vector> m1_, m2_;
};

/// DCCA: frame minibatches through both nets, -corr as the loss, clipped
/// updates, per-epoch validation on a fixed held-out batch.
TrainHistory train_dcca(MlpParams& net1, MlpParams& net2, const FrameDataset& data,
                        const TrainConfig& cfg, const CorrConfig& corr_cfg);

/// DCC-LSTM: i.i.d. sequence minibatches; each view's deep stack runs the
/// slice and contributes its final top-layer output as one batch column; BPTT
/// (or TBPTT over the last tbptt_window steps) through both stacks.
TrainHistory train_dcclstm(std::vector<LstmParams>& stack1, std::vector<LstmParams>& stack2,
                           const SequenceDataset& data, const TrainConfig& cfg,
                           const CorrConfig& corr_cfg);

/// SplitAE: minibatch gradient descent on the reconstruction loss; history
/// records the per-sample loss.
TrainHistory train_splitae(SplitAeModel& model, const FrameDataset& data,
                           const TrainConfig& cfg);

}  // namespace mvcorr
