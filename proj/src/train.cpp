#include "mvcorr/train.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

namespace mvcorr {

std::string TrainHistory::to_csv() const {
  std::ostringstream out;
  out << "epoch,objective,validation,grad_norm,seconds\n";
  out.precision(17);
  for (Index e = 0; e < epochs(); ++e) {
    out << e << ',' << objective[e] << ',' << validation[e] << ',' << grad_norm[e] << ','
        << seconds[e] << '\n';
  }
  return out.str();
}

FrameBatch sample_frame_batch(const FrameDataset& data, Index m, std::mt19937_64& rng) {
  const Index n = data.x.cols();
  if (n < 1) {
    throw DimensionError("sample_frame_batch: empty dataset");
  }
  if (data.y.cols() != n) {
    throw DimensionError("sample_frame_batch: views are not aligned");
  }
  std::uniform_int_distribution<Index> pick(0, n - 1);
  FrameBatch batch;
  batch.x.resize(data.x.rows(), m);
  batch.y.resize(data.y.rows(), m);
  for (Index j = 0; j < m; ++j) {
    const Index idx = pick(rng);
    batch.x.col(j) = data.x.col(idx);
    batch.y.col(j) = data.y.col(idx);
  }
  return batch;
}

std::vector<SequenceSlice> sample_sequence_batch(const SequenceDataset& data, Index m,
                                                 Index len_min, Index len_max,
                                                 std::mt19937_64& rng) {
  if (data.utterances.empty()) {
    throw DimensionError("sample_sequence_batch: empty dataset");
  }
  if (len_min < 1 || len_max < len_min) {
    throw DimensionError("sample_sequence_batch: bad length range");
  }
  Index longest = 0;
  for (const Utterance& u : data.utterances) longest = std::max(longest, u.view1.rows());
  if (longest < len_min) {
    throw DimensionError("sample_sequence_batch: no utterance admits the minimum length " +
                         std::to_string(len_min));
  }
  const Index max_len = std::min(len_max, longest);

  std::uniform_int_distribution<Index> length_dist(len_min, max_len);
  std::vector<SequenceSlice> batch;
  batch.reserve(static_cast<size_t>(m));
  for (Index j = 0; j < m; ++j) {
    const Index len = length_dist(rng);
    // Uniform over utterances that can host the slice.
    std::vector<Index> eligible;
    for (Index u = 0; u < static_cast<Index>(data.utterances.size()); ++u) {
      if (data.utterances[static_cast<size_t>(u)].view1.rows() >= len) eligible.push_back(u);
    }
    std::uniform_int_distribution<size_t> upick(0, eligible.size() - 1);
    const Utterance& utt = data.utterances[static_cast<size_t>(eligible[upick(rng)])];
    std::uniform_int_distribution<Index> spick(0, utt.view1.rows() - len);
    const Index start = spick(rng);
    batch.push_back({utt.view1.middleRows(start, len), utt.view2.middleRows(start, len)});
  }
  return batch;
}

void init_matrix(Matrix& w, InitScheme scheme, std::mt19937_64& rng) {
  if (scheme == InitScheme::uniform) {
    std::uniform_real_distribution<double> dist(-0.1, 0.1);
    for (Index j = 0; j < w.cols(); ++j) {
      for (Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
    }
  } else {
    w = random_orthonormal(w.rows(), w.cols(), rng);
  }
}

void init_params(MlpParams& p, InitScheme scheme, std::mt19937_64& rng) {
  for (MlpLayer& layer : p.layers) {
    init_matrix(layer.w, scheme, rng);
    layer.b.setZero();
  }
}

void init_params(LstmParams& p, InitScheme scheme, std::mt19937_64& rng) {
  init_matrix(p.w_f, scheme, rng);
  init_matrix(p.w_i, scheme, rng);
  init_matrix(p.w_g, scheme, rng);
  init_matrix(p.w_o, scheme, rng);
  p.b_f.setZero();
  p.b_i.setZero();
  p.b_g.setZero();
  p.b_o.setZero();
}

void init_params(std::vector<LstmParams>& stack, InitScheme scheme, std::mt19937_64& rng) {
  for (LstmParams& layer : stack) init_params(layer, scheme, rng);
}

void init_params(BiLstmParams& p, InitScheme scheme, std::mt19937_64& rng) {
  init_params(p.fwd, scheme, rng);
  init_params(p.bwd, scheme, rng);
  init_matrix(p.w_fwd, scheme, rng);
  init_matrix(p.w_bwd, scheme, rng);
  p.b.setZero();
}

void init_params(SplitAeModel& m, InitScheme scheme, std::mt19937_64& rng) {
  init_params(m.enc_x, scheme, rng);
  init_params(m.enc_y, scheme, rng);
  init_params(m.dec_x, scheme, rng);
  init_params(m.dec_y, scheme, rng);
}

double clip_gradients(const std::vector<ParamBlock>& grads, double threshold) {
  double sq = 0;
  for (const ParamBlock& b : grads) {
    for (Index i = 0; i < b.size; ++i) sq += b.data[i] * b.data[i];
  }
  const double norm = std::sqrt(sq);
  if (threshold > 0 && norm > threshold) {
    const double scale = threshold / norm;
    for (const ParamBlock& b : grads) {
      for (Index i = 0; i < b.size; ++i) b.data[i] *= scale;
    }
  }
  return norm;
}

Optimizer::Optimizer(const TrainConfig& cfg)
    : kind_(cfg.optimizer),
      lr_(cfg.learning_rate),
      momentum_(cfg.momentum),
      beta1_(cfg.adam_beta1),
      beta2_(cfg.adam_beta2),
      eps_(cfg.adam_eps) {}

void Optimizer::step(const std::vector<ParamBlock>& params,
                     const std::vector<ParamBlock>& grads) {
  if (params.size() != grads.size()) {
    throw DimensionError("Optimizer::step: block lists differ in length");
  }
  if (kind_ != OptimizerKind::plain && m1_.empty()) {
    for (const ParamBlock& b : params) m1_.push_back(Vector::Zero(b.size));
    if (kind_ == OptimizerKind::adam) {
      for (const ParamBlock& b : params) m2_.push_back(Vector::Zero(b.size));
    }
  }
  ++t_;
  for (size_t k = 0; k < params.size(); ++k) {
    const ParamBlock& p = params[k];
    const ParamBlock& g = grads[k];
    if (p.size != g.size) {
      throw DimensionError("Optimizer::step: block " + std::to_string(k) + " size mismatch");
    }
    switch (kind_) {
      case OptimizerKind::plain:
        for (Index i = 0; i < p.size; ++i) p.data[i] -= lr_ * g.data[i];
        break;
      case OptimizerKind::momentum: {
        Vector& v = m1_[k];
        for (Index i = 0; i < p.size; ++i) {
          v[i] = momentum_ * v[i] + g.data[i];
          p.data[i] -= lr_ * v[i];
        }
        break;
      }
      case OptimizerKind::adam: {
        Vector& m = m1_[k];
        Vector& v = m2_[k];
        const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (Index i = 0; i < p.size; ++i) {
          m[i] = beta1_ * m[i] + (1.0 - beta1_) * g.data[i];
          v[i] = beta2_ * v[i] + (1.0 - beta2_) * g.data[i] * g.data[i];
          p.data[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
        }
        break;
      }
    }
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_objective_finite(double value, const char* trainer, Index epoch, Index step) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string(trainer) + ": non-finite objective at epoch " +
                       std::to_string(epoch) + " step " + std::to_string(step) +
                       "; lower the learning rate or tighten clipping");
  }
}

}  // namespace

TrainHistory train_dcca(MlpParams& net1, MlpParams& net2, const FrameDataset& data,
                        const TrainConfig& cfg, const CorrConfig& corr_cfg) {
  if (net1.output_dim() != net2.output_dim()) {
    throw DimensionError("train_dcca: network output dims differ");
  }
  const Index n = data.x.cols();
  const Index m = cfg.batch_size;
  if (m < 2) {
    throw ConfigError("train_dcca: batch_size must be >= 2");
  }
  const Index steps = cfg.steps_per_epoch > 0 ? cfg.steps_per_epoch : std::max<Index>(1, n / m);

  std::mt19937_64 rng(cfg.seed);
  std::mt19937_64 eval_rng(mix_seed(cfg.seed, 0x9eb1));
  const Index eval_m = std::min<Index>(cfg.eval_batch > 0 ? cfg.eval_batch : 1000, n);
  FrameBatch eval_batch = sample_frame_batch(data, std::max<Index>(eval_m, 2), eval_rng);

  Optimizer opt(cfg);
  std::vector<ParamBlock> params = param_blocks(net1);
  append_blocks(params, net2);

  TrainHistory history;
  const auto start = Clock::now();
  for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
    double corr_sum = 0, norm_sum = 0;
    for (Index step = 0; step < steps; ++step) {
      FrameBatch batch = sample_frame_batch(data, m, rng);
      MlpCache c1, c2;
      Matrix f = mlp_forward(net1, batch.x, &c1);
      Matrix g = mlp_forward(net2, batch.y, &c2);
      CorrResult res = corr_objective(f, g, corr_cfg);
      check_objective_finite(res.corr, "train_dcca", epoch, step);
      corr_sum += res.corr;

      // Minimize -corr.
      MlpGrads g1 = mlp_backward(net1, c1, -res.grad_f);
      MlpGrads g2 = mlp_backward(net2, c2, -res.grad_g);
      std::vector<ParamBlock> grads = param_blocks(g1);
      append_blocks(grads, g2);
      norm_sum += clip_gradients(grads, cfg.clip_threshold);
      opt.step(params, grads);
    }
    history.objective.push_back(corr_sum / static_cast<double>(steps));
    CorrResult val =
        corr_objective(mlp_forward(net1, eval_batch.x), mlp_forward(net2, eval_batch.y), corr_cfg);
    history.validation.push_back(val.corr);
    history.grad_norm.push_back(norm_sum / static_cast<double>(steps));
    history.seconds.push_back(elapsed_seconds(start));
  }
  return history;
}

TrainHistory train_dcclstm(std::vector<LstmParams>& stack1, std::vector<LstmParams>& stack2,
                           const SequenceDataset& data, const TrainConfig& cfg,
                           const CorrConfig& corr_cfg) {
  if (stack1.empty() || stack2.empty()) {
    throw DimensionError("train_dcclstm: empty stack");
  }
  const Index o1 = stack1.back().hidden_size();
  const Index o2 = stack2.back().hidden_size();
  if (o1 != o2) {
    throw DimensionError("train_dcclstm: stack output dims differ");
  }
  const Index m = cfg.batch_size;
  if (m < 2) {
    throw ConfigError("train_dcclstm: batch_size must be >= 2");
  }
  const Index steps = cfg.steps_per_epoch > 0
                          ? cfg.steps_per_epoch
                          : std::max<Index>(1, static_cast<Index>(data.utterances.size()));

  std::mt19937_64 rng(cfg.seed);
  std::mt19937_64 eval_rng(mix_seed(cfg.seed, 0x9eb2));
  const Index eval_m = std::max<Index>(2, cfg.eval_batch > 0 ? cfg.eval_batch : 200);
  std::vector<SequenceSlice> eval_batch =
      sample_sequence_batch(data, eval_m, cfg.seq_len_min, cfg.seq_len_max, eval_rng);

  auto batch_outputs = [&](const std::vector<SequenceSlice>& slices, Matrix& f, Matrix& g,
                           std::vector<DeepLstmSequence>* fw1,
                           std::vector<DeepLstmSequence>* fw2) {
    const Index count = static_cast<Index>(slices.size());
    f.resize(o1, count);
    g.resize(o2, count);
    for (Index j = 0; j < count; ++j) {
      DeepLstmSequence s1 = deep_lstm_forward(stack1, slices[static_cast<size_t>(j)].view1);
      DeepLstmSequence s2 = deep_lstm_forward(stack2, slices[static_cast<size_t>(j)].view2);
      f.col(j) = s1.layers.back().h_final;
      g.col(j) = s2.layers.back().h_final;
      if (fw1) fw1->push_back(std::move(s1));
      if (fw2) fw2->push_back(std::move(s2));
    }
  };

  Optimizer opt(cfg);
  std::vector<ParamBlock> params = param_blocks(stack1);
  append_blocks(params, stack2);

  TrainHistory history;
  const auto start = Clock::now();
  for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
    double corr_sum = 0, norm_sum = 0;
    for (Index step = 0; step < steps; ++step) {
      std::vector<SequenceSlice> slices =
          sample_sequence_batch(data, m, cfg.seq_len_min, cfg.seq_len_max, rng);
      Matrix f, g;
      std::vector<DeepLstmSequence> fw1, fw2;
      fw1.reserve(slices.size());
      fw2.reserve(slices.size());
      batch_outputs(slices, f, g, &fw1, &fw2);
      CorrResult res = corr_objective(f, g, corr_cfg);
      check_objective_finite(res.corr, "train_dcclstm", epoch, step);
      corr_sum += res.corr;

      std::vector<LstmGrads> g1, g2;
      for (const LstmParams& p : stack1) g1.push_back(LstmGrads::zeros_like(p));
      for (const LstmParams& p : stack2) g2.push_back(LstmGrads::zeros_like(p));
      for (Index j = 0; j < m; ++j) {
        // Only the final step of the top layer feeds the objective.
        Matrix dh1 = Matrix::Zero(fw1[static_cast<size_t>(j)].layers.back().h_all.rows(), o1);
        dh1.row(dh1.rows() - 1) = -res.grad_f.col(j).transpose();
        deep_lstm_backward(stack1, fw1[static_cast<size_t>(j)], dh1, g1, cfg.tbptt_window);
        Matrix dh2 = Matrix::Zero(fw2[static_cast<size_t>(j)].layers.back().h_all.rows(), o2);
        dh2.row(dh2.rows() - 1) = -res.grad_g.col(j).transpose();
        deep_lstm_backward(stack2, fw2[static_cast<size_t>(j)], dh2, g2, cfg.tbptt_window);
      }
      std::vector<ParamBlock> grads = param_blocks(g1);
      append_blocks(grads, g2);
      const double norm = clip_gradients(grads, cfg.clip_threshold);
      norm_sum += norm;
      if (cfg.clip_threshold > 0 && norm > 100.0 * cfg.clip_threshold) {
        std::cerr << "train_dcclstm: exploding gradient, pre-clip norm " << norm << " at epoch "
                  << epoch << " step " << step << "\n";
      }
      opt.step(params, grads);
    }
    history.objective.push_back(corr_sum / static_cast<double>(steps));
    Matrix f, g;
    batch_outputs(eval_batch, f, g, nullptr, nullptr);
    history.validation.push_back(corr_objective(f, g, corr_cfg).corr);
    history.grad_norm.push_back(norm_sum / static_cast<double>(steps));
    history.seconds.push_back(elapsed_seconds(start));
  }
  return history;
}

TrainHistory train_splitae(SplitAeModel& model, const FrameDataset& data,
                           const TrainConfig& cfg) {
  const Index n = data.x.cols();
  const Index m = cfg.batch_size;
  if (m < 1) {
    throw ConfigError("train_splitae: batch_size must be >= 1");
  }
  const Index steps = cfg.steps_per_epoch > 0 ? cfg.steps_per_epoch : std::max<Index>(1, n / m);

  std::mt19937_64 rng(cfg.seed);
  std::mt19937_64 eval_rng(mix_seed(cfg.seed, 0x9eb3));
  const Index eval_m = std::min<Index>(cfg.eval_batch > 0 ? cfg.eval_batch : 1000, n);
  FrameBatch eval_batch = sample_frame_batch(data, std::max<Index>(eval_m, 1), eval_rng);

  Optimizer opt(cfg);
  std::vector<ParamBlock> params = param_blocks(model);

  TrainHistory history;
  const auto start = Clock::now();
  for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0, norm_sum = 0;
    for (Index step = 0; step < steps; ++step) {
      FrameBatch batch = sample_frame_batch(data, m, rng);
      SplitAeEval eval = splitae_loss(model, batch.x, batch.y);
      check_objective_finite(eval.loss, "train_splitae", epoch, step);
      const double scale = 1.0 / static_cast<double>(m);
      loss_sum += eval.loss * scale;
      std::vector<ParamBlock> grads = param_blocks(eval.grads);
      for (const ParamBlock& b : grads) {
        for (Index i = 0; i < b.size; ++i) b.data[i] *= scale;
      }
      norm_sum += clip_gradients(grads, cfg.clip_threshold);
      opt.step(params, grads);
    }
    history.objective.push_back(loss_sum / static_cast<double>(steps));
    SplitAeEval val = splitae_loss(model, eval_batch.x, eval_batch.y);
    history.validation.push_back(val.loss / static_cast<double>(eval_batch.x.cols()));
    history.grad_norm.push_back(norm_sum / static_cast<double>(steps));
    history.seconds.push_back(elapsed_seconds(start));
  }
  return history;
}

}  // namespace mvcorr
