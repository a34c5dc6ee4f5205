#pragma once

#include "mvcorr/mlp.hpp"

namespace mvcorr {

/// The two split-autoencoder layouts. `shared_encoder_pair` feeds both views
/// through their own encoders whose final layers map into one shared hidden
/// layer (pre-activations summed); `single_view_encoder` computes the shared
/// representation from view 1 alone and reconstructs both views from it.
enum class SplitAeArch { shared_encoder_pair, single_view_encoder };

struct SplitAeModel {
  SplitAeArch arch = SplitAeArch::single_view_encoder;
  MlpParams enc_x;
  MlpParams enc_y;  // empty for single_view_encoder
  MlpParams dec_x;
  MlpParams dec_y;

  Index shared_dim() const { return enc_x.output_dim(); }
};

/// Builds a zero-initialized model. `enc_widths` are the encoder hidden
/// widths; the encoder ends at `shared_dim` and each decoder mirrors the
/// encoder back to its view.
SplitAeModel make_splitae(SplitAeArch arch, Index x_dim, Index y_dim,
                          const std::vector<Index>& enc_widths, Index shared_dim,
                          Activation act);

struct SplitAeGrads {
  MlpGrads enc_x, enc_y, dec_x, dec_y;

  static SplitAeGrads zeros_like(const SplitAeModel& model);
};

struct SplitAeEval {
  double loss = 0;  // (1/2) sum_i (||x_i - p(.)||^2 + ||y_i - q(.)||^2)
  SplitAeGrads grads;
};

/// Reconstruction loss over a column-sample batch, with full gradients.
SplitAeEval splitae_loss(const SplitAeModel& model, const Matrix& x, const Matrix& y);

/// Shared representation. For shared_encoder_pair the second view contributes
/// when given; at test time, with y = nullptr, the shared layer is computed
/// from view 1 alone (the unavailable view's pathway is dropped).
Matrix splitae_encode(const SplitAeModel& model, const Matrix& x, const Matrix* y = nullptr);

}  // namespace mvcorr
