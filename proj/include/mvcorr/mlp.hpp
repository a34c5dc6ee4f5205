#pragma once

#include <vector>

#include "mvcorr/linalg.hpp"

namespace mvcorr {

enum class Activation { sigmoid, tanh, identity };

Matrix apply_activation(Activation act, const Matrix& pre);
/// Elementwise derivative expressed through the activation OUTPUT
/// (sigmoid' = y(1-y), tanh' = 1-y^2, identity' = 1).
Matrix activation_deriv_from_output(Activation act, const Matrix& out);

struct MlpLayer {
  Matrix w;  // out_dim x in_dim
  Vector b;
  Activation act = Activation::sigmoid;
};

/// Feed-forward network over column-sample batches.
struct MlpParams {
  std::vector<MlpLayer> layers;

  Index input_dim() const { return layers.empty() ? 0 : layers.front().w.cols(); }
  Index output_dim() const { return layers.empty() ? 0 : layers.back().w.rows(); }
};

/// Zero-initialized network: dims = {in, h1, ..., out}; hidden layers use
/// `hidden`, the final layer `output`.
MlpParams make_mlp(const std::vector<Index>& dims, Activation hidden, Activation output);

struct MlpCache {
  Matrix input;
  std::vector<Matrix> outputs;  // post-activation per layer
};

/// Layer-wise affine + activation. The cache, when requested, is sufficient
/// for mlp_backward.
Matrix mlp_forward(const MlpParams& params, const Matrix& x, MlpCache* cache = nullptr);

struct MlpGrads {
  std::vector<Matrix> w;
  std::vector<Vector> b;

  static MlpGrads zeros_like(const MlpParams& params);
  MlpGrads& operator+=(const MlpGrads& other);
};

/// Backward pass from d(loss)/d(output). Optionally reports d(loss)/d(input).
MlpGrads mlp_backward(const MlpParams& params, const MlpCache& cache, const Matrix& grad_out,
                      Matrix* grad_input = nullptr);

}  // namespace mvcorr
