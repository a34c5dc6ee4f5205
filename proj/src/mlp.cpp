#include "mvcorr/mlp.hpp"

#include <string>

namespace mvcorr {

Matrix apply_activation(Activation act, const Matrix& pre) {
  switch (act) {
    case Activation::sigmoid:
      return (1.0 / (1.0 + (-pre.array()).exp())).matrix();
    case Activation::tanh:
      return pre.array().tanh().matrix();
    case Activation::identity:
      return pre;
  }
  throw ConfigError("unknown activation");
}

Matrix activation_deriv_from_output(Activation act, const Matrix& out) {
  switch (act) {
    case Activation::sigmoid:
      return (out.array() * (1.0 - out.array())).matrix();
    case Activation::tanh:
      return (1.0 - out.array().square()).matrix();
    case Activation::identity:
      return Matrix::Ones(out.rows(), out.cols());
  }
  throw ConfigError("unknown activation");
}

MlpParams make_mlp(const std::vector<Index>& dims, Activation hidden, Activation output) {
  if (dims.size() < 2) {
    throw ConfigError("make_mlp: need at least input and output dims");
  }
  MlpParams params;
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] < 1 || dims[i + 1] < 1) {
      throw ConfigError("make_mlp: dimensions must be positive");
    }
    MlpLayer layer;
    layer.w = Matrix::Zero(dims[i + 1], dims[i]);
    layer.b = Vector::Zero(dims[i + 1]);
    layer.act = (i + 2 == dims.size()) ? output : hidden;
    params.layers.push_back(std::move(layer));
  }
  return params;
}

Matrix mlp_forward(const MlpParams& params, const Matrix& x, MlpCache* cache) {
  if (params.layers.empty()) {
    throw DimensionError("mlp_forward: empty network");
  }
  if (x.rows() != params.input_dim()) {
    throw DimensionError("mlp_forward: input dim " + std::to_string(x.rows()) +
                         " does not match first layer " + std::to_string(params.input_dim()));
  }
  if (cache) {
    cache->input = x;
    cache->outputs.clear();
    cache->outputs.reserve(params.layers.size());
  }
  Matrix z = x;
  for (const MlpLayer& layer : params.layers) {
    Matrix pre = layer.w * z;
    pre.colwise() += layer.b;
    z = apply_activation(layer.act, pre);
    if (cache) cache->outputs.push_back(z);
  }
  return z;
}

MlpGrads MlpGrads::zeros_like(const MlpParams& params) {
  MlpGrads g;
  for (const MlpLayer& layer : params.layers) {
    g.w.push_back(Matrix::Zero(layer.w.rows(), layer.w.cols()));
    g.b.push_back(Vector::Zero(layer.b.size()));
  }
  return g;
}

MlpGrads& MlpGrads::operator+=(const MlpGrads& other) {
  for (size_t i = 0; i < w.size(); ++i) {
    w[i] += other.w[i];
    b[i] += other.b[i];
  }
  return *this;
}

MlpGrads mlp_backward(const MlpParams& params, const MlpCache& cache, const Matrix& grad_out,
                      Matrix* grad_input) {
  const size_t n_layers = params.layers.size();
  if (cache.outputs.size() != n_layers) {
    throw DimensionError("mlp_backward: cache does not match network depth");
  }
  MlpGrads grads = MlpGrads::zeros_like(params);
  Matrix delta = grad_out;
  for (size_t l = n_layers; l-- > 0;) {
    const MlpLayer& layer = params.layers[l];
    delta = delta.cwiseProduct(activation_deriv_from_output(layer.act, cache.outputs[l]));
    const Matrix& below = l == 0 ? cache.input : cache.outputs[l - 1];
    grads.w[l] = delta * below.transpose();
    grads.b[l] = delta.rowwise().sum();
    if (l > 0 || grad_input) {
      delta = (layer.w.transpose() * delta).eval();
    }
  }
  if (grad_input) *grad_input = delta;
  return grads;
}

}  // namespace mvcorr
