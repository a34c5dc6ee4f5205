#include "mvcorr/splitae.hpp"

#include <string>

namespace mvcorr {

namespace {

// Forward through all but the final encoder layer, returning the cache; the
// final layer of a shared_encoder_pair encoder is applied by the caller so
// the two views' pre-activations can be summed.
Matrix encoder_body(const MlpParams& enc, const Matrix& x, MlpCache& cache) {
  cache.input = x;
  cache.outputs.clear();
  Matrix z = x;
  for (size_t l = 0; l + 1 < enc.layers.size(); ++l) {
    Matrix pre = enc.layers[l].w * z;
    pre.colwise() += enc.layers[l].b;
    z = apply_activation(enc.layers[l].act, pre);
    cache.outputs.push_back(z);
  }
  return z;
}

Matrix final_preactivation(const MlpParams& enc, const Matrix& body_out) {
  const MlpLayer& last = enc.layers.back();
  Matrix pre = last.w * body_out;
  pre.colwise() += last.b;
  return pre;
}

// Backward through the final encoder layer given d(loss)/d(pre-activation),
// then through the body.
void encoder_backward(const MlpParams& enc, const MlpCache& cache, const Matrix& body_out,
                      const Matrix& d_pre, MlpGrads& grads) {
  const size_t last = enc.layers.size() - 1;
  grads.w[last] += d_pre * body_out.transpose();
  grads.b[last] += d_pre.rowwise().sum();
  if (last == 0) return;
  Matrix delta = enc.layers[last].w.transpose() * d_pre;
  for (size_t l = last; l-- > 0;) {
    delta = delta.cwiseProduct(activation_deriv_from_output(enc.layers[l].act, cache.outputs[l]));
    const Matrix& below = l == 0 ? cache.input : cache.outputs[l - 1];
    grads.w[l] += delta * below.transpose();
    grads.b[l] += delta.rowwise().sum();
    if (l > 0) delta = (enc.layers[l].w.transpose() * delta).eval();
  }
}

void check_views(const SplitAeModel& model, const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols()) {
    throw DimensionError("splitae: views have different sample counts");
  }
  if (x.rows() != model.enc_x.input_dim()) {
    throw DimensionError("splitae: view-1 dimension does not match the encoder");
  }
  if (model.arch == SplitAeArch::shared_encoder_pair &&
      y.rows() != model.enc_y.input_dim()) {
    throw DimensionError("splitae: view-2 dimension does not match the encoder");
  }
}

}  // namespace

SplitAeModel make_splitae(SplitAeArch arch, Index x_dim, Index y_dim,
                          const std::vector<Index>& enc_widths, Index shared_dim,
                          Activation act) {
  auto dims_through = [&](Index in) {
    std::vector<Index> dims{in};
    dims.insert(dims.end(), enc_widths.begin(), enc_widths.end());
    dims.push_back(shared_dim);
    return dims;
  };
  auto dims_back = [&](Index out) {
    std::vector<Index> dims{shared_dim};
    dims.insert(dims.end(), enc_widths.rbegin(), enc_widths.rend());
    dims.push_back(out);
    return dims;
  };
  SplitAeModel model;
  model.arch = arch;
  model.enc_x = make_mlp(dims_through(x_dim), act, act);
  if (arch == SplitAeArch::shared_encoder_pair) {
    model.enc_y = make_mlp(dims_through(y_dim), act, act);
  }
  // Linear output layers so reconstructions span the data range.
  model.dec_x = make_mlp(dims_back(x_dim), act, Activation::identity);
  model.dec_y = make_mlp(dims_back(y_dim), act, Activation::identity);
  return model;
}

SplitAeGrads SplitAeGrads::zeros_like(const SplitAeModel& model) {
  SplitAeGrads g;
  g.enc_x = MlpGrads::zeros_like(model.enc_x);
  g.enc_y = MlpGrads::zeros_like(model.enc_y);
  g.dec_x = MlpGrads::zeros_like(model.dec_x);
  g.dec_y = MlpGrads::zeros_like(model.dec_y);
  return g;
}

SplitAeEval splitae_loss(const SplitAeModel& model, const Matrix& x, const Matrix& y) {
  check_views(model, x, y);
  SplitAeEval out;
  out.grads = SplitAeGrads::zeros_like(model);

  Matrix shared;
  MlpCache cache_x, cache_y;
  Matrix body_x, body_y;
  if (model.arch == SplitAeArch::shared_encoder_pair) {
    body_x = encoder_body(model.enc_x, x, cache_x);
    body_y = encoder_body(model.enc_y, y, cache_y);
    Matrix pre = final_preactivation(model.enc_x, body_x) +
                 final_preactivation(model.enc_y, body_y);
    shared = apply_activation(model.enc_x.layers.back().act, pre);
  } else {
    shared = mlp_forward(model.enc_x, x, &cache_x);
  }

  MlpCache cache_px, cache_qy;
  Matrix x_hat = mlp_forward(model.dec_x, shared, &cache_px);
  Matrix y_hat = mlp_forward(model.dec_y, shared, &cache_qy);

  Matrix rx = x_hat - x;
  Matrix ry = y_hat - y;
  out.loss = 0.5 * (rx.squaredNorm() + ry.squaredNorm());

  Matrix d_shared_x, d_shared_y;
  out.grads.dec_x = mlp_backward(model.dec_x, cache_px, rx, &d_shared_x);
  out.grads.dec_y = mlp_backward(model.dec_y, cache_qy, ry, &d_shared_y);
  Matrix d_shared = d_shared_x + d_shared_y;

  if (model.arch == SplitAeArch::shared_encoder_pair) {
    Matrix d_pre = d_shared.cwiseProduct(
        activation_deriv_from_output(model.enc_x.layers.back().act, shared));
    encoder_backward(model.enc_x, cache_x, body_x, d_pre, out.grads.enc_x);
    encoder_backward(model.enc_y, cache_y, body_y, d_pre, out.grads.enc_y);
  } else {
    out.grads.enc_x = mlp_backward(model.enc_x, cache_x, d_shared);
  }
  return out;
}

Matrix splitae_encode(const SplitAeModel& model, const Matrix& x, const Matrix* y) {
  if (model.arch == SplitAeArch::single_view_encoder) {
    return mlp_forward(model.enc_x, x);
  }
  MlpCache cache_x;
  Matrix body_x = encoder_body(model.enc_x, x, cache_x);
  Matrix pre = final_preactivation(model.enc_x, body_x);
  if (y) {
    if (y->rows() != model.enc_y.input_dim() || y->cols() != x.cols()) {
      throw DimensionError("splitae_encode: view-2 shape mismatch");
    }
    MlpCache cache_y;
    Matrix body_y = encoder_body(model.enc_y, *y, cache_y);
    pre += final_preactivation(model.enc_y, body_y);
  }
  return apply_activation(model.enc_x.layers.back().act, pre);
}

}  // namespace mvcorr
