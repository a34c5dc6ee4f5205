#include "mvcorr/lstm.hpp"

#include <cmath>
#include <string>

namespace mvcorr {

namespace {

Vector sigmoid(const Vector& v) { return (1.0 / (1.0 + (-v.array()).exp())).matrix(); }

Vector affine(const Matrix& w, const Vector& u, const Vector& b) { return w * u + b; }

}  // namespace

LstmParams make_lstm(Index input, Index hidden, bool peephole) {
  if (input < 1 || hidden < 1) {
    throw ConfigError("make_lstm: dimensions must be positive");
  }
  const Index gate_cols = (peephole ? 2 * hidden : hidden) + input;
  LstmParams p;
  p.peephole = peephole;
  p.w_f = Matrix::Zero(hidden, gate_cols);
  p.w_i = Matrix::Zero(hidden, gate_cols);
  p.w_o = Matrix::Zero(hidden, gate_cols);
  p.w_g = Matrix::Zero(hidden, hidden + input);
  p.b_f = Vector::Zero(hidden);
  p.b_i = Vector::Zero(hidden);
  p.b_o = Vector::Zero(hidden);
  p.b_g = Vector::Zero(hidden);
  return p;
}

LstmState zero_state(const LstmParams& params) {
  const Index h = params.hidden_size();
  return LstmState{Vector::Zero(h), Vector::Zero(h)};
}

namespace {

LstmStepCache step_with_cache(const LstmParams& p, const LstmState& state, const Vector& x) {
  const Index h = p.hidden_size();
  if (x.size() != p.input_size()) {
    throw DimensionError("lstm_step: input size " + std::to_string(x.size()) +
                         " does not match cell input " + std::to_string(p.input_size()));
  }
  if (state.c.size() != h || state.h.size() != h) {
    throw DimensionError("lstm_step: state size does not match hidden size");
  }

  Vector u_gate(p.w_f.cols());
  if (p.peephole) {
    u_gate << state.c, state.h, x;
  } else {
    u_gate << state.h, x;
  }
  Vector u_cand(h + x.size());
  u_cand << state.h, x;

  LstmStepCache cache;
  cache.c_prev = state.c;
  cache.h_prev = state.h;
  cache.x = x;
  cache.f = sigmoid(affine(p.w_f, u_gate, p.b_f));
  cache.i = sigmoid(affine(p.w_i, u_gate, p.b_i));
  cache.g = affine(p.w_g, u_cand, p.b_g).array().tanh();
  cache.c = cache.f.cwiseProduct(state.c) + cache.i.cwiseProduct(cache.g);
  cache.o = sigmoid(affine(p.w_o, u_gate, p.b_o));
  cache.tanh_c = cache.c.array().tanh();
  return cache;
}

}  // namespace

LstmState lstm_step(const LstmParams& params, const LstmState& state, const Vector& x) {
  LstmStepCache cache = step_with_cache(params, state, x);
  return LstmState{cache.c, cache.o.cwiseProduct(cache.tanh_c)};
}

LstmSequence lstm_forward(const LstmParams& params, const Matrix& sequence) {
  const Index t_len = sequence.rows();
  if (t_len < 1) {
    throw DimensionError("lstm_forward: empty sequence");
  }
  LstmSequence out;
  out.steps.reserve(t_len);
  out.h_all.resize(t_len, params.hidden_size());
  LstmState state = zero_state(params);
  for (Index t = 0; t < t_len; ++t) {
    LstmStepCache cache = step_with_cache(params, state, sequence.row(t).transpose());
    state.c = cache.c;
    state.h = cache.o.cwiseProduct(cache.tanh_c);
    out.h_all.row(t) = state.h.transpose();
    out.steps.push_back(std::move(cache));
  }
  out.h_final = state.h;
  return out;
}

LstmGrads LstmGrads::zeros_like(const LstmParams& p) {
  LstmGrads g;
  g.w_f = Matrix::Zero(p.w_f.rows(), p.w_f.cols());
  g.w_i = Matrix::Zero(p.w_i.rows(), p.w_i.cols());
  g.w_g = Matrix::Zero(p.w_g.rows(), p.w_g.cols());
  g.w_o = Matrix::Zero(p.w_o.rows(), p.w_o.cols());
  g.b_f = Vector::Zero(p.b_f.size());
  g.b_i = Vector::Zero(p.b_i.size());
  g.b_g = Vector::Zero(p.b_g.size());
  g.b_o = Vector::Zero(p.b_o.size());
  return g;
}

LstmGrads& LstmGrads::operator+=(const LstmGrads& other) {
  w_f += other.w_f;
  w_i += other.w_i;
  w_g += other.w_g;
  w_o += other.w_o;
  b_f += other.b_f;
  b_i += other.b_i;
  b_g += other.b_g;
  b_o += other.b_o;
  return *this;
}

void lstm_backward(const LstmParams& p, const LstmSequence& fwd, const Matrix& grad_h_all,
                   LstmGrads& grads, Matrix* grad_x, Index window) {
  const Index t_len = static_cast<Index>(fwd.steps.size());
  const Index h = p.hidden_size();
  const Index d = p.input_size();
  if (grad_h_all.rows() != t_len || grad_h_all.cols() != h) {
    throw DimensionError("lstm_backward: gradient shape does not match the forward pass");
  }
  if (window < 0 || window > t_len) {
    throw DimensionError("lstm_backward: window out of range");
  }
  const Index first = window == 0 ? 0 : t_len - window;
  if (grad_x) *grad_x = Matrix::Zero(t_len, d);

  Vector dh_next = Vector::Zero(h);  // dL/dh_t flowing from step t+1
  Vector dc_next = Vector::Zero(h);  // dL/dc_t flowing from step t+1
  for (Index t = t_len - 1; t >= first; --t) {
    const LstmStepCache& s = fwd.steps[t];
    Vector dh = grad_h_all.row(t).transpose() + dh_next;

    Vector d_o = dh.cwiseProduct(s.tanh_c);
    Vector da_o = d_o.cwiseProduct(s.o).cwiseProduct((1.0 - s.o.array()).matrix());
    Vector dc = dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tanh_c.array().square()).matrix()) +
                dc_next;
    Vector d_f = dc.cwiseProduct(s.c_prev);
    Vector da_f = d_f.cwiseProduct(s.f).cwiseProduct((1.0 - s.f.array()).matrix());
    Vector d_i = dc.cwiseProduct(s.g);
    Vector da_i = d_i.cwiseProduct(s.i).cwiseProduct((1.0 - s.i.array()).matrix());
    Vector d_g = dc.cwiseProduct(s.i);
    Vector da_g = d_g.cwiseProduct((1.0 - s.g.array().square()).matrix());

    Vector u_gate(p.w_f.cols());
    if (p.peephole) {
      u_gate << s.c_prev, s.h_prev, s.x;
    } else {
      u_gate << s.h_prev, s.x;
    }
    Vector u_cand(h + d);
    u_cand << s.h_prev, s.x;

    grads.w_f += da_f * u_gate.transpose();
    grads.w_i += da_i * u_gate.transpose();
    grads.w_o += da_o * u_gate.transpose();
    grads.w_g += da_g * u_cand.transpose();
    grads.b_f += da_f;
    grads.b_i += da_i;
    grads.b_o += da_o;
    grads.b_g += da_g;

    Vector du_gate = p.w_f.transpose() * da_f + p.w_i.transpose() * da_i +
                     p.w_o.transpose() * da_o;
    Vector du_cand = p.w_g.transpose() * da_g;

    const Index h_off = p.peephole ? h : 0;
    dc_next = dc.cwiseProduct(s.f);
    if (p.peephole) dc_next += du_gate.head(h);
    dh_next = du_gate.segment(h_off, h) + du_cand.head(h);
    if (grad_x) {
      grad_x->row(t) = (du_gate.tail(d) + du_cand.tail(d)).transpose();
    }
  }
}

DeepLstmSequence deep_lstm_forward(const std::vector<LstmParams>& stack, const Matrix& sequence) {
  if (stack.empty()) {
    throw DimensionError("deep_lstm_forward: empty stack");
  }
  DeepLstmSequence out;
  out.layers.reserve(stack.size());
  const Matrix* input = &sequence;
  for (const LstmParams& layer : stack) {
    out.layers.push_back(lstm_forward(layer, *input));
    input = &out.layers.back().h_all;
  }
  return out;
}

void deep_lstm_backward(const std::vector<LstmParams>& stack, const DeepLstmSequence& fwd,
                        const Matrix& grad_h_top, std::vector<LstmGrads>& grads, Index window) {
  if (fwd.layers.size() != stack.size() || grads.size() != stack.size()) {
    throw DimensionError("deep_lstm_backward: stack/cache/grads sizes disagree");
  }
  Matrix dh = grad_h_top;
  for (size_t l = stack.size(); l-- > 0;) {
    Matrix dx;
    lstm_backward(stack[l], fwd.layers[l], dh, grads[l], l > 0 ? &dx : nullptr, window);
    if (l > 0) dh = std::move(dx);
  }
}

BiLstmParams make_bilstm(Index input, Index hidden, Index out, bool peephole) {
  BiLstmParams p;
  p.fwd = make_lstm(input, hidden, peephole);
  p.bwd = make_lstm(input, hidden, peephole);
  p.w_fwd = Matrix::Zero(out, hidden);
  p.w_bwd = Matrix::Zero(out, hidden);
  p.b = Vector::Zero(out);
  return p;
}

Matrix bilstm_forward(const BiLstmParams& params, const Matrix& sequence, BiLstmSequence* cache) {
  const Index t_len = sequence.rows();
  if (t_len < 1) {
    throw DimensionError("bilstm_forward: empty sequence");
  }
  BiLstmSequence local;
  BiLstmSequence& seq = cache ? *cache : local;
  seq.fwd = lstm_forward(params.fwd, sequence);
  seq.bwd = lstm_forward(params.bwd, sequence.colwise().reverse());

  const Index out_dim = params.b.size();
  seq.h_all.resize(t_len, out_dim);
  for (Index t = 0; t < t_len; ++t) {
    Vector h_f = seq.fwd.h_all.row(t).transpose();
    Vector h_b = seq.bwd.h_all.row(t_len - 1 - t).transpose();
    seq.h_all.row(t) = (params.w_fwd * h_f + params.w_bwd * h_b + params.b).transpose();
  }
  return seq.h_all;
}

BiLstmGrads BiLstmGrads::zeros_like(const BiLstmParams& p) {
  BiLstmGrads g;
  g.fwd = LstmGrads::zeros_like(p.fwd);
  g.bwd = LstmGrads::zeros_like(p.bwd);
  g.w_fwd = Matrix::Zero(p.w_fwd.rows(), p.w_fwd.cols());
  g.w_bwd = Matrix::Zero(p.w_bwd.rows(), p.w_bwd.cols());
  g.b = Vector::Zero(p.b.size());
  return g;
}

void bilstm_backward(const BiLstmParams& params, const BiLstmSequence& fwd,
                     const Matrix& grad_h_all, BiLstmGrads& grads, Matrix* grad_x) {
  const Index t_len = fwd.h_all.rows();
  if (grad_h_all.rows() != t_len || grad_h_all.cols() != params.b.size()) {
    throw DimensionError("bilstm_backward: gradient shape does not match the forward pass");
  }
  const Index hidden = params.fwd.hidden_size();
  Matrix dh_fwd(t_len, hidden);
  Matrix dh_bwd(t_len, hidden);
  for (Index t = 0; t < t_len; ++t) {
    Vector dh = grad_h_all.row(t).transpose();
    grads.w_fwd += dh * fwd.fwd.h_all.row(t);
    grads.w_bwd += dh * fwd.bwd.h_all.row(t_len - 1 - t);
    grads.b += dh;
    dh_fwd.row(t) = (params.w_fwd.transpose() * dh).transpose();
    dh_bwd.row(t_len - 1 - t) = (params.w_bwd.transpose() * dh).transpose();
  }
  Matrix dx_fwd, dx_bwd;
  lstm_backward(params.fwd, fwd.fwd, dh_fwd, grads.fwd, grad_x ? &dx_fwd : nullptr);
  lstm_backward(params.bwd, fwd.bwd, dh_bwd, grads.bwd, grad_x ? &dx_bwd : nullptr);
  if (grad_x) {
    *grad_x = dx_fwd + dx_bwd.colwise().reverse();
  }
}

}  // namespace mvcorr
