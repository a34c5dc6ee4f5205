#pragma once

#include <vector>

#include "mvcorr/linalg.hpp"

namespace mvcorr {

/// Peephole LSTM cell. The f/i/o gates read the concatenation
/// [c_{t-1}, h_{t-1}, x_t] (c-columns present only with peephole = true);
/// the candidate g_t reads [h_{t-1}, x_t] only.
struct LstmParams {
  Matrix w_f, w_i, w_g, w_o;
  Vector b_f, b_i, b_g, b_o;
  bool peephole = true;

  Index hidden_size() const { return w_g.rows(); }
  Index input_size() const { return w_g.cols() - hidden_size(); }
};

/// Zero-weight cell with consistent gate shapes.
LstmParams make_lstm(Index input, Index hidden, bool peephole = true);

struct LstmState {
  Vector c, h;
};

LstmState zero_state(const LstmParams& params);

/// One cell update:
///   f = sig(W_f u + b_f), i = sig(W_i u + b_i), g = tanh(W_g [h, x] + b_g),
///   c' = f.c + i.g, o = sig(W_o u + b_o), h' = o.tanh(c'),
/// with u = [c, h, x] (peephole) or [h, x].
LstmState lstm_step(const LstmParams& params, const LstmState& state, const Vector& x);

struct LstmStepCache {
  Vector c_prev, h_prev, x;
  Vector f, i, g, o, c, tanh_c;
};

struct LstmSequence {
  Matrix h_all;  // T x hidden, row t = h_t
  Vector h_final;
  std::vector<LstmStepCache> steps;
};

/// Runs the cell over a sequence (rows are time steps) from the zero state.
LstmSequence lstm_forward(const LstmParams& params, const Matrix& sequence);

struct LstmGrads {
  Matrix w_f, w_i, w_g, w_o;
  Vector b_f, b_i, b_g, b_o;

  static LstmGrads zeros_like(const LstmParams& params);
  LstmGrads& operator+=(const LstmGrads& other);
};

/// Backpropagation through time. `grad_h_all` carries d(loss)/d(h_t) per row.
/// `window` = 0 unrolls the full sequence; window = w truncates to the last w
/// steps, treating the state before them as constant. Accumulates into
/// `grads`; optionally reports d(loss)/d(x_t) rows in `grad_x`.
void lstm_backward(const LstmParams& params, const LstmSequence& fwd, const Matrix& grad_h_all,
                   LstmGrads& grads, Matrix* grad_x = nullptr, Index window = 0);

// --- deep (stacked) LSTM: layer l consumes the full h_t sequence of l-1 ---

struct DeepLstmSequence {
  std::vector<LstmSequence> layers;
};

DeepLstmSequence deep_lstm_forward(const std::vector<LstmParams>& stack, const Matrix& sequence);

/// BPTT through every layer of the stack, top gradient given per step.
void deep_lstm_backward(const std::vector<LstmParams>& stack, const DeepLstmSequence& fwd,
                        const Matrix& grad_h_top, std::vector<LstmGrads>& grads,
                        Index window = 0);

// --- bidirectional cell ---

struct BiLstmParams {
  LstmParams fwd, bwd;
  Matrix w_fwd, w_bwd;  // out x hidden combination weights
  Vector b;
};

BiLstmParams make_bilstm(Index input, Index hidden, Index out, bool peephole = true);

struct BiLstmSequence {
  LstmSequence fwd;      // over x_1..x_T
  LstmSequence bwd;      // over x_T..x_1 (row t of bwd.h_all pairs with x_{T-t+1})
  Matrix h_all;          // T x out, h_t = W_fwd h_t^f + W_bwd h_t^b + b
};

/// Per-step combined outputs h_t of the two directions.
Matrix bilstm_forward(const BiLstmParams& params, const Matrix& sequence,
                      BiLstmSequence* cache = nullptr);

struct BiLstmGrads {
  LstmGrads fwd, bwd;
  Matrix w_fwd, w_bwd;
  Vector b;

  static BiLstmGrads zeros_like(const BiLstmParams& params);
};

void bilstm_backward(const BiLstmParams& params, const BiLstmSequence& fwd,
                     const Matrix& grad_h_all, BiLstmGrads& grads, Matrix* grad_x = nullptr);

}  // namespace mvcorr
