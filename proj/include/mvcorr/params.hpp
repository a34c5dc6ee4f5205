#pragma once

#include <vector>

#include "mvcorr/lstm.hpp"
#include "mvcorr/mlp.hpp"
#include "mvcorr/splitae.hpp"

namespace mvcorr {

/// Flat mutable view of one parameter (or gradient) tensor. Optimizers,
/// gradient clipping, and the finite-difference checker all operate on lists
/// of these, so models and their gradient structures stay strongly typed.
struct ParamBlock {
  double* data = nullptr;
  Index size = 0;
};

inline void append_block(std::vector<ParamBlock>& out, Matrix& m) {
  out.push_back({m.data(), m.size()});
}
inline void append_block(std::vector<ParamBlock>& out, Vector& v) {
  out.push_back({v.data(), v.size()});
}

void append_blocks(std::vector<ParamBlock>& out, MlpParams& p);
void append_blocks(std::vector<ParamBlock>& out, MlpGrads& g);
void append_blocks(std::vector<ParamBlock>& out, LstmParams& p);
void append_blocks(std::vector<ParamBlock>& out, LstmGrads& g);
void append_blocks(std::vector<ParamBlock>& out, std::vector<LstmParams>& stack);
void append_blocks(std::vector<ParamBlock>& out, std::vector<LstmGrads>& stack);
void append_blocks(std::vector<ParamBlock>& out, BiLstmParams& p);
void append_blocks(std::vector<ParamBlock>& out, BiLstmGrads& g);
void append_blocks(std::vector<ParamBlock>& out, SplitAeModel& m);
void append_blocks(std::vector<ParamBlock>& out, SplitAeGrads& g);

template <typename T>
std::vector<ParamBlock> param_blocks(T& model) {
  std::vector<ParamBlock> out;
  append_blocks(out, model);
  return out;
}

/// Total entry count across blocks.
Index total_size(const std::vector<ParamBlock>& blocks);

}  // namespace mvcorr
