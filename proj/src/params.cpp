#include "mvcorr/params.hpp"

namespace mvcorr {

void append_blocks(std::vector<ParamBlock>& out, MlpParams& p) {
  for (MlpLayer& layer : p.layers) {
    append_block(out, layer.w);
    append_block(out, layer.b);
  }
}

void append_blocks(std::vector<ParamBlock>& out, MlpGrads& g) {
  for (size_t i = 0; i < g.w.size(); ++i) {
    append_block(out, g.w[i]);
    append_block(out, g.b[i]);
  }
}

void append_blocks(std::vector<ParamBlock>& out, LstmParams& p) {
  append_block(out, p.w_f);
  append_block(out, p.w_i);
  append_block(out, p.w_g);
  append_block(out, p.w_o);
  append_block(out, p.b_f);
  append_block(out, p.b_i);
  append_block(out, p.b_g);
  append_block(out, p.b_o);
}

void append_blocks(std::vector<ParamBlock>& out, LstmGrads& g) {
  append_block(out, g.w_f);
  append_block(out, g.w_i);
  append_block(out, g.w_g);
  append_block(out, g.w_o);
  append_block(out, g.b_f);
  append_block(out, g.b_i);
  append_block(out, g.b_g);
  append_block(out, g.b_o);
}

void append_blocks(std::vector<ParamBlock>& out, std::vector<LstmParams>& stack) {
  for (LstmParams& layer : stack) append_blocks(out, layer);
}

void append_blocks(std::vector<ParamBlock>& out, std::vector<LstmGrads>& stack) {
  for (LstmGrads& layer : stack) append_blocks(out, layer);
}

void append_blocks(std::vector<ParamBlock>& out, BiLstmParams& p) {
  append_blocks(out, p.fwd);
  append_blocks(out, p.bwd);
  append_block(out, p.w_fwd);
  append_block(out, p.w_bwd);
  append_block(out, p.b);
}

void append_blocks(std::vector<ParamBlock>& out, BiLstmGrads& g) {
  append_blocks(out, g.fwd);
  append_blocks(out, g.bwd);
  append_block(out, g.w_fwd);
  append_block(out, g.w_bwd);
  append_block(out, g.b);
}

void append_blocks(std::vector<ParamBlock>& out, SplitAeModel& m) {
  append_blocks(out, m.enc_x);
  append_blocks(out, m.enc_y);
  append_blocks(out, m.dec_x);
  append_blocks(out, m.dec_y);
}

void append_blocks(std::vector<ParamBlock>& out, SplitAeGrads& g) {
  append_blocks(out, g.enc_x);
  append_blocks(out, g.enc_y);
  append_blocks(out, g.dec_x);
  append_blocks(out, g.dec_y);
}

Index total_size(const std::vector<ParamBlock>& blocks) {
  Index n = 0;
  for (const ParamBlock& b : blocks) n += b.size;
  return n;
}

}  // namespace mvcorr
