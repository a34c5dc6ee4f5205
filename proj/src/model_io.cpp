#include "mvcorr/model_io.hpp"

#include <algorithm>
#include <fstream>

#include "mvcorr/io.hpp"

namespace mvcorr {

namespace {

constexpr char kMagic[6] = {'M', 'V', 'M', 'D', 'L', '1'};

enum ModelTag : std::uint32_t {
  kBaseline = 0,
  kCca = 1,
  kKcca = 2,
  kSplitAe = 3,
  kDcca = 4,
  kDcclstm = 5,
};

void write_kernel(BinaryWriter& w, const KernelSpec& spec) {
  w.u32(static_cast<std::uint32_t>(spec.kind));
  w.i32(spec.degree);
  w.f64(spec.offset);
  w.f64(spec.bandwidth);
}

KernelSpec read_kernel(BinaryReader& r) {
  KernelSpec spec;
  const std::uint32_t kind = r.u32();
  if (kind > 2) throw IoError("model file: unknown kernel kind");
  spec.kind = static_cast<KernelSpec::Kind>(kind);
  spec.degree = r.i32();
  spec.offset = r.f64();
  spec.bandwidth = r.f64();
  return spec;
}

void write_mlp(BinaryWriter& w, const MlpParams& p) {
  w.u32(static_cast<std::uint32_t>(p.layers.size()));
  for (const MlpLayer& layer : p.layers) {
    w.u32(static_cast<std::uint32_t>(layer.act));
    w.matrix_f64(layer.w);
    w.vector_f64(layer.b);
  }
}

MlpParams read_mlp(BinaryReader& r) {
  MlpParams p;
  const std::uint32_t n = r.u32();
  p.layers.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t act = r.u32();
    if (act > 2) throw IoError("model file: unknown activation");
    p.layers[i].act = static_cast<Activation>(act);
    p.layers[i].w = r.matrix_f64();
    p.layers[i].b = r.vector_f64();
  }
  return p;
}

void write_lstm(BinaryWriter& w, const LstmParams& p) {
  w.u8(p.peephole ? 1 : 0);
  w.matrix_f64(p.w_f);
  w.matrix_f64(p.w_i);
  w.matrix_f64(p.w_g);
  w.matrix_f64(p.w_o);
  w.vector_f64(p.b_f);
  w.vector_f64(p.b_i);
  w.vector_f64(p.b_g);
  w.vector_f64(p.b_o);
}

LstmParams read_lstm(BinaryReader& r) {
  LstmParams p;
  p.peephole = r.u8() != 0;
  p.w_f = r.matrix_f64();
  p.w_i = r.matrix_f64();
  p.w_g = r.matrix_f64();
  p.w_o = r.matrix_f64();
  p.b_f = r.vector_f64();
  p.b_i = r.vector_f64();
  p.b_g = r.vector_f64();
  p.b_o = r.vector_f64();
  return p;
}

void write_stack(BinaryWriter& w, const std::vector<LstmParams>& stack) {
  w.u32(static_cast<std::uint32_t>(stack.size()));
  for (const LstmParams& layer : stack) write_lstm(w, layer);
}

std::vector<LstmParams> read_stack(BinaryReader& r) {
  std::vector<LstmParams> stack(r.u32());
  for (LstmParams& layer : stack) layer = read_lstm(r);
  return stack;
}

struct ModelWriter {
  BinaryWriter& w;

  void operator()(const BaselineModel&) { w.u32(kBaseline); }

  void operator()(const CcaModel& m) {
    w.u32(kCca);
    w.matrix_f64(m.u);
    w.matrix_f64(m.v);
    w.vector_f64(m.mean_x);
    w.vector_f64(m.mean_y);
    w.vector_f64(m.corrs);
    w.f64(m.r_x);
    w.f64(m.r_y);
    w.u64(static_cast<std::uint64_t>(m.k));
  }

  void operator()(const KccaModel& m) {
    w.u32(kKcca);
    w.matrix_f64(m.alpha);
    w.matrix_f64(m.beta);
    w.matrix_f64(m.x_train);
    w.matrix_f64(m.y_train);
    write_kernel(w, m.kernel_x);
    write_kernel(w, m.kernel_y);
    w.vector_f64(m.stats_x.train_mean);
    w.f64(m.stats_x.grand_mean);
    w.vector_f64(m.stats_y.train_mean);
    w.f64(m.stats_y.grand_mean);
    w.f64(m.r_x);
    w.f64(m.r_y);
    w.vector_f64(m.corrs);
    w.u64(static_cast<std::uint64_t>(m.k));
  }

  void operator()(const SplitAeModel& m) {
    w.u32(kSplitAe);
    w.u8(m.arch == SplitAeArch::shared_encoder_pair ? 1 : 0);
    write_mlp(w, m.enc_x);
    write_mlp(w, m.enc_y);
    write_mlp(w, m.dec_x);
    write_mlp(w, m.dec_y);
  }

  void operator()(const DccaModel& m) {
    w.u32(kDcca);
    write_mlp(w, m.net1);
    write_mlp(w, m.net2);
  }

  void operator()(const DcclstmModel& m) {
    w.u32(kDcclstm);
    write_stack(w, m.stack1);
    write_stack(w, m.stack2);
  }
};

AnyModel read_any_model(BinaryReader& r) {
  const std::uint32_t tag = r.u32();
  switch (tag) {
    case kBaseline:
      return BaselineModel{};
    case kCca: {
      CcaModel m;
      m.u = r.matrix_f64();
      m.v = r.matrix_f64();
      m.mean_x = r.vector_f64();
      m.mean_y = r.vector_f64();
      m.corrs = r.vector_f64();
      m.r_x = r.f64();
      m.r_y = r.f64();
      m.k = static_cast<Index>(r.u64());
      return m;
    }
    case kKcca: {
      KccaModel m;
      m.alpha = r.matrix_f64();
      m.beta = r.matrix_f64();
      m.x_train = r.matrix_f64();
      m.y_train = r.matrix_f64();
      m.kernel_x = read_kernel(r);
      m.kernel_y = read_kernel(r);
      m.stats_x.train_mean = r.vector_f64();
      m.stats_x.grand_mean = r.f64();
      m.stats_y.train_mean = r.vector_f64();
      m.stats_y.grand_mean = r.f64();
      m.r_x = r.f64();
      m.r_y = r.f64();
      m.corrs = r.vector_f64();
      m.k = static_cast<Index>(r.u64());
      return m;
    }
    case kSplitAe: {
      SplitAeModel m;
      m.arch = r.u8() != 0 ? SplitAeArch::shared_encoder_pair : SplitAeArch::single_view_encoder;
      m.enc_x = read_mlp(r);
      m.enc_y = read_mlp(r);
      m.dec_x = read_mlp(r);
      m.dec_y = read_mlp(r);
      return m;
    }
    case kDcca: {
      DccaModel m;
      m.net1 = read_mlp(r);
      m.net2 = read_mlp(r);
      return m;
    }
    case kDcclstm: {
      DcclstmModel m;
      m.stack1 = read_stack(r);
      m.stack2 = read_stack(r);
      return m;
    }
    default:
      throw IoError("model file: unknown model tag " + std::to_string(tag));
  }
}

}  // namespace

void save_model(const ModelFile& file, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  BinaryWriter w(out);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(file.version);
  w.str(file.method);
  w.str(file.config_echo);
  w.u64(file.data_fingerprint);
  std::visit(ModelWriter{w}, file.model);
  if (!out) throw IoError("write failed for " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  BinaryReader r(in);
  char magic[6];
  r.bytes(magic, sizeof(magic));
  if (!std::equal(magic, magic + 6, kMagic)) {
    throw IoError("malformed header: not an MVMDL1 model file");
  }
  ModelFile file;
  file.version = r.u32();
  if (file.version != 1) {
    throw IoError("model file: unsupported version " + std::to_string(file.version));
  }
  file.method = r.str();
  file.config_echo = r.str();
  file.data_fingerprint = r.u64();
  file.model = read_any_model(r);
  return file;
}

}  // namespace mvcorr
