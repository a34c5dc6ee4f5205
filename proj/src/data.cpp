#include "mvcorr/data.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "mvcorr/io.hpp"

namespace mvcorr {

Index SequenceDataset::total_frames() const {
  Index n = 0;
  for (const Utterance& u : utterances) n += u.view1.rows();
  return n;
}

std::vector<int> SequenceDataset::speakers() const {
  std::set<int> ids;
  for (const Utterance& u : utterances) ids.insert(u.speaker);
  return {ids.begin(), ids.end()};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {

void validate_spec(const SynthSpec& spec) {
  if (spec.latent_dim < 1 || spec.d1 < 1 || spec.d2 < 1) {
    throw ConfigError("synth spec: dimensions must be positive");
  }
  if (spec.ar_coeff < 0 || spec.ar_coeff >= 1) {
    throw ConfigError("synth spec: ar_coeff must be in [0, 1)");
  }
  if (spec.noise_std1 < 0 || spec.noise_std2 < 0) {
    throw ConfigError("synth spec: noise_std must be nonnegative");
  }
  if (spec.n_classes < 1) {
    throw ConfigError("synth spec: n_classes must be >= 1");
  }
  if (spec.utterance_count < 1 || spec.n_speakers < 1) {
    throw ConfigError("synth spec: utterance_count and n_speakers must be >= 1");
  }
  if (spec.length_min < 1 || spec.length_max < spec.length_min) {
    throw ConfigError("synth spec: length range invalid");
  }
  if (spec.silence_prob < 0 || spec.silence_prob > 1) {
    throw ConfigError("synth spec: silence_prob must be in [0, 1]");
  }
}

// Round through f32 so the on-disk representation is lossless.
void round_to_storage(Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = static_cast<double>(static_cast<float>(m(i, j)));
    }
  }
}

}  // namespace

SequenceDataset generate_synthetic(const SynthSpec& spec) {
  validate_spec(spec);

  // Global structure (class means, mixing maps) from the master seed.
  std::mt19937_64 master(mix_seed(spec.seed, 0));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix class_means(spec.latent_dim, spec.n_classes);
  for (Index j = 0; j < spec.n_classes; ++j) {
    for (Index i = 0; i < spec.latent_dim; ++i) {
      class_means(i, j) = spec.class_sep * gauss(master);
    }
  }
  Matrix mix1 = random_orthonormal(spec.d1, spec.latent_dim, master);
  Matrix mix2 = random_orthonormal(spec.d2, spec.latent_dim, master);

  SequenceDataset dataset;
  dataset.utterances.resize(spec.utterance_count);
  for (Index u = 0; u < spec.utterance_count; ++u) {
    std::mt19937_64 rng(mix_seed(spec.seed, static_cast<std::uint64_t>(u) + 1));
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<Index> length_dist(spec.length_min, spec.length_max);
    std::uniform_int_distribution<Index> seg_dist(4, 12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Utterance& utt = dataset.utterances[static_cast<size_t>(u)];
    utt.speaker = static_cast<int>(u % spec.n_speakers);
    const Index t_len = length_dist(rng);

    // Segment-wise class sequence; class 0 doubles as the rest class when
    // pauses are enabled.
    std::vector<int> classes(t_len);
    std::vector<bool> frozen(t_len, false);
    const bool pauses = spec.silence_prob > 0 && spec.n_classes > 1;
    std::uniform_int_distribution<int> class_dist(pauses ? 1 : 0,
                                                  static_cast<int>(spec.n_classes) - 1);
    Index t = 0;
    while (t < t_len) {
      const Index seg = std::min(seg_dist(rng), t_len - t);
      const bool silent = pauses && unit(rng) < spec.silence_prob;
      const int cls = silent ? 0 : class_dist(rng);
      for (Index s = 0; s < seg; ++s, ++t) {
        classes[t] = cls;
        frozen[t] = silent;
      }
    }

    // Latent: stationary unit-variance residual around the class mean. The
    // residual keeps evolving under pauses so speech resumes continuously.
    Vector residual(spec.latent_dim);
    for (Index i = 0; i < spec.latent_dim; ++i) residual[i] = noise(rng);
    const double rho = spec.temporal == Temporal::smoothed ? spec.ar_coeff : 0.0;
    const double innov = std::sqrt(1.0 - rho * rho);

    Matrix latent(t_len, spec.latent_dim);
    utt.labels.resize(t_len);
    for (Index step = 0; step < t_len; ++step) {
      if (step > 0) {
        for (Index i = 0; i < spec.latent_dim; ++i) {
          residual[i] = rho * residual[i] + innov * noise(rng);
        }
      }
      utt.labels[step] = classes[step];
      Vector z = class_means.col(classes[step]);
      if (!frozen[step]) z += residual;
      latent.row(step) = z.transpose();
    }

    Matrix clean1 = latent * mix1.transpose();  // T x d1
    Matrix clean2 = latent * mix2.transpose();
    if (spec.mixing == Mixing::nonlinear) {
      clean1 = clean1.array().tanh();
      clean2 = clean2.array().tanh();
    }
    utt.view1 = clean1;
    utt.view2 = clean2;
    for (Index step = 0; step < t_len; ++step) {
      for (Index i = 0; i < spec.d1; ++i) utt.view1(step, i) += spec.noise_std1 * noise(rng);
      for (Index i = 0; i < spec.d2; ++i) utt.view2(step, i) += spec.noise_std2 * noise(rng);
    }
    round_to_storage(utt.view1);
    round_to_storage(utt.view2);
  }
  return dataset;
}

Matrix stack_frames(const Matrix& view, Index context) {
  if (context < 0) {
    throw DimensionError("stack_frames: context must be nonnegative");
  }
  if (context == 0) return view;
  const Index t_len = view.rows();
  const Index d = view.cols();
  Matrix out = Matrix::Zero(t_len, d * (2 * context + 1));
  for (Index t = 0; t < t_len; ++t) {
    for (Index off = -context; off <= context; ++off) {
      const Index src = t + off;
      if (src < 0 || src >= t_len) continue;  // zero padding at the edges
      out.block(t, (off + context) * d, 1, d) = view.row(src);
    }
  }
  return out;
}

std::pair<SequenceDataset, SequenceDataset> split_speakers(const SequenceDataset& dataset,
                                                           const std::vector<int>& train_ids,
                                                           const std::vector<int>& heldout_ids) {
  const std::vector<int> known = dataset.speakers();
  const std::set<int> known_set(known.begin(), known.end());
  std::set<int> train_set(train_ids.begin(), train_ids.end());
  std::set<int> heldout_set(heldout_ids.begin(), heldout_ids.end());
  for (int id : train_set) {
    if (heldout_set.count(id)) {
      throw ConfigError("split_speakers: speaker " + std::to_string(id) + " in both sets");
    }
  }
  for (int id : train_ids) {
    if (!known_set.count(id)) {
      throw ConfigError("split_speakers: unknown train speaker " + std::to_string(id));
    }
  }
  for (int id : heldout_ids) {
    if (!known_set.count(id)) {
      throw ConfigError("split_speakers: unknown held-out speaker " + std::to_string(id));
    }
  }
  for (int id : known) {
    if (!train_set.count(id) && !heldout_set.count(id)) {
      throw ConfigError("split_speakers: speaker " + std::to_string(id) +
                        " assigned to neither set");
    }
  }
  std::pair<SequenceDataset, SequenceDataset> out;
  for (const Utterance& u : dataset.utterances) {
    (train_set.count(u.speaker) ? out.first : out.second).utterances.push_back(u);
  }
  return out;
}

namespace {
constexpr char kMagic[6] = {'M', 'V', 'S', 'E', 'Q', '1'};
}

void save_dataset(const SequenceDataset& dataset, std::ostream& out) {
  BinaryWriter w(out);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(1);  // version
  w.u32(static_cast<std::uint32_t>(dataset.utterances.size()));
  w.u32(static_cast<std::uint32_t>(dataset.d1()));
  w.u32(static_cast<std::uint32_t>(dataset.d2()));
  w.u8(dataset.has_labels() ? 1 : 0);
  for (const Utterance& u : dataset.utterances) {
    w.i32(u.speaker);
    w.u32(static_cast<std::uint32_t>(u.view1.rows()));
    w.u32(static_cast<std::uint32_t>(u.view2.rows()));
    w.matrix_rows_f32(u.view1);
    w.matrix_rows_f32(u.view2);
    if (dataset.has_labels()) {
      for (int label : u.labels) w.i32(label);
    }
  }
}

void save_dataset(const SequenceDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  save_dataset(dataset, out);
  if (!out) throw IoError("write failed for " + path);
}

SequenceDataset load_dataset(std::istream& in) {
  BinaryReader r(in);
  char magic[6];
  r.bytes(magic, sizeof(magic));
  if (!std::equal(magic, magic + 6, kMagic)) {
    throw IoError("malformed header: bad magic, not an MVSEQ1 file");
  }
  const std::uint32_t version = r.u32();
  if (version != 1) {
    throw IoError("malformed header: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  const auto d1 = static_cast<Index>(r.u32());
  const auto d2 = static_cast<Index>(r.u32());
  if (d1 < 1 || d2 < 1) {
    throw IoError("malformed header: nonpositive view dimensions");
  }
  const bool has_labels = r.u8() != 0;

  SequenceDataset dataset;
  dataset.utterances.resize(count);
  for (std::uint32_t u = 0; u < count; ++u) {
    Utterance& utt = dataset.utterances[u];
    utt.speaker = r.i32();
    const auto t1 = static_cast<Index>(r.u32());
    const auto t2 = static_cast<Index>(r.u32());
    if (t1 != t2) {
      throw IoError("alignment error: utterance " + std::to_string(u) + " has view lengths " +
                    std::to_string(t1) + " vs " + std::to_string(t2));
    }
    if (t1 < 1) {
      throw IoError("malformed utterance: empty");
    }
    utt.view1 = r.matrix_rows_f32(t1, d1);
    utt.view2 = r.matrix_rows_f32(t2, d2);
    if (has_labels) {
      utt.labels.resize(static_cast<size_t>(t1));
      for (Index t = 0; t < t1; ++t) utt.labels[static_cast<size_t>(t)] = r.i32();
    }
  }
  return dataset;
}

SequenceDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return load_dataset(in);
}

void export_csv(const SequenceDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << std::setprecision(9);
  for (const Utterance& u : dataset.utterances) {
    for (Index t = 0; t < u.view1.rows(); ++t) {
      for (Index i = 0; i < u.view1.cols(); ++i) {
        if (i) out << ',';
        out << u.view1(t, i);
      }
      for (Index i = 0; i < u.view2.cols(); ++i) out << ',' << u.view2(t, i);
      if (!u.labels.empty()) out << ',' << u.labels[static_cast<size_t>(t)];
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path);
}

FrameDataset to_frames(const SequenceDataset& dataset, Index context) {
  if (dataset.utterances.empty()) {
    throw DimensionError("to_frames: empty dataset");
  }
  const Index n = dataset.total_frames();
  const Index fd1 = dataset.d1() * (2 * context + 1);
  const Index fd2 = dataset.d2() * (2 * context + 1);
  FrameDataset frames;
  frames.x.resize(fd1, n);
  frames.y.resize(fd2, n);
  if (dataset.has_labels()) frames.labels.reserve(static_cast<size_t>(n));
  Index col = 0;
  for (const Utterance& u : dataset.utterances) {
    Matrix s1 = stack_frames(u.view1, context);
    Matrix s2 = stack_frames(u.view2, context);
    frames.x.middleCols(col, s1.rows()) = s1.transpose();
    frames.y.middleCols(col, s2.rows()) = s2.transpose();
    col += s1.rows();
    for (int label : u.labels) frames.labels.push_back(label);
  }
  return frames;
}

}  // namespace mvcorr
