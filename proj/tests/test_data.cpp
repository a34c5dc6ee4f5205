#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mvcorr/cca.hpp"
#include "mvcorr/data.hpp"
#include "test_util.hpp"

using namespace mvcorr;
using namespace mvcorr::testutil;

namespace {

std::string save_to_string(const SequenceDataset& d) {
  std::ostringstream out(std::ios::binary);
  save_dataset(d, out);
  return out.str();
}

bool datasets_equal(const SequenceDataset& a, const SequenceDataset& b) {
  if (a.utterances.size() != b.utterances.size()) return false;
  for (size_t i = 0; i < a.utterances.size(); ++i) {
    const Utterance& ua = a.utterances[i];
    const Utterance& ub = b.utterances[i];
    if (ua.speaker != ub.speaker || ua.labels != ub.labels) return false;
    if (ua.view1 != ub.view1 || ua.view2 != ub.view2) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("noiseless square linear mixing gives canonical correlations ~1") {
  SynthSpec spec;
  spec.latent_dim = 3;
  spec.d1 = 3;
  spec.d2 = 3;
  spec.noise_std1 = 0;
  spec.noise_std2 = 0;
  spec.n_classes = 2;
  spec.utterance_count = 10;
  spec.length_min = spec.length_max = 60;
  spec.seed = 5;
  SequenceDataset data = generate_synthetic(spec);
  FrameDataset frames = to_frames(data, 0);
  CcaModel model = fit_cca(frames.x, frames.y, 3, 1e-8, 1e-8);
  for (Index i = 0; i < 3; ++i) {
    CHECK(model.corrs[i] == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("1-D generator hits the closed-form canonical correlation 0.5") {
  SynthSpec spec;
  spec.latent_dim = 1;
  spec.d1 = 1;
  spec.d2 = 1;
  spec.noise_std1 = 1.0;
  spec.noise_std2 = 1.0;
  spec.temporal = Temporal::iid;
  spec.n_classes = 1;
  spec.class_sep = 0;
  spec.utterance_count = 500;
  spec.length_min = spec.length_max = 200;  // 100k frames
  spec.seed = 7;
  SequenceDataset data = generate_synthetic(spec);
  REQUIRE(data.total_frames() == 100000);
  FrameDataset frames = to_frames(data, 0);
  CcaModel model = fit_cca(frames.x, frames.y, 1, 1e-8, 1e-8);
  CHECK(std::abs(model.corrs[0] - 0.5) < 0.02);
}

TEST_CASE("generator is deterministic in its seed") {
  SynthSpec spec;
  spec.utterance_count = 4;
  spec.length_min = 10;
  spec.length_max = 20;
  spec.seed = 99;
  SequenceDataset a = generate_synthetic(spec);
  SequenceDataset b = generate_synthetic(spec);
  CHECK(datasets_equal(a, b));
  spec.seed = 100;
  CHECK(!datasets_equal(a, generate_synthetic(spec)));
}

TEST_CASE("view noises are conditionally independent given the latent") {
  SynthSpec spec;
  spec.latent_dim = 2;
  spec.d1 = 3;
  spec.d2 = 3;
  spec.noise_std1 = 1.0;
  spec.noise_std2 = 1.0;
  spec.n_classes = 1;
  spec.class_sep = 0;
  spec.utterance_count = 250;
  spec.length_min = spec.length_max = 200;  // 50k frames
  spec.temporal = Temporal::iid;
  spec.seed = 13;
  SequenceDataset data = generate_synthetic(spec);

  // Rebuild the mixing maps the generator used (same derivation) to strip the
  // shared part, then check the residual cross-correlation.
  std::mt19937_64 master(mix_seed(spec.seed, 0));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix class_means(spec.latent_dim, 1);
  for (Index i = 0; i < spec.latent_dim; ++i) class_means(i, 0) = 0.0 * gauss(master);
  Matrix mix1 = random_orthonormal(spec.d1, spec.latent_dim, master);
  Matrix mix2 = random_orthonormal(spec.d2, spec.latent_dim, master);

  FrameDataset frames = to_frames(data, 0);
  // Latent per frame is unknown here, but projecting out the mixed subspace
  // leaves pure noise: residual1 = (I - P1) v1 depends only on noise1.
  Matrix p1 = Matrix::Identity(3, 3) - mix1 * mix1.transpose();
  Matrix p2 = Matrix::Identity(3, 3) - mix2 * mix2.transpose();
  Matrix r1 = p1 * frames.x;
  Matrix r2 = p2 * frames.y;
  Matrix r1c = center_columns(r1).centered;
  Matrix r2c = center_columns(r2).centered;
  Matrix cross = r1c * r2c.transpose() / (r1c.cols() - 1.0);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      const double denom = std::sqrt((r1c.row(i).squaredNorm() / (r1c.cols() - 1.0)) *
                                     (r2c.row(j).squaredNorm() / (r2c.cols() - 1.0)));
      if (denom > 1e-12) {
        CHECK(std::abs(cross(i, j)) / denom < 0.05);
      }
    }
  }
}

TEST_CASE("silence segments freeze the latent at the rest class") {
  SynthSpec spec;
  spec.latent_dim = 2;
  spec.d1 = 2;
  spec.d2 = 2;
  spec.noise_std1 = 0;
  spec.noise_std2 = 0;
  spec.silence_prob = 0.5;
  spec.n_classes = 3;
  spec.utterance_count = 6;
  spec.length_min = spec.length_max = 50;
  spec.seed = 21;
  SequenceDataset data = generate_synthetic(spec);
  bool saw_silence = false;
  for (const Utterance& u : data.utterances) {
    for (Index t = 0; t + 1 < u.view1.rows(); ++t) {
      if (u.labels[static_cast<size_t>(t)] == 0 && u.labels[static_cast<size_t>(t + 1)] == 0) {
        // Frozen latent + zero noise: consecutive silent frames identical.
        CHECK(max_abs(u.view1.row(t) - u.view1.row(t + 1)) == 0.0);
        saw_silence = true;
      }
    }
  }
  CHECK(saw_silence);
}

TEST_CASE("stack_frames") {
  std::mt19937_64 rng(17);
  SUBCASE("context 0 is identity") {
    Matrix v = random_matrix(5, 3, rng);
    CHECK(max_abs(stack_frames(v, 0) - v) == 0.0);
  }
  SUBCASE("dimensions match the 39->273 and 16->112 cases") {
    CHECK(stack_frames(Matrix::Zero(10, 39), 3).cols() == 273);
    CHECK(stack_frames(Matrix::Zero(10, 16), 3).cols() == 112);
    CHECK(stack_frames(Matrix::Zero(10, 39), 3).rows() == 10);
  }
  SUBCASE("single frame pads with zeros around the center") {
    Matrix v(1, 2);
    v << 3, 4;
    Matrix s = stack_frames(v, 1);
    REQUIRE(s.cols() == 6);
    CHECK(s(0, 0) == 0.0);
    CHECK(s(0, 1) == 0.0);
    CHECK(s(0, 2) == 3.0);
    CHECK(s(0, 3) == 4.0);
    CHECK(s(0, 4) == 0.0);
    CHECK(s(0, 5) == 0.0);
  }
  SUBCASE("interior rows concatenate the context window") {
    Matrix v(4, 1);
    v << 1, 2, 3, 4;
    Matrix s = stack_frames(v, 1);
    CHECK(s(1, 0) == 1.0);
    CHECK(s(1, 1) == 2.0);
    CHECK(s(1, 2) == 3.0);
    CHECK(s(2, 0) == 2.0);
  }
}

TEST_CASE("split_speakers") {
  SynthSpec spec;
  spec.utterance_count = 32;
  spec.n_speakers = 16;
  spec.length_min = 5;
  spec.length_max = 10;
  spec.seed = 3;
  SequenceDataset data = generate_synthetic(spec);

  SUBCASE("4 train / 12 downstream partition") {
    std::vector<int> train{0, 1, 2, 3};
    std::vector<int> heldout;
    for (int s = 4; s < 16; ++s) heldout.push_back(s);
    auto [train_set, downstream] = split_speakers(data, train, heldout);
    CHECK(train_set.speakers().size() == 4);
    CHECK(downstream.speakers().size() == 12);
    CHECK(train_set.utterances.size() + downstream.utterances.size() ==
          data.utterances.size());
  }
  SUBCASE("all speakers to train leaves downstream empty") {
    std::vector<int> all;
    for (int s = 0; s < 16; ++s) all.push_back(s);
    auto [train_set, downstream] = split_speakers(data, all, {});
    CHECK(downstream.utterances.empty());
    CHECK(train_set.utterances.size() == data.utterances.size());
  }
  SUBCASE("overlap and unknown ids are rejected") {
    CHECK_THROWS_AS(split_speakers(data, {0, 1}, {1, 2}), ConfigError);
    CHECK_THROWS_AS(split_speakers(data, {0, 99}, {1}), ConfigError);
    CHECK_THROWS_AS(split_speakers(data, {0}, {1}), ConfigError);  // uncovered speakers
  }
}

TEST_CASE("dataset save/load round trip is bit-exact") {
  SynthSpec spec;
  spec.utterance_count = 5;
  spec.length_min = 8;
  spec.length_max = 15;
  spec.seed = 31;
  SequenceDataset data = generate_synthetic(spec);

  std::string bytes = save_to_string(data);
  std::istringstream in(bytes, std::ios::binary);
  SequenceDataset loaded = load_dataset(in);
  CHECK(datasets_equal(data, loaded));
  // Re-serialization is byte-identical.
  CHECK(save_to_string(loaded) == bytes);
}

TEST_CASE("dataset loader reports distinct failure modes") {
  SynthSpec spec;
  spec.utterance_count = 2;
  spec.length_min = spec.length_max = 4;
  spec.seed = 33;
  std::string bytes = save_to_string(generate_synthetic(spec));

  SUBCASE("corrupted magic") {
    std::string bad = bytes;
    bad[0] = 'X';
    std::istringstream in(bad, std::ios::binary);
    CHECK_THROWS_WITH_AS(load_dataset(in), doctest::Contains("malformed header"), IoError);
  }
  SUBCASE("view length mismatch") {
    std::string bad = bytes;
    // Descriptor: magic(6) + version(4) + count(4) + d1(4) + d2(4) + labels(1)
    // = 23 bytes, then speaker(4) and the two u32 lengths.
    const size_t t2_offset = 23 + 4 + 4;
    bad[t2_offset] = static_cast<char>(bad[t2_offset] + 1);
    std::istringstream in(bad, std::ios::binary);
    CHECK_THROWS_WITH_AS(load_dataset(in), doctest::Contains("alignment"), IoError);
  }
  SUBCASE("truncated payload") {
    std::string bad = bytes.substr(0, bytes.size() - 7);
    std::istringstream in(bad, std::ios::binary);
    CHECK_THROWS_WITH_AS(load_dataset(in), doctest::Contains("truncated"), IoError);
  }
}

TEST_CASE("csv export writes one labelled line per frame") {
  SynthSpec spec;
  spec.utterance_count = 2;
  spec.d1 = 2;
  spec.d2 = 1;
  spec.length_min = spec.length_max = 3;
  spec.seed = 41;
  SequenceDataset data = generate_synthetic(spec);
  const std::string path = "test_export.csv";
  export_csv(data, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);  // 2 + 1 values + label
  }
  CHECK(lines == 6);
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("to_frames concatenates utterances and keeps labels aligned") {
  SynthSpec spec;
  spec.utterance_count = 3;
  spec.d1 = 4;
  spec.d2 = 2;
  spec.length_min = 5;
  spec.length_max = 9;
  spec.seed = 43;
  SequenceDataset data = generate_synthetic(spec);
  FrameDataset frames = to_frames(data, 1);
  CHECK(frames.x.rows() == 12);
  CHECK(frames.y.rows() == 6);
  CHECK(frames.x.cols() == data.total_frames());
  CHECK(static_cast<Index>(frames.labels.size()) == data.total_frames());
  // First utterance's center frame shows up in the stacked column.
  CHECK(frames.x(4, 0) == data.utterances[0].view1(0, 0));
}
