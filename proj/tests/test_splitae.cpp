#include <doctest.h>

#include "mvcorr/gradcheck.hpp"
#include "mvcorr/splitae.hpp"
#include "mvcorr/train.hpp"
#include "test_util.hpp"

using namespace mvcorr;
using namespace mvcorr::testutil;

namespace {

MlpParams identity_mlp(Index dim) {
  MlpParams net = make_mlp({dim, dim}, Activation::identity, Activation::identity);
  net.layers[0].w = Matrix::Identity(dim, dim);
  return net;
}

}  // namespace

TEST_CASE("identity-initialized single-view autoencoder has zero loss on x = y") {
  SplitAeModel model;
  model.arch = SplitAeArch::single_view_encoder;
  model.enc_x = identity_mlp(3);
  model.dec_x = identity_mlp(3);
  model.dec_y = identity_mlp(3);

  std::mt19937_64 rng(3);
  Matrix x = random_matrix(3, 10, rng);
  SplitAeEval eval = splitae_loss(model, x, x);
  CHECK(eval.loss <= 1e-24);
}

TEST_CASE("identity-mixing shared-encoder pair reconstructs identical views") {
  SplitAeModel model;
  model.arch = SplitAeArch::shared_encoder_pair;
  model.enc_x = identity_mlp(3);
  model.enc_x.layers[0].w *= 0.5;  // the shared layer sums both halves
  model.enc_y = identity_mlp(3);
  model.enc_y.layers[0].w *= 0.5;
  model.dec_x = identity_mlp(3);
  model.dec_y = identity_mlp(3);

  std::mt19937_64 rng(5);
  Matrix x = random_matrix(3, 8, rng);
  SplitAeEval eval = splitae_loss(model, x, x);
  CHECK(eval.loss <= 1e-24);
}

TEST_CASE("zero networks reduce to the data energy") {
  // Linear output decoders with zero weights reconstruct 0, so the loss is
  // (1/2) sum (||x||^2 + ||y||^2).
  SplitAeModel model = make_splitae(SplitAeArch::single_view_encoder, 3, 2, {4}, 2,
                                    Activation::sigmoid);
  std::mt19937_64 rng(7);
  Matrix x = random_matrix(3, 9, rng);
  Matrix y = random_matrix(2, 9, rng);
  SplitAeEval eval = splitae_loss(model, x, y);
  CHECK(eval.loss == doctest::Approx(0.5 * (x.squaredNorm() + y.squaredNorm())).epsilon(1e-12));
}

TEST_CASE("splitae gradients match finite differences") {
  for (SplitAeArch arch :
       {SplitAeArch::shared_encoder_pair, SplitAeArch::single_view_encoder}) {
    CAPTURE(static_cast<int>(arch));
    SplitAeModel model = make_splitae(arch, 4, 3, {5}, 3, Activation::sigmoid);
    std::mt19937_64 rng(11);
    init_params(model, InitScheme::uniform, rng);
    Matrix x = random_matrix(4, 6, rng);
    Matrix y = random_matrix(3, 6, rng);

    SplitAeEval eval = splitae_loss(model, x, y);
    auto value = [&]() { return splitae_loss(model, x, y).loss; };
    GradCheckReport report =
        finite_diff_check(param_blocks(model), value, param_blocks(eval.grads));
    CHECK(report.max_rel_err < 1e-5);
  }
}

TEST_CASE("splitae_encode drops the missing view at test time") {
  SplitAeModel model = make_splitae(SplitAeArch::shared_encoder_pair, 3, 2, {4}, 2,
                                    Activation::tanh);
  std::mt19937_64 rng(13);
  init_params(model, InitScheme::uniform, rng);
  Matrix x = random_matrix(3, 5, rng);
  Matrix y = random_matrix(2, 5, rng);

  Matrix with_both = splitae_encode(model, x, &y);
  Matrix x_only = splitae_encode(model, x);
  CHECK(with_both.rows() == 2);
  CHECK(x_only.rows() == 2);
  CHECK(max_abs(with_both - x_only) > 0.0);  // the y pathway contributes when given

  SplitAeModel single = make_splitae(SplitAeArch::single_view_encoder, 3, 2, {4}, 2,
                                     Activation::tanh);
  init_params(single, InitScheme::uniform, rng);
  CHECK(splitae_encode(single, x).rows() == 2);
}

TEST_CASE("splitae rejects mismatched views") {
  SplitAeModel model = make_splitae(SplitAeArch::single_view_encoder, 3, 2, {4}, 2,
                                    Activation::sigmoid);
  CHECK_THROWS_AS(splitae_loss(model, Matrix::Zero(3, 4), Matrix::Zero(2, 5)), DimensionError);
  CHECK_THROWS_AS(splitae_loss(model, Matrix::Zero(2, 4), Matrix::Zero(2, 4)), DimensionError);
}
