#include <doctest.h>

#include "mvcorr/gradcheck.hpp"
#include "mvcorr/mlp.hpp"
#include "mvcorr/train.hpp"
#include "test_util.hpp"

using namespace mvcorr;
using namespace mvcorr::testutil;

TEST_CASE("zero sigmoid network outputs 0.5 everywhere") {
  MlpParams net = make_mlp({3, 4, 2}, Activation::sigmoid, Activation::sigmoid);
  std::mt19937_64 rng(3);
  Matrix out = mlp_forward(net, random_matrix(3, 7, rng));
  CHECK(out.rows() == 2);
  CHECK(out.cols() == 7);
  CHECK((out.array() == 0.5).all());
}

TEST_CASE("single identity layer is the affine map") {
  MlpParams net = make_mlp({2, 2}, Activation::identity, Activation::identity);
  net.layers[0].w << 1, 2, 3, 4;
  net.layers[0].b << 0.5, -0.5;
  Matrix x(2, 2);
  x << 1, 0, 0, 1;
  Matrix out = mlp_forward(net, x);
  CHECK(out(0, 0) == doctest::Approx(1.5));
  CHECK(out(1, 0) == doctest::Approx(2.5));
  CHECK(out(0, 1) == doctest::Approx(2.5));
  CHECK(out(1, 1) == doctest::Approx(3.5));
}

TEST_CASE("mlp rejects mismatched input") {
  MlpParams net = make_mlp({3, 2}, Activation::tanh, Activation::identity);
  CHECK_THROWS_AS(mlp_forward(net, Matrix::Zero(4, 1)), DimensionError);
}

TEST_CASE("mlp backward matches finite differences") {
  for (Activation hidden : {Activation::sigmoid, Activation::tanh}) {
    CAPTURE(static_cast<int>(hidden));
    MlpParams net = make_mlp({3, 5, 4, 2}, hidden, Activation::identity);
    std::mt19937_64 rng(5);
    init_params(net, InitScheme::uniform, rng);
    Matrix x = random_matrix(3, 6, rng);
    Matrix weights = random_matrix(2, 6, rng);

    MlpCache cache;
    mlp_forward(net, x, &cache);
    MlpGrads grads = mlp_backward(net, cache, weights);

    auto value = [&]() { return (mlp_forward(net, x).array() * weights.array()).sum(); };
    GradCheckReport report =
        finite_diff_check(param_blocks(net), value, param_blocks(grads));
    CHECK(report.max_rel_err < 1e-5);
  }
}

TEST_CASE("mlp input gradient matches finite differences") {
  MlpParams net = make_mlp({3, 4, 2}, Activation::sigmoid, Activation::identity);
  std::mt19937_64 rng(7);
  init_params(net, InitScheme::uniform, rng);
  Matrix x = random_matrix(3, 5, rng);
  Matrix weights = random_matrix(2, 5, rng);

  MlpCache cache;
  mlp_forward(net, x, &cache);
  Matrix dx;
  mlp_backward(net, cache, weights, &dx);

  std::vector<ParamBlock> params{{x.data(), x.size()}};
  std::vector<ParamBlock> analytic{{dx.data(), dx.size()}};
  auto value = [&]() { return (mlp_forward(net, x).array() * weights.array()).sum(); };
  CHECK(finite_diff_check(params, value, analytic).max_rel_err < 1e-5);
}
