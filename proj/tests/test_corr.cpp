#include <doctest.h>

#include <random>

#include "mvcorr/cca.hpp"
#include "mvcorr/corr.hpp"
#include "mvcorr/gradcheck.hpp"
#include "test_util.hpp"

using namespace mvcorr;
using namespace mvcorr::testutil;

TEST_CASE("corr of a batch with itself is k") {
  std::mt19937_64 rng(101);
  Matrix f = random_matrix(4, 60, rng);
  CorrConfig cfg;
  cfg.r_x = cfg.r_y = 1e-8;
  CorrResult res = corr_objective(f, f, cfg);
  CHECK(res.corr == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("corr at o=1 matches the Pearson oracle") {
  std::mt19937_64 rng(103);
  const Index m = 200;
  Matrix f = random_matrix(1, m, rng);
  Matrix g = 0.6 * f + 0.4 * random_matrix(1, m, rng);

  // |sample Pearson correlation| computed directly.
  Vector fc = (f.row(0).array() - f.row(0).mean()).matrix();
  Vector gc = (g.row(0).array() - g.row(0).mean()).matrix();
  const double pearson = std::abs(fc.dot(gc)) / std::sqrt(fc.squaredNorm() * gc.squaredNorm());

  CorrConfig cfg;
  cfg.r_x = cfg.r_y = 1e-8;
  CorrResult res = corr_objective(f, g, cfg);
  CHECK(res.corr == doctest::Approx(pearson).epsilon(1e-4));
}

TEST_CASE("independent batches stay weakly correlated and match the CCA oracle") {
  std::mt19937_64 rng(107);
  const Index m = 5000;
  Matrix f = random_matrix(5, m, rng);
  Matrix g = random_matrix(5, m, rng);
  CorrConfig cfg;
  CorrResult res = corr_objective(f, g, cfg);
  CHECK(res.corr < 0.5);

  // fit_cca on the same batch solves the same whitened problem.
  CcaModel oracle = fit_cca(f, g, 5, cfg.r_x, cfg.r_y);
  CHECK(res.corr == doctest::Approx(oracle.corrs.sum()).epsilon(1e-8));
}

TEST_CASE("corr gradient matches central finite differences") {
  std::mt19937_64 rng(109);
  const Index o = 4, m = 32;
  Matrix f = random_matrix(o, m, rng);
  Matrix g = random_matrix(o, m, rng);
  g += 0.5 * f;
  CorrConfig cfg;

  CorrResult res = corr_objective(f, g, cfg);
  std::vector<ParamBlock> params{{f.data(), f.size()}, {g.data(), g.size()}};
  std::vector<ParamBlock> analytic{{res.grad_f.data(), res.grad_f.size()},
                                   {res.grad_g.data(), res.grad_g.size()}};
  auto value = [&]() { return corr_objective(f, g, cfg).corr; };
  GradCheckReport report = finite_diff_check(params, value, analytic);
  CHECK(report.max_rel_err < 1e-4);
}

TEST_CASE("corr is symmetric, shift-invariant, and bounded") {
  std::mt19937_64 rng(113);
  const Index o = 3, m = 40;
  Matrix f = random_matrix(o, m, rng);
  Matrix g = random_matrix(o, m, rng);
  CorrConfig cfg;

  const double fg = corr_objective(f, g, cfg).corr;
  const double gf = corr_objective(g, f, cfg).corr;
  CHECK(std::abs(fg - gf) <= 1e-10);

  Vector shift = random_matrix(o, 1, rng).col(0);
  Matrix f_shifted = f.colwise() + shift;
  CHECK(std::abs(corr_objective(f_shifted, g, cfg).corr - fg) <= 1e-10);

  CHECK(fg >= 0.0);
  CHECK(fg <= o + 1e-6);
}

TEST_CASE("corr is invariant under identical sample permutation") {
  std::mt19937_64 rng(127);
  const Index o = 3, m = 24;
  Matrix f = random_matrix(o, m, rng);
  Matrix g = random_matrix(o, m, rng);
  std::vector<Index> perm(m);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix fp(o, m), gp(o, m);
  for (Index j = 0; j < m; ++j) {
    fp.col(j) = f.col(perm[static_cast<size_t>(j)]);
    gp.col(j) = g.col(perm[static_cast<size_t>(j)]);
  }
  CorrConfig cfg;
  CHECK(std::abs(corr_objective(fp, gp, cfg).corr - corr_objective(f, g, cfg).corr) <= 1e-12);
}

TEST_CASE("singular-value and eigenvalue routes agree") {
  std::mt19937_64 rng(131);
  const Index o = 5, m = 50;
  CorrConfig cfg;
  Matrix f = random_matrix(o, m, rng);
  Matrix g = random_matrix(o, m, rng);
  g += 0.3 * f;
  CorrResult res = corr_objective(f, g, cfg);

  CHECK(std::abs(res.corr - res.singular_values.sum()) <= 1e-10);

  // tr(T^T T)^{1/2} through sym_eig of T^T T, rebuilt here from scratch.
  Matrix fc = center_columns(f).centered;
  Matrix gc = center_columns(g).centered;
  Matrix s11 = fc * fc.transpose() / (m - 1.0) + cfg.r_x * Matrix::Identity(o, o);
  Matrix s22 = gc * gc.transpose() / (m - 1.0) + cfg.r_y * Matrix::Identity(o, o);
  Matrix s12 = fc * gc.transpose() / (m - 1.0);
  Matrix t = inv_sqrt_psd(s11) * s12 * inv_sqrt_psd(s22);
  SymEig eig = sym_eig(t.transpose() * t);
  const double eig_route = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt().sum();
  CHECK(std::abs(res.corr - eig_route) <= 1e-8);
}

TEST_CASE("corr_objective validates its inputs") {
  CorrConfig cfg;
  CHECK_THROWS_AS(corr_objective(Matrix::Zero(2, 1), Matrix::Zero(2, 1), cfg), DimensionError);
  CHECK_THROWS_AS(corr_objective(Matrix::Zero(2, 8), Matrix::Zero(3, 8), cfg), DimensionError);
  CorrConfig bad_k = cfg;
  bad_k.k = 1;
  CHECK_THROWS_AS(corr_objective(Matrix::Zero(2, 8), Matrix::Zero(2, 8), bad_k),
                  DimensionError);
  Matrix f = Matrix::Zero(2, 8);
  f(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(corr_objective(f, Matrix::Zero(2, 8), cfg), NumericError);
}

TEST_CASE("corr_captured") {
  std::mt19937_64 rng(137);
  const Index m = 100;
  Matrix f = random_matrix(4, m, rng);
  Matrix g = random_matrix(4, m, rng);
  CorrConfig cfg;

  SUBCASE("k_report = o reproduces the total") {
    CorrCaptured c = corr_captured(f, g, cfg, 4);
    CHECK(c.top_k == doctest::Approx(c.total));
  }
  SUBCASE("identical views capture ~o") {
    CorrCaptured c = corr_captured(f, f, cfg, 4);
    CHECK(c.total == doctest::Approx(4.0).epsilon(1e-2));
  }
  SUBCASE("top_k is monotone in k_report") {
    double prev = 0;
    for (Index k = 0; k <= 4; ++k) {
      CorrCaptured c = corr_captured(f, g, cfg, k);
      CHECK(c.top_k >= prev - 1e-15);
      prev = c.top_k;
    }
  }
  SUBCASE("rectangular representations are allowed") {
    Matrix g3 = random_matrix(3, m, rng);
    CorrCaptured c = corr_captured(f, g3, cfg, 3);
    CHECK(c.total >= c.top_k - 1e-15);
    CHECK_THROWS_AS(corr_captured(f, g3, cfg, 4), DimensionError);
  }
}
