#include <doctest.h>

#include "mvcorr/linalg.hpp"
#include "test_util.hpp"

using namespace mvcorr;
using namespace mvcorr::testutil;

TEST_CASE("sym_eig identity") {
  SymEig eig = sym_eig(Matrix::Identity(3, 3));
  for (Index i = 0; i < 3; ++i) CHECK(eig.eigenvalues[i] == doctest::Approx(1.0));
  Matrix qtq = eig.eigenvectors.transpose() * eig.eigenvectors;
  CHECK(max_abs(qtq - Matrix::Identity(3, 3)) <= 1e-8);
}

TEST_CASE("sym_eig diagonal sorts descending") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 4;
  a(1, 1) = 9;
  SymEig eig = sym_eig(a);
  CHECK(eig.eigenvalues[0] == doctest::Approx(9.0));
  CHECK(eig.eigenvalues[1] == doctest::Approx(4.0));
  // Permuted identity: |Q| entries are 0/1.
  CHECK(std::abs(eig.eigenvectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig reconstructs random symmetric matrices") {
  std::mt19937_64 rng(7);
  for (Index n : {2, 5, 17, 50}) {
    Matrix a = random_symmetric(n, rng);
    SymEig eig = sym_eig(a);
    Matrix rebuilt =
        eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.transpose();
    CHECK(max_abs(rebuilt - a) <= 1e-8 * std::max(1.0, max_abs(a)));
    CHECK(max_abs(eig.eigenvectors.transpose() * eig.eigenvectors - Matrix::Identity(n, n)) <=
          1e-8);
    for (Index i = 1; i < n; ++i) CHECK(eig.eigenvalues[i - 1] >= eig.eigenvalues[i]);
  }
}

TEST_CASE("sym_eig rejects bad input") {
  CHECK_THROWS_AS(sym_eig(Matrix::Zero(2, 3)), DimensionError);
  Matrix asym(2, 2);
  asym << 1, 2, 3, 4;
  CHECK_THROWS_AS(sym_eig(asym), NumericError);
}

TEST_CASE("inv_sqrt_psd identity and diagonal") {
  CHECK(max_abs(inv_sqrt_psd(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)) <= 1e-12);
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 4;
  a(1, 1) = 9;
  Matrix s = inv_sqrt_psd(a);
  CHECK(s(0, 0) == doctest::Approx(0.5));
  CHECK(s(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(s(0, 1)) <= 1e-14);
}

TEST_CASE("inv_sqrt_psd definitional oracle on random PSD") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a = random_psd(6, rng);
    Matrix s = inv_sqrt_psd(a);
    CHECK(max_abs(s * a * s - Matrix::Identity(6, 6)) <= 1e-8);
    CHECK(max_abs(s - s.transpose()) <= 1e-12);
    // Idempotence route: (A^{-1/2})^{-2} == A on well-conditioned input.
    Matrix inv = s * s;
    Matrix back = inv.inverse();
    CHECK(max_abs(back - a) <= 1e-8 * std::max(1.0, max_abs(a)));
  }
}

TEST_CASE("inv_sqrt_psd clamps round-off but rejects indefinite input") {
  Matrix tiny_neg = Matrix::Identity(2, 2);
  tiny_neg(1, 1) = -1e-13;  // round-off scale, clamped
  CHECK_NOTHROW(inv_sqrt_psd(tiny_neg, 1e-10));
  Matrix neg = Matrix::Identity(2, 2);
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(inv_sqrt_psd(neg), NumericError);
}

TEST_CASE("center_columns examples") {
  SUBCASE("single column maps to zero") {
    Matrix x(3, 1);
    x << 1, 2, 3;
    Centered c = center_columns(x);
    CHECK(max_abs(c.centered) == 0.0);
    CHECK(c.mean[0] == 1.0);
    CHECK(c.mean[2] == 3.0);
  }
  SUBCASE("identical columns map to zero") {
    Matrix x(2, 4);
    x << 5, 5, 5, 5, -2, -2, -2, -2;
    Centered c = center_columns(x);
    CHECK(max_abs(c.centered) == 0.0);
    CHECK(c.mean[0] == 5.0);
    CHECK(c.mean[1] == -2.0);
  }
  SUBCASE("hand arithmetic") {
    Matrix x(2, 2);
    x << 1, 3, 2, 6;
    Centered c = center_columns(x);
    CHECK(c.centered(0, 0) == doctest::Approx(-1));
    CHECK(c.centered(0, 1) == doctest::Approx(1));
    CHECK(c.centered(1, 0) == doctest::Approx(-2));
    CHECK(c.centered(1, 1) == doctest::Approx(2));
    CHECK(c.mean[0] == doctest::Approx(2));
    CHECK(c.mean[1] == doctest::Approx(4));
  }
  SUBCASE("row sums vanish") {
    std::mt19937_64 rng(3);
    Matrix x = random_matrix(4, 30, rng);
    Centered c = center_columns(x);
    Vector sums = c.centered.rowwise().sum();
    CHECK(sums.cwiseAbs().maxCoeff() <= 1e-10 * 30);
  }
}

TEST_CASE("covariance zero data gives reg * I") {
  Matrix z = Matrix::Zero(3, 10);
  Matrix cov = covariance(z, z, 0.25, 9.0);
  CHECK(max_abs(cov - 0.25 * Matrix::Identity(3, 3)) == 0.0);
}

TEST_CASE("covariance of unit-variance feature is 1") {
  // Two samples -1, +1: mean 0, unbiased variance (1+1)/(2-1) = 2... use a
  // centered pair with variance exactly 1.
  Matrix x(1, 2);
  const double v = std::sqrt(0.5);
  x << -v, v;
  Matrix cov = covariance(x, x, 0.0, 1.0);
  CHECK(cov(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("covariance matches the direct summation oracle") {
  std::mt19937_64 rng(23);
  Matrix xc = random_matrix(4, 40, rng);
  Matrix yc = random_matrix(3, 40, rng);
  const double denom = 39.0;
  Matrix fast = covariance(xc, yc, 0.0, denom);
  Matrix slow = Matrix::Zero(4, 3);
  for (Index j = 0; j < 40; ++j) {
    slow += xc.col(j) * yc.col(j).transpose();
  }
  slow /= denom;
  CHECK(max_abs(fast - slow) <= 1e-12);
}

TEST_CASE("covariance auto form is exactly symmetric") {
  std::mt19937_64 rng(29);
  Matrix xc = center_columns(random_matrix(6, 25, rng)).centered;
  Matrix cov = covariance(xc, xc, 0.01, 24.0);
  CHECK(max_abs(cov - cov.transpose()) == 0.0);
}

TEST_CASE("covariance rejects mismatched samples") {
  CHECK_THROWS_AS(covariance(Matrix::Zero(2, 3), Matrix::Zero(2, 4), 0.0, 1.0),
                  DimensionError);
}

TEST_CASE("random_orthonormal shapes and orthogonality") {
  std::mt19937_64 rng(5);
  Matrix tall = random_orthonormal(6, 3, rng);
  CHECK(max_abs(tall.transpose() * tall - Matrix::Identity(3, 3)) <= 1e-12);
  Matrix wide = random_orthonormal(2, 5, rng);
  CHECK(max_abs(wide * wide.transpose() - Matrix::Identity(2, 2)) <= 1e-12);
}
