#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "advbound/eigen.hpp"
#include "advbound/matrix.hpp"
#include "oracles.hpp"

using advbound::DenseMatrix;

namespace {

DenseMatrix random_symmetric(std::size_t n, std::mt19937& rng,
                             bool nonneg = false) {
  std::uniform_real_distribution<double> dist(nonneg ? 0.0 : -1.0, 1.0);
  DenseMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r; c < n; ++c) {
      const double v = dist(rng);
      m(r, c) = v;
      m(c, r) = v;
    }
  return m;
}

}  // namespace

TEST_CASE("jacobi eigen on a known 2x2") {
  // [[2,1],[1,2]] has eigenvalues 1 and 3.
  DenseMatrix m{{2.0, 1.0}, {1.0, 2.0}};
  const auto dec = advbound::jacobi_eigen(m);
  REQUIRE(dec.values[0] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(dec.values[1] == Catch::Approx(3.0).margin(1e-12));
  for (std::size_t k = 0; k < 2; ++k) {
    const std::vector<double> col{dec.vectors(0, k), dec.vectors(1, k)};
    const auto mv = advbound::matvec(m, col);
    REQUIRE(mv[0] == Catch::Approx(dec.values[k] * col[0]).margin(1e-10));
    REQUIRE(mv[1] == Catch::Approx(dec.values[k] * col[1]).margin(1e-10));
  }
}

TEST_CASE("jacobi eigenvalues match the QL oracle on random matrices") {
  std::mt19937 rng(7);
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u, 32u}) {
    const DenseMatrix m = random_symmetric(n, rng);
    const auto dec = advbound::jacobi_eigen(m);
    const auto ref = oracles::sym_eigenvalues(m);
    for (std::size_t k = 0; k < n; ++k)
      REQUIRE(dec.values[k] == Catch::Approx(ref[k]).margin(1e-9));
  }
}

TEST_CASE("psd_check classifies definite and indefinite matrices") {
  DenseMatrix pd{{2.0, 1.0}, {1.0, 2.0}};
  auto [ok1, lo1] = advbound::psd_check(pd);
  REQUIRE(ok1);
  REQUIRE(lo1 == Catch::Approx(1.0).margin(1e-10));

  DenseMatrix indef{{1.0, 2.0}, {2.0, 1.0}};
  auto [ok2, lo2] = advbound::psd_check(indef);
  REQUIRE_FALSE(ok2);
  REQUIRE(lo2 == Catch::Approx(-1.0).margin(1e-10));

  // Rank-deficient PSD passes.
  DenseMatrix psd{{1.0, 1.0}, {1.0, 1.0}};
  REQUIRE(advbound::psd_check(psd).first);
}

TEST_CASE("spectral norm of a known matrix with Perron vector") {
  // all-ones 3x3: top eigenvalue 3, eigenvector uniform.
  DenseMatrix ones(3, 3);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) ones(r, c) = 1.0;
  const auto res = advbound::spectral_norm(ones);
  REQUIRE(res.value == Catch::Approx(3.0).margin(1e-9));
  for (double v : res.vector)
    REQUIRE(v == Catch::Approx(1.0 / std::sqrt(3.0)).margin(1e-9));
  REQUIRE(res.residual <= 1e-9 * 2.0);
}

TEST_CASE("spectral norm agrees with the eigendecomposition route") {
  std::mt19937 rng(11);
  for (std::size_t n : {1u, 2u, 4u, 8u, 16u, 32u}) {
    const DenseMatrix m = random_symmetric(n, rng, /*nonneg=*/true);
    const auto res = advbound::spectral_norm(m);
    const double ref = oracles::sym_max_eigenvalue(m);
    REQUIRE(res.value == Catch::Approx(ref).margin(1e-8 * (1.0 + ref)));
    for (double v : res.vector) REQUIRE(v >= 0.0);
    REQUIRE(advbound::norm2(res.vector) == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("spectral norm on a bipartite support matrix") {
  // Star graph: power iteration without a shift would oscillate.
  DenseMatrix star(3, 3);
  star(0, 1) = star(1, 0) = 1.0;
  star(0, 2) = star(2, 0) = 1.0;
  const auto res = advbound::spectral_norm(star);
  REQUIRE(res.value == Catch::Approx(std::sqrt(2.0)).margin(1e-9));
  for (double v : res.vector) REQUIRE(v >= 0.0);
}

TEST_CASE("spectral norm on a reducible matrix keeps the vector nonnegative") {
  // Two disconnected blocks; the dominant one is the second.
  DenseMatrix m(4, 4);
  m(0, 1) = m(1, 0) = 1.0;
  m(2, 3) = m(3, 2) = 5.0;
  const auto res = advbound::spectral_norm(m);
  REQUIRE(res.value == Catch::Approx(5.0).margin(1e-9));
  for (double v : res.vector) REQUIRE(v >= 0.0);
  REQUIRE(res.vector[2] == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-8));
  REQUIRE(res.vector[0] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("spectral norm of the zero matrix") {
  DenseMatrix z(3, 3);
  const auto res = advbound::spectral_norm(z);
  REQUIRE(res.value == 0.0);
  REQUIRE(advbound::norm2(res.vector) == Catch::Approx(1.0));
}

TEST_CASE("spectral norm input validation") {
  DenseMatrix rect(2, 3);
  REQUIRE_THROWS_AS(advbound::spectral_norm(rect), advbound::input_error);
  DenseMatrix asym{{0.0, 1.0}, {2.0, 0.0}};
  REQUIRE_THROWS_AS(advbound::spectral_norm(asym), advbound::input_error);
  DenseMatrix neg{{0.0, -1.0}, {-1.0, 0.0}};
  REQUIRE_THROWS_AS(advbound::spectral_norm(neg), advbound::input_error);
}

TEST_CASE("cholesky reconstructs PSD matrices") {
  std::mt19937 rng(23);
  for (std::size_t n : {1u, 2u, 4u, 8u}) {
    // Gram matrix G = B B^T is PSD by construction.
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseMatrix b(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) b(r, c) = dist(rng);
    const DenseMatrix g = advbound::matmul(b, b.transposed());
    const DenseMatrix x = advbound::cholesky(g);
    const DenseMatrix back = advbound::matmul(x, x.transposed());
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        REQUIRE(back(r, c) == Catch::Approx(g(r, c)).margin(1e-8));
  }
}

TEST_CASE("cholesky handles semidefinite and near-semidefinite input") {
  DenseMatrix psd{{1.0, 1.0}, {1.0, 1.0}};
  const DenseMatrix x = advbound::cholesky(psd);
  const DenseMatrix back = advbound::matmul(x, x.transposed());
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      REQUIRE(back(r, c) == Catch::Approx(psd(r, c)).margin(1e-9));

  // Slightly indefinite within tolerance still factorizes.
  DenseMatrix nearly{{1.0, 1.0}, {1.0, 1.0 - 1e-12}};
  REQUIRE_NOTHROW(advbound::cholesky(nearly));
}

TEST_CASE("cholesky rejects indefinite matrices with pivot detail") {
  DenseMatrix indef{{1.0, 2.0}, {2.0, 1.0}};
  try {
    advbound::cholesky(indef);
    FAIL("expected numeric_error");
  } catch (const advbound::numeric_error& e) {
    REQUIRE(std::string(e.what()).find("pivot") != std::string::npos);
  }
}

TEST_CASE("min_eigenvalue matches the oracle") {
  std::mt19937 rng(31);
  const DenseMatrix m = random_symmetric(12, rng);
  REQUIRE(advbound::min_eigenvalue(m) ==
          Catch::Approx(oracles::sym_min_eigenvalue(m)).margin(1e-9));
}
