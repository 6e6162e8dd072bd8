#include <catch_amalgamated.hpp>

#include <cmath>

#include "fracvi/linalg.hpp"
#include "fracvi/rng.hpp"

using namespace fracvi;

TEST_CASE("jacobi eigensolver recovers a known 2x2 spectrum") {
  Matrix a(2, 2);
  a(0, 0) = 2.0;
  a(0, 1) = a(1, 0) = -1.0;
  a(1, 1) = 2.0;
  EigenResult r = jacobi_eigensolve(a);
  REQUIRE(r.values[0] == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(r.values[1] == Catch::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("jacobi eigenvectors are orthonormal and satisfy the eigen relation") {
  SplitMix64 rng(11);
  const std::size_t n = 40;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = rng.normal();
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 10.0;
  EigenResult r = jacobi_eigensolve(a);

  for (std::size_t j = 0; j < n; ++j) {
    REQUIRE(r.values[j] >= (j ? r.values[j - 1] : -1e9));
    Vector v(n), av(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i] = r.vectors(i, j);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) av[i] += a(i, k) * v[k];
    for (std::size_t i = 0; i < n; ++i)
      REQUIRE(av[i] == Catch::Approx(r.values[j] * v[i]).margin(1e-9));
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += r.vectors(i, j) * r.vectors(i, k);
      REQUIRE(d == Catch::Approx(j == k ? 1.0 : 0.0).margin(1e-11));
    }
}

TEST_CASE("cholesky solves SPD systems") {
  SplitMix64 rng(3);
  const std::size_t n = 25;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = rng.normal();
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 20.0;
  Vector x_ref = rng.normal_vector(n);
  Vector b = a.apply(x_ref);
  Vector x = CholeskyFactor(a).solve(b);
  for (std::size_t i = 0; i < n; ++i) REQUIRE(x[i] == Catch::Approx(x_ref[i]).margin(1e-10));
}

TEST_CASE("cholesky rejects indefinite matrices") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = a(1, 0) = 2.0;
  a(1, 1) = 1.0;
  REQUIRE_THROWS_AS(CholeskyFactor(a), std::runtime_error);
}

TEST_CASE("tridiagonal solver matches a dense solve") {
  SplitMix64 rng(7);
  const std::size_t n = 30;
  Vector lo(n, 0.0), di(n), up(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    di[i] = 4.0 + rng.uniform();
    if (i > 0) lo[i] = -1.0 + 0.1 * rng.normal();
    if (i + 1 < n) up[i] = -1.0 + 0.1 * rng.normal();
  }
  Vector x_ref = rng.normal_vector(n);
  Vector b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = di[i] * x_ref[i];
    if (i > 0) b[i] += lo[i] * x_ref[i - 1];
    if (i + 1 < n) b[i] += up[i] * x_ref[i + 1];
  }
  Vector x = solve_tridiagonal(lo, di, up, b);
  for (std::size_t i = 0; i < n; ++i) REQUIRE(x[i] == Catch::Approx(x_ref[i]).margin(1e-11));
}

TEST_CASE("splittable rng is deterministic and stream-independent") {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
  SplitMix64 root(42);
  SplitMix64 c1 = root.split("alpha");
  SplitMix64 c2 = root.split("alpha");
  SplitMix64 c3 = root.split("beta");
  REQUIRE(c1.next_u64() == c2.next_u64());
  REQUIRE(c1.next_u64() != c3.next_u64());
  double u = SplitMix64(1).uniform();
  REQUIRE(u >= 0.0);
  REQUIRE(u < 1.0);
}
