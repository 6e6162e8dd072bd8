#include <catch_amalgamated.hpp>

#include <cmath>

#include "fracvi/rng.hpp"
#include "fracvi/spectral.hpp"

using namespace fracvi;

TEST_CASE("closed-form eigenvalues on the unit interval with h = 1/4") {
  BoxGrid grid(0.0, 1.0, 3);
  SpectralDecomposition dec = eigendecompose(full_mask(grid));
  REQUIRE(dec.eigenvalues[0] == Catch::Approx(9.372583).margin(1e-5));
  REQUIRE(dec.eigenvalues[1] == Catch::Approx(32.0).margin(1e-10));
  REQUIRE(dec.eigenvalues[2] == Catch::Approx(54.627417).margin(1e-5));
}

TEST_CASE("single interior node with h = 1/2") {
  BoxGrid grid(0.0, 1.0, 1);
  SpectralDecomposition dec = eigendecompose(full_mask(grid));
  REQUIRE(dec.eigenvalues[0] == Catch::Approx(8.0).margin(1e-12));
  REQUIRE(std::abs(dec.eigenvectors(0, 0)) == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("eigenvalue sum equals the stencil trace") {
  for (int n : {5, 17, 40}) {
    BoxGrid grid(0.0, 1.0, n);
    SpectralDecomposition dec = eigendecompose(full_mask(grid));
    double sum = 0.0;
    for (double lam : dec.eigenvalues) sum += lam;
    const double h = grid.spacing(0);
    REQUIRE(sum == Catch::Approx(2.0 / (h * h) * n).epsilon(1e-12));
  }
  BoxGrid grid2({0.0, 0.0}, {1.0, 1.0}, {4, 6});
  SpectralDecomposition dec2 = eigendecompose(full_mask(grid2));
  double sum2 = 0.0;
  for (double lam : dec2.eigenvalues) sum2 += lam;
  const double trace = (2.0 / (grid2.spacing(0) * grid2.spacing(0)) +
                        2.0 / (grid2.spacing(1) * grid2.spacing(1))) *
                       24;
  REQUIRE(sum2 == Catch::Approx(trace).epsilon(1e-12));
}

TEST_CASE("closed-form sine basis agrees with the dense eigensolver") {
  for (int n : {9, 31}) {
    BoxGrid grid(0.0, 1.0, n);
    DomainMask mask = full_mask(grid);
    SpectralDecomposition sine = eigendecompose(mask);
    EigenResult dense = jacobi_eigensolve(laplacian_stencil(mask));
    const double isw = 1.0 / std::sqrt(mask.weight());
    for (int j = 0; j < n; ++j) {
      REQUIRE(dense.values[j] == Catch::Approx(sine.eigenvalues[j]).epsilon(1e-11));
      // eigenvectors agree up to sign (simple spectrum in 1D)
      const double sign = dense.vectors(0, j) * sine.eigenvectors(0, j) >= 0.0 ? 1.0 : -1.0;
      for (int i = 0; i < n; ++i)
        REQUIRE(dense.vectors(i, j) * isw * sign ==
                Catch::Approx(sine.eigenvectors(i, j)).margin(1e-9));
    }
  }
}

TEST_CASE("decomposition invariants: positivity, weighted orthonormality, eigen relation") {
  BoxGrid grid({0.0, 0.0}, {1.0, 1.0}, {6, 6});
  DomainMask disc = build_mask(grid, [](std::array<double, 2> c) {
    const double dx = c[0] - 0.5, dy = c[1] - 0.5;
    return dx * dx + dy * dy < 0.16;
  });
  SpectralDecomposition dec = eigendecompose(disc);
  const int m = dec.size();
  const double w = dec.weight();
  REQUIRE(dec.eigenvalues[0] > 0.0);

  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      double d = 0.0;
      for (int i = 0; i < m; ++i) d += dec.eigenvectors(i, j) * dec.eigenvectors(i, k);
      REQUIRE(d * w == Catch::Approx(j == k ? 1.0 : 0.0).margin(1e-10));
    }

  Matrix a = laplacian_stencil(disc);
  const double lam_max = dec.eigenvalues[m - 1];
  for (int j = 0; j < m; ++j) {
    Vector av = a.apply(dec.mode(j));
    for (int i = 0; i < m; ++i)
      REQUIRE(av[i] == Catch::Approx(dec.eigenvalues[j] * dec.eigenvectors(i, j))
                           .margin(1e-8 * lam_max));
  }
}

TEST_CASE("operator acts on eigenmodes by the fractional eigenvalue power") {
  BoxGrid grid(0.0, 1.0, 3);
  DomainMask mask = full_mask(grid);
  for (double s : {0.25, 0.5, 0.75, 1.0}) {
    NavierOperator op(mask, s);
    const SpectralDecomposition& dec = op.decomposition();
    for (int j = 0; j < 3; ++j) {
      Vector out = op.apply(dec.mode(j));
      const double factor = std::pow(dec.eigenvalues[j], s);
      for (int i = 0; i < 3; ++i)
        REQUIRE(out[i] == Catch::Approx(factor * dec.eigenvectors(i, j)).margin(1e-9 * factor));
    }
  }
  // the documented second mode at s = 1/2: factor sqrt(32)
  NavierOperator half(mask, 0.5);
  Vector phi2 = half.decomposition().mode(1);
  Vector out = half.apply(phi2);
  for (int i = 0; i < 3; ++i)
    REQUIRE(out[i] == Catch::Approx(5.65685424949238 * phi2[i]).margin(1e-9));
}

TEST_CASE("order one reduces to the stencil and composes like the square") {
  BoxGrid grid(0.0, 1.0, 21);
  DomainMask mask = full_mask(grid);
  NavierOperator op(mask, 1.0);
  Matrix a = laplacian_stencil(mask);
  SplitMix64 rng(17);
  Vector v = rng.normal_vector(21);
  Vector via_op = op.apply(v);
  Vector via_stencil = a.apply(v);
  const double scale = max_abs(via_stencil);
  for (int i = 0; i < 21; ++i)
    REQUIRE(via_op[i] == Catch::Approx(via_stencil[i]).margin(1e-10 * scale));

  // applying s = 1 twice matches the squared-eigenvalue scaling on modes
  const SpectralDecomposition& dec = op.decomposition();
  for (int j : {0, 10, 20}) {
    Vector twice = op.apply(op.apply(dec.mode(j)));
    const double lam2 = dec.eigenvalues[j] * dec.eigenvalues[j];
    for (int i = 0; i < 21; ++i)
      REQUIRE(twice[i] == Catch::Approx(lam2 * dec.eigenvectors(i, j)).margin(1e-9 * lam2));
  }
}

TEST_CASE("quadratic form matches closed forms and the gradient-sum oracle") {
  BoxGrid grid(0.0, 1.0, 3);
  DomainMask mask = full_mask(grid);
  NavierOperator op(mask, 0.5);
  const SpectralDecomposition& dec = op.decomposition();
  REQUIRE(op.quadratic_form(dec.mode(0)) ==
          Catch::Approx(std::sqrt(dec.eigenvalues[0])).epsilon(1e-10));
  REQUIRE(op.quadratic_form(Vector(3, 0.0)) == 0.0);

  // s = 1: form equals the discrete gradient sum with zero boundary values
  BoxGrid g2(0.0, 1.0, 31);
  NavierOperator op1(full_mask(g2), 1.0);
  SplitMix64 rng(23);
  Vector v = rng.normal_vector(31);
  const double h = g2.spacing(0);
  double grad = v[0] * v[0] + v[30] * v[30];
  for (int i = 0; i + 1 < 31; ++i) grad += (v[i + 1] - v[i]) * (v[i + 1] - v[i]);
  grad /= h;
  REQUIRE(op1.quadratic_form(v) == Catch::Approx(grad).epsilon(1e-10));
  REQUIRE(op1.quadratic_form(v) ==
          Catch::Approx(dot(op1.apply(v), v) * op1.weight()).epsilon(1e-10));
}

TEST_CASE("half power composes to the full operator and carries the form") {
  BoxGrid grid(0.0, 1.0, 17);
  DomainMask mask = full_mask(grid);
  SplitMix64 rng(29);
  for (double s : {0.3, 0.5, 1.0}) {
    NavierOperator op(mask, s, false);
    Vector v = rng.normal_vector(17);
    Vector composed = op.half_apply(op.half_apply(v));
    Vector direct = op.apply(v);
    const double scale = max_abs(direct);
    for (int i = 0; i < 17; ++i)
      REQUIRE(composed[i] == Catch::Approx(direct[i]).margin(1e-10 * scale));
    Vector half = op.half_apply(v);
    REQUIRE(dot(half, half) * op.weight() ==
            Catch::Approx(op.quadratic_form(v)).epsilon(1e-10));
    REQUIRE(op.half_apply(Vector(17, 0.0)) == Vector(17, 0.0));
  }
}

TEST_CASE("solve inverts the operator and is strongly positivity-preserving") {
  BoxGrid grid(0.0, 1.0, 3);
  DomainMask mask = full_mask(grid);
  NavierOperator op(mask, 0.5);
  const SpectralDecomposition& dec = op.decomposition();
  Vector w = op.solve(dec.mode(0));
  const double inv = std::pow(dec.eigenvalues[0], -0.5);
  REQUIRE(inv == Catch::Approx(0.326636).margin(1e-5));
  for (int i = 0; i < 3; ++i)
    REQUIRE(w[i] == Catch::Approx(inv * dec.eigenvectors(i, 0)).margin(1e-10));
  REQUIRE(op.solve(Vector(3, 0.0)) == Vector(3, 0.0));

  BoxGrid g2(0.0, 1.0, 63);
  SplitMix64 rng(31);
  for (double s : {0.25, 0.5, 0.75}) {
    NavierOperator big(full_mask(g2), s, false);
    for (int t = 0; t < 20; ++t) {
      Vector f = rng.nonnegative_vector(63);
      Vector u = big.solve(f);
      REQUIRE(min_elem(u) > 0.0);
      Vector back = big.apply(u);
      for (int i = 0; i < 63; ++i)
        REQUIRE(back[i] == Catch::Approx(f[i]).margin(1e-8 * (1.0 + max_abs(f))));
    }
  }
}

TEST_CASE("materialized matrix is symmetric, matches apply, and has positive inverse entries") {
  BoxGrid grid(0.0, 1.0, 15);
  DomainMask mask = full_mask(grid);
  NavierOperator op(mask, 0.6);
  REQUIRE(op.has_matrix());
  const Matrix& a = op.matrix();
  SplitMix64 rng(37);
  Vector v = rng.normal_vector(15);
  Vector mv = a.apply(v), ov = op.apply(v);
  for (int i = 0; i < 15; ++i)
    REQUIRE(mv[i] == Catch::Approx(ov[i]).margin(1e-10 * (1.0 + max_abs(ov))));
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) REQUIRE(a(i, j) == Catch::Approx(a(j, i)).margin(1e-12));

  // inverse entries strictly positive: columns of the inverse solve unit loads
  for (int j = 0; j < 15; ++j) {
    Vector e(15, 0.0);
    e[j] = 1.0;
    REQUIRE(min_elem(op.solve(e)) > 0.0);
  }
}

TEST_CASE("weighted symmetry and monotone interpolation of the form in s") {
  BoxGrid grid(0.0, 1.0, 25);
  DomainMask mask = full_mask(grid);
  SplitMix64 rng(41);
  NavierOperator op(mask, 0.4, false);
  for (int t = 0; t < 10; ++t) {
    Vector u = rng.normal_vector(25), v = rng.normal_vector(25);
    const double lhs = dot(op.apply(u), v), rhs = dot(u, op.apply(v));
    REQUIRE(lhs == Catch::Approx(rhs).margin(1e-10 * (1.0 + std::abs(lhs))));
  }
  // all eigenvalues exceed 1 here, so the form is increasing in s
  Vector v = rng.nonnegative_vector(25);
  double prev = 0.0;
  for (double s : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    const double q = NavierOperator(mask, s, false).quadratic_form(v);
    REQUIRE(q > prev);
    prev = q;
  }
}

TEST_CASE("operator construction and application reject bad input") {
  BoxGrid grid(0.0, 1.0, 5);
  DomainMask mask = full_mask(grid);
  REQUIRE_THROWS_AS(NavierOperator(mask, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(NavierOperator(mask, 1.5), std::invalid_argument);
  NavierOperator op(mask, 0.5);
  REQUIRE_THROWS_AS(op.apply(Vector(4, 0.0)), std::invalid_argument);
  nlohmann::json j = op.to_json();
  REQUIRE(j["s"] == 0.5);
  REQUIRE(j["eigenvalues"].size() == 5);
}
