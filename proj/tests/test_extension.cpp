#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fracvi/extension.hpp"
#include "fracvi/gamma.hpp"
#include "fracvi/rng.hpp"

using namespace fracvi;

TEST_CASE("gamma function identities") {
  const double g_half = gamma_function(0.5);
  REQUIRE(g_half * g_half / std::numbers::pi == Catch::Approx(1.0).margin(1e-10));
  REQUIRE(gamma_function(1.0) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(gamma_function(5.0) == Catch::Approx(24.0).epsilon(1e-12));
  for (double x : {0.1, 0.37, 0.8, 1.3, 2.1, 2.9}) {
    REQUIRE(gamma_function(x + 1.0) == Catch::Approx(x * gamma_function(x)).epsilon(1e-10));
  }
  REQUIRE_THROWS_AS(gamma_function(-1.0), std::invalid_argument);
}

TEST_CASE("kernel normalization constant at one half is 1/pi") {
  REQUIRE(kernel_constant(1, 0.5) == Catch::Approx(1.0 / std::numbers::pi).epsilon(1e-10));
  REQUIRE_THROWS_AS(kernel_constant(1, 1.0), std::invalid_argument);
}

TEST_CASE("graded mesh grading and extent") {
  GradedMesh mesh = make_graded_mesh(0.75, 20.0, 100);
  REQUIRE(mesh.cells() == 100);
  REQUIRE(mesh.y.front() == 0.0);
  REQUIRE(mesh.extent() == Catch::Approx(20.0));
  for (int j = 0; j < 100; ++j) REQUIRE(mesh.y[j] < mesh.y[j + 1]);
  // gamma = 4 at s = 0.75: second node is 16x the first
  REQUIRE(mesh.y[2] / mesh.y[1] == Catch::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("half-order mode profile matches the exponential solution") {
  // s = 1/2 turns the mode equation into theta'' = lambda theta
  GradedMesh mesh = make_graded_mesh(0.5, 20.0, 400);
  ModeProfile prof = solve_mode_ode(0.5, 1.0, mesh);
  double max_err = 0.0;
  for (std::size_t j = 0; j < prof.theta.size(); ++j)
    max_err = std::max(max_err, std::abs(prof.theta[j] - std::exp(-prof.mesh.y[j])));
  REQUIRE(max_err <= 1e-4);
  REQUIRE(neumann_trace(prof) == Catch::Approx(1.0).margin(1e-3));

  ModeProfile prof4 = solve_mode_ode(0.5, 4.0, make_graded_mesh(0.5, 10.0, 400));
  REQUIRE(neumann_trace(prof4) == Catch::Approx(2.0).margin(2e-3));
}

TEST_CASE("profile invariants: strictly decreasing inside the open unit interval") {
  for (double s : {0.25, 0.5, 0.75}) {
    ModeProfile prof = solve_mode_ode(s, 2.0, make_graded_mesh(s, default_extent(2.0), 200));
    for (std::size_t j = 1; j + 1 < prof.theta.size(); ++j) {
      REQUIRE(prof.theta[j] > 0.0);
      REQUIRE(prof.theta[j] < 1.0);
      REQUIRE(prof.theta[j] < prof.theta[j - 1]);
    }
    REQUIRE(prof.theta.back() == 0.0);
  }
}

TEST_CASE("zero boundary value forces the zero profile") {
  ModeProfile prof = solve_mode_ode(0.5, 1.0, make_graded_mesh(0.5, 20.0, 50), 0.0);
  for (double th : prof.theta) REQUIRE(th == 0.0);
}

TEST_CASE("first interior value decreases as lambda grows on a shared mesh") {
  GradedMesh mesh = make_graded_mesh(0.4, 20.0, 200);
  double prev = 2.0;
  for (double lambda : {1.0, 4.0, 16.0, 64.0}) {
    ModeProfile prof = solve_mode_ode(0.4, lambda, mesh);
    REQUIRE(prof.theta[1] < prev);
    prev = prof.theta[1];
  }
}

TEST_CASE("calibrated trace constant matches the closed form within half a percent") {
  for (double s : {0.25, 0.5, 0.75}) {
    const double cs = calibrate_cs(s);
    const double closed = trace_constant_closed_form(s);
    REQUIRE(std::abs(cs - closed) / closed <= 0.005);
  }
  REQUIRE(calibrate_cs(0.5) == Catch::Approx(1.0).margin(5e-3));
  REQUIRE(trace_constant_closed_form(0.5) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("trace scaling law in lambda") {
  const double s = 0.3;
  const double cs = calibrate_cs(s);
  for (double lambda : {1.0, 4.0, 16.0}) {
    const double trace = reference_trace(s, lambda, 400);
    REQUIRE(cs * trace / std::pow(lambda, s) == Catch::Approx(1.0).margin(1e-2));
  }
  // trace scaling across a wider eigenvalue range, 1% target
  const double t1 = reference_trace(s, 1.0, 800);
  for (double lambda : {10.0, 100.0}) {
    const double t = reference_trace(s, lambda, 800);
    REQUIRE(t / (std::pow(lambda, s) * t1) == Catch::Approx(1.0).margin(1e-2));
  }
}

TEST_CASE("trace is insensitive to enlarging the truncation point") {
  const double s = 0.6, lambda = 3.0;
  const double t_near = neumann_trace(
      solve_mode_ode(s, lambda, make_graded_mesh(s, 20.0 / std::sqrt(lambda), 800)));
  const double t_far = neumann_trace(
      solve_mode_ode(s, lambda, make_graded_mesh(s, 40.0 / std::sqrt(lambda), 800)));
  REQUIRE(std::abs(t_near - t_far) < 1e-4 * t_near);
}

TEST_CASE("mode energy is positive, increasing in lambda, and equals the trace") {
  const double s = 0.35;
  double prev = 0.0;
  for (double lambda : {1.0, 2.0, 4.0, 8.0}) {
    ModeProfile prof = solve_mode_ode(s, lambda, make_graded_mesh(s, default_extent(lambda), 200));
    const double e = mode_energy(prof);
    REQUIRE(e > prev);
    prev = e;
    REQUIRE(e == Catch::Approx(neumann_trace(prof)).epsilon(1e-10));
  }
}

TEST_CASE("extension energy reproduces the spectral form, improving under refinement") {
  BoxGrid grid(0.0, 1.0, 15);
  DomainMask mask = full_mask(grid);
  SplitMix64 rng(13);

  {
    NavierOperator op(mask, 0.5, false);
    const Vector phi1 = op.decomposition().mode(0);
    REQUIRE(energy_identity_check(op, phi1, 400) <= 1e-2);
    REQUIRE(energy_identity_check(op, Vector(15, 0.0), 100) == 0.0);
  }
  {
    NavierOperator op(mask, 0.7, false);
    Vector v = rng.normal_vector(15);
    const double coarse = energy_identity_check(op, v, 200);
    const double fine = energy_identity_check(op, v, 400);
    REQUIRE(fine <= 2e-2);
    REQUIRE(fine < coarse);
  }
}

TEST_CASE("profile CSV dump is plot-ready") {
  ModeProfile prof = solve_mode_ode(0.5, 1.0, make_graded_mesh(0.5, 20.0, 10));
  std::ostringstream os;
  prof.write_csv(os);
  const std::string text = os.str();
  REQUIRE(text.rfind("y,theta\n", 0) == 0);
  REQUIRE(std::count(text.begin(), text.end(), '\n') == 12);  // header + 11 nodes
}

TEST_CASE("mode solver validates input") {
  REQUIRE_THROWS_AS(solve_mode_ode(0.5, -1.0, make_graded_mesh(0.5, 20.0, 10)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(make_graded_mesh(1.5, 20.0, 10), std::invalid_argument);
  REQUIRE_THROWS_AS(make_graded_mesh(0.5, 20.0, 1), std::invalid_argument);
}
