#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pdeacc/scheme.hpp"

using namespace pdeacc;

namespace {

constexpr SchemeKind kAllKinds[] = {SchemeKind::GradientDescent, SchemeKind::Accel1, SchemeKind::Accel2,
                                   SchemeKind::SemiImplicit};

// Single cell with fidelity only: gradE(u) = lambda (u - g).
ProblemSpec single_cell(double lambda, double damping) {
  ProblemSpec s = ProblemSpec::denoising(GridField(1, 1, 1.0, 0.0), lambda, Quadratic{1.0}, damping);
  return s;
}

GridField zero_gradient(const GridField& u) { return GridField::zeros_like(u); }

ProblemSpec quadratic_4x4(double lambda, double c, double damping, std::uint64_t seed) {
  return ProblemSpec::denoising(oracle::random_field(4, 4, 0.25, seed), lambda, Quadratic{c}, damping);
}

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (SchemeKind k : kAllKinds) CHECK(parse_scheme(scheme_name(k)) == k);
  CHECK_FALSE(parse_scheme("rk4").has_value());
}

TEST_CASE("scheme configuration validation") {
  SchemeConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.dt = -1.0;
  CHECK_THROWS(cfg.validate());
  cfg.dt = AutoCfl{1.5};
  CHECK_THROWS(cfg.validate());
  cfg.dt = AutoCfl{0.5};
  cfg.quantization = 0.0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("zero gradient is a fixed point of every scheme") {
  const GridField u0 = oracle::random_field(5, 5, 0.2, 1);
  const ProblemSpec spec = ProblemSpec::denoising(u0, 1.0, Quadratic{}, 3.0);
  for (SchemeKind k : kAllKinds) {
    SolverState s = SolverState::at_rest(u0);
    for (int i = 0; i < 5; ++i) s = step(spec, k, 0.1, s, zero_gradient);
    CHECK(oracle::max_abs_diff(s.u, u0) == 0.0);
    CHECK(s.iteration == 5);
    CHECK(s.time == doctest::Approx(0.5));
  }
}

TEST_CASE("single-cell undamped second-order oscillation") {
  const ProblemSpec spec = single_cell(1.0, 0.0);
  SolverState s = SolverState::at_rest(GridField(1, 1, 1.0, 1.0));
  s = step(spec, SchemeKind::Accel2, 1.0, s);
  CHECK(s.prev_increment[0] == -1.0);
  CHECK(s.u[0] == 0.0);
  s = step(spec, SchemeKind::Accel2, 1.0, s);
  CHECK(s.prev_increment[0] == -1.0);
  CHECK(s.u[0] == -1.0);
}

TEST_CASE("single-cell gradient descent solves in one step") {
  const ProblemSpec spec = single_cell(1.0, 0.0);
  SolverState s = SolverState::at_rest(GridField(1, 1, 1.0, 1.0));
  s = step(spec, SchemeKind::GradientDescent, 1.0, s);
  CHECK(s.u[0] == 0.0);
  for (int i = 0; i < 3; ++i) s = step(spec, SchemeKind::GradientDescent, 1.0, s);
  CHECK(s.u[0] == 0.0);
}

TEST_CASE("increment weights follow the recursions") {
  const double a = 3.0, dt = 0.2;
  const IncrementWeights a1 = increment_weights(SchemeKind::Accel1, a, dt);
  CHECK(a1.previous == doctest::Approx(1.0 / 1.6));
  CHECK(a1.gradient == doctest::Approx(-0.04 / 1.6));
  const IncrementWeights a2 = increment_weights(SchemeKind::Accel2, a, dt);
  CHECK(a2.previous == doctest::Approx(1.4 / 2.6));
  CHECK(a2.gradient == doctest::Approx(-0.08 / 2.6));
  const IncrementWeights gd = increment_weights(SchemeKind::GradientDescent, a, dt);
  CHECK(gd.previous == 0.0);
  CHECK(gd.gradient == -dt);
}

TEST_CASE("semi-implicit step evaluates the gradient at the look-ahead point") {
  const ProblemSpec spec = single_cell(2.0, 1.0);
  const double dt = 0.3;
  const SolverState s0 = SolverState::with_increment(GridField(1, 1, 1.0, 0.5), GridField(1, 1, 1.0, 0.1));
  const SolverState s1 = step(spec, SchemeKind::SemiImplicit, dt, s0);
  const double w = (2.0 - dt) / (2.0 + dt);
  const double v = 0.5 + w * 0.1;
  const double expected = v - 2.0 * dt * dt / (2.0 + dt) * 2.0 * v;
  CHECK(s1.u[0] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(s1.prev_increment[0] == doctest::Approx(expected - 0.5).epsilon(1e-14));
}

TEST_CASE("mass density scales the gradient") {
  ProblemSpec spec = single_cell(1.0, 0.0);
  spec.rho = 4.0;
  SolverState s = SolverState::at_rest(GridField(1, 1, 1.0, 1.0));
  s = step(spec, SchemeKind::GradientDescent, 1.0, s);
  CHECK(s.u[0] == doctest::Approx(0.75));
}

TEST_CASE("non-finite updates raise BlowUp with the iteration") {
  const ProblemSpec spec = single_cell(1.0, 0.0);
  SolverState s = SolverState::at_rest(GridField(1, 1, 1.0, 1.0));
  s = step(spec, SchemeKind::GradientDescent, 0.5, s);
  auto nan_grad = [](const GridField& u) { return GridField::zeros_like(u, NAN); };
  try {
    step(spec, SchemeKind::Accel2, 0.5, s, nan_grad);
    FAIL("expected BlowUp");
  } catch (const BlowUp& e) {
    CHECK(e.iteration() == 2);
  }
  CHECK_THROWS_AS(SolverState::with_increment(GridField(2, 2, 1.0), GridField(2, 3, 1.0)), ShapeError);
}

TEST_CASE("remap examples") {
  const DampedStep zero = remap_first_to_second(0.0, 0.7);
  CHECK(zero.damping == 0.0);
  CHECK(zero.dt == 0.7);
  const DampedStep s = remap_first_to_second(2.0, 0.5);
  CHECK(s.dt == doctest::Approx(0.5 / std::sqrt(1.5)).epsilon(1e-14));
  CHECK(s.damping == doctest::Approx(2.0 / std::sqrt(1.5)).epsilon(1e-14));
  CHECK(s.dt == doctest::Approx(0.408248).epsilon(1e-6));
  CHECK(s.damping == doctest::Approx(1.632993).epsilon(1e-6));

  const auto back0 = remap_second_to_first(0.0, 0.3);
  REQUIRE(back0);
  CHECK(back0->damping == 0.0);
  CHECK(back0->dt == 0.3);
  CHECK_FALSE(remap_second_to_first(4.0, 0.5).has_value());
  CHECK_FALSE(remap_second_to_first(5.0, 0.5).has_value());
  const auto back = remap_second_to_first(1.632993, 0.408248);
  REQUIRE(back);
  CHECK(std::abs(back->damping - 2.0) <= 1e-6);
  CHECK(std::abs(back->dt - 0.5) <= 1e-6);
}

TEST_CASE("remaps are mutually inverse") {
  for (double a1 : {0.1, 1.0, 7.0, 40.0}) {
    for (double dt1 : {0.01, 0.2, 0.25}) {
      const DampedStep s = remap_first_to_second(a1, dt1);
      CHECK(s.damping * s.dt < 2.0);
      const auto back = remap_second_to_first(s.damping, s.dt);
      REQUIRE(back);
      CHECK(back->damping == doctest::Approx(a1).epsilon(1e-13));
      CHECK(back->dt == doctest::Approx(dt1).epsilon(1e-13));
    }
  }
}

TEST_CASE("damping regimes") {
  CHECK(classify_damping(1.0, 1.0) == DampingRegime::Underdamped);
  CHECK(classify_damping(4.0, 0.5) == DampingRegime::CriticalGD);
  CHECK(classify_damping(3.0, 1.0) == DampingRegime::Resisted);
  CHECK(std::string(regime_name(DampingRegime::Resisted)) == "resisted");
  CHECK(damping_stays_underdamped(2.0, 8.0));
  CHECK_FALSE(damping_stays_underdamped(3.0, 8.0));

  const IncrementWeights w = increment_weights(SchemeKind::Accel2, 1e9, 1.0);
  CHECK(std::abs(w.previous + 1.0) <= 1e-8);
  CHECK(std::abs(w.gradient) <= 1e-8);
}

TEST_CASE("critical damping reduces the second-order scheme to gradient descent") {
  const double dt2 = 0.3;
  const double a2 = 2.0 / dt2;
  REQUIRE(classify_damping(a2, dt2) == DampingRegime::CriticalGD);
  const ProblemSpec spec = ProblemSpec::denoising(oracle::random_field(8, 8, 0.125, 3), 5.0, Quadratic{0.01}, a2);
  const SolverState s =
      SolverState::with_increment(oracle::random_field(8, 8, 0.125, 4), oracle::random_field(8, 8, 0.125, 5));
  const SolverState accel = step(spec, SchemeKind::Accel2, dt2, s);
  const SolverState gd = step(spec, SchemeKind::GradientDescent, dt2 * dt2 / 2.0, s);
  CHECK(oracle::max_abs_diff(accel.u, gd.u) <= 1e-13);
}

TEST_CASE("first-order trajectories equal remapped second-order trajectories") {
  for (auto [a1, dt1] : {std::pair{0.5, 0.02}, {10.0, 0.04}, {100.0, 0.1}, {250.0, 0.04}}) {
    REQUIRE(a1 * dt1 <= 10.0);
    const DampedStep s2 = remap_first_to_second(a1, dt1);
    const GridField g = oracle::random_field(6, 6, 1.0 / 6, 9);
    ProblemSpec p1 = ProblemSpec::denoising(g, 10.0, Quadratic{0.02}, a1);
    ProblemSpec p2 = p1;
    p2.damping = s2.damping;
    SolverState x1 = SolverState::at_rest(GridField::zeros_like(g));
    SolverState x2 = x1;
    for (int n = 0; n < 100; ++n) {
      x1 = step(p1, SchemeKind::Accel1, dt1, x1);
      x2 = step(p2, SchemeKind::Accel2, s2.dt, x2);
    }
    CHECK(oracle::max_abs_diff(x1.u, x2.u) <= 1e-10);
  }
}

TEST_CASE("implicit-fidelity steps match explicit steps under parameter substitution") {
  const double lambda = 7.0, c = 0.05, a = 3.0, dt = 0.15;
  const ProblemSpec base = quadratic_4x4(lambda, c, a, 21);
  const oracle::QuadraticProblem qp{base.data, lambda, c};
  const GridField u = oracle::random_field(4, 4, 0.25, 22);
  const GridField dp = oracle::random_field(4, 4, 0.25, 23, -0.1, 0.1);
  const SolverState s = SolverState::with_increment(u, dp);

  SUBCASE("gradient descent") {
    const double dt_sub = dt / (1.0 + lambda * dt);
    const SolverState e = step(base, SchemeKind::GradientDescent, dt_sub, s);
    CHECK(oracle::max_abs_diff(e.prev_increment, oracle::implicit_gd(qp, u, dt)) <= 1e-12);
  }
  SUBCASE("first order") {
    ProblemSpec p = base;
    p.damping = a + lambda * dt;
    const SolverState e = step(p, SchemeKind::Accel1, dt, s);
    CHECK(oracle::max_abs_diff(e.prev_increment, oracle::implicit_accel1(qp, u, dp, a, dt)) <= 1e-12);
  }
  SUBCASE("second order") {
    const double scale = std::sqrt(1.0 + 0.5 * lambda * dt * dt);
    ProblemSpec p = base;
    p.damping = (a + lambda * dt) / scale;
    const SolverState e = step(p, SchemeKind::Accel2, dt / scale, s);
    CHECK(oracle::max_abs_diff(e.prev_increment, oracle::implicit_accel2(qp, u, dp, a, dt)) <= 1e-12);
  }
  SUBCASE("semi-implicit") {
    const double scale = std::sqrt(1.0 + 2.0 * lambda * dt * dt / (2.0 + a * dt));
    ProblemSpec p = base;
    p.damping = a * scale;
    const SolverState e = step(p, SchemeKind::SemiImplicit, dt / scale, s);
    CHECK(oracle::max_abs_diff(e.prev_increment, oracle::implicit_semi(qp, u, dp, a, dt)) <= 1e-12);
  }
}
