#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rpde/model.hpp"

using namespace rpde;
using namespace rpde::model;

namespace {
constexpr double kPi = 3.14159265358979323846;

StructureConstants benchmark_constants() {
  StructureConstants sc;
  sc.lambda_diss = 1.0;
  sc.n_diss = 1.0;
  sc.gamma = 3.0;
  sc.alpha = 3.0;
  sc.a0 = 3.0;
  sc.beta = 1.0;
  sc.b0 = sc.b0p = sc.b1 = sc.b1p = 0.5;
  return sc;
}
}  // namespace

TEST_CASE("critical exponents") {
  // gamma=3, beta=1: p* = 1*2/2 = 1; alpha=3 makes q* = 6.
  const auto e = critical_exponents(3.0, 1.0, 3.0);
  CHECK(e.p_star == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e.q_star == doctest::Approx(6.0).epsilon(1e-15));
  // gamma=5, beta=2: p* = 2*4/3 = 8/3; alpha=1 -> q* = max(8/3, 2, 4) = 4.
  const auto e2 = critical_exponents(5.0, 2.0, 1.0);
  CHECK(e2.p_star == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  CHECK(e2.q_star == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS(critical_exponents(3.0, 3.0, 1.0));
  CHECK_THROWS(critical_exponents(0.5, 0.2, 1.0));
}

TEST_CASE("q_gamma") { CHECK(q_gamma(8.0, 3.0) == 10.0); }

TEST_CASE("structure constants validation") {
  StructureConstants sc = benchmark_constants();
  CHECK_NOTHROW(sc.validate());
  sc.beta = 3.0;  // beta < gamma violated
  CHECK_THROWS_AS(sc.validate(), StructureViolationError);
  sc = benchmark_constants();
  sc.gamma = 1.0;
  CHECK_THROWS_AS(sc.validate(), StructureViolationError);
}

TEST_CASE("check_f accepts the cubic benchmark reaction") {
  Reaction f;
  f.value = [](double s) { return -s * s * s; };
  f.deriv = [](double s) { return -3.0 * s * s; };
  const auto rep = check_f(f, benchmark_constants(), 10.0);
  CHECK(rep.f0_ok);
  CHECK(rep.f1_ok);
  CHECK(rep.worst_f0_margin >= 0.0);
}

TEST_CASE("check_f rejects a sign-flipped reaction") {
  Reaction f;
  f.value = [](double s) { return s * s * s; };
  const auto rep = check_f(f, benchmark_constants(), 10.0);
  CHECK_FALSE(rep.f0_ok);
  CHECK(rep.failed_condition == "F0");
  CHECK_THROWS_AS(check_f(f, benchmark_constants(), 10.0, 2001, true),
                  StructureViolationError);
}

TEST_CASE("check_f uses finite differences when no derivative given") {
  Reaction f;
  f.value = [](double s) { return -s * s * s; };
  const auto rep = check_f(f, benchmark_constants(), 5.0);
  CHECK(rep.f1_ok);
}

TEST_CASE("check_g accepts linear and sinsum couplings") {
  StructureConstants sc = benchmark_constants();
  DelayCoupling g;
  g.m = 2;
  g.value = [](const Eigen::VectorXd& v) { return 0.3 * v.sum(); };
  sc.b0 = 0.3 * std::sqrt(2.0);
  const auto rep = check_g(g, sc, 5.0);
  CHECK(rep.g1_ok);
  CHECK(rep.effective_b1p > 0.0);

  DelayCoupling gs;
  gs.m = 2;
  gs.value = [](const Eigen::VectorXd& v) { return v.array().sin().sum(); };
  sc.b0 = std::sqrt(2.0);
  const auto rep2 = check_g(gs, sc, 5.0);
  CHECK(rep2.g1_ok);
  // gradient sup in max-norm form: |grad| <= sqrt(m), divided by (1 + 1)
  CHECK(rep2.effective_b0p <= 1.1 * std::sqrt(2.0) / 2.0 + 1e-6);
}

TEST_CASE("check_g flags a coupling that out-grows its constants") {
  StructureConstants sc = benchmark_constants();
  sc.b0 = 0.01;
  DelayCoupling g;
  g.m = 1;
  g.value = [](const Eigen::VectorXd& v) { return v.sum(); };
  const auto rep = check_g(g, sc, 5.0);
  CHECK_FALSE(rep.g1_ok);
  CHECK_THROWS_AS(check_g(g, sc, 5.0, 33, true), StructureViolationError);
}

TEST_CASE("delay spec validation") {
  DelaySpec d;
  d.m = 1;
  d.r = 1.0;
  d.r_i = {[](double) { return 0.5; }};
  CHECK_NOTHROW(d.validate());
  d.r_i = {[](double t) { return 0.5 + t; }};  // escapes [0, r]
  CHECK_THROWS_AS(d.validate(), StructureViolationError);
  d.r_i.clear();
  CHECK_THROWS_AS(d.validate(), StructureViolationError);
}

TEST_CASE("effective_a1 fallback") {
  ProblemSpec p;
  p.constants = benchmark_constants();
  p.f.value = [](double s) { return -s * s * s + 1.0; };
  CHECK(p.effective_a1() == doctest::Approx(7.0).epsilon(1e-15));
  p.constants.a1 = 4.0;
  CHECK(p.effective_a1() == 4.0);
}

TEST_CASE("history interpolation is exact for cubic-in-time data") {
  spectral::Grid grid(kPi, 8, 64);
  auto phi = [](double s, double x) {
    return (1.0 + s + 0.5 * s * s - 0.25 * s * s * s) * std::sin(x) +
           0.3 * s * std::sin(2.0 * x);
  };
  HistoryFunction h(phi, 2.0, 33, grid);
  CHECK(h.r() == doctest::Approx(2.0).epsilon(1e-15));
  for (double t : {-1.97, -1.5, -0.77, -0.3, -0.01, 0.0, -2.0}) {
    const Eigen::VectorXd c = h.sample(t);
    const double poly = 1.0 + t + 0.5 * t * t - 0.25 * t * t * t;
    CHECK(c[0] == doctest::Approx(poly).epsilon(1e-11));
    CHECK(c[1] == doctest::Approx(0.3 * t).epsilon(1e-10));
    for (int j = 2; j < 8; ++j) CHECK(std::abs(c[j]) < 1e-12);
  }
  CHECK_THROWS(h.sample(0.5));
  CHECK_THROWS(h.sample(-2.5));
  CHECK(sample_history(h, -1.0)[0] ==
        doctest::Approx(h.sample(-1.0)[0]).epsilon(1e-15));
}

TEST_CASE("history with r = 0 stores a single column") {
  spectral::Grid grid(kPi, 4, 32);
  HistoryFunction h([](double, double x) { return std::sin(x); }, 0.0, 65,
                    grid);
  CHECK(h.times().size() == 1);
  CHECK(h.sample(0.0)[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("wrapped history constructor validates shapes") {
  Eigen::VectorXd times(2);
  times << -1.0, 0.0;
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(4, 3);
  CHECK_THROWS_AS(HistoryFunction(times, coeffs), DimensionError);
  Eigen::VectorXd bad(2);
  bad << -1.0, 0.5;
  CHECK_THROWS(HistoryFunction(bad, Eigen::MatrixXd::Zero(4, 2)));
}
