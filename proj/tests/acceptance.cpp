// Acceptance suite: one pass/fail line per criterion, exit nonzero on any
// failure. Criteria mirror the project requirements; tolerances are pinned.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "rpde/harness.hpp"

using namespace rpde;

namespace {
constexpr double kPi = 3.14159265358979323846;
int failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %2d [%s] %s%s%s\n", idx, pass ? "PASS" : "FAIL", name,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++failures;
}

std::string benchmark_text(double t_end) {
  std::ostringstream s;
  s << "[domain]\nL = 3.14159265358979324\n"
    << "[f]\nkind = cubic\nlambda = 1\nN = 1\ngamma = 3\nalpha = 3\na0 = 3\n"
    << "[g]\nkind = linear:0.5\nbeta = 1\nseparated = true\n"
    << "[delays]\nr = 1\nr1 = const:1\n"
    << "[h]\nkind = zero\n"
    << "[history]\nphi = mode:1:0.5\n"
    << "[solver]\ndt = 1e-3\nT = " << t_end
    << "\nn_modes = 32\nn_quad = 128\n"
    << "[estimates]\nq = 8\n";
  return s.str();
}

double l2(const Eigen::VectorXd& c, double length) {
  return std::sqrt(c.squaredNorm() * length / 2.0);
}

}  // namespace

int main() {
  const auto t_start = std::chrono::steady_clock::now();

  // 1. Inequality constants for (kappa = 1/4, vartheta = 1).
  {
    const auto k = inequality::decay_constants(0.25, 1.0, {1.0, 6.0}, 1.0);
    const bool pass = std::abs(k.mu - 4.0 / 3.0) < 1e-12 &&
                      std::abs(k.c - 4.0 / 3.0) < 1e-12 &&
                      std::abs(k.eta - 3.5) < 1e-12 &&
                      std::abs(k.m_big - 4.0 / std::sqrt(6.0)) < 1e-12;
    std::ostringstream d;
    d << "mu=" << k.mu << " c=" << k.c << " eta=" << k.eta
      << " M=" << k.m_big;
    report(1, "inequality constants mu=c=4/3 eta=7/2 M=4/sqrt(6)", pass,
           d.str());
  }

  const harness::RunConfig bench = harness::parse_config(benchmark_text(20.0));
  const spectral::Grid grid = bench.make_grid();
  const model::HistoryFunction history = bench.make_history(grid);

  // 2. Benchmark constant chain.
  {
    const auto ch = estimates::build_lq_chain(bench.problem, 8.0);
    const bool pass = std::abs(ch.eps0 - 1.0 / 12.0) < 1e-12 &&
                      std::abs(ch.a_eps0 - 6.0) < 1e-12 &&
                      std::abs(ch.sigma - 8.0) < 1e-12 &&
                      std::abs(ch.q_prime - 33.0 / 7.0) < 1e-12 &&
                      std::abs(ch.kappa_bound - 1.0 / 18.0) < 1e-12 &&
                      ch.kappa_bound <= 0.25;
    std::ostringstream d;
    d << "eps0=" << ch.eps0 << " a_eps0=" << ch.a_eps0
      << " sigma=" << ch.sigma << " q'=" << ch.q_prime
      << " kappa=" << ch.kappa_bound;
    report(2, "constant chain eps0=1/12 a=6 sigma=8 q'=33/7 kappa=1/18", pass,
           d.str());
  }

  // 3. Solver correctness: heat closed form, DDE surrogate, order 2.
  {
    bool pass = true;
    std::ostringstream d;
    // (a) pure heat
    model::ProblemSpec heat;
    heat.length = kPi;
    spectral::Grid hgrid(kPi, 8, 64);
    model::HistoryFunction hphi(
        [](double, double x) { return std::sin(x); }, 0.0, 1, hgrid);
    solver::SolverConfig hcfg;
    hcfg.dt = 1e-3;
    hcfg.t_end = 2.0;
    hcfg.n_modes = 8;
    hcfg.n_quad = 64;
    const auto htraj = solver::solve(heat, hphi, hcfg, hgrid);
    double worst_a = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
      const int i = htraj.history_nodes() + int(std::llround(t / hcfg.dt));
      const double err = std::abs(l2(htraj.state_at(i), kPi) -
                                  std::exp(-t) * std::sqrt(kPi / 2.0));
      worst_a = std::max(worst_a, err);
    }
    pass = pass && worst_a < 1e-6;
    d << "heat err=" << worst_a;

    // (b) scalar DDE surrogate y' = -y(t-1), y = 1 on [-1, 0]
    model::ProblemSpec dde;
    dde.length = 1e6;
    dde.g.m = 1;
    dde.g.value = [](const Eigen::VectorXd& v) { return -v.sum(); };
    dde.delays.m = 1;
    dde.delays.r = 1.0;
    dde.delays.r_i = {[](double) { return 1.0; }};
    spectral::Grid dgrid(1e6, 1, 8);
    model::HistoryFunction dphi(
        [](double, double x) { return std::sin(kPi * x / 1e6); }, 1.0, 5,
        dgrid);
    solver::SolverConfig dcfg;
    dcfg.dt = 0.01;
    dcfg.t_end = 2.0;
    dcfg.n_modes = 1;
    dcfg.n_quad = 8;
    const auto dtraj = solver::solve(dde, dphi, dcfg, dgrid);
    double worst_b = 0.0;
    for (int step = 0; step <= 200; ++step) {
      const double t = 0.01 * double(step);
      const double exact =
          t <= 1.0 ? 1.0 - t : 1.0 - t + 0.5 * (t - 1.0) * (t - 1.0);
      worst_b = std::max(
          worst_b,
          std::abs(dtraj.state_at(dtraj.history_nodes() + step)[0] - exact));
    }
    pass = pass && worst_b < 1e-6;
    d << " dde err=" << worst_b;

    // (c) dt-halving ratio on the nonlinear benchmark
    auto run_dt = [&](double dt) {
      harness::RunConfig c = harness::parse_config(benchmark_text(1.0));
      c.solver.dt = dt;
      const spectral::Grid g2 = c.make_grid();
      const auto tr =
          solver::solve(c.problem, c.make_history(g2), c.solver, g2);
      return tr.state_at(tr.n_nodes() - 1).eval();
    };
    const Eigen::VectorXd ref = run_dt(3.125e-4);
    const double ratio =
        (run_dt(5e-3) - ref).norm() / (run_dt(2.5e-3) - ref).norm();
    pass = pass && ratio > 3.2 && ratio < 4.8;
    d << " dt ratio=" << ratio;
    report(3, "solver: heat 1e-6, DDE surrogate 1e-6, order-2 ratio", pass,
           d.str());
  }

  // Shared benchmark trajectory for criteria 4, 5, 6, 8.
  const auto chain = estimates::build_lq_chain(bench.problem, 8.0);
  const auto phi = estimates::phi_norms(history, 8.0, grid);
  const auto traj =
      solver::solve(bench.problem, history, bench.solver, grid);

  // 4. Headline envelope domination to T = 20.
  {
    const auto ie = estimates::integrated_envelopes(bench.problem, chain);
    const auto rep_lq = estimates::check_envelope(
        traj,
        [&](const spectral::SpectralField& u) {
          return std::pow(spectral::lq_norm(u, 8.0, grid), 8.0);
        },
        [&](double t) { return estimates::lq_envelope(chain, t, phi.lq_q); },
        "lq_q", 1e-6, 1e-12, 1);
    const auto rep_h1 = estimates::check_envelope(
        traj,
        [&](const spectral::SpectralField& u) {
          return std::pow(spectral::h1_norm(u, grid), 2.0);
        },
        [&](double t) { return ie.h1.value(t, phi); }, "h1_sq", 1e-6, 1e-12,
        1);
    bool windows_ok = true;
    std::ostringstream d;
    for (double t : {5.0, 10.0}) {
      double acc = 0.0;
      const int i0 = traj.history_nodes() + int(std::llround(t / 1e-3));
      double prev =
          std::pow(spectral::h2_norm(traj.field_at(i0), grid), 2.0);
      for (int i = i0 + 1; i <= i0 + 1000; ++i) {
        const double cur =
            std::pow(spectral::h2_norm(traj.field_at(i), grid), 2.0);
        acc += 0.5e-3 * (prev + cur);
        prev = cur;
      }
      windows_ok = windows_ok && acc <= ie.e2(t, phi);
    }
    const bool pass =
        rep_lq.violations == 0 && rep_h1.violations == 0 && windows_ok;
    d << "lq violations=" << rep_lq.violations
      << " h1 violations=" << rep_h1.violations << " e2 windows "
      << (windows_ok ? "ok" : "violated");
    report(4, "envelope domination at T=20 (lq_q, h1, e2 windows)", pass,
           d.str());
  }

  // 5. Energy dissipation with g = h = 0, f = -s^3.
  {
    model::ProblemSpec p;
    p.length = kPi;
    p.f.value = [](double s) { return -s * s * s; };
    spectral::Grid g5(kPi, 16, 64);
    model::HistoryFunction phi5(
        [](double, double x) { return std::sin(x) + 0.3 * std::sin(2.0 * x); },
        0.0, 1, g5);
    solver::SolverConfig c5;
    c5.dt = 1e-3;
    c5.t_end = 5.0;
    c5.n_modes = 16;
    c5.n_quad = 64;
    const auto t5 = solver::solve(p, phi5, c5, g5);
    const double u0 = l2(t5.state_at(t5.history_nodes()), kPi);
    const double mu1 = p.mu1();
    double worst = 0.0;
    for (int i = t5.history_nodes(); i < t5.n_nodes(); ++i) {
      const double t = t5.time_at(i);
      const double excess =
          l2(t5.state_at(i), kPi) - std::exp(-mu1 * t) * u0;
      worst = std::max(worst, excess);
    }
    std::ostringstream d;
    d << "worst excess=" << worst;
    report(5, "dissipation |u|_2 <= e^{-mu1 t}|u(0)|_2 + 1e-6", worst <= 1e-6,
           d.str());
  }

  // 6. L-infinity ball consistency.
  {
    const auto ball = estimates::linf_ball(bench.problem);
    bool pass = phi.linf <= ball.rho_star;
    double worst = -1e300;
    for (int i = traj.history_nodes(); i < traj.n_nodes(); i += 10) {
      const double v = spectral::linf_norm(traj.field_at(i), grid);
      worst = std::max(worst, v - (phi.linf + ball.rho_star));
    }
    pass = pass && worst <= 1e-9;
    const auto inv =
        estimates::eventual_invariance_check(traj, ball, phi.linf, 0.0);
    pass = pass && inv.applicable && inv.entered && std::isfinite(inv.t0);
    bool trend = true;
    for (double q : {8.0, 16.0, 32.0, 64.0, 128.0}) {
      const auto ch = estimates::build_lq_chain(bench.problem, q);
      trend = trend &&
              std::pow(ch.rho_q, 1.0 / q) <= ball.rho_star * 1.05;
    }
    pass = pass && trend;
    std::ostringstream d;
    d << "rho*=" << ball.rho_star << " worst excess=" << worst
      << " t0=" << inv.t0 << " rho_q^{1/q} trend "
      << (trend ? "ok" : "violated");
    report(6, "L-infinity ball, eventual invariance, rho_q^{1/q} trend", pass,
           d.str());
  }

  // 7. Oracle equivalence at T = 1.
  {
    harness::RunConfig c = harness::parse_config(benchmark_text(1.0));
    const auto res = harness::run_oracle(c, 512, 1e-3);
    report(7, "spectral vs finite-difference sup |u|_2 within 1e-3",
           !res.flagged, res.diagnosis);
  }

  // 8. H2 boundedness + calibrated envelope on a held-out trajectory.
  {
    double h2_max = 0.0;
    for (int i = traj.history_nodes(); i < traj.n_nodes(); i += 10) {
      h2_max =
          std::max(h2_max, spectral::h2_norm(traj.field_at(i), grid));
    }
    const bool bounded = std::isfinite(h2_max) && h2_max < 1e6;

    const auto e1 = estimates::h1_envelope(bench.problem, chain);
    const auto env =
        estimates::h2_envelope(bench.problem, chain, e1, traj, phi, 8.0);
    model::HistoryFunction phi2(
        [](double, double x) { return 0.25 * std::sin(2.0 * x); }, 1.0, 65,
        grid);
    solver::SolverConfig c8 = bench.solver;
    c8.t_end = 10.0;
    const auto held = solver::solve(bench.problem, phi2, c8, grid);
    const auto n2 = estimates::phi_norms(phi2, 8.0, grid);
    const auto rep = estimates::check_envelope(
        held,
        [&](const spectral::SpectralField& u) {
          return std::pow(spectral::h2_norm(u, grid), 2.0);
        },
        [&](double t) { return env.value(t, n2); }, "h2_sq", 1e-6, 1e-12, 1);
    std::ostringstream d;
    d << "sup |Du|=" << h2_max << " held-out violations=" << rep.violations;
    report(8, "H2 bounded on [0,20]; calibrated envelope holds on held-out",
           bounded && rep.violations == 0, d.str());
  }

  // 9. Out-of-theory guard before simulation.
  {
    bool pass = true;
    for (const char* q : {"q = 6", "q = 4"}) {
      std::string text = benchmark_text(20.0);
      const auto pos = text.find("q = 8");
      text.replace(pos, 5, q);
      try {
        harness::parse_config(text);
        pass = false;
      } catch (const OutOfTheoryError&) {
      }
    }
    report(9, "q = 6 and q = 4 rejected with out-of-theory error", pass, "");
  }

  // 10. Determinism of simulate.
  {
    harness::RunConfig c = harness::parse_config(benchmark_text(2.0));
    std::ostringstream a, b, log;
    harness::run_simulate(c, a, true, log);
    harness::run_simulate(c, b, true, log);
    std::ostringstream d;
    d << a.str().size() << " bytes";
    report(10, "two simulate runs produce byte-identical CSV",
           a.str() == b.str() && !a.str().empty(), d.str());
  }

  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
  std::printf("%s (%d failure%s, %.1f s)\n",
              failures == 0 ? "ALL CRITERIA PASS" : "CRITERIA FAILED",
              failures, failures == 1 ? "" : "s", elapsed);
  return failures == 0 ? 0 : 1;
}
