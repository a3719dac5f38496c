#include "rpde/solver.hpp"

#include <cmath>

namespace rpde::solver {

void SolverConfig::validate(double r) const {
  if (!(dt > 0.0)) throw ConfigError("solver: dt > 0 required");
  if (!(t_end > 0.0)) throw ConfigError("solver: t_end > 0 required");
  if (r > 0.0) {
    if (dt > r / 2.0 + 1e-12) {
      throw ConfigError("solver: dt <= r/2 required when r > 0");
    }
    const double ratio = r / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
      throw ConfigError("solver: r must be an integer multiple of dt");
    }
  }
  if (n_modes < 1) throw ConfigError("solver: n_modes >= 1 required");
  if (n_quad < 4 * n_modes) throw ConfigError("solver: n_quad >= 4*n_modes");
}

Trajectory::Trajectory(double r, double dt, const spectral::Grid& grid)
    : r_(r), dt_(dt), grid_(grid) {
  n_hist_ = (r > 0.0) ? int(std::llround(r / dt)) : 0;
  states_.reserve(1024);
  derivs_.reserve(1024);
}

void Trajectory::append_history(const Eigen::VectorXd& state) {
  states_.push_back(state);
  derivs_.emplace_back();  // no stored derivative inside the history segment
}

void Trajectory::append(const Eigen::VectorXd& state,
                        const Eigen::VectorXd& rhs) {
  states_.push_back(state);
  derivs_.push_back(rhs);
}

Eigen::VectorXd Trajectory::interpolate(double t) const {
  const double t0 = -r_;
  const double t1 = t_front();
  if (t < t0 - 1e-9 * dt_ || t > t1 + 1e-9 * dt_) {
    throw HistoryUnderflowError("interpolate: t outside trajectory support");
  }
  t = std::clamp(t, t0, t1);
  const int n = n_nodes();
  int i = std::clamp(int(std::floor((t - t0) / dt_)), 0, n - 2);
  const double s = (t - time_at(i)) / dt_;
  if (s == 0.0) return states_[i];

  if (i >= n_hist_ && derivs_[i].size() > 0 && derivs_[i + 1].size() > 0) {
    // Cubic Hermite with the stored right-hand sides.
    const double s2 = s * s, s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * states_[i] +
           (s3 - 2.0 * s2 + s) * dt_ * derivs_[i] +
           (-2.0 * s3 + 3.0 * s2) * states_[i + 1] +
           (s3 - s2) * dt_ * derivs_[i + 1];
  }

  // History segment: cubic Lagrange on a 4-node window (order-limited when
  // fewer nodes exist).
  const int count = std::min(4, n);
  const int lo = std::clamp(i - 1, 0, n - count);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(states_[0].size());
  for (int a = 0; a < count; ++a) {
    double w = 1.0;
    for (int b = 0; b < count; ++b) {
      if (a == b) continue;
      w *= (t - time_at(lo + b)) / (dt_ * double(a - b));
    }
    out += w * states_[lo + a];
  }
  return out;
}

Eigen::VectorXd galerkin_rhs(double t, const Eigen::VectorXd& state,
                             const HistoryLookup& history,
                             const model::ProblemSpec& p,
                             const spectral::Grid& grid) {
  const int nq = grid.n_quad();
  Eigen::VectorXd total = Eigen::VectorXd::Zero(nq + 1);

  if (p.f.value) {
    const Eigen::VectorXd vals = grid.synthesis() * state;
    for (int i = 0; i <= nq; ++i) total[i] += p.f.value(vals[i]);
  }

  if (p.g.value && p.g.m > 0) {
    const int m = p.g.m;
    Eigen::MatrixXd delayed(nq + 1, m);
    for (int k = 0; k < m; ++k) {
      const double tq = t - p.delays.r_i[k](t);
      delayed.col(k) = grid.synthesis() * history(tq);
    }
    Eigen::VectorXd v(m);
    for (int i = 0; i <= nq; ++i) {
      v = delayed.row(i).transpose();
      total[i] += p.g.value(v);
    }
  }

  if (p.h.value) {
    for (int i = 0; i <= nq; ++i) total[i] += p.h.value(grid.nodes()[i], t);
  }

  return spectral::analyze(total, grid).coeffs;
}

namespace {

// phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2, series near 0.
double phi1(double z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 1e-4) return 0.5 + z / 6.0 + z * z / 24.0;
  return (std::expm1(z) - z) / (z * z);
}

void check_finite(const Eigen::VectorXd& u, double t,
                  const spectral::Grid& grid) {
  if (!u.allFinite()) {
    throw DivergenceError("solver: nonfinite state", t,
                          std::numeric_limits<double>::quiet_NaN());
  }
  const double l2 = std::sqrt(u.squaredNorm() * grid.length() / 2.0);
  if (l2 > 1e12) throw DivergenceError("solver: |u|_2 exceeds 1e12", t, l2);
}

}  // namespace

void step(Trajectory& traj, const model::ProblemSpec& p,
          const SolverConfig& cfg, const spectral::Grid& grid) {
  const double dt = cfg.dt;
  const double t_n = traj.t_front();
  const Eigen::VectorXd& u_n = traj.state_at(traj.n_nodes() - 1);
  const Eigen::VectorXd& mu = grid.eigenvalues();

  Eigen::ArrayXd z = (-mu.array()) * dt;
  Eigen::ArrayXd efac = z.exp();
  Eigen::ArrayXd p1(z.size()), p2(z.size());
  for (int j = 0; j < z.size(); ++j) {
    p1[j] = phi1(z[j]);
    p2[j] = phi2(z[j]);
  }

  // Stage 1 reads the stored trajectory; delayed arguments inside the
  // current step window (r = 0 or r_i < dt) read the stage state instead.
  HistoryLookup hist1 = [&](double tq) -> Eigen::VectorXd {
    if (tq <= t_n) return traj.interpolate(tq);
    return u_n;
  };
  const Eigen::VectorXd n1 = galerkin_rhs(t_n, u_n, hist1, p, grid);

  Eigen::VectorXd a =
      (efac * u_n.array() + dt * p1 * n1.array()).matrix();

  HistoryLookup hist2 = [&](double tq) -> Eigen::VectorXd {
    if (tq <= t_n) return traj.interpolate(tq);
    return a;
  };
  const Eigen::VectorXd n2 = galerkin_rhs(t_n + dt, a, hist2, p, grid);

  Eigen::VectorXd u_next =
      (a.array() + dt * p2 * (n2 - n1).array()).matrix();
  check_finite(u_next, t_n + dt, grid);

  const Eigen::VectorXd rhs_next =
      (-mu.array() * u_next.array() + n2.array()).matrix();
  traj.append(u_next, rhs_next);
}

Trajectory begin_trajectory(const model::ProblemSpec& p,
                            const model::HistoryFunction& phi,
                            const SolverConfig& cfg,
                            const spectral::Grid& grid) {
  cfg.validate(p.delays.r);
  Trajectory traj(p.delays.r, cfg.dt, grid);

  // History nodes at -r, ..., -dt, then the t = 0 node with its stored RHS.
  for (int k = 0; k < traj.history_nodes(); ++k) {
    traj.append_history(phi.sample(-p.delays.r + cfg.dt * double(k)));
  }
  Eigen::VectorXd u0 = phi.sample(0.0);
  {
    Trajectory bootstrap(p.delays.r, cfg.dt, grid);
    for (int k = 0; k < traj.history_nodes(); ++k) {
      bootstrap.append_history(traj.state_at(k));
    }
    bootstrap.append_history(u0);
    HistoryLookup hist = [&](double tq) { return bootstrap.interpolate(tq); };
    const Eigen::VectorXd n0 = galerkin_rhs(0.0, u0, hist, p, grid);
    traj.append(u0, (-grid.eigenvalues().array() * u0.array() + n0.array())
                        .matrix());
  }
  return traj;
}

Trajectory solve(const model::ProblemSpec& p, const model::HistoryFunction& phi,
                 const SolverConfig& cfg, const spectral::Grid& grid) {
  Trajectory traj = begin_trajectory(p, phi, cfg, grid);
  const int n_steps = int(std::llround(cfg.t_end / cfg.dt));
  for (int k = 0; k < n_steps; ++k) step(traj, p, cfg, grid);
  return traj;
}

TimeDerivativeReport discrete_time_derivative(const Trajectory& traj) {
  TimeDerivativeReport rep;
  const int n = traj.n_nodes();
  const int i0 = traj.history_nodes();
  if (n - i0 < 3) {
    throw DimensionError("discrete_time_derivative: need >= 3 nodes");
  }
  const double dt = traj.dt();
  const double half_len = traj.grid().length() / 2.0;
  double integral = 0.0;
  double prev_sq = 0.0;
  for (int i = i0; i < n; ++i) {
    Eigen::VectorXd du;
    if (i == i0) {
      du = (traj.state_at(i + 1) - traj.state_at(i)) / dt;
    } else if (i == n - 1) {
      du = (traj.state_at(i) - traj.state_at(i - 1)) / dt;
    } else {
      du = (traj.state_at(i + 1) - traj.state_at(i - 1)) / (2.0 * dt);
    }
    const double l2 = std::sqrt(du.squaredNorm() * half_len);
    if (i > i0) integral += 0.5 * dt * (prev_sq + l2 * l2);
    prev_sq = l2 * l2;
    rep.times.push_back(traj.time_at(i));
    rep.l2_of_du.push_back(l2);
    rep.integral.push_back(integral);
  }
  return rep;
}

}  // namespace rpde::solver
