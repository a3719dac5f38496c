#include <algorithm>
#include <cmath>
#include <sstream>

#include "rpde/harness.hpp"

namespace rpde::harness {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Second-order central finite differences on n interior nodes, diagonalized
// in the discrete sine basis: same time loop as the spectral solver but with
// the FD eigenvalues (4/h^2) sin^2(j pi / (2n)).
struct FdScheme {
  int n;  // grid divisions; interior nodes 1..n-1
  double length;
  double h;
  Eigen::VectorXd nodes;        // interior x_i
  Eigen::VectorXd eigenvalues;  // FD eigenvalues, j = 1..n-1
  Eigen::MatrixXd basis;        // B_ij = sin(j pi i / n), symmetric

  explicit FdScheme(int n_div, double len) : n(n_div), length(len) {
    h = length / double(n);
    nodes.resize(n - 1);
    eigenvalues.resize(n - 1);
    basis.resize(n - 1, n - 1);
    for (int i = 1; i < n; ++i) {
      nodes[i - 1] = h * double(i);
      const double s = std::sin(double(i) * kPi / (2.0 * double(n)));
      eigenvalues[i - 1] = 4.0 / (h * h) * s * s;
      for (int j = 1; j < n; ++j) {
        basis(i - 1, j - 1) = std::sin(double(j) * kPi * double(i) / double(n));
      }
    }
  }

  Eigen::VectorXd to_values(const Eigen::VectorXd& c) const {
    return basis * c;
  }
  Eigen::VectorXd to_coeffs(const Eigen::VectorXd& v) const {
    return (2.0 / double(n)) * (basis * v);
  }
  double l2(const Eigen::VectorXd& c) const {
    return std::sqrt(c.squaredNorm() * length / 2.0);
  }
};

double phi1(double z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 1e-4) return 0.5 + z / 6.0 + z * z / 24.0;
  return (std::expm1(z) - z) / (z * z);
}

// Uniform-grid node store with cubic Lagrange dense output (the oracle does
// not keep derivatives; 4-node windows are accurate enough at dt^4).
struct FdTrajectory {
  double t0;
  double dt;
  std::vector<Eigen::VectorXd> states;

  double t_front() const { return t0 + dt * double(states.size() - 1); }

  Eigen::VectorXd interpolate(double t) const {
    const int n = int(states.size());
    t = std::clamp(t, t0, t_front());
    int i = std::clamp(int(std::floor((t - t0) / dt)), 0, n - 2);
    const int count = std::min(4, n);
    const int lo = std::clamp(i - 1, 0, n - count);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(states[0].size());
    for (int a = 0; a < count; ++a) {
      double w = 1.0;
      for (int b = 0; b < count; ++b) {
        if (a == b) continue;
        w *= (t - (t0 + dt * double(lo + b))) / (dt * double(a - b));
      }
      out += w * states[lo + a];
    }
    return out;
  }
};

Eigen::VectorXd fd_nonlinear(double t, const Eigen::VectorXd& coeffs,
                             const std::function<Eigen::VectorXd(double)>& hist,
                             const model::ProblemSpec& p, const FdScheme& fd) {
  const int ni = fd.n - 1;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(ni);
  if (p.f.value) {
    const Eigen::VectorXd vals = fd.to_values(coeffs);
    for (int i = 0; i < ni; ++i) total[i] += p.f.value(vals[i]);
  }
  if (p.g.value && p.g.m > 0) {
    const int m = p.g.m;
    Eigen::MatrixXd delayed(ni, m);
    for (int k = 0; k < m; ++k) {
      delayed.col(k) = fd.to_values(hist(t - p.delays.r_i[k](t)));
    }
    Eigen::VectorXd v(m);
    for (int i = 0; i < ni; ++i) {
      v = delayed.row(i).transpose();
      total[i] += p.g.value(v);
    }
  }
  if (p.h.value) {
    for (int i = 0; i < ni; ++i) total[i] += p.h.value(fd.nodes[i], t);
  }
  return fd.to_coeffs(total);
}

}  // namespace

OracleResult run_oracle(const RunConfig& cfg, int fd_nodes, double threshold) {
  OracleResult res;
  RunConfig local = cfg;
  local.solver.t_end = std::min(cfg.solver.t_end, 2.0);
  const auto& p = local.problem;

  const spectral::Grid grid = local.make_grid();
  const model::HistoryFunction history = local.make_history(grid);
  const FdScheme fd(fd_nodes, p.length);

  const double dt = local.solver.dt;
  const int n_steps = int(std::llround(local.solver.t_end / dt));
  const int n_hist = (p.delays.r > 0.0) ? int(std::llround(p.delays.r / dt)) : 0;

  // Spectral reference run.
  solver::Trajectory spec_traj =
      solver::solve(p, history, local.solver, grid);

  // FD run: seed history by sampling phi at the FD nodes directly.
  FdTrajectory fdt;
  fdt.t0 = -p.delays.r;
  fdt.dt = dt;
  const auto sample_phi_fd = [&](double s) {
    // Evaluate the stored spectral history at the FD interior nodes, then
    // project onto the FD basis.
    const Eigen::VectorXd c = history.sample(s);
    Eigen::VectorXd vals(fd.n - 1);
    for (int i = 0; i < fd.n - 1; ++i) {
      double acc = 0.0;
      for (int j = 0; j < c.size(); ++j) {
        acc += c[j] * std::sin(double(j + 1) * kPi * fd.nodes[i] / p.length);
      }
      vals[i] = acc;
    }
    return fd.to_coeffs(vals);
  };
  for (int k = 0; k <= n_hist; ++k) {
    fdt.states.push_back(sample_phi_fd(-p.delays.r + dt * double(k)));
  }

  const Eigen::ArrayXd z = (-fd.eigenvalues.array()) * dt;
  const Eigen::ArrayXd efac = z.exp();
  Eigen::ArrayXd p1(z.size()), p2(z.size());
  for (int j = 0; j < z.size(); ++j) {
    p1[j] = phi1(z[j]);
    p2[j] = phi2(z[j]);
  }

  double worst = 0.0;
  double worst_t = 0.0;
  try {
    for (int k = 0; k < n_steps; ++k) {
      const double t_n = dt * double(k);
      const Eigen::VectorXd& u_n = fdt.states.back();
      std::function<Eigen::VectorXd(double)> hist1 =
          [&](double tq) -> Eigen::VectorXd {
        if (tq <= t_n) return fdt.interpolate(tq);
        return u_n;
      };
      const Eigen::VectorXd n1 = fd_nonlinear(t_n, u_n, hist1, p, fd);
      const Eigen::VectorXd a =
          (efac * u_n.array() + dt * p1 * n1.array()).matrix();
      std::function<Eigen::VectorXd(double)> hist2 =
          [&](double tq) -> Eigen::VectorXd {
        if (tq <= t_n) return fdt.interpolate(tq);
        return a;
      };
      const Eigen::VectorXd n2 = fd_nonlinear(t_n + dt, a, hist2, p, fd);
      const Eigen::VectorXd u_next =
          (a.array() + dt * p2 * (n2 - n1).array()).matrix();
      if (!u_next.allFinite() || fd.l2(u_next) > 1e12) {
        throw DivergenceError("oracle: finite-difference run diverged",
                              t_n + dt, fd.l2(u_next));
      }
      fdt.states.push_back(u_next);

      // Compare |u|_2 at the new node.
      const int spec_i = spec_traj.history_nodes() + k + 1;
      const double spec_l2 =
          std::sqrt(spec_traj.state_at(spec_i).squaredNorm() * p.length / 2.0);
      const double fd_l2 = fd.l2(u_next);
      const double denom = std::max(spec_l2, 1e-12);
      const double rel = std::abs(spec_l2 - fd_l2) / denom;
      if (rel > worst) {
        worst = rel;
        worst_t = t_n + dt;
      }
    }
  } catch (const DivergenceError& e) {
    res.flagged = true;
    res.rel_sup_diff = std::numeric_limits<double>::infinity();
    res.diagnosis = e.what();
    return res;
  }

  res.rel_sup_diff = worst;
  res.flagged = worst > threshold;
  std::ostringstream diag;
  diag << "sup relative |u|_2 difference " << worst << " at t = " << worst_t
       << " (threshold " << threshold << ", fd nodes " << fd_nodes << ")";
  res.diagnosis = diag.str();
  return res;
}

}  // namespace rpde::harness
