#ifndef RPDE_SOLVER_HPP_
#define RPDE_SOLVER_HPP_

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rpde/model.hpp"
#include "rpde/spectral.hpp"

namespace rpde::solver {

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int n_modes = 32;
  int n_quad = 128;
  bool dealias = true;  // nonlinear products on the padded quadrature grid

  void validate(double r) const;
};

// Dense numerical solution on the uniform grid -r, -r+dt, ..., t_end.
// Nodes on [-r, 0] carry the projected history; nodes at t >= 0 also store
// the right-hand side for Hermite dense output.
class Trajectory {
 public:
  Trajectory(double r, double dt, const spectral::Grid& grid);

  double dt() const { return dt_; }
  double r() const { return r_; }
  const spectral::Grid& grid() const { return grid_; }
  int n_nodes() const { return int(states_.size()); }
  int history_nodes() const { return n_hist_; }
  double time_at(int i) const { return -r_ + dt_ * double(i); }
  double t_front() const { return time_at(n_nodes() - 1); }
  const Eigen::VectorXd& state_at(int i) const { return states_[i]; }

  void append(const Eigen::VectorXd& state, const Eigen::VectorXd& rhs);
  void append_history(const Eigen::VectorXd& state);

  // Piecewise-cubic dense output: Hermite with stored derivatives for
  // t >= 0, Lagrange 4-node windows inside the history segment.
  Eigen::VectorXd interpolate(double t) const;

  spectral::SpectralField field_at(int i) const { return {states_[i]}; }

 private:
  double r_;
  double dt_;
  const spectral::Grid& grid_;
  int n_hist_;  // nodes strictly before t = 0
  std::vector<Eigen::VectorXd> states_;
  std::vector<Eigen::VectorXd> derivs_;  // valid for nodes at t >= 0
};

using HistoryLookup = std::function<Eigen::VectorXd(double)>;

// Projection of f(u) + g(delayed states) + h(., t) onto the sine basis.
// The -A u part is handled by the integrator, not here.
Eigen::VectorXd galerkin_rhs(double t, const Eigen::VectorXd& state,
                             const HistoryLookup& history,
                             const model::ProblemSpec& p,
                             const spectral::Grid& grid);

// One ETD-RK2 step from the trajectory front; appends the new node.
void step(Trajectory& traj, const model::ProblemSpec& p,
          const SolverConfig& cfg, const spectral::Grid& grid);

// Seeds a trajectory with the projected history and the t = 0 node.
Trajectory begin_trajectory(const model::ProblemSpec& p,
                            const model::HistoryFunction& phi,
                            const SolverConfig& cfg,
                            const spectral::Grid& grid);

// Integrates the problem over [0, t_end] with the method of steps.
Trajectory solve(const model::ProblemSpec& p, const model::HistoryFunction& phi,
                 const SolverConfig& cfg, const spectral::Grid& grid);

struct TimeDerivativeReport {
  std::vector<double> times;
  std::vector<double> l2_of_du;   // |u'(t)|_2 by central differences
  std::vector<double> integral;   // running int_0^t |u'|^2 ds
};

TimeDerivativeReport discrete_time_derivative(const Trajectory& traj);

}  // namespace rpde::solver

#endif  // RPDE_SOLVER_HPP_
