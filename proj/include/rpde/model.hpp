#ifndef RPDE_MODEL_HPP_
#define RPDE_MODEL_HPP_

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rpde/errors.hpp"
#include "rpde/spectral.hpp"

namespace rpde::model {

// Constants of the structure conditions (F0)/(F1)/(G1) and the derived
// growth bounds |f(s)| <= a1(|s|^alpha + 1), |g(v)| <= b1'(||v||_*^beta + 1).
struct StructureConstants {
  double lambda_diss = 1.0;  // dissipation strength of f
  double n_diss = 1.0;       // additive constant in the dissipation bound
  double gamma = 2.0;        // dissipation exponent, > 1
  double alpha = 1.0;        // growth exponent of f', >= 1
  double a0 = 1.0;           // growth coefficient of f'
  double a1 = 0.0;           // growth coefficient of f; 0 = derive from a0
  double beta = 1.0;         // growth exponent of g, 1 <= beta < gamma
  double b0 = 1.0;           // gradient coefficient of g (euclidean form)
  double b1 = 1.0;           // growth coefficient of g (euclidean form)
  double b0p = 1.0;          // gradient coefficient, max-norm form
  double b1p = 1.0;          // growth coefficient, max-norm form

  void validate() const;
};

struct CriticalExponents {
  double p_star;
  double q_star;
};

// p* = beta(gamma-1)/(gamma-beta), q* = max(p*, 2 alpha, 2 beta).
CriticalExponents critical_exponents(double gamma, double beta, double alpha);

inline double q_gamma(double q, double gamma) { return q - 1.0 + gamma; }

// Scalar reaction term with optional analytic derivative.
struct Reaction {
  std::function<double(double)> value;
  std::function<double(double)> deriv;  // empty -> central differences
};

// Delay coupling g : R^m -> R; when separated, g(v) = sum_i terms[i](v_i).
struct DelayCoupling {
  int m = 1;
  std::function<double(const Eigen::VectorXd&)> value;
  bool separated = false;
  std::vector<Reaction> terms;  // per-argument scalar terms when separated
};

struct DelaySpec {
  int m = 1;
  double r = 0.0;
  // Continuous delay functions t -> r_i(t) in [0, r].
  std::vector<std::function<double(double)>> r_i;
  bool c1 = true;  // delays are C^1 (needed for the H2 regularity regime)

  void validate(int n_time_samples = 256, double t_max = 100.0) const;
};

// Forcing h(x, t) with its declared norm bounds.
struct Forcing {
  std::function<double(double, double)> value;  // (x, t) -> h
  std::optional<double> linf_bound;             // ||h||_{L^inf(R x Omega)}
  std::optional<double> h1_bound;               // ||h||_{L^inf(R; H^1)}
  // ||h||_{L^inf(R; L^p)} for p = q_gamma / gamma, filled per configured q.
  std::optional<double> lp_bound;
};

struct ProblemSpec {
  double length = 1.0;  // Omega = (0, length)
  Reaction f;
  StructureConstants constants;
  DelayCoupling g;
  DelaySpec delays;
  Forcing h;

  double omega_measure() const { return length; }
  double mu1() const { return spectral::eigenvalue(1, length); }
  // a1 if set, otherwise the mean-value-theorem fallback 2 a0 + |f(0)|.
  double effective_a1() const;
};

struct CheckFReport {
  bool f0_ok = true;
  bool f1_ok = true;
  double worst_f0_margin = 0.0;  // min over samples of RHS - LHS
  double worst_f1_margin = 0.0;
  double worst_sample = 0.0;
  std::string failed_condition;  // "F0" / "F1" when a check fails
};

// Samples (F0) and (F1) on [-s_max, s_max]; throws StructureViolationError
// when require_pass is set and a condition fails.
CheckFReport check_f(const Reaction& f, const StructureConstants& sc,
                     double s_max, int n_samples = 2001,
                     bool require_pass = false);

struct CheckGReport {
  bool g1_ok = true;
  double worst_g1_margin = 0.0;
  double effective_b0p = 0.0;  // smallest sampled constant, inflated 10%
  double effective_b1p = 0.0;
  Eigen::VectorXd worst_sample;
};

CheckGReport check_g(const DelayCoupling& g, const StructureConstants& sc,
                     double s_max, int n_samples_per_axis = 33,
                     bool require_pass = false);

// Initial datum phi on [-r, 0], stored as spectral projections on a time
// grid; queries interpolate in time with piecewise-cubic Lagrange windows
// (exact for polynomial-in-t coefficients of degree <= 3).
class HistoryFunction {
 public:
  // Projects an analytic phi(s, x) on n_times grid times over [-r, 0].
  HistoryFunction(const std::function<double(double, double)>& phi, double r,
                  int n_times, const spectral::Grid& grid);
  // Wraps precomputed per-time coefficient columns (times ascending in
  // [-r, 0]).
  HistoryFunction(Eigen::VectorXd times, Eigen::MatrixXd coeffs);

  double r() const { return -times_[0]; }
  const Eigen::VectorXd& times() const { return times_; }
  const Eigen::MatrixXd& coefficients() const { return coeffs_; }

  // Coefficient vector at time t in [-r, 0].
  Eigen::VectorXd sample(double t) const;

 private:
  Eigen::VectorXd times_;
  Eigen::MatrixXd coeffs_;  // n_modes x n_times
};

// Free-function form of the history query.
inline Eigen::VectorXd sample_history(const HistoryFunction& phi, double t) {
  return phi.sample(t);
}

}  // namespace rpde::model

#endif  // RPDE_MODEL_HPP_
