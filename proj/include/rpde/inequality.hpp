#ifndef RPDE_INEQUALITY_HPP_
#define RPDE_INEQUALITY_HPP_

#include <optional>
#include <vector>

#include "rpde/errors.hpp"

namespace rpde::inequality {

// E(t,s) = m0 * exp(-lam0 * (t - s)), m0 > 0, lam0 > 0.
struct ExponentialKernel {
  double m0 = 1.0;
  double lam0 = 1.0;

  double operator()(double t, double s) const;
};

// K(t,s) = weight * exp(-rate * (t - s)), weight >= 0, rate > 0.
struct DelayKernelWeight {
  double weight = 0.0;
  double rate = 1.0;

  double operator()(double t, double s) const;
};

// Constants of the retarded-inequality decay branch (exponential kernels).
struct InequalityConstants {
  double kappa = 0.0;     // mass of the delay kernel
  double vartheta = 1.0;  // sup of E(t,s)
  double mu = 1.0;        // 1 / (1 - kappa)
  double c = 1.0;         // max(vartheta / (1 - kappa), 1)
  double eta = 2.0;       // (mu + 1) / (1 - kappa * c)
  double m_big = 1.0;     // c * sqrt(2 / (1 + kappa * c))
  double lambda = 0.0;    // decay rate of the envelope
  double r = 0.0;         // delay horizon
  double m1_log = 0.0;    // max(ln(m0 * eta), ln(2 m0 / (1 - kappa c)))
};

// sup over t <= horizon of the running kernel mass int_0^t K(t,s) ds.
// Pass no horizon for the unbounded supremum weight/rate.
double kernel_mass(const DelayKernelWeight& k,
                   std::optional<double> horizon = std::nullopt);

// Builds the full constant set of the decay branch. Requires
// kappa < 1/(1 + vartheta); throws InapplicableInequalityError otherwise.
InequalityConstants decay_constants(double kappa, double vartheta,
                                    const ExponentialKernel& e, double r);

// M * y0_norm * exp(-lambda t) + eta * rho.
double decay_envelope(double t, double y0_norm, double rho,
                      const InequalityConstants& k);

// (c + 1)(y0_norm + 1) + mu * rho. Requires kappa < 1.
double uniform_bound(double y0_norm, double rho, const InequalityConstants& k);

// A nonnegative series sampled on a uniform grid covering [-r, T].
struct SampledSeries {
  double t_start = 0.0;  // = -r
  double dt = 0.0;
  std::vector<double> values;

  double r() const { return -t_start; }
  double time_at(std::size_t i) const { return t_start + dt * double(i); }
};

struct MembershipReport {
  bool member = false;
  double worst_slack = 0.0;   // min over t >= 0 of RHS + tol - y(t)
  double worst_time = 0.0;
  double tolerance = 0.0;
  // First grid time after which y stays below the asymptotic level
  // mu*rho + eps; unset when the series never settles below it.
  std::optional<double> entry_time_below_asymptote;
};

// Discrete membership check for the solution set of the retarded integral
// inequality y(t) <= E(t,0)||y_0|| + int_0^t K(t,s)||y_s|| ds + rho, with
// the integral evaluated by composite trapezoid on the sample grid.
MembershipReport verify_membership(const SampledSeries& y,
                                   const ExponentialKernel& e,
                                   const DelayKernelWeight& k, double rho,
                                   double quad_step,
                                   double asymptote_eps = 1e-6);

}  // namespace rpde::inequality

#endif  // RPDE_INEQUALITY_HPP_
