#include "rpde/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace rpde::inequality {

double ExponentialKernel::operator()(double t, double s) const {
  return m0 * std::exp(-lam0 * (t - s));
}

double DelayKernelWeight::operator()(double t, double s) const {
  return weight * std::exp(-rate * (t - s));
}

double kernel_mass(const DelayKernelWeight& k, std::optional<double> horizon) {
  if (!(k.rate > 0.0)) {
    throw InvalidKernelError("kernel_mass: rate must be positive");
  }
  if (k.weight < 0.0) {
    throw InvalidKernelError("kernel_mass: weight must be nonnegative");
  }
  // int_0^t K(t,s) ds = (weight/rate)(1 - exp(-rate t)) is increasing in t,
  // so the supremum sits at the horizon endpoint.
  const double full = k.weight / k.rate;
  if (!horizon) return full;
  if (*horizon < 0.0) {
    throw InvalidKernelError("kernel_mass: horizon must be nonnegative");
  }
  return full * (1.0 - std::exp(-k.rate * *horizon));
}

InequalityConstants decay_constants(double kappa, double vartheta,
                                    const ExponentialKernel& e, double r) {
  if (!(e.m0 > 0.0) || !(e.lam0 > 0.0)) {
    throw InvalidKernelError("decay_constants: kernel requires m0, lam0 > 0");
  }
  if (kappa < 0.0 || vartheta < 0.0 || r < 0.0) {
    throw InapplicableInequalityError(
        "decay_constants: kappa, vartheta, r must be nonnegative");
  }
  if (!(kappa < 1.0 / (1.0 + vartheta))) {
    throw InapplicableInequalityError(
        "decay_constants: requires kappa < 1/(1 + vartheta)");
  }
  InequalityConstants k;
  k.kappa = kappa;
  k.vartheta = vartheta;
  k.r = r;
  k.mu = 1.0 / (1.0 - kappa);
  k.c = std::max(vartheta / (1.0 - kappa), 1.0);
  const double kc = kappa * k.c;  // kc < 1 whenever kappa < 1/(1+vartheta)
  k.eta = (k.mu + 1.0) / (1.0 - kc);
  k.m_big = k.c * std::sqrt(2.0 / (1.0 + kc));
  k.m1_log = std::max(std::log(e.m0 * k.eta), std::log(2.0 * e.m0 / (1.0 - kc)));
  k.lambda =
      (std::log(2.0) - std::log1p(kc)) / (2.0 * (k.m1_log + r * e.lam0)) * e.lam0;
  return k;
}

double decay_envelope(double t, double y0_norm, double rho,
                      const InequalityConstants& k) {
  if (t < 0.0) throw std::domain_error("decay_envelope: t must be >= 0");
  if (y0_norm < 0.0 || rho < 0.0) {
    throw std::domain_error("decay_envelope: y0_norm, rho must be >= 0");
  }
  return k.m_big * y0_norm * std::exp(-k.lambda * t) + k.eta * rho;
}

double uniform_bound(double y0_norm, double rho, const InequalityConstants& k) {
  if (!(k.kappa < 1.0)) {
    throw InapplicableInequalityError("uniform_bound: requires kappa < 1");
  }
  return (k.c + 1.0) * (y0_norm + 1.0) + k.mu * rho;
}

namespace {

// Sliding sup-norm ||y_t|| = max over [t - r, t], evaluated at every grid
// node via a monotonic deque.
std::vector<double> sliding_sup(const std::vector<double>& y,
                                std::size_t window) {
  std::vector<double> out(y.size());
  std::deque<std::size_t> q;
  for (std::size_t i = 0; i < y.size(); ++i) {
    while (!q.empty() && y[q.back()] <= y[i]) q.pop_back();
    q.push_back(i);
    if (q.front() + window < i) q.pop_front();
    out[i] = y[q.front()];
  }
  return out;
}

}  // namespace

MembershipReport verify_membership(const SampledSeries& y,
                                   const ExponentialKernel& e,
                                   const DelayKernelWeight& k, double rho,
                                   double quad_step, double asymptote_eps) {
  if (y.values.size() < 2 || !(y.dt > 0.0)) {
    throw InvalidSeriesError("verify_membership: need >= 2 uniform samples");
  }
  if (y.dt > quad_step) {
    throw InvalidSeriesError(
        "verify_membership: sample step must be finer than quad_step");
  }
  if (y.t_start > 0.0) {
    throw InvalidSeriesError("verify_membership: series must start at -r <= 0");
  }
  double sup_y = 0.0;
  for (double v : y.values) {
    if (v < 0.0) throw InvalidSeriesError("verify_membership: negative entry");
    sup_y = std::max(sup_y, v);
  }

  const double h = y.dt;
  const std::size_t window = static_cast<std::size_t>(std::llround(y.r() / h));
  const std::size_t i0 = window;  // index of t = 0
  const auto sup = sliding_sup(y.values, window);
  const double y0_norm = sup[i0];

  MembershipReport rep;
  rep.tolerance = 10.0 * quad_step * quad_step * k.weight * sup_y;
  rep.worst_slack = std::numeric_limits<double>::infinity();

  // Exponential kernel: the trapezoid sum over [0, t] obeys the recursion
  // I(t + h) = e^{-rate h} (I(t) + (h/2) K(t,t) sup(t)) + (h/2) K(t,t) sup(t+h)
  // since K(t + h, s) = e^{-rate h} K(t, s).
  const double decay = std::exp(-k.rate * h);
  double integral = 0.0;
  for (std::size_t i = i0; i < y.values.size(); ++i) {
    const double t = y.time_at(i);
    if (i > i0) {
      integral = decay * (integral + 0.5 * h * k.weight * sup[i - 1]) +
                 0.5 * h * k.weight * sup[i];
    }
    const double rhs = e(t, 0.0) * y0_norm + integral + rho;
    const double slack = rhs + rep.tolerance - y.values[i];
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.worst_time = t;
    }
  }
  rep.member = rep.worst_slack >= 0.0;

  // Asymptotic-bound entry time: first node after which the series stays
  // below mu*rho + eps for the remainder of the sampled horizon.
  const double mu = 1.0 / (1.0 - std::min(kernel_mass(k), 1.0 - 1e-15));
  const double level = mu * rho + asymptote_eps;
  std::optional<std::size_t> entry;
  for (std::size_t i = y.values.size(); i-- > i0;) {
    if (y.values[i] < level) {
      entry = i;
    } else {
      break;
    }
  }
  if (entry) rep.entry_time_below_asymptote = y.time_at(*entry);
  return rep;
}

}  // namespace rpde::inequality
