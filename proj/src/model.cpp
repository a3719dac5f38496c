#include "rpde/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rpde::model {

void StructureConstants::validate() const {
  std::ostringstream bad;
  if (!(lambda_diss > 0.0)) bad << "Lambda > 0 required; ";
  if (!(n_diss > 0.0)) bad << "N > 0 required; ";
  if (!(gamma > 1.0)) bad << "gamma > 1 required; ";
  if (!(alpha >= 1.0)) bad << "alpha >= 1 required; ";
  if (!(beta >= 1.0) || !(beta < gamma)) bad << "1 <= beta < gamma required; ";
  if (!(a0 > 0.0) || !(b0 > 0.0) || !(b1 > 0.0) || !(b0p > 0.0) ||
      !(b1p > 0.0)) {
    bad << "coefficient constants must be > 0; ";
  }
  const std::string msg = bad.str();
  if (!msg.empty()) throw StructureViolationError("StructureConstants: " + msg);
}

CriticalExponents critical_exponents(double gamma, double beta, double alpha) {
  if (!(gamma > 1.0) || !(beta >= 1.0) || !(alpha >= 1.0)) {
    throw std::domain_error(
        "critical_exponents: need gamma > 1, beta >= 1, alpha >= 1");
  }
  if (!(beta < gamma)) {
    throw std::domain_error("critical_exponents: beta < gamma required");
  }
  CriticalExponents e;
  e.p_star = beta * (gamma - 1.0) / (gamma - beta);
  e.q_star = std::max({e.p_star, 2.0 * alpha, 2.0 * beta});
  return e;
}

void DelaySpec::validate(int n_time_samples, double t_max) const {
  if (r < 0.0) throw StructureViolationError("DelaySpec: r >= 0 required");
  if (int(r_i.size()) != m) {
    throw StructureViolationError("DelaySpec: need one delay function per arg");
  }
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < n_time_samples; ++k) {
      const double t = t_max * double(k) / double(n_time_samples - 1);
      const double ri = r_i[i](t);
      if (ri < -1e-12 || ri > r + 1e-12) {
        std::ostringstream msg;
        msg << "DelaySpec: r_" << (i + 1) << "(" << t << ") = " << ri
            << " outside [0, " << r << "]";
        throw StructureViolationError(msg.str());
      }
    }
  }
}

double ProblemSpec::effective_a1() const {
  if (constants.a1 > 0.0) return constants.a1;
  return 2.0 * constants.a0 + std::abs(f.value ? f.value(0.0) : 0.0);
}

namespace {

double derivative_or_fd(const Reaction& f, double s) {
  if (f.deriv) return f.deriv(s);
  const double h = std::max(1e-6, 1e-7 * std::abs(s));
  return (f.value(s + h) - f.value(s - h)) / (2.0 * h);
}

}  // namespace

CheckFReport check_f(const Reaction& f, const StructureConstants& sc,
                     double s_max, int n_samples, bool require_pass) {
  if (n_samples < 3 || !(s_max > 0.0)) {
    throw std::domain_error("check_f: need s_max > 0 and >= 3 samples");
  }
  CheckFReport rep;
  rep.worst_f0_margin = std::numeric_limits<double>::infinity();
  rep.worst_f1_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    const double s = -s_max + 2.0 * s_max * double(k) / double(n_samples - 1);
    const double f0_margin =
        (-sc.lambda_diss * std::pow(std::abs(s), sc.gamma + 1.0) + sc.n_diss) -
        f.value(s) * s;
    const double f1_margin =
        sc.a0 * (std::pow(std::abs(s), sc.alpha - 1.0) + 1.0) -
        std::abs(derivative_or_fd(f, s));
    if (f0_margin < rep.worst_f0_margin) {
      rep.worst_f0_margin = f0_margin;
      if (f0_margin < 0.0) rep.worst_sample = s;
    }
    if (f1_margin < rep.worst_f1_margin) {
      rep.worst_f1_margin = f1_margin;
      if (f1_margin < 0.0 && rep.f1_ok) rep.worst_sample = s;
    }
  }
  // Allow derivative-sampling noise on the F1 side only.
  rep.f0_ok = rep.worst_f0_margin >= 0.0;
  rep.f1_ok = rep.worst_f1_margin >= -1e-7;
  if (!rep.f0_ok) rep.failed_condition = "F0";
  else if (!rep.f1_ok) rep.failed_condition = "F1";
  if (require_pass && !rep.failed_condition.empty()) {
    std::ostringstream msg;
    msg << "check_f: condition (" << rep.failed_condition << ") fails at s = "
        << rep.worst_sample;
    throw StructureViolationError(msg.str());
  }
  return rep;
}

CheckGReport check_g(const DelayCoupling& g, const StructureConstants& sc,
                     double s_max, int n_samples_per_axis, bool require_pass) {
  if (!(s_max > 0.0)) throw std::domain_error("check_g: s_max > 0 required");
  const int m = g.m;
  CheckGReport rep;
  rep.worst_g1_margin = std::numeric_limits<double>::infinity();
  rep.worst_sample = Eigen::VectorXd::Zero(m);
  double b0p_needed = 0.0;
  double b1p_needed = 0.0;

  auto gradient = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd grad(m);
    Eigen::VectorXd w = v;
    for (int i = 0; i < m; ++i) {
      const double h = std::max(1e-6, 1e-7 * std::abs(v[i]));
      w[i] = v[i] + h;
      const double up = g.value(w);
      w[i] = v[i] - h;
      const double dn = g.value(w);
      w[i] = v[i];
      grad[i] = (up - dn) / (2.0 * h);
    }
    return grad;
  };

  auto visit = [&](const Eigen::VectorXd& v) {
    const double gnorm = gradient(v).norm();
    const double vnorm = v.norm();
    const double vmax = v.lpNorm<Eigen::Infinity>();
    const double margin =
        sc.b0 * (std::pow(vnorm, sc.beta - 1.0) + 1.0) - gnorm;
    if (margin < rep.worst_g1_margin) {
      rep.worst_g1_margin = margin;
      if (margin < 0.0) rep.worst_sample = v;
    }
    b0p_needed = std::max(
        b0p_needed, gnorm / (std::pow(vmax, sc.beta - 1.0) + 1.0));
    b1p_needed = std::max(
        b1p_needed,
        std::abs(g.value(v)) / (std::pow(vmax, sc.beta) + 1.0));
  };

  if (m <= 4) {
    const int n = n_samples_per_axis;
    Eigen::VectorXd v(m);
    std::vector<int> idx(m, 0);
    while (true) {
      for (int i = 0; i < m; ++i) {
        v[i] = -s_max + 2.0 * s_max * double(idx[i]) / double(n - 1);
      }
      visit(v);
      int d = 0;
      while (d < m && ++idx[d] == n) idx[d++] = 0;
      if (d == m) break;
    }
  } else {
    std::mt19937 rng(0x9e3779b9u);
    std::uniform_real_distribution<double> dist(-s_max, s_max);
    Eigen::VectorXd v(m);
    for (int k = 0; k < 100000; ++k) {
      for (int i = 0; i < m; ++i) v[i] = dist(rng);
      visit(v);
    }
  }

  rep.g1_ok = rep.worst_g1_margin >= -1e-7;
  rep.effective_b0p = std::max(1.1 * b0p_needed, 1e-12);
  rep.effective_b1p = std::max(1.1 * b1p_needed, 1e-12);
  if (require_pass && !rep.g1_ok) {
    std::ostringstream msg;
    msg << "check_g: condition (G1) fails at v = ["
        << rep.worst_sample.transpose() << "]";
    throw StructureViolationError(msg.str());
  }
  return rep;
}

HistoryFunction::HistoryFunction(
    const std::function<double(double, double)>& phi, double r, int n_times,
    const spectral::Grid& grid) {
  if (r < 0.0) throw std::domain_error("HistoryFunction: r >= 0 required");
  if (r == 0.0) n_times = 1;
  if (n_times < 1) throw std::domain_error("HistoryFunction: n_times >= 1");
  times_ = (n_times == 1)
               ? Eigen::VectorXd::Zero(1).eval()
               : Eigen::VectorXd::LinSpaced(n_times, -r, 0.0).eval();
  coeffs_.resize(grid.n_modes(), n_times);
  Eigen::VectorXd vals(grid.n_quad() + 1);
  for (int k = 0; k < n_times; ++k) {
    for (int i = 0; i <= grid.n_quad(); ++i) {
      vals[i] = phi(times_[k], grid.nodes()[i]);
    }
    coeffs_.col(k) = spectral::analyze(vals, grid).coeffs;
  }
}

HistoryFunction::HistoryFunction(Eigen::VectorXd times, Eigen::MatrixXd coeffs)
    : times_(std::move(times)), coeffs_(std::move(coeffs)) {
  if (times_.size() < 1 || coeffs_.cols() != times_.size()) {
    throw DimensionError("HistoryFunction: one coefficient column per time");
  }
  if (times_[times_.size() - 1] != 0.0 || times_[0] > 0.0) {
    throw std::domain_error("HistoryFunction: time grid must end at 0");
  }
}

Eigen::VectorXd HistoryFunction::sample(double t) const {
  const int n = int(times_.size());
  const double r = -times_[0];
  if (t < -r - 1e-12 || t > 1e-12) {
    throw std::domain_error("HistoryFunction::sample: t outside [-r, 0]");
  }
  if (n == 1) return coeffs_.col(0);
  t = std::clamp(t, -r, 0.0);
  const double dt = times_[1] - times_[0];
  // Window of up to 4 consecutive nodes around t; Lagrange interpolation in
  // time per coefficient.
  int i = std::clamp(int(std::floor((t + r) / dt)), 0, n - 2);
  int lo = std::clamp(i - 1, 0, std::max(0, n - 4));
  const int count = std::min(4, n);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs_.rows());
  for (int a = 0; a < count; ++a) {
    double w = 1.0;
    for (int b = 0; b < count; ++b) {
      if (a == b) continue;
      w *= (t - times_[lo + b]) / (times_[lo + a] - times_[lo + b]);
    }
    out += w * coeffs_.col(lo + a);
  }
  return out;
}

}  // namespace rpde::model
