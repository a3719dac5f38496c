#include "rpde/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace rpde::estimates {

namespace {
const double kLn2 = std::log(2.0);
const double kLn3 = std::log(3.0);
const double kM1Log = std::log(7.0) - std::log(2.0);

double h_lq_bound(const model::ProblemSpec& p) {
  if (!p.h.value) return 0.0;
  if (!p.h.lp_bound) {
    throw IncompleteSpecError(
        "estimates: forcing requires a declared L^inf(R; L^{q_gamma/gamma}) "
        "bound");
  }
  return *p.h.lp_bound;
}
}  // namespace

std::string ConstantLedger::to_table() const {
  std::ostringstream out;
  out << std::left << std::setw(18) << "name" << std::setw(26) << "value"
      << "definition\n";
  for (const auto& e : entries) {
    out << std::left << std::setw(18) << e.name << std::setw(26)
        << std::setprecision(17) << e.value << e.note << "\n";
  }
  return out.str();
}

PhiNorms phi_norms(const model::HistoryFunction& phi, double q,
                   const spectral::Grid& grid) {
  PhiNorms n;
  for (int k = 0; k < phi.times().size(); ++k) {
    const spectral::SpectralField u{phi.coefficients().col(k)};
    n.c_v1_sq = std::max(n.c_v1_sq, std::pow(spectral::h1_norm(u, grid), 2.0));
    n.lq_q = std::max(n.lq_q, std::pow(spectral::lq_norm(u, q, grid), q));
    n.linf = std::max(n.linf, spectral::linf_norm(u, grid));
    n.c_v2_sq = std::max(n.c_v2_sq, std::pow(spectral::h2_norm(u, grid), 2.0));
    n.mixed_q = std::max(n.mixed_q, spectral::mixed_integral(u, q, grid));
  }
  return n;
}

LqChain build_lq_chain(const model::ProblemSpec& p, double q) {
  const auto& sc = p.constants;
  const auto crit = model::critical_exponents(sc.gamma, sc.beta, sc.alpha);
  if (!(q > crit.q_star)) {
    std::ostringstream msg;
    msg << "build_lq_chain: q = " << q << " is not above q* = " << crit.q_star
        << " (the regime q <= q* is out of theory)";
    throw OutOfTheoryError(msg.str());
  }

  LqChain ch;
  ch.q = q;
  ch.q_gamma = model::q_gamma(q, sc.gamma);
  ch.sigma = q * (q - 1.0) / (q - sc.beta);
  ch.q_prime = (ch.sigma * q + sc.beta * (ch.q_gamma - ch.sigma)) /
               ((q - sc.beta) * (ch.q_gamma - ch.sigma));

  const double m = double(p.g.m);
  const double b1p = sc.b1p;
  const double lam = sc.lambda_diss;
  const double n_diss = sc.n_diss;
  const double denom = n_diss + b1p * (m + 1.0) + 1.0;
  ch.eps0 = 0.5 * std::min(lam / (2.0 * denom), lam / (4.0 * m * b1p));
  ch.a_eps0 = q * (lam - ch.eps0 * denom);

  const double omega = p.omega_measure();
  const double h_bound = h_lq_bound(p);
  ch.c_eps_prime =
      (n_diss * std::pow(ch.eps0, -(q - 2.0) / (sc.gamma + 1.0)) +
       b1p * (std::pow(ch.eps0, -ch.q_prime) +
              std::pow(ch.eps0, -(q - 1.0) / sc.gamma))) *
          omega +
      std::pow(ch.eps0, -(q - 1.0) / sc.gamma) *
          std::pow(h_bound, ch.q_gamma / sc.gamma);
  ch.c_eps_dprime = ch.c_eps_prime + ch.a_eps0 * omega;
  ch.rho_q = 2.0 * ch.c_eps_dprime / (q * lam);
  ch.kappa_bound = std::min(0.25, ch.eps0 * q * m * b1p / ch.a_eps0);

  // The decay branch with kappa = 1/4, vartheta = 1, E = e^{-a_eps0 (t-s)}.
  const auto k = inequality::decay_constants(
      0.25, 1.0, inequality::ExponentialKernel{1.0, ch.a_eps0}, p.delays.r);
  ch.eta = k.eta;      // 7/2
  ch.m_big = k.m_big;  // 4/sqrt(6)
  ch.lambda_q = k.lambda;

  ch.ledger.add("q", q, "configured Lebesgue exponent");
  ch.ledger.add("q_star", crit.q_star, "max(p*, 2 alpha, 2 beta)");
  ch.ledger.add("q_gamma", ch.q_gamma, "q - 1 + gamma");
  ch.ledger.add("sigma", ch.sigma, "q(q-1)/(q-beta)");
  ch.ledger.add("q_prime", ch.q_prime,
                "(sigma q + beta(q_gamma-sigma))/((q-beta)(q_gamma-sigma))");
  ch.ledger.add("eps0", ch.eps0,
                "min(Lambda/(2(N+b1'(m+1)+1)), Lambda/(4 m b1')) / 2");
  ch.ledger.add("a_eps0", ch.a_eps0, "q(Lambda - eps0(N+b1'(m+1)+1))");
  ch.ledger.add("C_eps_prime", ch.c_eps_prime,
                "(N eps0^{-(q-2)/(g+1)} + b1'(eps0^{-q'} + eps0^{-(q-1)/g}))"
                "|Omega| + eps0^{-(q-1)/g} ||h||^{q_g/g}");
  ch.ledger.add("C_eps_dprime", ch.c_eps_dprime,
                "C_eps_prime + a_eps0 |Omega|");
  ch.ledger.add("rho_q", ch.rho_q, "2 C_eps_dprime / (q Lambda)");
  ch.ledger.add("lambda_q", ch.lambda_q,
                "(ln3 - ln2) a_eps0 / (2(M1 + r a_eps0)), M1 = ln7 - ln2");
  ch.ledger.add("kappa", ch.kappa_bound, "min(1/4, eps0 q m b1' / a_eps0)");
  ch.ledger.add("eta", ch.eta, "(mu + 1)/(1 - kappa c) = 7/2");
  ch.ledger.add("M", ch.m_big, "c sqrt(2/(1 + kappa c)) = 4/sqrt(6)");
  return ch;
}

double lq_envelope(const LqChain& chain, double t, double phi_lq_q) {
  if (t < 0.0) throw std::domain_error("lq_envelope: t must be >= 0");
  return chain.m_big * std::exp(-chain.lambda_q * t) * phi_lq_q +
         chain.eta * chain.rho_q;
}

LinfBall linf_ball(const model::ProblemSpec& p) {
  const auto& sc = p.constants;
  double h_inf = 0.0;
  if (p.h.value) {
    if (!p.h.linf_bound) {
      throw IncompleteSpecError(
          "linf_ball: forcing requires a declared L^inf(R x Omega) bound");
    }
    h_inf = *p.h.linf_bound;
  }
  const double m = double(p.g.m);
  const double denom = sc.n_diss + sc.b1p * (m + 1.0) + 1.0;
  const double eps0 = 0.5 * std::min(sc.lambda_diss / (2.0 * denom),
                                     sc.lambda_diss / (4.0 * m * sc.b1p));
  LinfBall ball;
  ball.m1_log = kM1Log;
  ball.rho_star = std::pow(eps0, -1.0 / (sc.gamma + 1.0)) +
                  std::pow(eps0, -1.0 / (sc.gamma - sc.beta)) +
                  std::pow(eps0, -1.0 / sc.gamma) +
                  std::pow(eps0, -1.0 / sc.gamma) *
                      std::pow(h_inf, 1.0 / sc.gamma) +
                  1.0;
  if (p.delays.r == 0.0) {
    ball.lambda_star = sc.lambda_diss * (kLn3 - kLn2) / (4.0 * kM1Log);
  }
  ball.ledger.add("eps0", eps0, "same minimum as the L^q chain");
  ball.ledger.add("rho_star", ball.rho_star,
                  "eps0^{-1/(g+1)} + eps0^{-1/(g-b)} + eps0^{-1/g}"
                  " + eps0^{-1/g} ||h||_inf^{1/g} + 1");
  if (ball.lambda_star) {
    ball.ledger.add("lambda_star", *ball.lambda_star,
                    "Lambda (ln3 - ln2)/(4 (ln7 - ln2)), r = 0 only");
  }
  return ball;
}

double linf_envelope(const LinfBall& ball, double t, double phi_linf,
                     double r) {
  if (r > 0.0 || !ball.lambda_star) return phi_linf + ball.rho_star;
  return std::exp(-*ball.lambda_star * t) * phi_linf + ball.rho_star;
}

InvarianceReport eventual_invariance_check(const solver::Trajectory& traj,
                                           const LinfBall& ball,
                                           double phi_linf, double eps,
                                           double tol) {
  InvarianceReport rep;
  const double level = ball.rho_star + eps;
  rep.applicable = phi_linf <= level + tol;
  if (!rep.applicable) return rep;
  const auto& grid = traj.grid();
  int entry = -1;
  for (int i = traj.n_nodes(); i-- > traj.history_nodes();) {
    if (spectral::linf_norm(traj.field_at(i), grid) <= level + tol) {
      entry = i;
    } else {
      break;
    }
  }
  if (entry >= 0) {
    rep.entered = true;
    rep.t0 = traj.time_at(entry);
  }
  return rep;
}

double H1Envelope::value(double t, const PhiNorms& phi) const {
  return phi.c_v1_sq * std::exp(-mu1 * t) +
         gain * phi.lq_q * std::exp(-rate * t) + offset;
}

H1Envelope h1_envelope(const model::ProblemSpec& p, const LqChain& chain) {
  const auto& sc = p.constants;
  const double q = chain.q;
  if (!(q > 2.0 * sc.alpha) || !(q > 2.0 * sc.beta)) {
    throw EmbeddingFailureError(
        "h1_envelope: q > 2 alpha and q > 2 beta required for the "
        "|Omega|-power embedding");
  }
  const double omega = p.omega_measure();
  const double a1 = p.effective_a1();
  const double b1p = sc.b1p;
  const double m = double(p.g.m);

  const double c1 = 2.0 * a1 * a1 * std::pow(omega, 1.0 - 2.0 * sc.alpha / q);
  const double c2 = 2.0 * a1 * a1 * omega;
  const double c3 =
      2.0 * m * b1p * b1p * std::pow(omega, 1.0 - 2.0 * sc.beta / q);
  const double c4 = 2.0 * b1p * b1p * omega;

  // ||h(t)||_2^2 via the declared L^{q_gamma/gamma} bound when that exponent
  // embeds into L^2, otherwise via the sup bound.
  double h_l2_sq = 0.0;
  if (p.h.value) {
    const double ph = chain.q_gamma / sc.gamma;
    if (ph >= 2.0 && p.h.lp_bound) {
      h_l2_sq = std::pow(*p.h.lp_bound, 2.0) * std::pow(omega, 1.0 - 2.0 / ph);
    } else if (p.h.linf_bound) {
      h_l2_sq = std::pow(*p.h.linf_bound, 2.0) * omega;
    } else {
      throw IncompleteSpecError("h1_envelope: no usable bound on h");
    }
  }

  const double k_u = 3.0 * c1;
  const double k_d = 3.0 * c3;
  const double c5 = 3.0 * (c2 + c4 + h_l2_sq);

  H1Envelope env;
  env.mu1 = p.mu1();
  env.rate = std::min({2.0 * sc.alpha * chain.lambda_q / q,
                       2.0 * sc.beta * chain.lambda_q / q, env.mu1 / 2.0});
  const double exp_lr = std::exp(chain.lambda_q * p.delays.r);
  env.m_prime = k_u * std::pow(chain.m_big, 2.0 * sc.alpha / q) +
                k_d * std::pow(chain.m_big * exp_lr, 2.0 * sc.beta / q);
  const double eta_rho = chain.eta * chain.rho_q;
  env.c6 = k_u * std::pow(eta_rho, 2.0 * sc.alpha / q) +
           k_d * std::pow(eta_rho, 2.0 * sc.beta / q) + c5;
  const double gain_raw = env.m_prime / (env.mu1 - env.rate);
  env.gain = gain_raw;
  // The (phi^q + 1) factor from the power bound: the +1 part is folded into
  // the constant offset (e^{-rate t} <= 1 for t >= 0).
  env.offset = env.c6 / env.mu1 + gain_raw;

  env.ledger.add("C1", c1, "2 a1^2 |Omega|^{1 - 2 alpha/q}");
  env.ledger.add("C2", c2, "2 a1^2 |Omega|");
  env.ledger.add("C3", c3, "2 m b1'^2 |Omega|^{1 - 2 beta/q}");
  env.ledger.add("C4", c4, "2 b1'^2 |Omega|");
  env.ledger.add("C5", c5, "3 (C2 + C4 + ||h||_2^2)");
  env.ledger.add("C6", env.c6,
                 "3C1 (eta rho_q)^{2a/q} + 3C3 (eta rho_q)^{2b/q} + C5");
  env.ledger.add("M_prime", env.m_prime,
                 "3C1 M^{2a/q} + 3C3 (M e^{lambda_q r})^{2b/q}");
  env.ledger.add("lambda_prime", env.rate,
                 "min(2 alpha lambda_q/q, 2 beta lambda_q/q, mu1/2)");
  env.ledger.add("mu1", env.mu1, "first Dirichlet eigenvalue (pi/L)^2");
  env.ledger.add("gain", env.gain, "M_prime / (mu1 - lambda_prime)");
  env.ledger.add("rho_1", env.offset, "C6/mu1 + gain (offset)");
  return env;
}

double IntegratedEnvelopes::e2(double t, const PhiNorms& phi) const {
  return 2.0 * h1.value(t, phi) +
         (h1.m_prime * (phi.lq_q + 1.0) / h1.rate) * std::exp(-h1.rate * t) +
         h1.c6;
}

double IntegratedEnvelopes::e3(double t, const PhiNorms& phi) const {
  return e3_gain * phi.lq_q * std::exp(-lambda_q * t) + e3_offset;
}

double IntegratedEnvelopes::c_T(double horizon) const {
  const double qq1 = q * (q - 1.0);
  return (1.0 + eps_qmb * horizon * m_big * exp_lr +
          horizon * (eps_qmb * eta_rho + c_dprime)) /
         qq1;
}

IntegratedEnvelopes integrated_envelopes(const model::ProblemSpec& p,
                                         const LqChain& chain) {
  IntegratedEnvelopes ie;
  ie.h1 = h1_envelope(p, chain);
  ie.q = chain.q;
  ie.lambda_q = chain.lambda_q;
  ie.rate = ie.h1.rate;
  ie.m_big = chain.m_big;
  ie.eta_rho = chain.eta * chain.rho_q;
  ie.c_dprime = chain.c_eps_dprime;
  ie.exp_lr = std::exp(chain.lambda_q * p.delays.r);
  ie.eps_qmb = chain.eps0 * chain.q * double(p.g.m) * p.constants.b1p;

  const double qq1 = chain.q * (chain.q - 1.0);
  ie.e2_gain = ie.h1.m_prime / ie.h1.rate;
  ie.e2_offset = ie.h1.c6;
  ie.e3_gain = (2.0 * chain.m_big + ie.eps_qmb * chain.m_big * ie.exp_lr) / qq1;
  ie.e3_offset = ((2.0 + ie.eps_qmb) * ie.eta_rho + chain.c_eps_dprime) / qq1;

  ie.ledger = ie.h1.ledger;
  ie.ledger.add("C7_e2_gain", ie.e2_gain, "M_prime / lambda_prime");
  ie.ledger.add("C8_e2_offset", ie.e2_offset, "C6");
  ie.ledger.add("C9_e3_gain", ie.e3_gain,
                "(2M + eps0 q m b1' M e^{lambda_q r}) / (q(q-1))");
  ie.ledger.add("C10_e3_offset", ie.e3_offset,
                "((2 + eps0 q m b1') eta rho_q + C_eps_dprime) / (q(q-1))");
  return ie;
}

H2Envelope h2_envelope(const model::ProblemSpec& p, const LqChain& chain,
                       const H1Envelope& h1, const solver::Trajectory& calib,
                       const PhiNorms& calib_phi, double q,
                       double calibration_t_start) {
  if (!p.g.separated && p.g.value) {
    throw FormUnavailableError(
        "h2_envelope: decay form requires separated delays; only the "
        "boundedness estimate is available otherwise");
  }
  (void)q;
  H2Envelope env;
  env.rate = std::min(h1.rate, chain.lambda_q);

  const auto& grid = calib.grid();
  const double t_front = calib.t_front();
  const double tail_start = t_front - 0.1 * (t_front - calibration_t_start);
  double tail_max = 0.0;
  std::vector<std::pair<double, double>> obs;
  for (int i = calib.history_nodes(); i < calib.n_nodes(); ++i) {
    const double t = calib.time_at(i);
    if (t < calibration_t_start) continue;
    const double v = std::pow(spectral::h2_norm(calib.field_at(i), grid), 2.0);
    obs.emplace_back(t, v);
    if (t >= tail_start) tail_max = std::max(tail_max, v);
  }
  env.offset = 1.1 * tail_max + 1e-12;
  const double data = H2Envelope::data_norm(calib_phi);
  double gain = 0.0;
  if (data > 0.0) {
    for (const auto& [t, v] : obs) {
      const double need = (v - env.offset) / (data * std::exp(-env.rate * t));
      gain = std::max(gain, need);
    }
  }
  env.data_gain = 1.1 * gain + 1e-12;
  env.calibrated = true;
  return env;
}

EnvelopeReport check_envelope(
    const solver::Trajectory& traj,
    const std::function<double(const spectral::SpectralField&)>& observe,
    const std::function<double(double)>& bound, const std::string& norm_name,
    double rel_tol, double abs_tol, int stride) {
  EnvelopeReport rep;
  rep.norm_name = norm_name;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = traj.history_nodes(); i < traj.n_nodes();
       i += std::max(1, stride)) {
    const double t = traj.time_at(i);
    const double observed = observe(traj.field_at(i));
    const double b = bound(t);
    const double tol = rel_tol * std::abs(b) + abs_tol;
    const double margin = b + tol - observed;
    rep.rows.push_back({t, observed, b, margin});
    if (margin < rep.worst_margin) rep.worst_margin = margin;
    if (margin < 0.0) {
      ++rep.violations;
      if (!rep.first_violation_time) rep.first_violation_time = t;
    }
  }
  return rep;
}

}  // namespace rpde::estimates
