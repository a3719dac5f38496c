#ifndef RPDE_ESTIMATES_HPP_
#define RPDE_ESTIMATES_HPP_

#include <optional>
#include <string>
#include <vector>

#include "rpde/inequality.hpp"
#include "rpde/model.hpp"
#include "rpde/solver.hpp"

namespace rpde::estimates {

// Auditable record of every constant an envelope is built from.
struct ConstantLedger {
  struct Entry {
    std::string name;
    double value;
    std::string note;  // defining formula
  };
  std::vector<Entry> entries;

  void add(const std::string& name, double value, const std::string& note) {
    entries.push_back({name, value, note});
  }
  std::string to_table() const;
};

// Full constant chain of the L^q decay estimate.
struct LqChain {
  double q = 0.0;
  double q_gamma = 0.0;   // q - 1 + gamma
  double sigma = 0.0;     // q(q-1)/(q-beta)
  double q_prime = 0.0;   // (sigma q + beta(q_gamma - sigma)) / ((q-beta)(q_gamma-sigma))
  double eps0 = 0.0;
  double a_eps0 = 0.0;
  double c_eps_prime = 0.0;
  double c_eps_dprime = 0.0;
  double rho_q = 0.0;
  double lambda_q = 0.0;
  double kappa_bound = 0.0;  // <= 1/4
  double eta = 3.5;
  double m_big = 0.0;        // 4/sqrt(6)
  ConstantLedger ledger;
};

// Norms of the initial datum that the envelopes consume.
struct PhiNorms {
  double c_v1_sq = 0.0;   // sup_s |grad phi(s)|^2
  double lq_q = 0.0;      // sup_s |phi(s)|_q^q
  double linf = 0.0;      // sup_s |phi(s)|_inf
  double c_v2_sq = 0.0;   // sup_s |Delta phi(s)|^2
  double mixed_q = 0.0;   // sup_s int |phi|^{q-2} |grad phi|^2 dx
};

PhiNorms phi_norms(const model::HistoryFunction& phi, double q,
                   const spectral::Grid& grid);

LqChain build_lq_chain(const model::ProblemSpec& p, double q);

// Bound on |u(t)|_q^q: (4/sqrt(6)) e^{-lambda_q t} phi_lq_q + (7/2) rho_q.
double lq_envelope(const LqChain& chain, double t, double phi_lq_q);

struct LinfBall {
  double rho_star = 0.0;
  std::optional<double> lambda_star;  // only defined for r = 0
  double m1_log = 0.0;                // ln 7 - ln 2
  ConstantLedger ledger;
};

LinfBall linf_ball(const model::ProblemSpec& p);

// Bound on |u(t)|_inf; the decaying branch applies only when r = 0.
double linf_envelope(const LinfBall& ball, double t, double phi_linf, double r);

struct InvarianceReport {
  bool applicable = false;  // precondition ||phi||_inf <= rho_* + eps held
  bool entered = false;
  double t0 = 0.0;  // first sample after which the ball is never left
};

InvarianceReport eventual_invariance_check(const solver::Trajectory& traj,
                                           const LinfBall& ball,
                                           double phi_linf, double eps,
                                           double tol = 1e-9);

// e1(t) = c_v1_sq e^{-mu1 t} + gain * lq_q * e^{-rate t} + offset, t >= -r.
struct H1Envelope {
  double mu1 = 0.0;
  double gain = 0.0;
  double rate = 0.0;    // <= mu1 / 2
  double offset = 0.0;
  double m_prime = 0.0;
  double c6 = 0.0;
  ConstantLedger ledger;

  double value(double t, const PhiNorms& phi) const;
};

H1Envelope h1_envelope(const model::ProblemSpec& p, const LqChain& chain);

// e2 bounds int_t^{t+1} |Delta u|^2 ds; e3 bounds the mixed-integral window
// int_t^{t+1} int |u|^{q-2}|grad u|^2 dx ds. Both share the e1 record shape.
struct IntegratedEnvelopes {
  H1Envelope h1;          // the underlying e1 chain
  double e2_gain = 0.0;   // multiplies (lq_q + c_v1_sq) e^{-rate t}
  double e2_offset = 0.0;
  double e3_gain = 0.0;   // multiplies lq_q e^{-lambda_q t}
  double e3_offset = 0.0;
  double lambda_q = 0.0;
  double rate = 0.0;
  ConstantLedger ledger;

  double e2(double t, const PhiNorms& phi) const;
  double e3(double t, const PhiNorms& phi) const;
  // Finite-horizon bound int_0^T ... <= c_T(horizon) * (lq_q + 1).
  double c_T(double horizon) const;

  double eps_qmb = 0.0;   // eps0 * q * m * b1'
  double c_dprime = 0.0;
  double q = 0.0;
  double m_big = 0.0;
  double eta_rho = 0.0;   // eta * rho_q
  double exp_lr = 0.0;    // e^{lambda_q r}
};

IntegratedEnvelopes integrated_envelopes(const model::ProblemSpec& p,
                                         const LqChain& chain);

// |Delta u(t)|^2 <= data_gain * data_norm(phi) * e^{-rate t} + offset, with
// (data_gain, offset) calibrated on a designated trajectory. Only available
// in decay form for separated delays.
struct H2Envelope {
  double data_gain = 0.0;
  double rate = 0.0;
  double offset = 0.0;
  bool calibrated = false;

  static double data_norm(const PhiNorms& phi) {
    return phi.c_v2_sq + phi.lq_q + phi.mixed_q;
  }
  double value(double t, const PhiNorms& phi) const {
    return data_gain * data_norm(phi) * std::exp(-rate * t) + offset;
  }
};

H2Envelope h2_envelope(const model::ProblemSpec& p, const LqChain& chain,
                       const H1Envelope& h1, const solver::Trajectory& calib,
                       const PhiNorms& calib_phi, double q,
                       double calibration_t_start = 0.0);

struct EnvelopeReport {
  std::string norm_name;
  struct Row {
    double t;
    double observed;
    double bound;
    double margin;  // bound + tol - observed
  };
  std::vector<Row> rows;
  int violations = 0;
  double worst_margin = 0.0;
  std::optional<double> first_violation_time;
};

// Compares an observable against an envelope at every sampled node, with a
// tolerance of rel_tol * bound + abs_tol absorbing discretization error.
EnvelopeReport check_envelope(
    const solver::Trajectory& traj,
    const std::function<double(const spectral::SpectralField&)>& observe,
    const std::function<double(double)>& bound, const std::string& norm_name,
    double rel_tol = 1e-6, double abs_tol = 1e-12, int stride = 1);

}  // namespace rpde::estimates

#endif  // RPDE_ESTIMATES_HPP_
