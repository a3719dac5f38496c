#ifndef RPDE_HARNESS_HPP_
#define RPDE_HARNESS_HPP_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rpde/estimates.hpp"
#include "rpde/model.hpp"
#include "rpde/solver.hpp"

namespace rpde::harness {

// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kEnvelopeViolation = 2,
  kDivergence = 3,
  kConfigError = 4,
};

// Parsed form of one function selector, e.g. "linear:0.5" or "const:1".
struct KindSpec {
  std::string kind;
  std::vector<double> params;

  static KindSpec parse(const std::string& text);
};

struct RunConfig {
  model::ProblemSpec problem;
  std::function<double(double, double)> phi;  // initial datum phi(s, x)
  solver::SolverConfig solver;
  double q = 0.0;
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
  int stride = 10;
  int n_history_times = 65;
  // Retained selectors, for sweeps that rebuild the problem.
  std::map<std::string, std::map<std::string, std::string>> raw;

  spectral::Grid make_grid() const {
    return spectral::Grid(problem.length, solver.n_modes, solver.n_quad);
  }
  model::HistoryFunction make_history(const spectral::Grid& grid) const {
    return model::HistoryFunction(phi, problem.delays.r, n_history_times,
                                  grid);
  }
};

// Parses the line-oriented config format. Unknown sections or keys are
// errors; semantic violations name the field and constraint.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Writes rows (t, l2, lq_q, h1, h2, linf, mixed_q) at the sample stride.
// On divergence the partial CSV is flushed and kDivergence returned.
int run_simulate(const RunConfig& cfg, std::ostream& csv, bool quiet,
                 std::ostream& log);

struct EnvelopeRunResult {
  std::vector<estimates::EnvelopeReport> reports;
  std::string ledger_table;
  int exit_code = kOk;
};

EnvelopeRunResult run_envelope(const RunConfig& cfg, bool quiet,
                               std::ostream& log);

void write_report_csv(const estimates::EnvelopeReport& rep, std::ostream& out);

struct SweepRow {
  double axis_value = 0.0;
  bool failed = false;
  std::string error;
  double terminal_l2 = 0.0;
  double terminal_lq = 0.0;
  double terminal_h1 = 0.0;
  double fitted_decay_rate = 0.0;  // log-linear fit of l2 on [T/2, T]
  double rho_q_root = 0.0;         // rho_q^{1/q} (q axis only)
  double worst_lq_margin = 0.0;
};

// axis in {q, r, dt, n_modes, delay_gain}; runs execute concurrently but
// rows are emitted in axis order.
std::vector<SweepRow> run_sweep(const RunConfig& cfg, const std::string& axis,
                                const std::vector<double>& values);

void write_sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows,
                     std::ostream& out);

struct OracleResult {
  double rel_sup_diff = 0.0;  // relative sup_t difference of |u(t)|_2
  bool flagged = false;       // above threshold
  std::string diagnosis;
};

// Cross-validates the spectral run against a second-order finite-difference
// spatial discretization with the same ETD-RK2 time loop.
OracleResult run_oracle(const RunConfig& cfg, int fd_nodes = 512,
                        double threshold = 1e-3);

struct StructureResult {
  model::CheckFReport f;
  model::CheckGReport g;
  bool pass = false;
};

StructureResult run_check_structure(const RunConfig& cfg, double s_max = 10.0);

// 17-significant-digit CSV field formatting (deterministic bytes).
std::string csv_number(double v);

}  // namespace rpde::harness

#endif  // RPDE_HARNESS_HPP_
