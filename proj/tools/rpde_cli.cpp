#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rpde/harness.hpp"

namespace fs = std::filesystem;
using namespace rpde;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "problem config file")
      ->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_flag("--quiet", opts.quiet, "suppress progress output");
}

std::ofstream open_out(const CommonOpts& opts, const std::string& name) {
  fs::create_directories(opts.out_dir);
  const fs::path path = fs::path(opts.out_dir) / name;
  std::ofstream out(path, std::ios::binary);  // LF endings on all platforms
  if (!out) throw ConfigError("cannot open output file " + path.string());
  return out;
}

int dispatch(const std::string& cmd, const CommonOpts& opts,
             const std::string& sweep_axis,
             const std::vector<double>& sweep_values, int oracle_nodes,
             double oracle_threshold) {
  harness::RunConfig cfg = harness::parse_config_file(opts.config_path);

  if (cmd == "simulate") {
    std::ofstream csv = open_out(opts, "trajectory.csv");
    return harness::run_simulate(cfg, csv, opts.quiet, std::cerr);
  }

  if (cmd == "envelope") {
    harness::EnvelopeRunResult res;
    try {
      res = harness::run_envelope(cfg, opts.quiet, std::cerr);
    } catch (const DivergenceError& e) {
      std::cerr << "divergence: " << e.what() << "\n";
      return harness::kDivergence;
    }
    for (const auto& rep : res.reports) {
      std::ofstream out = open_out(opts, "envelope_" + rep.norm_name + ".csv");
      harness::write_report_csv(rep, out);
    }
    std::ofstream ledger = open_out(opts, "constants.txt");
    ledger << res.ledger_table;
    if (!opts.quiet) std::cout << res.ledger_table;
    return res.exit_code;
  }

  if (cmd == "sweep") {
    const auto rows = harness::run_sweep(cfg, sweep_axis, sweep_values);
    std::ofstream out = open_out(opts, "sweep_" + sweep_axis + ".csv");
    harness::write_sweep_csv(sweep_axis, rows, out);
    for (const auto& r : rows) {
      if (r.failed && !opts.quiet) {
        std::cerr << "sweep " << sweep_axis << " = " << r.axis_value
                  << " failed: " << r.error << "\n";
      }
    }
    return harness::kOk;
  }

  if (cmd == "oracle") {
    const auto res = harness::run_oracle(cfg, oracle_nodes, oracle_threshold);
    std::cout << res.diagnosis << "\n";
    return res.flagged ? harness::kEnvelopeViolation : harness::kOk;
  }

  if (cmd == "check-structure") {
    const auto res = harness::run_check_structure(cfg);
    std::cout << "f: F0 " << (res.f.f0_ok ? "ok" : "FAIL") << " (margin "
              << res.f.worst_f0_margin << "), F1 "
              << (res.f.f1_ok ? "ok" : "FAIL") << " (margin "
              << res.f.worst_f1_margin << ")\n";
    std::cout << "g: G1 " << (res.g.g1_ok ? "ok" : "FAIL")
              << " (effective b0' " << res.g.effective_b0p
              << ", effective b1' " << res.g.effective_b1p << ")\n";
    return res.pass ? harness::kOk : harness::kEnvelopeViolation;
  }

  throw ConfigError("unknown subcommand " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"retarded parabolic equation simulator and envelope checker"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string sweep_axis;
  std::vector<double> sweep_values;
  int oracle_nodes = 512;
  double oracle_threshold = 1e-3;

  auto* sim = app.add_subcommand("simulate", "integrate and write norm CSV");
  add_common(sim, opts);
  auto* env = app.add_subcommand("envelope", "check decay envelopes");
  add_common(env, opts);
  auto* swp = app.add_subcommand("sweep", "parameter sweep");
  add_common(swp, opts);
  swp->add_option("--axis", sweep_axis,
                  "q | r | dt | n_modes | delay_gain")
      ->required();
  swp->add_option("--values", sweep_values, "axis values")->required();
  auto* orc = app.add_subcommand("oracle",
                                 "finite-difference cross-validation");
  add_common(orc, opts);
  orc->add_option("--nodes", oracle_nodes, "FD grid divisions");
  orc->add_option("--threshold", oracle_threshold, "flag threshold");
  auto* chk = app.add_subcommand("check-structure",
                                 "sampled structure-condition check");
  add_common(chk, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    return dispatch(app.get_subcommands().front()->get_name(), opts,
                    sweep_axis, sweep_values, oracle_nodes, oracle_threshold);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return harness::kConfigError;
  } catch (const OutOfTheoryError& e) {
    std::cerr << e.what() << "\n";
    return harness::kConfigError;
  } catch (const DivergenceError& e) {
    std::cerr << e.what() << "\n";
    return harness::kDivergence;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return harness::kConfigError;
  }
}
