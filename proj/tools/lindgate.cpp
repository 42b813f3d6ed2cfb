// Command-line front end. Each subcommand loads one config file, runs one
// analysis, writes its artifacts into the output directory, and prints a
// short summary. Exit codes: 0 success, 2 config problem, 3 computation or
// I/O failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lindgate/config.hpp"
#include "lindgate/dynamics.hpp"
#include "lindgate/gates.hpp"
#include "lindgate/output.hpp"
#include "lindgate/spectral.hpp"
#include "lindgate/sweep.hpp"

namespace {

using namespace lindgate;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
  std::cout << "wrote " << path.string() << "\n";
}

std::vector<double> time_grid(double t_max, int points) {
  std::vector<double> times(points);
  for (int i = 0; i < points; ++i) times[i] = t_max * i / (points - 1);
  return times;
}

std::string us(double seconds) {
  return detail::format_number(round_sig(1e6 * seconds, 6)) + " us";
}

std::string hz(double rad_per_s) {
  return detail::format_number(round_sig(hz_from_angular(rad_per_s), 6)) + " Hz";
}

// Everything below works on a validated config; `dry` short-circuits each
// command after the plan is printed.

struct Invocation {
  RunConfig cfg;
  fs::path out_dir;
  bool dry = false;
};

void print_plan_header(const Invocation& inv, const std::string& command) {
  const RunConfig& cfg = inv.cfg;
  GateSpec spec = cfg.gate();
  SystemParams p = cfg.params();
  std::cout << "lindgate " << command << (inv.dry ? " (dry run)" : "") << "\n"
            << "  gate " << cfg.gate_kind << ", omega_f/2pi "
            << detail::format_number(cfg.omega_f_hz) << " Hz, omega_sb/2pi "
            << detail::format_number(cfg.omega_sb_hz) << " Hz, fock cutoff "
            << cfg.fock_cutoff << "\n"
            << "  probe detuning " << hz(spec.detuning(p)) << ", probe "
            << us(spec.probe_time(p)) << ", dissipation "
            << us(spec.dissipation_duration) << "\n";
}

void finish_dry_run(const std::vector<std::string>& outputs) {
  std::cout << "  would write:";
  for (const std::string& name : outputs) std::cout << ' ' << name;
  std::cout << "\ndry run: no computation performed\n";
}

int cmd_dressed(const Invocation& inv) {
  print_plan_header(inv, "dressed");
  std::cout << "  manifolds reached from the logical inputs at n = 0, 1\n";
  if (inv.dry) {
    finish_dry_run({"dressed.json"});
    return 0;
  }
  DressedReport report = dressed_report(inv.cfg);
  write_file(inv.out_dir / "dressed.json", dump_json(dressed_json(inv.cfg, report)));
  std::cout << dressed_text(inv.cfg, report);
  return 0;
}

int cmd_scan(const Invocation& inv) {
  const RunConfig& cfg = inv.cfg;
  bool do_probe = cfg.scan.kind != "cooling";
  bool do_cooling = cfg.scan.kind != "probe";
  print_plan_header(inv, "scan");
  std::cout << "  scan kind " << cfg.scan.kind << ", " << cfg.scan.points
            << " points";
  if (do_probe)
    std::cout << "; probe at " << hz(cfg.scan_detuning()) << " to "
              << us(cfg.scan.probe_t_max_s);
  if (do_cooling) std::cout << "; cooling to " << us(cfg.scan.cooling_t_max_s);
  std::cout << "\n";
  if (inv.dry) {
    std::vector<std::string> outputs;
    if (do_probe) outputs.push_back("probe_scan.csv");
    if (do_cooling) outputs.push_back("cooling_scan.csv");
    outputs.push_back("scan.json");
    finish_dry_run(outputs);
    return 0;
  }

  SystemParams p = cfg.params();
  IntegratorConfig ic = cfg.integrator();
  ProbeScanResult probe;
  CoolingScanResult cooling;
  if (do_probe) {
    probe = probe_scan(p, ic, cfg.scan_detuning(),
                       time_grid(cfg.scan.probe_t_max_s, cfg.scan.points));
    write_file(inv.out_dir / "probe_scan.csv", probe_scan_csv(cfg, probe));
  }
  if (do_cooling) {
    cooling = cooling_scan(p, ic, time_grid(cfg.scan.cooling_t_max_s, cfg.scan.points));
    write_file(inv.out_dir / "cooling_scan.csv", cooling_scan_csv(cfg, cooling));
  }
  write_file(inv.out_dir / "scan.json",
             dump_json(scan_json(cfg, do_probe ? &probe : nullptr,
                                 do_cooling ? &cooling : nullptr)));
  std::cout << scan_text(do_probe ? &probe : nullptr, do_cooling ? &cooling : nullptr);
  return 0;
}

int cmd_truth_table(const Invocation& inv) {
  print_plan_header(inv, "truth-table");
  std::cout << "  simulates all four logical inputs at nominal drive\n";
  if (inv.dry) {
    finish_dry_run({"truth_table.json"});
    return 0;
  }
  TruthTable table =
      simulate_truth_table(inv.cfg.gate(), inv.cfg.params(), inv.cfg.integrator());
  write_file(inv.out_dir / "truth_table.json", dump_json(truth_table_json(inv.cfg, table)));
  std::cout << truth_table_text(table);
  return 0;
}

int cmd_error_table(const Invocation& inv) {
  const RunConfig& cfg = inv.cfg;
  if (cfg.gate_kind != "or")
    throw ConfigError("error-table compares or-gate errors; set gate.kind = or");
  print_plan_header(inv, "error-table");
  std::cout << "  inputs 00, 01; " << cfg.spread.nodes
            << "-node average over a "
            << detail::format_number(round_sig(100.0 * cfg.spread.sigma_frac, 3))
            << "% Rabi-frequency spread\n";
  if (inv.dry) {
    finish_dry_run({"error_table.json"});
    return 0;
  }
  ErrorReport report = error_table(cfg.params(), cfg.integrator(), cfg.spread.sigma_frac,
                                   cfg.spread.nodes, cfg.gate());
  write_file(inv.out_dir / "error_table.json", dump_json(error_table_json(cfg, report)));
  std::cout << error_table_text(report);
  return 0;
}

int cmd_converge(const Invocation& inv) {
  const RunConfig& cfg = inv.cfg;
  print_plan_header(inv, "converge");
  std::cout << "  input " << cfg.converge.input << ", fock cutoffs";
  for (int c : cfg.converge.cutoffs) std::cout << ' ' << c;
  std::cout << ", threshold " << detail::format_number(cfg.converge.threshold) << "\n";
  if (inv.dry) {
    finish_dry_run({"convergence.json"});
    return 0;
  }

  GateSpec spec = cfg.gate();
  SystemParams params = cfg.params();
  LogicalPair input{cfg.converge.input[0] - '0', cfg.converge.input[1] - '0'};
  PulseSequence seq = build_sequence(spec, params);
  SystemParams p = params;
  p.delta_probe = spec.detuning(params);
  ConvergenceReport report = convergence_check(
      [&](const SystemParams& pc) {
        return lindgate::detail::prepared_state(pc, input, spec.init_fidelity);
      },
      seq, p, cfg.integrator(), cfg.converge.cutoffs, cfg.converge.threshold);
  write_file(inv.out_dir / "convergence.json", dump_json(convergence_json(cfg, report)));
  std::cout << convergence_text(report);
  return 0;
}

int cmd_sweep(const Invocation& inv) {
  const RunConfig& cfg = inv.cfg;
  SweepLayout layout = sweep_layout(cfg);  // budget guard runs before anything else
  print_plan_header(inv, "sweep");
  std::cout << "  objective " << cfg.sweep.objective << ", " << layout.coords.size()
            << " points (cap " << cfg.sweep.max_points << ")\n";
  for (std::size_t a = 0; a < layout.parameters.size(); ++a)
    std::cout << "  axis " << a + 1 << ": " << layout.parameters[a] << " ["
              << detail::format_number(jnum(layout.axis_values[a].front())) << ", "
              << detail::format_number(jnum(layout.axis_values[a].back())) << "], "
              << layout.axis_values[a].size() << " points, " << layout.scales[a]
              << "\n";
  if (inv.dry) {
    finish_dry_run({"sweep.json", "sweep_points.csv"});
    return 0;
  }
  SweepResult result = run_sweep(cfg);
  write_file(inv.out_dir / "sweep.json", dump_json(sweep_json(cfg, result)));
  write_file(inv.out_dir / "sweep_points.csv", sweep_csv(cfg, result));
  std::cout << sweep_text(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dissipative two-ion or/nor gate simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_flag;
  bool dry = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (key = value lines)")
        ->required();
    sub->add_option("--out", out_flag, "output directory (default: config output.dir)");
    sub->add_flag("--dry-run", dry, "validate the config and print the plan only");
  };
  add_common(app.add_subcommand("dressed", "dressed manifolds and resonance offsets"));
  add_common(app.add_subcommand("scan", "probe depletion and cooling time series"));
  add_common(app.add_subcommand("truth-table", "gate truth table at nominal drive"));
  add_common(app.add_subcommand("error-table",
                                "analytic / simulated / measured error comparison"));
  add_common(app.add_subcommand("converge", "fock-cutoff convergence check"));
  add_common(app.add_subcommand("sweep", "objective over a 1d or 2d parameter grid"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Invocation inv;
    inv.cfg = parse_config(read_file(config_path));
    if (!out_flag.empty()) inv.cfg.output_dir = out_flag;
    inv.out_dir = inv.cfg.output_dir;
    inv.dry = dry;
    if (!inv.dry) fs::create_directories(inv.out_dir);

    if (app.got_subcommand("dressed")) return cmd_dressed(inv);
    if (app.got_subcommand("scan")) return cmd_scan(inv);
    if (app.got_subcommand("truth-table")) return cmd_truth_table(inv);
    if (app.got_subcommand("error-table")) return cmd_error_table(inv);
    if (app.got_subcommand("converge")) return cmd_converge(inv);
    return cmd_sweep(inv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
