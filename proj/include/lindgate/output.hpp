#pragma once

// Artifact builders for the command-line tool: JSON documents for tables and
// spectra, CSV for time series, and the short human-readable summaries the
// tool prints.
//
// Determinism contract: the same RunConfig produces byte-identical files.
// Keys keep insertion order (nlohmann::ordered_json), and every float is
// rounded to 12 significant digits before insertion so the emitted digits do
// not depend on accumulated noise in the last bits. Percentages are rounded
// to integers only in the human-readable summaries.
//
// Every artifact carries a params_echo block: the full config, key by key,
// in canonical text form, so a result file identifies the run that made it.

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lindgate/analytics.hpp"
#include "lindgate/config.hpp"
#include "lindgate/dynamics.hpp"
#include "lindgate/gates.hpp"
#include "lindgate/spectral.hpp"

namespace lindgate {

using ordered_json = nlohmann::ordered_json;

inline double round_sig(double x, int digits = 12) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

// Shorthand for the rounded float that goes into every JSON/CSV number slot.
inline double jnum(double x) { return round_sig(x); }

inline ordered_json params_echo(const RunConfig& cfg) {
  ordered_json echo = ordered_json::object();
  for (const auto& b : config_keys()) echo[b.key] = b.get(cfg);
  return echo;
}

inline ordered_json artifact_header(const std::string& artifact, const RunConfig& cfg) {
  ordered_json j = ordered_json::object();
  j["tool"] = "lindgate";
  j["artifact"] = artifact;
  j["params_echo"] = params_echo(cfg);
  return j;
}

inline std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

inline int percent(double p) { return static_cast<int>(std::lround(100.0 * p)); }

// 6-digit display form for the human summaries, with sub-microhertz noise
// snapped to zero so exact symmetries print as such.
inline std::string fmt6(double x) {
  return detail::format_number(std::abs(x) < 1e-6 ? 0.0 : round_sig(x, 6));
}

namespace detail {

// CSV files open with the config echoed as comment lines, then the header
// row. Readers that skip '#' comments get a plain table.
inline std::string csv_preamble(const std::string& artifact, const RunConfig& cfg) {
  std::ostringstream out;
  out << "# lindgate " << artifact << "\n";
  for (const auto& b : config_keys())
    out << "# " << b.key << " = " << b.get(cfg) << "\n";
  return out.str();
}

inline void csv_row(std::ostringstream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_number(jnum(values[i]));
  }
  out << '\n';
}

inline const char* kInputNames[4] = {"00", "01", "10", "11"};

}  // namespace detail

// --- dressed spectra ------------------------------------------------------------

struct DressedReport {
  struct SubspaceEntry {
    BasisLabel initial;
    std::vector<BasisLabel> labels;
    std::vector<double> eigenvalues;     // rad/s, ascending
    std::vector<double> probe_overlaps;  // rad/s, aligned with eigenvalues
  };
  struct ResonanceEntry {
    BasisLabel initial;
    std::vector<ResonanceOffset> rows;
  };
  std::vector<SubspaceEntry> subspaces;    // at zero probe detuning
  std::vector<ResonanceEntry> resonances;  // at the configured gate's detuning
  GateKind gate = GateKind::or_gate;
};

// Collects the probe-reachable manifolds of the logical inputs at phonon
// numbers 0 and 1. Inputs with ion 1 outside the probe's reach contribute
// nothing and are skipped.
inline DressedReport dressed_report(const RunConfig& cfg) {
  SystemParams p = cfg.params();
  p.delta_probe.reset();
  DressedReport report;
  report.gate = gate_kind_from_string(cfg.gate_kind);
  for (int n : {0, 1}) {
    for (int i = 0; i < 4; ++i) {
      LogicalPair bits = kLogicalInputs[i];
      BasisLabel initial{bits.first == 0 ? Level::zero : Level::one,
                         bits.second == 0 ? Level::zero : Level::one, n};
      Subspace sub = excited_subspace(initial, p);
      if (sub.labels.empty()) continue;

      DressedReport::SubspaceEntry entry;
      entry.initial = initial;
      entry.labels = sub.labels;
      for (const DressedState& d : dressed_spectrum(sub)) {
        entry.eigenvalues.push_back(d.energy);
        entry.probe_overlaps.push_back(d.probe_overlap);
      }
      report.subspaces.push_back(std::move(entry));

      DressedReport::ResonanceEntry res;
      res.initial = initial;
      res.rows = resonance_offsets(initial, p, report.gate);
      report.resonances.push_back(std::move(res));
    }
  }
  return report;
}

inline ordered_json dressed_json(const RunConfig& cfg, const DressedReport& report) {
  ordered_json j = artifact_header("dressed_spectra", cfg);
  j["resonant_detuning_hz"] = {
      {"or", jnum(hz_from_angular(gate_detuning(cfg.params(), GateKind::or_gate)))},
      {"nor", jnum(hz_from_angular(gate_detuning(cfg.params(), GateKind::nor_gate)))}};

  ordered_json subs = ordered_json::array();
  for (const auto& s : report.subspaces) {
    ordered_json entry = ordered_json::object();
    entry["initial"] = s.initial.str();
    ordered_json labels = ordered_json::array();
    for (const BasisLabel& l : s.labels) labels.push_back(l.str());
    entry["labels"] = labels;
    ordered_json evals = ordered_json::array(), overlaps = ordered_json::array();
    for (double e : s.eigenvalues) evals.push_back(jnum(hz_from_angular(e)));
    for (double o : s.probe_overlaps) overlaps.push_back(jnum(hz_from_angular(o)));
    entry["eigenvalues_hz"] = evals;
    entry["probe_overlaps_hz"] = overlaps;
    subs.push_back(std::move(entry));
  }
  j["subspaces"] = subs;

  ordered_json res = ordered_json::array();
  for (const auto& r : report.resonances) {
    ordered_json entry = ordered_json::object();
    entry["initial"] = r.initial.str();
    entry["gate"] = gate_kind_name(report.gate);
    ordered_json rows = ordered_json::array();
    for (const ResonanceOffset& row : r.rows) {
      rows.push_back({{"ground_index", row.ground_index},
                      {"excited_index", row.excited_index},
                      {"delta_d_hz", jnum(hz_from_angular(row.delta_d))},
                      {"omega_d_hz", jnum(hz_from_angular(row.omega_d))},
                      {"ground_weight", jnum(row.ground_weight)}});
    }
    entry["rows"] = rows;
    res.push_back(std::move(entry));
  }
  j["resonances"] = res;
  return j;
}

inline std::string dressed_text(const RunConfig& cfg, const DressedReport& report) {
  std::ostringstream out;
  SystemParams p = cfg.params();
  out << "dressed manifolds at omega_sb/2pi = " << detail::format_number(cfg.omega_sb_hz)
      << " Hz (zero probe detuning)\n";
  for (const auto& s : report.subspaces) {
    out << "  " << s.initial.str() << " -> {";
    for (std::size_t i = 0; i < s.labels.size(); ++i)
      out << (i ? ", " : "") << s.labels[i].str();
    out << "}  eigenvalues/2pi:";
    for (double e : s.eigenvalues) out << ' ' << fmt6(hz_from_angular(e));
    out << " Hz\n";
  }
  out << "resonant probe detuning: or "
      << fmt6(hz_from_angular(gate_detuning(p, GateKind::or_gate))) << " Hz, nor "
      << fmt6(hz_from_angular(gate_detuning(p, GateKind::nor_gate))) << " Hz\n";
  out << "resonance offsets for gate=" << gate_kind_name(report.gate) << ":\n";
  for (const auto& r : report.resonances) {
    for (const ResonanceOffset& row : r.rows) {
      if (row.ground_weight < 1e-12) continue;
      out << "  " << r.initial.str() << "  Delta_d/2pi = "
          << fmt6(hz_from_angular(row.delta_d)) << " Hz, Omega_d/2pi = "
          << fmt6(hz_from_angular(row.omega_d)) << " Hz, weight "
          << detail::format_number(round_sig(row.ground_weight, 3)) << "\n";
    }
  }
  return out.str();
}

// --- scans ----------------------------------------------------------------------

inline std::string probe_scan_csv(const RunConfig& cfg, const ProbeScanResult& scan) {
  std::ostringstream out;
  out << detail::csv_preamble("probe_scan", cfg);
  out << "time_s,remaining_00,remaining_01,remaining_10,remaining_11\n";
  for (std::size_t i = 0; i < scan.times.size(); ++i)
    detail::csv_row(out, {scan.times[i], scan.remaining[0][i], scan.remaining[1][i],
                          scan.remaining[2][i], scan.remaining[3][i]});
  return out.str();
}

inline std::string cooling_scan_csv(const RunConfig& cfg, const CoolingScanResult& scan) {
  std::ostringstream out;
  out << detail::csv_preamble("cooling_scan", cfg);
  out << "time_s,p_f0,p_10,p_f0_n0,p_10_n0,mean_n,ground_frac\n";
  for (std::size_t i = 0; i < scan.times.size(); ++i)
    detail::csv_row(out, {scan.times[i], scan.p_f0[i], scan.p_10[i], scan.p_f0_n0[i],
                          scan.p_10_n0[i], scan.mean_n[i], scan.ground_frac[i]});
  return out.str();
}

inline ordered_json scan_json(const RunConfig& cfg, const ProbeScanResult* probe,
                              const CoolingScanResult* cooling) {
  ordered_json j = artifact_header("scan_summary", cfg);
  if (probe) {
    ordered_json s = ordered_json::object();
    s["detuning_hz"] = jnum(hz_from_angular(probe->detuning));
    s["t_max_s"] = jnum(probe->times.back());
    ordered_json depletion = ordered_json::object();
    for (int i = 0; i < 4; ++i)
      depletion[detail::kInputNames[i]] = jnum(1.0 - probe->remaining[i].back());
    s["final_depletion"] = depletion;
    s["csv"] = "probe_scan.csv";
    j["probe"] = s;
  }
  if (cooling) {
    ordered_json s = ordered_json::object();
    s["t_max_s"] = jnum(cooling->times.back());
    s["final_p_f0"] = jnum(cooling->p_f0.back());
    s["final_p_10"] = jnum(cooling->p_10.back());
    s["final_p_10_n0"] = jnum(cooling->p_10_n0.back());
    s["final_mean_n"] = jnum(cooling->mean_n.back());
    s["final_ground_frac"] = jnum(cooling->ground_frac.back());
    s["csv"] = "cooling_scan.csv";
    j["cooling"] = s;
  }
  return j;
}

inline std::string scan_text(const ProbeScanResult* probe,
                             const CoolingScanResult* cooling) {
  std::ostringstream out;
  if (probe) {
    out << "probe depletion after " << fmt6(1e6 * probe->times.back())
        << " us at detuning " << fmt6(hz_from_angular(probe->detuning)) << " Hz:";
    for (int i = 0; i < 4; ++i)
      out << "  " << detail::kInputNames[i] << " "
          << percent(1.0 - probe->remaining[i].back()) << "%";
    out << "\n";
  }
  if (cooling) {
    out << "cooling after " << fmt6(1e6 * cooling->times.back()) << " us:  P_f0 " << percent(cooling->p_f0.back()) << "%  P_10 "
        << percent(cooling->p_10.back()) << "%  ground fraction "
        << percent(cooling->ground_frac.back()) << "%  mean n "
        << detail::format_number(round_sig(cooling->mean_n.back(), 3)) << "\n";
  }
  return out.str();
}

// --- truth table ----------------------------------------------------------------

inline ordered_json truth_row_json(const TruthTableRow& row) {
  ordered_json r = ordered_json::object();
  r["input"] = detail::kInputNames[logical_index(row.input)];
  ordered_json outputs = ordered_json::object();
  for (int i = 0; i < 4; ++i) outputs[detail::kInputNames[i]] = jnum(row.outputs[i]);
  r["outputs"] = outputs;
  r["success"] = jnum(row.success);
  return r;
}

inline ordered_json truth_table_json(const RunConfig& cfg, const TruthTable& table) {
  ordered_json j = artifact_header("truth_table", cfg);
  j["gate"] = gate_kind_name(table.kind);
  ordered_json rows = ordered_json::array();
  for (const TruthTableRow& row : table.rows) rows.push_back(truth_row_json(row));
  j["rows"] = rows;
  j["average_fidelity"] = jnum(table.average_fidelity);
  return j;
}

inline std::string truth_table_text(const TruthTable& table) {
  std::ostringstream out;
  out << gate_kind_name(table.kind) << "-gate truth table (percent of population)\n";
  out << "  in\\out    00    01    10    11   success\n";
  for (const TruthTableRow& row : table.rows) {
    char line[96];
    std::snprintf(line, sizeof(line), "  %s      %4d  %4d  %4d  %4d   %4d%%\n",
                  detail::kInputNames[logical_index(row.input)],
                  percent(row.outputs[0]), percent(row.outputs[1]),
                  percent(row.outputs[2]), percent(row.outputs[3]),
                  percent(row.success));
    out << line;
  }
  out << "  average fidelity " << percent(table.average_fidelity) << "%\n";
  return out.str();
}

// --- error comparison -------------------------------------------------------

inline ordered_json error_table_json(const RunConfig& cfg, const ErrorReport& report) {
  ordered_json j = artifact_header("error_table", cfg);
  j["sigma_frac"] = jnum(report.sigma_frac);
  j["nodes"] = report.nodes;
  ordered_json entries = ordered_json::array();
  for (const ErrorReportEntry& e : report.entries) {
    ordered_json entry = ordered_json::object();
    entry["input"] = e.input;
    entry["analytic_error"] = jnum(e.analytic_error);
    entry["numeric_error"] = jnum(e.numeric_error);
    entry["measured_error"] = jnum(e.measured_error);
    ordered_json branches = ordered_json::array();
    for (const BranchContribution& b : e.breakdown.branches) {
      branches.push_back({{"branch", b.name},
                          {"n", b.n},
                          {"weight", jnum(b.weight)},
                          {"delta_d_hz", jnum(hz_from_angular(b.delta_d))},
                          {"omega_d_hz", jnum(hz_from_angular(b.omega_d))},
                          {"error", jnum(b.error)}});
    }
    entry["analytic_breakdown"] = branches;
    entries.push_back(std::move(entry));
  }
  j["entries"] = entries;
  return j;
}

inline std::string error_table_text(const ErrorReport& report) {
  std::ostringstream out;
  out << "or-gate fidelity (percent), "
      << detail::format_number(round_sig(100.0 * report.sigma_frac, 3))
      << "% Rabi spread\n";
  out << "  input   analytic   numeric   measured\n";
  for (const ErrorReportEntry& e : report.entries) {
    char line[80];
    std::snprintf(line, sizeof(line), "  %s      %5d      %5d     %5d\n",
                  e.input.c_str(), percent(1.0 - e.analytic_error),
                  percent(1.0 - e.numeric_error), percent(1.0 - e.measured_error));
    out << line;
  }
  return out.str();
}

// --- convergence ---------------------------------------------------------------

inline ordered_json convergence_json(const RunConfig& cfg,
                                     const ConvergenceReport& report) {
  ordered_json j = artifact_header("fock_convergence", cfg);
  j["input"] = cfg.converge.input;
  j["cutoffs"] = report.cutoffs;
  ordered_json diffs = ordered_json::array();
  for (double d : report.max_diffs) diffs.push_back(jnum(d));
  j["max_diffs"] = diffs;
  j["threshold"] = jnum(report.threshold);
  j["converged"] = report.converged;
  ordered_json pops = ordered_json::array();
  for (std::size_t i = 0; i < report.final_pops.size(); ++i) {
    ordered_json entry = ordered_json::object();
    entry["cutoff"] = report.cutoffs[i];
    ordered_json p = ordered_json::object();
    for (const auto& [pair, value] : report.final_pops[i]) {
      std::string key{level_char(pair.first), level_char(pair.second)};
      p[key] = jnum(value);
    }
    entry["populations"] = p;
    pops.push_back(std::move(entry));
  }
  j["final_populations"] = pops;
  return j;
}

inline std::string convergence_text(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "fock cutoffs";
  for (int c : report.cutoffs) out << ' ' << c;
  out << "; successive max population diffs:";
  if (report.max_diffs.empty()) out << " (single cutoff)";
  for (double d : report.max_diffs) out << ' ' << detail::format_number(round_sig(d, 3));
  out << "\n"
      << (report.converged ? "converged" : "NOT converged") << " at threshold "
      << detail::format_number(report.threshold) << "\n";
  return out.str();
}

}  // namespace lindgate
