#pragma once

// OR and NOR gate sequences and their readouts.
//
// OR: a probe pulse at detuning Omega_SB/sqrt(2) transfers |01> (and only
// |01>) into its dressed excited manifold, then a sideband+cooling segment
// pins the excitation as |11,0>. NOR first shelves ion 1's |1> into |e>,
// probes at Omega_SB/2 (which moves |00> into the dressed branch cooled
// down to |10,0>), and finally pumps |e> to |0>.
//
// Readout cannot distinguish |1> from |f| or |e>, so logical results fold
// every non-|0> level into bit 1.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "lindgate/analytics.hpp"
#include "lindgate/dynamics.hpp"

namespace lindgate {

struct GateSpec {
  GateKind kind = GateKind::or_gate;
  std::optional<double> probe_detuning;   // rad/s; default: the gate's resonance
  std::optional<double> probe_duration;   // s; default 2*pi/omega_f
  double dissipation_duration = 1e-3;     // s
  std::optional<double> pump_duration;    // s; default 5/gamma_e
  std::vector<int> pump_ions{1};
  double init_fidelity = 1.0;             // weight of the intended initial state

  double detuning(const SystemParams& p) const {
    return probe_detuning.value_or(gate_detuning(p, kind));
  }
  // One pi rotation of the resonant dressed branch: the OR resonance is
  // driven at omega_f/2, the NOR resonance at omega_f/sqrt(2).
  double probe_time(const SystemParams& p) const {
    if (probe_duration) return *probe_duration;
    return kind == GateKind::or_gate ? default_probe_duration(p)
                                     : default_probe_duration(p) / std::sqrt(2.0);
  }
  double pump_time(const SystemParams& p) const {
    return pump_duration.value_or(5.0 / p.gamma_e);
  }

  void validate(const SystemParams& p) const {
    if (!(probe_time(p) > 0.0)) throw std::invalid_argument("probe duration must be > 0");
    if (!(dissipation_duration > 0.0))
      throw std::invalid_argument("dissipation duration must be > 0");
    if (kind == GateKind::nor_gate && !(pump_time(p) > 0.0))
      throw std::invalid_argument("pump duration must be > 0");
    if (init_fidelity < 0.0 || init_fidelity > 1.0)
      throw std::invalid_argument("init_fidelity must be within [0, 1]");
  }
};

using LogicalPair = std::pair<int, int>;

inline constexpr std::array<LogicalPair, 4> kLogicalInputs{
    LogicalPair{0, 0}, LogicalPair{0, 1}, LogicalPair{1, 0}, LogicalPair{1, 1}};

inline int logical_index(LogicalPair bits) { return 2 * bits.first + bits.second; }

// OR writes a|b onto the first qubit; NOR writes its negation. The second
// qubit passes through.
inline LogicalPair intended_output(GateKind kind, LogicalPair input) {
  int top = input.first | input.second;
  if (kind == GateKind::nor_gate) top = 1 - top;
  return {top, input.second};
}

// Populations folded to logical bits: |0> reads 0, everything else reads 1.
inline std::array<double, 4> logical_populations(const DensityState& s) {
  std::array<double, 4> out{};
  for (int i = 0; i < s.space.dim(); ++i) {
    auto [a, b, n] = s.space.unindex(i);
    int b1 = Level(a) == Level::zero ? 0 : 1;
    int b2 = Level(b) == Level::zero ? 0 : 1;
    out[2 * b1 + b2] += s.rho(i, i).real();
  }
  return out;
}

inline PulseSequence build_sequence(const GateSpec& spec, const SystemParams& p) {
  spec.validate(p);
  PulseSequence seq;
  if (spec.kind == GateKind::nor_gate) {
    PulseSegment shelve;
    shelve.label = "shelve";
    shelve.duration = 0.0;
    shelve.extra_unitaries.push_back(pi_pulse(p.space(), 1, Level::one, Level::e));
    seq.push_back(std::move(shelve));
  }
  PulseSegment probe;
  probe.label = "probe";
  probe.duration = spec.probe_time(p);
  probe.probe_on = true;
  probe.sideband_on = true;
  seq.push_back(std::move(probe));

  PulseSegment dissipate;
  dissipate.label = "dissipate";
  dissipate.duration = spec.dissipation_duration;
  dissipate.sideband_on = true;
  dissipate.cooling_on = true;
  seq.push_back(std::move(dissipate));

  if (spec.kind == GateKind::nor_gate) {
    PulseSegment pump;
    pump.label = "pump";
    pump.duration = spec.pump_time(p);
    pump.pump_ions = spec.pump_ions;
    seq.push_back(std::move(pump));
  }
  return seq;
}

namespace detail {

inline Level level_of_bit(int bit) { return bit == 0 ? Level::zero : Level::one; }

// Imperfectly prepared inputs leave the residual weight in the pre-pulse
// ground state |00>.
inline DensityState prepared_state(const SystemParams& p, LogicalPair input,
                                   double init_fidelity) {
  DensityState target =
      thermal_initial_state(p, level_of_bit(input.first), level_of_bit(input.second));
  if (init_fidelity >= 1.0 || input == LogicalPair{0, 0}) return target;
  DensityState rest = thermal_initial_state(p, Level::zero, Level::zero);
  target.rho = init_fidelity * target.rho + (1.0 - init_fidelity) * rest.rho;
  return target;
}

}  // namespace detail

// --- truth tables ---------------------------------------------------------------

struct TruthTableRow {
  LogicalPair input;
  std::array<double, 4> outputs{};  // probability of logical 00, 01, 10, 11
  double success = 0.0;             // mass on the intended output
};

struct TruthTable {
  GateKind kind = GateKind::or_gate;
  std::array<TruthTableRow, 4> rows;  // input order 00, 01, 10, 11
  double average_fidelity = 0.0;
};

// Runs one logical input through the gate sequence. `probe_scale` multiplies
// the probe Rabi frequency (amplitude noise on the single-ion beam); the
// sideband drive, detuning, and durations stay calibrated at the nominal
// parameter values.
inline TruthTableRow simulate_input(const GateSpec& spec, const SystemParams& params,
                                    const IntegratorConfig& cfg, LogicalPair input,
                                    double probe_scale = 1.0) {
  PulseSequence seq = build_sequence(spec, params);
  SystemParams p = params;
  p.delta_probe = spec.detuning(params);
  p.omega_f = probe_scale * params.omega_f;

  DensityState initial = detail::prepared_state(p, input, spec.init_fidelity);
  EvolveResult r = run_sequence(initial, seq, p, cfg);
  TruthTableRow row;
  row.input = input;
  row.outputs = logical_populations(r.state);
  row.success = row.outputs[logical_index(intended_output(spec.kind, input))];
  return row;
}

// All four logical inputs, in input order.
inline TruthTable simulate_truth_table(const GateSpec& spec, const SystemParams& params,
                                       const IntegratorConfig& cfg = {},
                                       double probe_scale = 1.0) {
  TruthTable table;
  table.kind = spec.kind;
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    table.rows[i] = simulate_input(spec, params, cfg, kLogicalInputs[i], probe_scale);
    sum += table.rows[i].success;
  }
  table.average_fidelity = 0.25 * sum;
  return table;
}

// --- scans ----------------------------------------------------------------------

struct ProbeScanResult {
  double detuning = 0.0;  // rad/s
  std::vector<double> times;
  std::array<std::vector<double>, 4> remaining;  // input-state population, input order
};

// Probe+sideband drive only: population remaining in each logical input state
// versus pulse duration, at an explicit probe detuning.
inline ProbeScanResult probe_scan(const SystemParams& params, const IntegratorConfig& cfg,
                                  double detuning, const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("scan needs at least one time");
  SystemParams p = params;
  p.delta_probe = detuning;

  PulseSegment seg;
  seg.label = "probe";
  seg.duration = times.back();
  seg.probe_on = true;
  seg.sideband_on = true;

  ProbeScanResult scan;
  scan.detuning = detuning;
  scan.times = times;
  for (int i = 0; i < 4; ++i) {
    LogicalPair input = kLogicalInputs[i];
    DensityState initial = detail::prepared_state(p, input, 1.0);
    std::vector<double>& curve = scan.remaining[i];
    evolve_observed(initial, seg, p, cfg, times,
                    [&](double, const DensityState& s) {
                      curve.push_back(logical_populations(s)[logical_index(input)]);
                    });
  }
  return scan;
}

struct CoolingScanResult {
  std::vector<double> times;
  std::vector<double> p_f0, p_10;        // electronic populations, phonons traced out
  std::vector<double> p_f0_n0, p_10_n0;  // joint with the motional ground state
  std::vector<double> mean_n, ground_frac;
};

// Dissipation after a maximal probe transfer from |00>: prepare by driving
// thermal |00> at the Omega_SB/2 resonance for one pi time (populating the
// lower dressed state of {|f0,0>, |10,1>}), then evolve sideband+cooling.
inline CoolingScanResult cooling_scan(const SystemParams& params,
                                      const IntegratorConfig& cfg,
                                      const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("scan needs at least one time");
  SystemParams p = params;
  p.delta_probe = gate_detuning(p, GateKind::nor_gate);

  PulseSegment prep;
  prep.label = "probe";
  prep.duration = default_probe_duration(p) / std::sqrt(2.0);
  prep.probe_on = true;
  prep.sideband_on = true;
  DensityState initial =
      evolve(thermal_initial_state(p, Level::zero, Level::zero), prep, p, cfg).state;

  PulseSegment seg;
  seg.label = "dissipate";
  seg.duration = times.back();
  seg.sideband_on = true;
  seg.cooling_on = true;

  const HilbertSpace space = p.space();
  const int i_f0 = basis_index(space, BasisLabel{Level::f, Level::zero, 0});
  const int i_10 = basis_index(space, BasisLabel{Level::one, Level::zero, 0});

  CoolingScanResult scan;
  scan.times = times;
  evolve_observed(initial, seg, p, cfg, times, [&](double t, const DensityState& s) {
    TrajectoryPoint pt = trajectory_point(t, s);
    scan.p_f0.push_back(pt.pops[4 * int(Level::f) + int(Level::zero)]);
    scan.p_10.push_back(pt.pops[4 * int(Level::one) + int(Level::zero)]);
    scan.p_f0_n0.push_back(s.rho(i_f0, i_f0).real());
    scan.p_10_n0.push_back(s.rho(i_10, i_10).real());
    scan.mean_n.push_back(pt.mean_n);
    scan.ground_frac.push_back(pt.ground_frac);
  });
  return scan;
}

// Full comparison table: closed-form, simulated, and measured gate errors for
// the two thermally limited inputs.
inline ErrorReport error_table(const SystemParams& params, const IntegratorConfig& cfg,
                               double sigma_frac = 0.04, int nodes = 7,
                               const GateSpec& spec = {}) {
  return error_comparison(params, sigma_frac, nodes,
                          [&](const std::string& input, double s) {
                            LogicalPair bits = input == "00" ? LogicalPair{0, 0}
                                                             : LogicalPair{0, 1};
                            return 1.0 -
                                   simulate_input(spec, params, cfg, bits, s).success;
                          });
}

}  // namespace lindgate
