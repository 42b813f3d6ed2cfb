// Gate sequences end to end: truth tables, scans, and the error comparison.
//
// The frozen success rates and scan values below were measured once with the
// default integrator settings and are pinned as regression anchors. Physics
// cross-checks that do not need the full Fock ladder run at a reduced cutoff
// with a slightly loosened tolerance to keep the suite fast; those cases say
// so explicitly.

#include <catch2/catch_amalgamated.hpp>

#include "lindgate/gates.hpp"
#include "oracle.hpp"

using namespace lindgate;

namespace {

// Settings for property checks where speed matters more than the last digit.
IntegratorConfig quick_config() {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-7;
  cfg.abs_tol = 1e-9;
  return cfg;
}

SystemParams shallow_params(const SystemParams& base = {}) {
  SystemParams p = base;
  p.fock_cutoff = 3;
  return p;
}

}  // namespace

TEST_CASE("intended outputs and gate composition") {
  REQUIRE(intended_output(GateKind::or_gate, {0, 0}) == LogicalPair{0, 0});
  REQUIRE(intended_output(GateKind::or_gate, {0, 1}) == LogicalPair{1, 1});
  REQUIRE(intended_output(GateKind::or_gate, {1, 0}) == LogicalPair{1, 0});
  REQUIRE(intended_output(GateKind::or_gate, {1, 1}) == LogicalPair{1, 1});

  REQUIRE(intended_output(GateKind::nor_gate, {0, 0}) == LogicalPair{1, 0});
  REQUIRE(intended_output(GateKind::nor_gate, {0, 1}) == LogicalPair{0, 1});
  REQUIRE(intended_output(GateKind::nor_gate, {1, 0}) == LogicalPair{0, 0});
  REQUIRE(intended_output(GateKind::nor_gate, {1, 1}) == LogicalPair{0, 1});

  // NOR is a NOT on the first output qubit composed with OR.
  for (LogicalPair input : kLogicalInputs) {
    LogicalPair viaOr = intended_output(GateKind::or_gate, input);
    viaOr.first = 1 - viaOr.first;
    REQUIRE(intended_output(GateKind::nor_gate, input) == viaOr);
  }
}

TEST_CASE("pulse sequences and their default timing") {
  SystemParams p;

  GateSpec orspec;
  PulseSequence orseq = build_sequence(orspec, p);
  REQUIRE(orseq.size() == 2);
  REQUIRE(orseq[0].label == "probe");
  REQUIRE(orseq[0].probe_on);
  REQUIRE(orseq[0].sideband_on);
  REQUIRE_FALSE(orseq[0].cooling_on);
  // One pi time of the resonant dressed branch, driven at omega_f/2.
  REQUIRE(orseq[0].duration == Catch::Approx(kTwoPi / p.omega_f).epsilon(1e-14));
  REQUIRE(orseq[0].extra_unitaries.empty());
  REQUIRE(orseq[1].label == "dissipate");
  REQUIRE(orseq[1].sideband_on);
  REQUIRE(orseq[1].cooling_on);
  REQUIRE_FALSE(orseq[1].probe_on);
  REQUIRE(orseq[1].duration == Catch::Approx(1e-3));
  REQUIRE(orspec.detuning(p) == Catch::Approx(p.omega_sb / std::sqrt(2.0)));

  GateSpec norspec;
  norspec.kind = GateKind::nor_gate;
  PulseSequence norseq = build_sequence(norspec, p);
  REQUIRE(norseq.size() == 4);
  REQUIRE(norseq[0].label == "shelve");
  REQUIRE(norseq[0].duration == 0.0);
  REQUIRE(norseq[0].extra_unitaries.size() == 1);
  REQUIRE(norseq[1].label == "probe");
  // The branch resonant at detuning omega_sb/2 is driven at omega_f/sqrt(2),
  // so its pi time is shorter by the same factor.
  REQUIRE(norseq[1].duration ==
          Catch::Approx(kTwoPi / p.omega_f / std::sqrt(2.0)).epsilon(1e-14));
  REQUIRE(norseq[2].label == "dissipate");
  REQUIRE(norseq[3].label == "pump");
  REQUIRE(norseq[3].pump_ions == std::vector<int>{1});
  REQUIRE(norseq[3].duration == Catch::Approx(5.0 / p.gamma_e));
  REQUIRE(norspec.detuning(p) == Catch::Approx(0.5 * p.omega_sb));

  GateSpec custom;
  custom.probe_duration = 1e-4;
  custom.probe_detuning = 2.0e4;
  REQUIRE(custom.probe_time(p) == 1e-4);
  REQUIRE(custom.detuning(p) == 2.0e4);

  GateSpec bad;
  bad.probe_duration = 0.0;
  REQUIRE_THROWS_AS(bad.validate(p), std::invalid_argument);
  bad = GateSpec{};
  bad.init_fidelity = 1.5;
  REQUIRE_THROWS_AS(bad.validate(p), std::invalid_argument);
  bad = GateSpec{};
  bad.dissipation_duration = -1.0;
  REQUIRE_THROWS_AS(bad.validate(p), std::invalid_argument);
}

TEST_CASE("readout folds every excited level into bit one") {
  SystemParams p = shallow_params();
  HilbertSpace space = p.space();

  DensityState s{space, ComplexMatrix::Zero(space.dim(), space.dim())};
  s.rho(basis_index(space, Level::f, Level::one, 2),
        basis_index(space, Level::f, Level::one, 2)) = 1.0;
  std::array<double, 4> pops = logical_populations(s);
  REQUIRE(pops[3] == Catch::Approx(1.0));

  s.rho.setZero();
  s.rho(basis_index(space, Level::e, Level::zero, 0),
        basis_index(space, Level::e, Level::zero, 0)) = 1.0;
  pops = logical_populations(s);
  REQUIRE(pops[2] == Catch::Approx(1.0));

  s.rho.setZero();
  s.rho(basis_index(space, Level::zero, Level::zero, 1),
        basis_index(space, Level::zero, Level::zero, 1)) = 0.3;
  s.rho(basis_index(space, Level::one, Level::f, 0),
        basis_index(space, Level::one, Level::f, 0)) = 0.7;
  pops = logical_populations(s);
  REQUIRE(pops[0] == Catch::Approx(0.3));
  REQUIRE(pops[3] == Catch::Approx(0.7));
}

TEST_CASE("or-gate truth table at nominal parameters") {
  SystemParams p;
  GateSpec spec;
  TruthTable table = simulate_truth_table(spec, p);

  for (int i = 0; i < 4; ++i) {
    const TruthTableRow& row = table.rows[i];
    REQUIRE(row.input == kLogicalInputs[i]);
    double sum = 0.0;
    for (double v : row.outputs) {
      REQUIRE(v >= -1e-12);
      sum += v;
    }
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-6));
  }

  // Frozen regression values at the default configuration. The |00> error is
  // dominated by the thermal n=1 fraction hitting an accidental resonance,
  // |01> loses its own n=1 fraction to shifted dressed branches, and |11>
  // leaks through |f1,0> into |01> when it starts with a phonon present.
  REQUIRE(table.rows[0].success == Catch::Approx(0.7515).margin(0.01));
  REQUIRE(table.rows[1].success == Catch::Approx(0.9054).margin(0.01));
  REQUIRE(table.rows[2].success == Catch::Approx(0.9825).margin(0.01));
  REQUIRE(table.rows[3].success == Catch::Approx(0.9238).margin(0.01));
  REQUIRE(table.average_fidelity ==
          Catch::Approx(0.25 * (table.rows[0].success + table.rows[1].success +
                                table.rows[2].success + table.rows[3].success))
              .epsilon(1e-12));

  // |01> must land almost entirely on 11, with the remainder still at 01.
  REQUIRE(table.rows[1].outputs[3] == table.rows[1].success);
  REQUIRE(table.rows[1].outputs[1] ==
          Catch::Approx(1.0 - table.rows[1].success).margin(5e-3));
}

TEST_CASE("nor-gate truth table at nominal parameters") {
  SystemParams p;
  GateSpec spec;
  spec.kind = GateKind::nor_gate;
  TruthTable table = simulate_truth_table(spec, p);

  for (const TruthTableRow& row : table.rows) {
    double sum = 0.0;
    for (double v : row.outputs) sum += v;
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-6));
  }

  REQUIRE(table.rows[0].success == Catch::Approx(0.8545).margin(0.01));
  REQUIRE(table.rows[1].success == Catch::Approx(0.8940).margin(0.01));
  REQUIRE(table.rows[2].success == Catch::Approx(0.9933).margin(0.01));
  REQUIRE(table.rows[3].success == Catch::Approx(0.9933).margin(0.01));

  // Inputs with the first qubit set ride out the probe shelved in |e>, so
  // they fail only through the pump, never through resonance physics.
  REQUIRE(table.rows[2].success > 0.95);
  REQUIRE(table.rows[3].success > 0.95);
}

TEST_CASE("more heating, worse transfer") {
  SystemParams p = shallow_params();
  IntegratorConfig cfg = quick_config();
  GateSpec spec;

  double previous = 1.0;
  for (double rate : {0.0, 50.0, 100.0, 150.0, 200.0}) {
    p.heating_rate = rate;
    double success = simulate_input(spec, p, cfg, {0, 1}).success;
    REQUIRE(success < previous - 1e-4);
    previous = success;
  }
}

TEST_CASE("strong couplings and a cold mode make the gate nearly ideal") {
  SystemParams p = shallow_params();
  p.omega_sb = 20.0 * p.omega_f;
  p.gamma_f = 10.0 * p.omega_sb / kTwoPi;
  p.nbar = 0.0;
  p.heating_rate = 0.0;

  GateSpec spec;
  // At this dissipation rate the capture is complete long before 0.2 ms.
  spec.dissipation_duration = 2e-4;

  IntegratorConfig cfg = quick_config();
  for (LogicalPair input : kLogicalInputs) {
    REQUIRE(simulate_input(spec, p, cfg, input).success >= 0.95);
  }
}

TEST_CASE("probe scan: depletion is state selective") {
  SystemParams p;
  IntegratorConfig cfg;
  std::vector<double> times;
  for (int i = 0; i <= 60; ++i) times.push_back(i * 1e-5);

  ProbeScanResult scan = probe_scan(p, cfg, 0.5 * p.omega_sb, times);
  for (int i = 0; i < 4; ++i) {
    REQUIRE(scan.remaining[i].size() == times.size());
    REQUIRE(scan.remaining[i].front() == Catch::Approx(1.0).margin(1e-9));
  }

  // Frozen depletions at 600 us and the half-splitting detuning: |00> is on
  // resonance and empties, the others mostly stay.
  REQUIRE(1.0 - scan.remaining[0].back() == Catch::Approx(0.8524).margin(0.01));
  REQUIRE(1.0 - scan.remaining[1].back() == Catch::Approx(0.1032).margin(0.008));
  REQUIRE(1.0 - scan.remaining[2].back() == Catch::Approx(0.0687).margin(0.01));
  REQUIRE(1.0 - scan.remaining[3].back() == Catch::Approx(0.0055).margin(0.003));

  REQUIRE_THROWS_AS(probe_scan(p, cfg, 0.5 * p.omega_sb, {}), std::invalid_argument);
}

TEST_CASE("probe scan: off-resonant leak from |01> stays bounded") {
  // With a cold, heating-free mode the |01> depletion at the half-splitting
  // detuning comes only from off-resonant driving of branches sitting
  // omega_sb*(1/sqrt(2)-1/2) away; a single branch caps out at ~17% and the
  // observed transient maximum lands near 14%. It is well above 5%, so the
  // leak is a real feature of the working point, not a numerical artifact.
  SystemParams p = shallow_params();
  p.nbar = 0.0;
  p.heating_rate = 0.0;
  IntegratorConfig cfg = quick_config();

  std::vector<double> times;
  for (int i = 0; i <= 60; ++i) times.push_back(i * 1e-5);
  ProbeScanResult scan = probe_scan(p, cfg, 0.5 * p.omega_sb, times);

  double max_depletion = 0.0;
  for (double v : scan.remaining[1]) max_depletion = std::max(max_depletion, 1.0 - v);
  REQUIRE(max_depletion == Catch::Approx(0.1393).margin(0.015));
  REQUIRE(max_depletion > 0.05);
  REQUIRE(max_depletion < 0.20);
}

TEST_CASE("dissipation traps the transferred population") {
  SystemParams p;
  IntegratorConfig cfg;
  std::vector<double> times{0.0, 5e-4, 1e-3};

  CoolingScanResult scan = cooling_scan(p, cfg, times);
  REQUIRE(scan.p_10.size() == times.size());

  // Frozen values after 1 ms of sideband+cooling following a maximal probe
  // transfer out of thermal |00>.
  REQUIRE(scan.p_10.back() == Catch::Approx(0.7971).margin(0.01));
  REQUIRE(scan.p_10_n0.back() == Catch::Approx(0.7370).margin(0.01));
  REQUIRE(scan.p_f0.back() == Catch::Approx(0.0573).margin(0.01));
  REQUIRE(scan.ground_frac.back() == Catch::Approx(0.9329).margin(0.01));
  REQUIRE(scan.mean_n.back() == Catch::Approx(0.0692).margin(0.01));
  REQUIRE(scan.ground_frac.back() > scan.ground_frac.front());

  REQUIRE_THROWS_AS(cooling_scan(p, cfg, {}), std::invalid_argument);
}

TEST_CASE("without the cooling channel nothing accumulates in |10,0>") {
  SystemParams p = shallow_params();
  p.gamma_f = 0.0;
  IntegratorConfig cfg = quick_config();

  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(i * 5e-5);
  CoolingScanResult scan = cooling_scan(p, cfg, times);

  // The probe leaves the system near a dressed eigenstate, so P_10 hovers
  // around its initial value with a residual beat instead of converging.
  double lo = 1.0, hi = 0.0;
  for (double v : scan.p_10) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  REQUIRE(hi - lo > 0.03);
  REQUIRE(scan.p_10.back() < 0.6);
  REQUIRE(scan.p_10_n0.back() < 0.5);
}

TEST_CASE("with a heating-free mode the cooling empties the ladder") {
  SystemParams p = shallow_params();
  p.heating_rate = 0.0;
  IntegratorConfig cfg = quick_config();

  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(i * 5e-5);
  CoolingScanResult scan = cooling_scan(p, cfg, times);

  // The instantaneous ground fraction is not monotone: the sideband drive
  // coherently swaps |f.,0> against |1.,1>, so it oscillates while its
  // envelope rises. Assert the net rise and the end point instead.
  REQUIRE(scan.ground_frac.back() > scan.ground_frac.front() + 0.4);
  REQUIRE(scan.ground_frac.back() > 0.94);
  REQUIRE(scan.p_10.back() > 0.80);
}

TEST_CASE("imperfectly prepared inputs mix linearly") {
  SystemParams p = shallow_params();
  IntegratorConfig cfg = quick_config();

  GateSpec spec;
  spec.dissipation_duration = 2e-4;
  GateSpec half = spec;
  half.init_fidelity = 0.5;
  GateSpec zero = spec;
  zero.init_fidelity = 0.0;

  TruthTableRow pure01 = simulate_input(spec, p, cfg, {0, 1});
  TruthTableRow pure00 = simulate_input(spec, p, cfg, {0, 0});
  TruthTableRow mixed = simulate_input(half, p, cfg, {0, 1});
  TruthTableRow collapsed = simulate_input(zero, p, cfg, {0, 1});

  // The master equation is linear in the state, so a 50/50 preparation gives
  // exactly the average of the pure runs, and a fully failed preparation of
  // |01> is indistinguishable from input |00>.
  for (int i = 0; i < 4; ++i) {
    REQUIRE(mixed.outputs[i] ==
            Catch::Approx(0.5 * (pure01.outputs[i] + pure00.outputs[i])).margin(1e-12));
    REQUIRE(collapsed.outputs[i] == Catch::Approx(pure00.outputs[i]).margin(1e-12));
  }
}

TEST_CASE("sequence evolution matches the dense-propagator oracle") {
  SystemParams p;
  p.fock_cutoff = 1;
  p.delta_probe = gate_detuning(p, GateKind::or_gate);

  GateSpec spec;
  PulseSequence seq = build_sequence(spec, p);
  DensityState initial = thermal_initial_state(p, Level::zero, Level::one);

  EvolveResult numeric = run_sequence(initial, seq, p, {});

  ComplexMatrix rho = initial.rho;
  for (const PulseSegment& seg : seq) {
    ComplexMatrix h = total_hamiltonian(p, seg.probe_on, seg.sideband_on);
    rho = oracle::propagate(h, detail::segment_jumps(p, seg), rho, seg.duration);
  }

  for (int i = 0; i < rho.rows(); ++i) {
    REQUIRE(numeric.state.rho(i, i).real() ==
            Catch::Approx(rho(i, i).real()).margin(1e-6));
  }
}

TEST_CASE("fock-cutoff convergence reporting") {
  SystemParams p;
  IntegratorConfig cfg = quick_config();
  GateSpec spec;
  spec.dissipation_duration = 2e-4;
  PulseSequence seq = build_sequence(spec, p);

  ConvergenceReport report = convergence_check(
      [](const SystemParams& pc) {
        return thermal_initial_state(pc, Level::zero, Level::one);
      },
      seq, p, cfg, {2, 3}, 1e-2);

  REQUIRE(report.cutoffs == std::vector<int>{2, 3});
  REQUIRE(report.final_pops.size() == 2);
  REQUIRE(report.max_diffs.size() == 1);
  REQUIRE(report.max_diffs.back() < 1e-2);
  REQUIRE(report.converged);

  REQUIRE_THROWS_AS(convergence_check([](const SystemParams& pc) {
                      return thermal_initial_state(pc, Level::zero, Level::one);
                    },
                    seq, p, cfg, {}, 1e-2),
                    std::invalid_argument);
}

TEST_CASE("error comparison wiring at zero spread") {
  SystemParams p = shallow_params();
  IntegratorConfig cfg = quick_config();
  GateSpec spec;

  ErrorReport report = error_table(p, cfg, 0.0, 7, spec);
  REQUIRE(report.sigma_frac == 0.0);
  REQUIRE(report.entries.size() == 2);
  REQUIRE(report.entries[0].input == "00");
  REQUIRE(report.entries[1].input == "01");

  // With no spread the numeric column is exactly one minus the plain success.
  double err00 = 1.0 - simulate_input(spec, p, cfg, {0, 0}).success;
  double err01 = 1.0 - simulate_input(spec, p, cfg, {0, 1}).success;
  REQUIRE(report.entries[0].numeric_error == Catch::Approx(err00).margin(1e-12));
  REQUIRE(report.entries[1].numeric_error == Catch::Approx(err01).margin(1e-12));

  // The analytic column at zero spread reduces to the nominal closed form.
  REQUIRE(report.entries[0].analytic_error ==
          Catch::Approx(or_error_00(p).total).margin(1e-12));
  REQUIRE(report.entries[1].analytic_error ==
          Catch::Approx(or_error_01(p).total).margin(1e-12));

  // Stored measured errors and the per-branch breakdown come along.
  REQUIRE(report.entries[0].measured_error == Catch::Approx(1.0 - kMeasuredFidelity00));
  REQUIRE(report.entries[1].measured_error == Catch::Approx(1.0 - kMeasuredFidelity01));
  REQUIRE(report.entries[0].breakdown.branches.size() == 2);
  REQUIRE(report.entries[1].breakdown.branches.size() == 3);
  for (const ErrorReportEntry& e : report.entries) {
    REQUIRE(e.analytic_error >= 0.0);
    REQUIRE(e.analytic_error <= 1.0);
    REQUIRE(e.numeric_error >= 0.0);
    REQUIRE(e.numeric_error <= 1.0);
  }
}
