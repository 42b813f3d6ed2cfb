// Integrator correctness: reference right-hand side, structured fast path,
// two-level limits, and agreement with the vectorized-Liouvillian
// matrix-exponential oracle.

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "lindgate/dynamics.hpp"
#include "oracle.hpp"

using namespace lindgate;

namespace {

ComplexMatrix random_hermitian(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix m(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) m(r, c) = Complex(u(rng), u(rng));
  return 0.5 * (m + ComplexMatrix(m.adjoint()));
}

}  // namespace

TEST_CASE("reference rhs basics") {
  SystemParams p;
  p.fock_cutoff = 2;
  const HilbertSpace space = p.space();
  ComplexMatrix rho = random_hermitian(space.dim(), 7);
  rho = rho * rho;  // positive
  rho /= rho.trace().real();

  // no drive, no jumps: nothing moves
  ComplexMatrix zero = ComplexMatrix::Zero(space.dim(), space.dim());
  REQUIRE(lindblad_rhs(zero, {}, rho).norm() == 0.0);

  // pure Hamiltonian part is the commutator
  ComplexMatrix h = total_hamiltonian(p, true, true);
  ComplexMatrix comm = Complex(0.0, -1.0) * (h * rho - rho * h);
  REQUIRE((lindblad_rhs(h, {}, rho) - comm).norm() < 1e-12 * comm.norm());

  // full dissipator stays traceless and Hermiticity-preserving
  std::vector<ComplexMatrix> jumps{cooling_jump(p)};
  auto heat = heating_jumps(p);
  jumps.insert(jumps.end(), heat.begin(), heat.end());
  ComplexMatrix rhs = lindblad_rhs(h, jumps, rho);
  REQUIRE(std::abs(rhs.trace()) < 1e-10 * rhs.norm());
  REQUIRE((rhs - rhs.adjoint()).norm() < 1e-12 * rhs.norm());

  // cooling from one phonon: d<n>/dt = -gamma
  p.gamma_f = 7.3e2;
  DensityState one_phonon =
      DensityState::pure(space, basis_vector(space, {Level::zero, Level::zero, 1}));
  ComplexMatrix decay = lindblad_rhs(zero, {cooling_jump(p)}, one_phonon.rho);
  double slope = (number_operator(space) * decay).trace().real();
  REQUIRE(slope == Catch::Approx(-p.gamma_f).epsilon(1e-9));

  REQUIRE_THROWS_AS(lindblad_rhs(h, {}, ComplexMatrix::Zero(3, 3)),
                    std::invalid_argument);
}

TEST_CASE("structured generator matches the reference rhs") {
  SystemParams p;
  p.delta_probe = kTwoPi * 3000.0;
  p.delta_mode = kTwoPi * 40.0;
  const HilbertSpace space = p.space();

  ComplexMatrix h = total_hamiltonian(p, true, true);
  std::vector<ComplexMatrix> jumps{cooling_jump(p)};
  auto pumps = pump_jumps(p, {1, 2});
  jumps.insert(jumps.end(), pumps.begin(), pumps.end());
  auto heat = heating_jumps(p);
  jumps.insert(jumps.end(), heat.begin(), heat.end());

  detail::Generator g = detail::make_generator(h, jumps);
  // all model jumps have one entry per column: everything compresses
  REQUIRE(g.sparse_jumps.size() == jumps.size());
  REQUIRE(g.dense_jumps.empty());
  REQUIRE(g.max_rate >= p.gamma_e);

  ComplexMatrix y = random_hermitian(space.dim(), 21);
  ComplexMatrix out(space.dim(), space.dim()), tmp(space.dim(), space.dim());
  g.rhs(y, out, tmp);
  ComplexMatrix ref = lindblad_rhs(h, jumps, y);
  REQUIRE((out - ref).norm() < 1e-12 * ref.norm());

  // a genuinely dense jump falls back to matrix products and still agrees
  ComplexMatrix dense_l = 40.0 * random_hermitian(space.dim(), 33);
  detail::Generator g2 = detail::make_generator(h, {dense_l});
  REQUIRE(g2.dense_jumps.size() == 1);
  g2.rhs(y, out, tmp);
  ComplexMatrix ref2 = lindblad_rhs(h, {dense_l}, y);
  REQUIRE((out - ref2).norm() < 1e-12 * ref2.norm());
}

TEST_CASE("zero-duration segments and instantaneous unitaries") {
  SystemParams p;
  DensityState s0 = thermal_initial_state(p, Level::zero, Level::one);

  EvolveResult r = evolve(s0, PulseSegment{}, p);
  REQUIRE((r.state.rho - s0.rho).norm() == 0.0);
  REQUIRE(r.trajectory.size() == 1);
  REQUIRE(r.trajectory[0].time == 0.0);

  // two zero-duration segments with pi-pulses compose in order
  const HilbertSpace space = p.space();
  DensityState s11 =
      DensityState::pure(space, basis_vector(space, {Level::one, Level::one, 0}));
  PulseSegment seg1, seg2;
  seg1.extra_unitaries = {pi_pulse(space, 1, Level::one, Level::e)};
  seg2.extra_unitaries = {pi_pulse(space, 2, Level::one, Level::e)};
  EvolveResult r2 = run_sequence(s11, {seg1, seg2}, p);
  auto pops = populations(r2.state, false);
  REQUIRE(pops.at({Level::e, Level::e}) == Catch::Approx(1.0));

  // both unitaries inside one segment give the same state
  PulseSegment both;
  both.extra_unitaries = {pi_pulse(space, 1, Level::one, Level::e),
                          pi_pulse(space, 2, Level::one, Level::e)};
  EvolveResult r3 = evolve(s11, both, p);
  REQUIRE((r3.state.rho - r2.state.rho).norm() < 1e-14);

  // single-segment sequence is exactly evolve
  PulseSegment drive;
  drive.duration = 50e-6;
  drive.probe_on = true;
  EvolveResult a = evolve(s11, drive, p);
  EvolveResult b = run_sequence(s11, {drive}, p);
  REQUIRE((a.state.rho - b.state.rho).norm() == 0.0);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
}

TEST_CASE("resonant probe Rabi oscillation") {
  SystemParams p;
  p.omega_sb = 0.0;
  p.nbar = 0.0;
  p.heating_rate = 0.0;
  p.fock_cutoff = 1;
  const HilbertSpace space = p.space();

  PulseSegment seg;
  seg.duration = 1.3e-3;
  seg.probe_on = true;

  IntegratorConfig cfg;
  cfg.trajectory_samples = 60;

  DensityState s0 =
      DensityState::pure(space, basis_vector(space, {Level::zero, Level::one, 0}));
  EvolveResult r = evolve(s0, seg, p, cfg);
  REQUIRE(r.trajectory.size() == 61);
  REQUIRE(r.trajectory.back().time == Catch::Approx(seg.duration));

  for (const TrajectoryPoint& pt : r.trajectory) {
    double expected = std::pow(std::sin(0.5 * p.omega_f * pt.time), 2);
    REQUIRE(pt.pops[pair_index(Level::f, Level::one)] ==
            Catch::Approx(expected).margin(1e-6));
  }
}

TEST_CASE("detuned probe matches the two-level exponential") {
  SystemParams p;
  p.omega_sb = 0.0;
  p.nbar = 0.0;
  p.heating_rate = 0.0;
  p.fock_cutoff = 1;
  p.delta_probe = kTwoPi * 800.0;
  const HilbertSpace space = p.space();

  PulseSegment seg;
  seg.duration = 4.0e-4;
  seg.probe_on = true;
  seg.sideband_on = true;  // carries the detuning diagonal; omega_sb is zero

  DensityState s0 =
      DensityState::pure(space, basis_vector(space, {Level::zero, Level::one, 0}));
  EvolveResult r = evolve(s0, seg, p);

  double want = oracle::rabi_excited_prob(*p.delta_probe, p.omega_f, seg.duration);
  auto pops = populations(r.state, false);
  REQUIRE(pops.at({Level::f, Level::one}) == Catch::Approx(want).margin(1e-7));
}

TEST_CASE("integrator agrees with the matrix-exponential oracle") {
  SystemParams p;
  p.fock_cutoff = 1;  // 32-dimensional space, 1024^2 superoperator
  p.delta_probe = kTwoPi * 2000.0;

  PulseSegment seg;
  seg.duration = 2.0e-4;
  seg.probe_on = true;
  seg.sideband_on = true;
  seg.cooling_on = true;
  seg.pump_ions = {1};

  DensityState s0 = thermal_initial_state(p, Level::zero, Level::one);
  EvolveResult r = evolve(s0, seg, p);

  ComplexMatrix h = total_hamiltonian(p, true, true);
  ComplexMatrix want = oracle::propagate(h, detail::segment_jumps(p, seg), s0.rho,
                                         seg.duration);
  REQUIRE((r.state.rho - want).cwiseAbs().maxCoeff() < 1e-6);
  // diagonal (population) agreement is what downstream results consume
  for (int i = 0; i < p.space().dim(); ++i)
    REQUIRE(r.state.rho(i, i).real() == Catch::Approx(want(i, i).real()).margin(1e-8));
}

TEST_CASE("ambient heating raises the mean occupation linearly") {
  SystemParams p;
  p.fock_cutoff = 8;
  PulseSegment seg;
  seg.duration = 1.0e-3;

  DensityState s0 = thermal_initial_state(p, Level::zero, Level::zero);
  double n0 = mean_phonon(s0);
  EvolveResult r = evolve(s0, seg, p);
  REQUIRE(mean_phonon(r.state) - n0 ==
          Catch::Approx(p.heating_rate * seg.duration).margin(1e-5));

  // switching heating off freezes the mode
  p.heating_rate = 0.0;
  EvolveResult frozen = evolve(s0, seg, p);
  REQUIRE((frozen.state.rho - s0.rho).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dissipation-free evolution preserves purity") {
  SystemParams p;
  p.nbar = 0.0;
  p.heating_rate = 0.0;
  p.delta_probe = p.omega_sb / std::sqrt(2.0);
  const HilbertSpace space = p.space();

  PulseSegment seg;
  seg.duration = 2.0e-4;
  seg.probe_on = true;
  seg.sideband_on = true;

  DensityState s0 =
      DensityState::pure(space, basis_vector(space, {Level::zero, Level::one, 0}));
  EvolveResult r = evolve(s0, seg, p);
  REQUIRE(purity(r.state) == Catch::Approx(1.0).margin(1e-8));
  REQUIRE(std::abs(r.state.rho.trace() - Complex(1.0, 0.0)) < 1e-8);
}

TEST_CASE("state invariants hold along a dissipative trajectory") {
  SystemParams p;
  p.delta_probe = p.omega_sb / std::sqrt(2.0);

  PulseSegment chunk;
  chunk.duration = 8.0e-5;
  chunk.probe_on = true;
  chunk.sideband_on = true;
  chunk.cooling_on = true;

  DensityState s = thermal_initial_state(p, Level::zero, Level::zero);
  for (int i = 0; i < 5; ++i) {
    s = evolve(s, chunk, p).state;
    REQUIRE(std::abs(s.rho.trace() - Complex(1.0, 0.0)) < 1e-8);
    REQUIRE((s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-8);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        ComplexMatrix(0.5 * (s.rho + s.rho.adjoint())), Eigen::EigenvaluesOnly);
    REQUIRE(es.eigenvalues().minCoeff() > -1e-7);
  }
}

TEST_CASE("populations and phonon observables") {
  SystemParams p;
  const HilbertSpace space = p.space();

  // equal mixture of |f1> and |11>: merged readout sees pure |11>
  DensityState mix{space, ComplexMatrix::Zero(space.dim(), space.dim())};
  mix.rho(space.index(Level::f, Level::one, 0), space.index(Level::f, Level::one, 0)) = 0.5;
  mix.rho(space.index(Level::one, Level::one, 0), space.index(Level::one, Level::one, 0)) =
      0.5;
  auto merged = populations(mix, true);
  auto raw = populations(mix, false);
  REQUIRE(merged.size() == 9);
  REQUIRE(raw.size() == 16);
  REQUIRE(merged.at({Level::one, Level::one}) == Catch::Approx(1.0));
  REQUIRE(raw.at({Level::f, Level::one}) == Catch::Approx(0.5));

  double total = 0.0;
  for (const auto& [key, val] : merged) total += val;
  REQUIRE(total == Catch::Approx(1.0).epsilon(1e-9));

  // thermal phonon factor leaves electronic populations alone
  DensityState th = thermal_initial_state(p, Level::zero, Level::one);
  REQUIRE(populations(th, false).at({Level::zero, Level::one}) == Catch::Approx(1.0));

  // phonon marginals
  DensityState vac =
      DensityState::pure(space, basis_vector(space, {Level::zero, Level::zero, 0}));
  REQUIRE(ground_state_fraction(vac) == Catch::Approx(1.0));
  REQUIRE(mean_phonon(vac) == Catch::Approx(0.0).margin(1e-15));
  DensityState fock1 =
      DensityState::pure(space, basis_vector(space, {Level::zero, Level::zero, 1}));
  REQUIRE(ground_state_fraction(fock1) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(mean_phonon(fock1) == Catch::Approx(1.0));
  REQUIRE(mean_phonon(th) == Catch::Approx(p.nbar).margin(1e-3));
}

TEST_CASE("error paths") {
  SystemParams p;
  p.fock_cutoff = 1;
  const HilbertSpace space = p.space();

  // invalid initial state is rejected before integrating
  DensityState bad{space, ComplexMatrix::Zero(space.dim(), space.dim())};
  REQUIRE_THROWS_AS(evolve(bad, PulseSegment{}, p), std::invalid_argument);

  // invalid tolerances are rejected
  DensityState ok = thermal_initial_state(p, Level::zero, Level::zero);
  IntegratorConfig cfg;
  cfg.rel_tol = 0.0;
  REQUIRE_THROWS_AS(evolve(ok, PulseSegment{}, p, cfg), std::invalid_argument);
  cfg = IntegratorConfig{};
  cfg.method = "rk4";
  REQUIRE_THROWS_AS(evolve(ok, PulseSegment{}, p, cfg), std::invalid_argument);

  REQUIRE_THROWS_AS(run_sequence(ok, {}, p), std::invalid_argument);

  // a state that turns non-finite drives the step size to underflow
  ComplexMatrix h = total_hamiltonian(p, true, true);
  detail::Generator g = detail::make_generator(h, {});
  ComplexMatrix nan_rho = ComplexMatrix::Zero(space.dim(), space.dim());
  nan_rho(0, 0) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(detail::integrate(g, nan_rho, 1e-4, IntegratorConfig{}, {}, {}),
                    IntegratorError);
}

TEST_CASE("convergence report across cutoffs") {
  SystemParams p;
  p.nbar = 0.0;
  p.heating_rate = 0.0;
  p.omega_sb = 0.0;

  PulseSegment seg;
  seg.duration = 1.0e-4;
  seg.probe_on = true;
  PulseSequence seq{seg};

  auto initial = [](const SystemParams& pc) {
    return DensityState::pure(pc.space(),
                              basis_vector(pc.space(), {Level::zero, Level::one, 0}));
  };

  // probe-only dynamics never touches the mode: cutoffs agree to roundoff
  ConvergenceReport rep = convergence_check(initial, seq, p, {}, {1, 2});
  REQUIRE(rep.cutoffs == std::vector<int>{1, 2});
  REQUIRE(rep.max_diffs.size() == 1);
  REQUIRE(rep.max_diffs[0] < 1e-10);
  REQUIRE(rep.converged);

  ConvergenceReport single = convergence_check(initial, seq, p, {}, {2});
  REQUIRE(single.max_diffs.empty());
  REQUIRE(single.converged);

  REQUIRE_THROWS_AS(convergence_check(initial, seq, p, {}, {}), std::invalid_argument);
}
