#pragma once

// Master-equation integration over piecewise-constant pulse segments.
//
// The right-hand side is evaluated directly on the density matrix as
//
//   drho/dt = A rho + rho A^dag + sum_k L_k rho L_k^dag,
//   A       = -i H - 1/2 sum_k L_k^dag L_k,
//
// two dense matrix products plus the jump sandwiches. Every jump operator in
// this model (phonon ladder, optical pump) has at most one nonzero entry per
// column, so its sandwich costs O(dim^2) instead of a third dense product;
// operators outside that pattern fall back to dense products. A precomputed
// dim^2 x dim^2 superoperator would be simpler but weighs over a gigabyte at
// the default cutoff; the test suite keeps one as an oracle at reduced
// cutoff.
//
// Stepping uses the Dormand-Prince 5(4) embedded pair with elementwise error
// control. Sample times are hit exactly by clipping the step, never by
// interpolation. The integrator does not re-Hermitize or renormalize the
// state behind the caller's back; conservation failures are supposed to
// surface in the state checks, not be papered over.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lindgate/model.hpp"

namespace lindgate {

class IntegratorError : public std::runtime_error {
 public:
  IntegratorError(const std::string& what, double t_fail)
      : std::runtime_error(what + " at t = " + std::to_string(t_fail) + " s"),
        time(t_fail) {}
  double time;
};

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.0;          // seconds; 0 derives one from the fastest rate
  std::string method = "dopri5";  // tag for provenance in outputs
  int trajectory_samples = 200;   // sampled points per finite-duration segment

  void validate() const {
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
      throw std::invalid_argument("rel_tol must be finite and > 0");
    if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
      throw std::invalid_argument("abs_tol must be finite and > 0");
    if (!(max_step >= 0.0)) throw std::invalid_argument("max_step must be >= 0");
    if (method != "dopri5")
      throw std::invalid_argument("unknown integrator method '" + method + "'");
    if (trajectory_samples < 1)
      throw std::invalid_argument("trajectory_samples must be >= 1");
  }
};

struct PulseSegment {
  std::string label;
  double duration = 0.0;  // seconds
  bool probe_on = false;
  bool sideband_on = false;
  bool cooling_on = false;
  std::vector<int> pump_ions;                  // empty = no optical pumping
  std::vector<ComplexMatrix> extra_unitaries;  // applied in order before integrating
};

using PulseSequence = std::vector<PulseSegment>;

// --- observables ------------------------------------------------------------

using LevelPair = std::pair<Level, Level>;

inline int pair_index(Level ion1, Level ion2) {
  return 4 * static_cast<int>(ion1) + static_cast<int>(ion2);
}

// Electronic populations traced over the mode. With readout_merge_1f the |f>
// population is counted under |1>, mirroring a readout that cannot tell the
// two apart; merged maps then carry 9 keys over {0,1,e} instead of 16.
inline std::map<LevelPair, double> populations(const DensityState& state,
                                               bool readout_merge_1f) {
  std::array<double, 16> raw{};
  for (int i = 0; i < state.space.dim(); ++i) {
    auto [a, b, n] = state.space.unindex(i);
    raw[4 * a + b] += state.rho(i, i).real();
  }
  auto fold = [](Level l) { return l == Level::f ? Level::one : l; };
  std::map<LevelPair, double> out;
  for (Level a : all_levels)
    for (Level b : all_levels) {
      double p = raw[pair_index(a, b)];
      if (readout_merge_1f)
        out[{fold(a), fold(b)}] += p;
      else
        out[{a, b}] = p;
    }
  return out;
}

inline double mean_phonon(const DensityState& state) {
  double sum = 0.0;
  for (int i = 0; i < state.space.dim(); ++i)
    sum += state.space.unindex(i)[2] * state.rho(i, i).real();
  return sum;
}

inline double ground_state_fraction(const DensityState& state) {
  double sum = 0.0;
  for (int i = 0; i < state.space.dim(); ++i)
    if (state.space.unindex(i)[2] == 0) sum += state.rho(i, i).real();
  return sum;
}

inline double expectation(const ComplexMatrix& op, const DensityState& state) {
  return (op * state.rho).trace().real();
}

inline double purity(const DensityState& state) {
  return (state.rho * state.rho).trace().real();
}

// --- reference right-hand side ---------------------------------------------

inline ComplexMatrix lindblad_rhs(const ComplexMatrix& h,
                                  const std::vector<ComplexMatrix>& jumps,
                                  const ComplexMatrix& rho) {
  if (h.rows() != h.cols() || rho.rows() != rho.cols() || h.rows() != rho.rows())
    throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  ComplexMatrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
  for (const ComplexMatrix& l : jumps) {
    if (l.rows() != rho.rows() || l.cols() != rho.cols())
      throw std::invalid_argument("lindblad_rhs: dimension mismatch");
    ComplexMatrix ldl = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

// --- fast generator ----------------------------------------------------------

namespace detail {

// jump with at most one nonzero per column, stored as (col, row, value)
struct CompressedJump {
  std::vector<int> cols;
  std::vector<int> rows;
  std::vector<Complex> vals;
};

struct Generator {
  ComplexMatrix drift;  // A = -iH - 1/2 sum L^dag L
  std::vector<CompressedJump> sparse_jumps;
  std::vector<ComplexMatrix> dense_jumps;
  double max_rate = 0.0;  // fastest coefficient in the generator, 1/s

  void rhs(const ComplexMatrix& y, ComplexMatrix& out, ComplexMatrix& tmp) const {
    out.noalias() = drift * y;
    out.noalias() += y * drift.adjoint();
    for (const CompressedJump& j : sparse_jumps) {
      const int m = static_cast<int>(j.cols.size());
      for (int b = 0; b < m; ++b) {
        const Complex vb = std::conj(j.vals[b]);
        const int cb = j.cols[b];
        const int rb = j.rows[b];
        for (int a = 0; a < m; ++a)
          out(j.rows[a], rb) += j.vals[a] * vb * y(j.cols[a], cb);
      }
    }
    for (const ComplexMatrix& l : dense_jumps) {
      tmp.noalias() = l * y;
      out.noalias() += tmp * l.adjoint();
    }
  }
};

inline Generator make_generator(const ComplexMatrix& h,
                                const std::vector<ComplexMatrix>& jumps) {
  const long d = h.rows();
  Generator g;
  g.drift = Complex(0.0, -1.0) * h;
  g.max_rate = h.cwiseAbs().maxCoeff();
  for (const ComplexMatrix& l : jumps) {
    ComplexMatrix ldl = l.adjoint() * l;
    g.drift -= 0.5 * ldl;
    g.max_rate = std::max(g.max_rate, ldl.diagonal().real().maxCoeff());

    CompressedJump cj;
    bool compressible = true;
    for (int c = 0; c < d && compressible; ++c) {
      int found = -1;
      for (int r = 0; r < d; ++r) {
        if (l(r, c) == Complex(0.0, 0.0)) continue;
        if (found >= 0) {
          compressible = false;
          break;
        }
        found = r;
      }
      if (found >= 0) {
        cj.cols.push_back(c);
        cj.rows.push_back(found);
        cj.vals.push_back(l(found, c));
      }
    }
    if (compressible)
      g.sparse_jumps.push_back(std::move(cj));
    else
      g.dense_jumps.push_back(l);
  }
  return g;
}

// Dormand-Prince 5(4) tableau
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

// Integrates rho in place over [0, duration], invoking sample(t, rho) at each
// time in sample_times (strictly increasing, within (0, duration]). Steps are
// clipped to land exactly on sample times.
inline void integrate(const Generator& g, ComplexMatrix& rho, double duration,
                      const IntegratorConfig& cfg,
                      const std::vector<double>& sample_times,
                      const std::function<void(double, const ComplexMatrix&)>& sample) {
  if (duration <= 0.0) return;
  const long d = rho.rows();

  double max_step = cfg.max_step;
  if (max_step <= 0.0)
    max_step = g.max_rate > 0.0 ? 1.0 / (50.0 * g.max_rate) : duration;

  ComplexMatrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), k5(d, d), k6(d, d), k7(d, d);
  ComplexMatrix ytmp(d, d), y5(d, d), err(d, d), tmp(d, d);

  double t = 0.0;
  double h = std::min(duration, max_step);
  std::size_t next_sample = 0;
  // Requested times may sit a few ulp away from step endpoints; gaps below
  // this are float noise, not intervals to integrate.
  const double tiny = 1e-14 * duration;
  g.rhs(rho, k1, tmp);  // FSAL seed

  while (t < duration) {
    if (duration - t <= tiny) {
      t = duration;
      continue;
    }
    double t_stop = duration;
    if (next_sample < sample_times.size())
      t_stop = std::min(t_stop, sample_times[next_sample]);
    h = std::min(h, t_stop - t);
    if (!(h > 1e-15 * duration))
      throw IntegratorError("integrator step size underflow", t);

    ytmp = rho + h * kA21 * k1;
    g.rhs(ytmp, k2, tmp);
    ytmp = rho + h * (kA31 * k1 + kA32 * k2);
    g.rhs(ytmp, k3, tmp);
    ytmp = rho + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
    g.rhs(ytmp, k4, tmp);
    ytmp = rho + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
    g.rhs(ytmp, k5, tmp);
    ytmp = rho + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
    g.rhs(ytmp, k6, tmp);
    y5 = rho + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    g.rhs(y5, k7, tmp);
    err = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    double en = 0.0;
    for (long c = 0; c < d; ++c)
      for (long r = 0; r < d; ++r) {
        double scale = cfg.abs_tol +
                       cfg.rel_tol * std::max(std::abs(rho(r, c)), std::abs(y5(r, c)));
        double ratio = std::abs(err(r, c)) / scale;
        if (!(ratio <= en)) en = ratio;  // NaN-sticky maximum
      }

    if (std::isfinite(en) && en <= 1.0) {
      t = (t + h == t_stop || t_stop - (t + h) < 1e-15 * duration) ? t_stop : t + h;
      rho.swap(y5);
      k1.swap(k7);
      while (next_sample < sample_times.size() &&
             sample_times[next_sample] <= t + tiny) {
        if (sample) sample(sample_times[next_sample], rho);
        ++next_sample;
      }
      double factor = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
      h = std::min(h * std::clamp(factor, 0.2, 5.0), max_step);
    } else {
      double factor = std::isfinite(en) ? 0.9 * std::pow(en, -0.2) : 0.2;
      h *= std::clamp(factor, 0.2, 1.0);
    }
  }
}

inline std::vector<ComplexMatrix> segment_jumps(const SystemParams& p,
                                                const PulseSegment& seg) {
  std::vector<ComplexMatrix> jumps;
  if (seg.cooling_on) jumps.push_back(cooling_jump(p));
  if (!seg.pump_ions.empty()) {
    auto pumps = pump_jumps(p, seg.pump_ions);
    jumps.insert(jumps.end(), pumps.begin(), pumps.end());
  }
  // ambient heating runs in every finite-duration segment
  auto heat = heating_jumps(p);
  jumps.insert(jumps.end(), heat.begin(), heat.end());
  return jumps;
}

}  // namespace detail

// --- trajectories and segment evolution --------------------------------------

struct TrajectoryPoint {
  double time = 0.0;
  std::array<double, 16> pops{};  // electronic pairs, index 4*ion1 + ion2, unmerged
  double mean_n = 0.0;
  double ground_frac = 0.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

inline TrajectoryPoint trajectory_point(double t, const DensityState& s) {
  TrajectoryPoint pt;
  pt.time = t;
  for (int i = 0; i < s.space.dim(); ++i) {
    auto [a, b, n] = s.space.unindex(i);
    double p = s.rho(i, i).real();
    pt.pops[4 * a + b] += p;
    pt.mean_n += n * p;
    if (n == 0) pt.ground_frac += p;
  }
  return pt;
}

struct EvolveResult {
  DensityState state;
  Trajectory trajectory;
};

// Evolves one segment and invokes observe(t, state) at each requested time
// (sorted, within [0, duration]; the unitaries have already been applied when
// a t=0 sample fires). Returns the final state.
inline DensityState evolve_observed(
    const DensityState& initial, const PulseSegment& seg, const SystemParams& p,
    const IntegratorConfig& cfg, const std::vector<double>& sample_times,
    const std::function<void(double, const DensityState&)>& observe) {
  p.validate();
  cfg.validate();
  if (seg.duration < 0.0) throw std::invalid_argument("segment duration must be >= 0");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < 0.0 || sample_times[i] > seg.duration)
      throw std::invalid_argument("sample time outside the segment");
    if (i > 0 && sample_times[i] <= sample_times[i - 1])
      throw std::invalid_argument("sample times must be strictly increasing");
  }
  initial.check();

  DensityState s = initial;
  for (const ComplexMatrix& u : seg.extra_unitaries) {
    if (u.rows() != s.space.dim() || u.cols() != s.space.dim())
      throw std::invalid_argument("extra unitary does not match the space dimension");
    s.rho = u * s.rho * u.adjoint();
  }

  std::vector<double> positive = sample_times;
  if (!positive.empty() && positive.front() == 0.0) {
    if (observe) observe(0.0, s);
    positive.erase(positive.begin());
  }
  if (seg.duration > 0.0) {
    ComplexMatrix h = total_hamiltonian(p, seg.probe_on, seg.sideband_on);
    detail::Generator g = detail::make_generator(h, detail::segment_jumps(p, seg));
    detail::integrate(g, s.rho, seg.duration, cfg, positive,
                      [&](double t, const ComplexMatrix& rho) {
                        if (observe) observe(t, DensityState{s.space, rho});
                      });
  }
  s.check();
  return s;
}

inline EvolveResult evolve(const DensityState& initial, const PulseSegment& seg,
                           const SystemParams& p, const IntegratorConfig& cfg = {}) {
  std::vector<double> times{0.0};
  for (int i = 0; i < cfg.trajectory_samples; ++i) {
    double t = i + 1 == cfg.trajectory_samples
                   ? seg.duration
                   : seg.duration * double(i + 1) / cfg.trajectory_samples;
    if (t > times.back()) times.push_back(t);
  }
  EvolveResult r;
  Trajectory& traj = r.trajectory;
  r.state = evolve_observed(initial, seg, p, cfg, times,
                            [&](double t, const DensityState& s) {
                              traj.push_back(trajectory_point(t, s));
                            });
  return r;
}

inline EvolveResult run_sequence(const DensityState& initial, const PulseSequence& seq,
                                 const SystemParams& p,
                                 const IntegratorConfig& cfg = {}) {
  if (seq.empty()) throw std::invalid_argument("pulse sequence must not be empty");
  EvolveResult acc{initial, {}};
  double t0 = 0.0;
  for (const PulseSegment& seg : seq) {
    EvolveResult r = evolve(acc.state, seg, p, cfg);
    for (TrajectoryPoint pt : r.trajectory) {
      pt.time += t0;
      acc.trajectory.push_back(pt);
    }
    t0 += seg.duration;
    acc.state = std::move(r.state);
  }
  return acc;
}

// --- truncation convergence ---------------------------------------------------

struct ConvergenceReport {
  std::vector<int> cutoffs;
  std::vector<std::map<LevelPair, double>> final_pops;  // one map per cutoff
  std::vector<double> max_diffs;  // successive cutoff pairs, empty for a single cutoff
  double threshold = 0.0;
  bool converged = false;
};

// Reruns the sequence at each Fock cutoff and compares electronic populations
// between successive cutoffs. The initial state depends on the cutoff, so it
// is supplied as a factory over the adjusted parameters.
inline ConvergenceReport convergence_check(
    const std::function<DensityState(const SystemParams&)>& initial,
    const PulseSequence& seq, const SystemParams& p, const IntegratorConfig& cfg,
    const std::vector<int>& cutoffs, double threshold = 1e-4) {
  if (cutoffs.empty()) throw std::invalid_argument("cutoff list must not be empty");
  ConvergenceReport report;
  report.threshold = threshold;
  for (int n_max : cutoffs) {
    SystemParams pc = p;
    pc.fock_cutoff = n_max;
    EvolveResult r = run_sequence(initial(pc), seq, pc, cfg);
    report.cutoffs.push_back(n_max);
    report.final_pops.push_back(populations(r.state, false));
  }
  for (std::size_t i = 1; i < report.final_pops.size(); ++i) {
    double diff = 0.0;
    for (const auto& [key, val] : report.final_pops[i])
      diff = std::max(diff, std::abs(val - report.final_pops[i - 1].at(key)));
    report.max_diffs.push_back(diff);
  }
  report.converged = report.max_diffs.empty() || report.max_diffs.back() < threshold;
  return report;
}

}  // namespace lindgate
