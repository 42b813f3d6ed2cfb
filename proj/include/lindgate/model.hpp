#pragma once

// Hamiltonian and dissipator builders for the driven two-ion system in the
// frame co-rotating with the probe and sideband drives.
//
// Drive terms:
//   probe     V1      = omega_f/2 (|f><0|_1 + |0><f|_1)          (ion 1 only)
//   sideband  H_{f,j} = omega_sb/2 (a |f><1|_j + a^dag |1><f|_j)
//                       + Delta |f><f|_j + (Delta - 2 delta) |1><1|_j
//   mode      delta a^dag a
//
// The diagonal of H_{f,j} carries the probe detuning Delta on |1> as well as
// |f>: in the frame where both drive terms are static, a quantum that the
// sideband has exchanged from |f,n> into |1,n+1> still carries the probe
// photon's detuning. (Dropping the |1> term would misplace every dressed
// resonance by Delta.) With delta = 0 the f,n <-> 1,n+1 exchange is exactly
// resonant and all states reachable from one probe absorption stay
// degenerate, which is what produces the engineered dressed-state shifts.
//
// Jump operators:
//   cooling   sqrt(gamma_f) a              (engineered mode reset via |f>)
//   pumping   sqrt(gamma_e) |0><e|_j       (per selected ion)
//   heating   sqrt(heating_rate) a^dag and sqrt(heating_rate) a
//
// The heating channel uses the symmetric infinite-temperature pair, giving
// d<n>/dt = heating_rate independent of occupation (up to truncation).

#include <vector>

#include "lindgate/operators.hpp"
#include "lindgate/params.hpp"

namespace lindgate {

struct DensityState {
  HilbertSpace space;
  ComplexMatrix rho;

  static DensityState pure(const HilbertSpace& space, const ComplexVector& psi) {
    DensityState s{space, psi * psi.adjoint()};
    return s;
  }

  // Trace one, Hermitian, and positive within integration error. The checks
  // are written so that NaN entries fail them too.
  void check(double tol = 1e-8, double positivity_tol = 1e-7) const {
    if (rho.rows() != space.dim() || rho.cols() != space.dim())
      throw std::invalid_argument("density matrix does not match the space dimension");
    if (!(std::abs(rho.trace() - Complex(1.0, 0.0)) < tol))
      throw std::invalid_argument("density matrix trace differs from 1");
    if (!((rho - rho.adjoint()).cwiseAbs().maxCoeff() < tol))
      throw std::invalid_argument("density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho + rho.adjoint()),
                                                    Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > -positivity_tol))
      throw std::invalid_argument("density matrix has a negative eigenvalue");
  }
};

inline ComplexMatrix probe_hamiltonian(const SystemParams& p) {
  const HilbertSpace space = p.space();
  return 0.5 * p.omega_f *
         (ion_op(space, 1, Level::f, Level::zero) + ion_op(space, 1, Level::zero, Level::f));
}

inline ComplexMatrix sideband_hamiltonian(const SystemParams& p, int ion) {
  const HilbertSpace space = p.space();
  const double delta = p.delta_or_zero();
  ComplexMatrix exchange = ladder_down(space) * ion_op(space, ion, Level::f, Level::one);
  ComplexMatrix h = 0.5 * p.omega_sb * (exchange + exchange.adjoint());
  h += delta * ion_projector(space, ion, Level::f);
  h += (delta - 2.0 * p.delta_mode) * ion_projector(space, ion, Level::one);
  return h;
}

inline ComplexMatrix total_hamiltonian(const SystemParams& p, bool probe_on,
                                       bool sideband_on) {
  const HilbertSpace space = p.space();
  ComplexMatrix h = ComplexMatrix::Zero(space.dim(), space.dim());
  if (sideband_on) {
    h += p.delta_mode * number_operator(space);
    h += sideband_hamiltonian(p, 1);
    h += sideband_hamiltonian(p, 2);
  }
  if (probe_on) h += probe_hamiltonian(p);
  return h;
}

// Conserved by the sideband + mode Hamiltonian: one unit for each ion in
// |f> or |e> plus the phonon number. The f,n <-> 1,n+1 exchange moves a
// unit between the electronic and motional parts without changing the sum.
inline ComplexMatrix excitation_number(const HilbertSpace& space) {
  ComplexMatrix n = number_operator(space);
  for (int ion : {1, 2}) {
    n += ion_projector(space, ion, Level::f);
    n += ion_projector(space, ion, Level::e);
  }
  return n;
}

inline ComplexMatrix cooling_jump(const SystemParams& p) {
  return std::sqrt(p.gamma_f) * ladder_down(p.space());
}

inline std::vector<ComplexMatrix> pump_jumps(const SystemParams& p,
                                             const std::vector<int>& ions) {
  std::vector<ComplexMatrix> jumps;
  for (int ion : ions)
    jumps.push_back(std::sqrt(p.gamma_e) * ion_op(p.space(), ion, Level::zero, Level::e));
  return jumps;
}

inline std::vector<ComplexMatrix> heating_jumps(const SystemParams& p) {
  std::vector<ComplexMatrix> jumps;
  if (p.heating_rate > 0.0) {
    jumps.push_back(std::sqrt(p.heating_rate) * ladder_up(p.space()));
    jumps.push_back(std::sqrt(p.heating_rate) * ladder_down(p.space()));
  }
  return jumps;
}

// Thermal occupation weights p_n = nbar^n / (1+nbar)^(n+1), renormalized on
// the truncated ladder so the ratio p_{n+1}/p_n stays exact.
inline std::vector<double> thermal_weights_truncated(double nbar, int n_max) {
  if (nbar < 0.0) throw std::invalid_argument("nbar must be >= 0");
  std::vector<double> w(n_max + 1);
  const double ratio = nbar / (1.0 + nbar);
  double term = 1.0, sum = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    w[n] = term;
    sum += term;
    term *= ratio;
  }
  for (double& x : w) x /= sum;
  return w;
}

// Product state |ion1 ion2> x thermal(nbar) on the truncated mode.
inline DensityState thermal_initial_state(const SystemParams& p, Level ion1, Level ion2) {
  const HilbertSpace space = p.space();
  ComplexMatrix rho = ComplexMatrix::Zero(space.dim(), space.dim());
  const std::vector<double> w = thermal_weights_truncated(p.nbar, space.n_max);
  for (int n = 0; n <= space.n_max; ++n)
    rho(space.index(ion1, ion2, n), space.index(ion1, ion2, n)) = w[n];
  return DensityState{space, std::move(rho)};
}

}  // namespace lindgate
