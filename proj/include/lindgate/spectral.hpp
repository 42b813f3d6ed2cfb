#pragma once

// Dressed-state analysis of the subspaces the probe drives into.
//
// The sideband exchange connects |f,n> <-> |1,n+1> on each ion, so a basis
// state reached by the probe hybridizes with a small closed family of states.
// This header computes those families (depth-first walk of the exchange
// moves, capped at the Fock cutoff), diagonalizes the restricted drive
// Hamiltonian, and tabulates for each dressed state how far it sits from the
// probe (Delta_d) and how strongly the probe drives it (Omega_d).
//
// Effective Rabi rates follow the two-level convention: a coupling matrix
// element Omega/2 corresponds to Rabi rate Omega, so probe couplings enter
// the tables at the full omega_f.
//
// Degenerate eigenspaces get a deterministic basis: Gram-Schmidt over the
// cluster projector applied to the coordinate axes in label order, then a
// sign fix making each vector's largest component real positive. Snapshots
// of these vectors are stable across runs and Eigen versions.

#include <algorithm>
#include <optional>
#include <vector>

#include "lindgate/model.hpp"

namespace lindgate {

struct Subspace {
  std::vector<BasisLabel> labels;
  ComplexMatrix hamiltonian;   // drive Hamiltonian restricted to the span (rad/s)
  ComplexVector probe_vector;  // probe couplings from the generating state (rad/s)
};

struct DressedState {
  double energy = 0.0;  // rad/s
  ComplexVector vec;    // coordinates over Subspace::labels
  double probe_overlap = 0.0;  // |<vec, probe_vector>|, rad/s
};

struct ResonanceOffset {
  int ground_index = 0;   // dressed state of the initial manifold
  int excited_index = 0;  // dressed state of the probe-reached manifold
  double ground_energy = 0.0;   // rad/s
  double excited_energy = 0.0;  // rad/s
  double delta_d = 0.0;         // excited_energy - ground_energy (rad/s)
  double omega_d = 0.0;         // effective probe Rabi rate between the pair (rad/s)
  double ground_weight = 0.0;   // |<initial | ground dressed>|^2
};

namespace detail {

// state reached by the probe photon on ion 1, if any
inline std::optional<BasisLabel> probe_image(const BasisLabel& l) {
  if (l.ion1 == Level::zero) return BasisLabel{Level::f, l.ion2, l.n};
  if (l.ion1 == Level::f) return BasisLabel{Level::zero, l.ion2, l.n};
  return std::nullopt;
}

inline void closure_visit(const BasisLabel& s, int n_max,
                          std::vector<BasisLabel>& out) {
  if (std::find(out.begin(), out.end(), s) != out.end()) return;
  out.push_back(s);
  auto level = [&](int ion) { return ion == 1 ? s.ion1 : s.ion2; };
  for (int ion : {1, 2}) {
    if (level(ion) == Level::f && s.n < n_max) {
      BasisLabel next{ion == 1 ? Level::one : s.ion1, ion == 2 ? Level::one : s.ion2,
                      s.n + 1};
      closure_visit(next, n_max, out);
    }
    if (level(ion) == Level::one && s.n > 0) {
      BasisLabel next{ion == 1 ? Level::f : s.ion1, ion == 2 ? Level::f : s.ion2,
                      s.n - 1};
      closure_visit(next, n_max, out);
    }
  }
}

inline std::vector<BasisLabel> sideband_closure(const std::vector<BasisLabel>& seeds,
                                                int n_max) {
  std::vector<BasisLabel> out;
  for (const BasisLabel& s : seeds) closure_visit(s, n_max, out);
  return out;
}

inline ComplexMatrix restrict_hamiltonian(const SystemParams& p,
                                          const std::vector<BasisLabel>& labels) {
  const HilbertSpace space = p.space();
  ComplexMatrix full = total_hamiltonian(p, false, true);
  const int k = static_cast<int>(labels.size());
  ComplexMatrix h(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      h(i, j) = full(basis_index(space, labels[i]), basis_index(space, labels[j]));
  return h;
}

inline void fix_sign(ComplexVector& v) {
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
  double mag = std::abs(v(imax));
  if (mag > 0.0) v *= std::conj(v(imax)) / mag;
}

}  // namespace detail

// Family of states the probe reaches from `initial`, closed under the
// sideband exchange. Empty when the probe does not couple to the state
// (ion 1 in |1> or |e>).
inline Subspace excited_subspace(const BasisLabel& initial, const SystemParams& p) {
  p.validate();
  auto image = detail::probe_image(initial);
  if (!image) return Subspace{{}, ComplexMatrix(0, 0), ComplexVector(0)};

  Subspace sub;
  sub.labels = detail::sideband_closure({*image}, p.fock_cutoff);
  sub.hamiltonian = detail::restrict_hamiltonian(p, sub.labels);
  sub.probe_vector = ComplexVector::Zero(sub.labels.size());
  for (std::size_t i = 0; i < sub.labels.size(); ++i)
    if (sub.labels[i] == *image) sub.probe_vector(i) = p.omega_f;
  return sub;
}

// Sideband dressing of the initial state itself (no probe applied).
inline Subspace ground_subspace(const BasisLabel& initial, const SystemParams& p) {
  p.validate();
  Subspace sub;
  sub.labels = detail::sideband_closure({initial}, p.fock_cutoff);
  sub.hamiltonian = detail::restrict_hamiltonian(p, sub.labels);
  sub.probe_vector = ComplexVector::Zero(sub.labels.size());
  return sub;
}

inline std::vector<DressedState> dressed_spectrum(const Subspace& sub) {
  const int k = static_cast<int>(sub.labels.size());
  if (k == 0) return {};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sub.hamiltonian);
  const Eigen::VectorXd& evals = es.eigenvalues();  // ascending

  std::vector<DressedState> out(k);
  const double cluster_tol = 1e-9 * std::max(1.0, evals.cwiseAbs().maxCoeff());

  int begin = 0;
  while (begin < k) {
    int end = begin + 1;
    while (end < k && evals(end) - evals(end - 1) <= cluster_tol) ++end;
    const int width = end - begin;
    if (width == 1) {
      out[begin].vec = es.eigenvectors().col(begin);
    } else {
      // deterministic basis for the degenerate cluster
      ComplexMatrix vc = es.eigenvectors().middleCols(begin, width);
      ComplexMatrix proj = vc * vc.adjoint();
      int got = 0;
      for (int axis = 0; axis < k && got < width; ++axis) {
        ComplexVector w = proj.col(axis);
        for (int j = 0; j < got; ++j)
          w -= out[begin + j].vec * out[begin + j].vec.dot(w);
        double norm = w.norm();
        if (norm > 1e-7) {
          out[begin + got].vec = w / norm;
          ++got;
        }
      }
      if (got != width)
        throw std::logic_error("degenerate cluster basis construction failed");
    }
    for (int i = begin; i < end; ++i) {
      out[i].energy = evals(i);
      detail::fix_sign(out[i].vec);
      out[i].probe_overlap = std::abs(out[i].vec.dot(sub.probe_vector));
    }
    begin = end;
  }
  return out;
}

// Resonance table for an initial logical state under the gate's detuning.
// Rows pair every dressed component of the initial manifold (weighted by its
// overlap with the bare initial state) with every dressed state the probe
// can reach from that manifold.
inline std::vector<ResonanceOffset> resonance_offsets(const BasisLabel& initial,
                                                      const SystemParams& params,
                                                      GateKind gate) {
  SystemParams p = params;
  p.delta_probe = gate_detuning(params, gate);
  p.validate();

  Subspace ground = ground_subspace(initial, p);
  std::vector<DressedState> gspec = dressed_spectrum(ground);

  std::vector<BasisLabel> seeds;
  for (const BasisLabel& l : ground.labels)
    if (auto img = detail::probe_image(l); img &&
        std::find(seeds.begin(), seeds.end(), *img) == seeds.end())
      seeds.push_back(*img);
  if (seeds.empty()) return {};

  Subspace excited;
  excited.labels = detail::sideband_closure(seeds, p.fock_cutoff);
  excited.hamiltonian = detail::restrict_hamiltonian(p, excited.labels);
  excited.probe_vector = ComplexVector::Zero(excited.labels.size());
  std::vector<DressedState> xspec = dressed_spectrum(excited);

  // probe coupling map between the two label sets, full omega_f per entry
  ComplexMatrix pmat =
      ComplexMatrix::Zero(excited.labels.size(), ground.labels.size());
  for (std::size_t j = 0; j < ground.labels.size(); ++j)
    if (auto img = detail::probe_image(ground.labels[j]))
      for (std::size_t i = 0; i < excited.labels.size(); ++i)
        if (excited.labels[i] == *img) pmat(i, j) = p.omega_f;

  std::vector<ResonanceOffset> rows;
  for (std::size_t g = 0; g < gspec.size(); ++g) {
    // coordinates of the bare initial state inside the ground manifold
    double weight = std::norm(gspec[g].vec(0));  // seed label sits first
    for (std::size_t x = 0; x < xspec.size(); ++x) {
      ResonanceOffset row;
      row.ground_index = static_cast<int>(g);
      row.excited_index = static_cast<int>(x);
      row.ground_energy = gspec[g].energy;
      row.excited_energy = xspec[x].energy;
      row.delta_d = xspec[x].energy - gspec[g].energy;
      row.omega_d = std::abs(xspec[x].vec.dot(pmat * gspec[g].vec));
      row.ground_weight = weight;
      rows.push_back(row);
    }
  }
  return rows;
}

// Lift subspace coordinates back into the full product space.
inline ComplexVector embed_vector(const HilbertSpace& space, const Subspace& sub,
                                  const ComplexVector& coords) {
  if (coords.size() != static_cast<long>(sub.labels.size()))
    throw std::invalid_argument("coordinate vector does not match the subspace");
  ComplexVector full = ComplexVector::Zero(space.dim());
  for (std::size_t i = 0; i < sub.labels.size(); ++i)
    full(basis_index(space, sub.labels[i])) = coords(i);
  return full;
}

}  // namespace lindgate
