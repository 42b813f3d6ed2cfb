#pragma once

// Dense operator builders on the two-ion + mode Hilbert space. Everything
// returns a full Eigen matrix; at the default cutoff the dimension is 96,
// which is small enough that dense algebra is both simpler and fast.

#include <complex>

#include <Eigen/Dense>

#include "lindgate/basis.hpp"

namespace lindgate {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline ComplexMatrix identity(const HilbertSpace& space) {
  return ComplexMatrix::Identity(space.dim(), space.dim());
}

// Phonon annihilation operator: a |k,l,n> = sqrt(n) |k,l,n-1>.
inline ComplexMatrix ladder_down(const HilbertSpace& space) {
  ComplexMatrix a = ComplexMatrix::Zero(space.dim(), space.dim());
  for (Level k : all_levels)
    for (Level l : all_levels)
      for (int n = 1; n <= space.n_max; ++n)
        a(space.index(k, l, n - 1), space.index(k, l, n)) = std::sqrt(double(n));
  return a;
}

inline ComplexMatrix ladder_up(const HilbertSpace& space) {
  return ladder_down(space).adjoint();
}

// Phonon number operator a^dag a.
inline ComplexMatrix number_operator(const HilbertSpace& space) {
  ComplexMatrix nop = ComplexMatrix::Zero(space.dim(), space.dim());
  for (Level k : all_levels)
    for (Level l : all_levels)
      for (int n = 0; n <= space.n_max; ++n)
        nop(space.index(k, l, n), space.index(k, l, n)) = double(n);
  return nop;
}

// Electronic operator |bra><ket| acting on one ion (1 or 2), identity on the
// other ion and on the mode.
inline ComplexMatrix ion_op(const HilbertSpace& space, int ion, Level bra, Level ket) {
  if (ion != 1 && ion != 2) throw std::invalid_argument("ion must be 1 or 2");
  ComplexMatrix op = ComplexMatrix::Zero(space.dim(), space.dim());
  for (Level other : all_levels)
    for (int n = 0; n <= space.n_max; ++n) {
      if (ion == 1)
        op(space.index(bra, other, n), space.index(ket, other, n)) = 1.0;
      else
        op(space.index(other, bra, n), space.index(other, ket, n)) = 1.0;
    }
  return op;
}

inline ComplexMatrix ion_projector(const HilbertSpace& space, int ion, Level l) {
  return ion_op(space, ion, l, l);
}

// Ideal instantaneous pi pulse between two levels of one ion:
// U = exp(-i pi/2 (|to><from| + |from><to|)), which maps
// |from> -> -i |to> and |to> -> -i |from| while leaving other levels alone.
inline ComplexMatrix pi_pulse(const HilbertSpace& space, int ion, Level from, Level to) {
  if (from == to) throw std::invalid_argument("pi pulse needs two distinct levels");
  ComplexMatrix u = identity(space);
  u -= ion_projector(space, ion, from);
  u -= ion_projector(space, ion, to);
  const Complex mi(0.0, -1.0);
  u += mi * ion_op(space, ion, to, from);
  u += mi * ion_op(space, ion, from, to);
  return u;
}

// Unit basis vector for a labeled state.
inline ComplexVector basis_vector(const HilbertSpace& space, const BasisLabel& label) {
  ComplexVector v = ComplexVector::Zero(space.dim());
  v(space.index(label.ion1, label.ion2, label.n)) = 1.0;
  return v;
}

}  // namespace lindgate
