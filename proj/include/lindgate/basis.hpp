#pragma once

// Basis conventions for two four-level ions sharing one harmonic motional
// mode. Electronic levels per ion are ordered 0, 1, f, e. The composite
// basis index is ion1-major, phonon-minor:
//
//   index(ion1, ion2, n) = (4 * ion1 + ion2) * (n_max + 1) + n
//
// so a density matrix of dimension 16 * (n_max + 1) stores the phonon
// ladder contiguously for each electronic pair.

#include <array>
#include <compare>
#include <stdexcept>
#include <string>

namespace lindgate {

enum class Level : int { zero = 0, one = 1, f = 2, e = 3 };

inline constexpr std::array<Level, 4> all_levels{Level::zero, Level::one,
                                                 Level::f, Level::e};

inline constexpr char level_char(Level l) {
  return "01fe"[static_cast<int>(l)];
}

inline Level level_from_char(char c) {
  switch (c) {
    case '0': return Level::zero;
    case '1': return Level::one;
    case 'f': return Level::f;
    case 'e': return Level::e;
    default: throw std::invalid_argument(std::string("unknown level '") + c + "'");
  }
}

struct HilbertSpace {
  int n_max = 5;  // highest Fock state kept in the truncated phonon ladder

  HilbertSpace() = default;
  explicit HilbertSpace(int n_max_) : n_max(n_max_) {
    if (n_max < 0) throw std::invalid_argument("fock cutoff must be >= 0");
  }

  int fock_dim() const { return n_max + 1; }
  int dim() const { return 16 * (n_max + 1); }

  int index(Level ion1, Level ion2, int n) const {
    if (n < 0 || n > n_max) throw std::out_of_range("fock index out of range");
    return (4 * static_cast<int>(ion1) + static_cast<int>(ion2)) * fock_dim() + n;
  }

  // Inverse of index(); returns (ion1, ion2, n).
  std::array<int, 3> unindex(int i) const {
    if (i < 0 || i >= dim()) throw std::out_of_range("basis index out of range");
    const int n = i % fock_dim();
    const int pair = i / fock_dim();
    return {pair / 4, pair % 4, n};
  }

  bool operator==(const HilbertSpace&) const = default;
};

inline int basis_index(const HilbertSpace& space, Level ion1, Level ion2, int n) {
  return space.index(ion1, ion2, n);
}

// A named basis state such as |f1,0> (ion1 = f, ion2 = 1, phonon n = 0).
struct BasisLabel {
  Level ion1 = Level::zero;
  Level ion2 = Level::zero;
  int n = 0;

  auto operator<=>(const BasisLabel&) const = default;

  std::string str() const {
    std::string s = "|";
    s += level_char(ion1);
    s += level_char(ion2);
    s += ',';
    s += std::to_string(n);
    s += '>';
    return s;
  }
};

inline int basis_index(const HilbertSpace& space, const BasisLabel& l) {
  return space.index(l.ion1, l.ion2, l.n);
}

}  // namespace lindgate
