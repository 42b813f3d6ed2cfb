#pragma once

// Physical parameters of the driven two-ion system. All frequencies are
// stored as angular frequencies (rad/s); decay and pumping rates are plain
// rates (1/s). Helpers convert from the lab conventions (drive strengths
// quoted as Omega / 2 pi in Hz) used by config files.

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "lindgate/basis.hpp"

namespace lindgate {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double angular_from_hz(double hz) { return kTwoPi * hz; }
inline double hz_from_angular(double rad_per_s) { return rad_per_s / kTwoPi; }

struct SystemParams {
  double omega_f = angular_from_hz(1150.0);    // probe Rabi frequency (rad/s)
  double omega_sb = angular_from_hz(8000.0);   // sideband Rabi frequency (rad/s)
  // Probe detuning (rad/s). Unset means "derived from the gate choice";
  // model-level code treats unset as zero.
  std::optional<double> delta_probe;
  double delta_mode = 0.0;      // sideband drive detuning from the red sideband (rad/s)
  double gamma_f = 4.5e3;       // engineered mode-reset rate via |f> (1/s)
  double gamma_e = 1.0e5;       // optical pumping rate e -> 0 (1/s)
  double nbar = 0.14;           // initial thermal occupation of the mode
  double heating_rate = 106.0;  // ambient heating rate (quanta/s)
  int fock_cutoff = 5;          // highest Fock state kept

  HilbertSpace space() const { return HilbertSpace(fock_cutoff); }

  double delta_or_zero() const { return delta_probe.value_or(0.0); }

  void validate() const {
    if (!(omega_f >= 0.0) || !std::isfinite(omega_f))
      throw std::invalid_argument("omega_f must be finite and >= 0");
    if (!(omega_sb >= 0.0) || !std::isfinite(omega_sb))
      throw std::invalid_argument("omega_sb must be finite and >= 0");
    if (delta_probe && !std::isfinite(*delta_probe))
      throw std::invalid_argument("delta_probe must be finite");
    if (!std::isfinite(delta_mode))
      throw std::invalid_argument("delta_mode must be finite");
    if (!(gamma_f >= 0.0)) throw std::invalid_argument("gamma_f must be >= 0");
    if (!(gamma_e >= 0.0)) throw std::invalid_argument("gamma_e must be >= 0");
    if (!(nbar >= 0.0)) throw std::invalid_argument("nbar must be >= 0");
    if (!(heating_rate >= 0.0))
      throw std::invalid_argument("heating_rate must be >= 0");
    if (fock_cutoff < 1) throw std::invalid_argument("fock_cutoff must be >= 1");
  }
};

enum class GateKind { or_gate, nor_gate };

inline GateKind gate_kind_from_string(const std::string& s) {
  if (s == "or") return GateKind::or_gate;
  if (s == "nor") return GateKind::nor_gate;
  throw std::invalid_argument("unknown gate kind '" + s + "' (expected or|nor)");
}

inline const char* gate_kind_name(GateKind k) {
  return k == GateKind::or_gate ? "or" : "nor";
}

// Probe detuning that makes the target dressed state resonant: the
// three-state manifold shifted by Omega_sb/sqrt(2) for OR, the two-state
// manifold shifted by Omega_sb/2 for NOR.
inline double gate_detuning(const SystemParams& p, GateKind kind) {
  return kind == GateKind::or_gate ? p.omega_sb / std::sqrt(2.0) : 0.5 * p.omega_sb;
}

}  // namespace lindgate
