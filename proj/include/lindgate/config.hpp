#pragma once

// Run configuration for the command-line tool.
//
// A config file is flat structured text: one `key = value` per line, keys
// grouped by dotted section (system.*, gate.*, integrator.*, scan.*,
// spread.*, converge.*, sweep.*, output.*), `#` starting a comment. The
// format stays flat so two runs diff line by line.
//
// Values are in lab units: drive strengths as Omega/2pi in Hz, rates in 1/s,
// durations in seconds. Conversion to the angular-frequency SystemParams
// happens in one place, RunConfig::params().
//
// Parsing is strict where silence would hurt: unknown and duplicate keys are
// errors (a typo must not fall back to a default), while omitted keys take
// the documented defaults below. A few keys accept the literal string "auto"
// meaning "derive from the other parameters at run time".
//
// serialize_config() writes every key back in schema order with exact
// (shortest round-trip) number formatting, so
// parse_config(serialize_config(c)) == c holds for every valid config.

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "lindgate/dynamics.hpp"
#include "lindgate/gates.hpp"
#include "lindgate/params.hpp"

namespace lindgate {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScanSettings {
  std::string kind = "both";  // probe | cooling | both
  std::optional<double> detuning_hz;  // auto: half the sideband Rabi frequency
  double probe_t_max_s = 6e-4;
  double cooling_t_max_s = 1e-3;
  int points = 121;

  bool operator==(const ScanSettings&) const = default;
};

struct SpreadSettings {
  double sigma_frac = 0.04;
  int nodes = 7;

  bool operator==(const SpreadSettings&) const = default;
};

struct ConvergeSettings {
  std::vector<int> cutoffs{4, 5, 6};
  double threshold = 1e-4;
  std::string input = "01";

  bool operator==(const ConvergeSettings&) const = default;
};

// One sweep axis; `parameter` empty means the axis is unused. A single grid
// point is allowed: a 1-point sweep degenerates to a plain evaluation.
struct SweepAxisSettings {
  std::string parameter;
  double min = 0.0;
  double max = 0.0;
  int points = 1;
  std::string scale = "linear";  // linear | log

  bool operator==(const SweepAxisSettings&) const = default;
};

struct SweepSettings {
  SweepAxisSettings axis1, axis2;
  std::string objective = "average_fidelity";
  int max_points = 256;  // budget guard: abort before computing past this

  bool operator==(const SweepSettings&) const = default;
};

struct RunConfig {
  // system.*
  double omega_f_hz = 1150.0;
  double omega_sb_hz = 8000.0;
  double delta_mode_hz = 0.0;
  double gamma_f_per_s = 4.5e3;
  double gamma_e_per_s = 1.0e5;
  double nbar = 0.14;
  double heating_rate_per_s = 106.0;
  int fock_cutoff = 5;

  // gate.*
  std::string gate_kind = "or";
  std::optional<double> probe_detuning_hz;  // auto: the gate's resonance
  std::optional<double> probe_duration_s;   // auto: one pi time of the driven branch
  double dissipation_duration_s = 1e-3;
  std::optional<double> pump_duration_s;  // auto: 5 / gamma_e
  std::vector<int> pump_ions{1};
  double init_fidelity = 1.0;

  // integrator.*
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step_s = 0.0;  // 0: derive from the fastest rate
  int samples = 200;

  ScanSettings scan;
  SpreadSettings spread;
  ConvergeSettings converge;
  SweepSettings sweep;

  // output.*
  std::string output_dir = ".";

  bool operator==(const RunConfig&) const = default;

  SystemParams params() const {
    SystemParams p;
    p.omega_f = angular_from_hz(omega_f_hz);
    p.omega_sb = angular_from_hz(omega_sb_hz);
    p.delta_mode = angular_from_hz(delta_mode_hz);
    p.gamma_f = gamma_f_per_s;
    p.gamma_e = gamma_e_per_s;
    p.nbar = nbar;
    p.heating_rate = heating_rate_per_s;
    p.fock_cutoff = fock_cutoff;
    return p;
  }

  GateSpec gate() const {
    GateSpec g;
    g.kind = gate_kind_from_string(gate_kind);
    if (probe_detuning_hz) g.probe_detuning = angular_from_hz(*probe_detuning_hz);
    g.probe_duration = probe_duration_s;
    g.dissipation_duration = dissipation_duration_s;
    g.pump_duration = pump_duration_s;
    g.pump_ions = pump_ions;
    g.init_fidelity = init_fidelity;
    return g;
  }

  IntegratorConfig integrator() const {
    IntegratorConfig c;
    c.rel_tol = rel_tol;
    c.abs_tol = abs_tol;
    c.max_step = max_step_s;
    c.trajectory_samples = samples;
    return c;
  }

  double scan_detuning() const {
    return angular_from_hz(scan.detuning_hz.value_or(0.5 * omega_sb_hz));
  }

  void validate() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& s) {
  double x = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc{} || p != end)
    throw std::invalid_argument("expected a number, got '" + s + "'");
  return x;
}

inline int parse_int(const std::string& s) {
  int x = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc{} || p != end)
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  return x;
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(parse_int(trim(item)));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated integer list");
  return out;
}

inline std::string format_number(double x) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, p);
}

inline std::string format_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

// One config key: its name plus how to read a value into a RunConfig and how
// to write the current value back out in canonical form.
struct KeyBinding {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

// `ref` is a generic accessor lambda `[](auto& c) -> auto& { ... }`, usable
// on both RunConfig& and const RunConfig&.
template <class Ref>
KeyBinding number_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](RunConfig& c, const std::string& v) { ref(c) = parse_number(v); },
          [ref](const RunConfig& c) { return format_number(ref(c)); }};
}

template <class Ref>
KeyBinding auto_number_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](RunConfig& c, const std::string& v) {
            if (v == "auto")
              ref(c).reset();
            else
              ref(c) = parse_number(v);
          },
          [ref](const RunConfig& c) {
            const auto& opt = ref(c);
            return opt ? format_number(*opt) : std::string("auto");
          }};
}

template <class Ref>
KeyBinding int_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](RunConfig& c, const std::string& v) { ref(c) = parse_int(v); },
          [ref](const RunConfig& c) { return std::to_string(ref(c)); }};
}

template <class Ref>
KeyBinding string_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](RunConfig& c, const std::string& v) { ref(c) = v; },
          [ref](const RunConfig& c) { return ref(c); }};
}

// A name that may be empty (an unused sweep axis); the keyword `none` stands
// in for the empty string so the serialized form stays one token per line.
template <class Ref>
KeyBinding optional_name_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](RunConfig& c, const std::string& v) { ref(c) = v == "none" ? "" : v; },
          [ref](const RunConfig& c) {
            return ref(c).empty() ? std::string("none") : ref(c);
          }};
}

template <class Ref>
KeyBinding int_list_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](RunConfig& c, const std::string& v) { ref(c) = parse_int_list(v); },
          [ref](const RunConfig& c) { return format_int_list(ref(c)); }};
}

}  // namespace detail

// Full key schema in serialization order. Values shown by get() on a default
// RunConfig are the documented defaults.
inline const std::vector<detail::KeyBinding>& config_keys() {
  using namespace detail;
  static const std::vector<KeyBinding> table = {
      number_key("system.omega_f_hz", [](auto& c) -> auto& { return c.omega_f_hz; }),
      number_key("system.omega_sb_hz", [](auto& c) -> auto& { return c.omega_sb_hz; }),
      number_key("system.delta_mode_hz", [](auto& c) -> auto& { return c.delta_mode_hz; }),
      number_key("system.gamma_f_per_s", [](auto& c) -> auto& { return c.gamma_f_per_s; }),
      number_key("system.gamma_e_per_s", [](auto& c) -> auto& { return c.gamma_e_per_s; }),
      number_key("system.nbar", [](auto& c) -> auto& { return c.nbar; }),
      number_key("system.heating_rate_per_s",
                 [](auto& c) -> auto& { return c.heating_rate_per_s; }),
      int_key("system.fock_cutoff", [](auto& c) -> auto& { return c.fock_cutoff; }),
      string_key("gate.kind", [](auto& c) -> auto& { return c.gate_kind; }),
      auto_number_key("gate.probe_detuning_hz",
                      [](auto& c) -> auto& { return c.probe_detuning_hz; }),
      auto_number_key("gate.probe_duration_s",
                      [](auto& c) -> auto& { return c.probe_duration_s; }),
      number_key("gate.dissipation_duration_s",
                 [](auto& c) -> auto& { return c.dissipation_duration_s; }),
      auto_number_key("gate.pump_duration_s",
                      [](auto& c) -> auto& { return c.pump_duration_s; }),
      int_list_key("gate.pump_ions", [](auto& c) -> auto& { return c.pump_ions; }),
      number_key("gate.init_fidelity", [](auto& c) -> auto& { return c.init_fidelity; }),
      number_key("integrator.rel_tol", [](auto& c) -> auto& { return c.rel_tol; }),
      number_key("integrator.abs_tol", [](auto& c) -> auto& { return c.abs_tol; }),
      number_key("integrator.max_step_s", [](auto& c) -> auto& { return c.max_step_s; }),
      int_key("integrator.samples", [](auto& c) -> auto& { return c.samples; }),
      string_key("scan.kind", [](auto& c) -> auto& { return c.scan.kind; }),
      auto_number_key("scan.detuning_hz",
                      [](auto& c) -> auto& { return c.scan.detuning_hz; }),
      number_key("scan.probe_t_max_s",
                 [](auto& c) -> auto& { return c.scan.probe_t_max_s; }),
      number_key("scan.cooling_t_max_s",
                 [](auto& c) -> auto& { return c.scan.cooling_t_max_s; }),
      int_key("scan.points", [](auto& c) -> auto& { return c.scan.points; }),
      number_key("spread.sigma_frac", [](auto& c) -> auto& { return c.spread.sigma_frac; }),
      int_key("spread.nodes", [](auto& c) -> auto& { return c.spread.nodes; }),
      int_list_key("converge.cutoffs",
                   [](auto& c) -> auto& { return c.converge.cutoffs; }),
      number_key("converge.threshold",
                 [](auto& c) -> auto& { return c.converge.threshold; }),
      string_key("converge.input", [](auto& c) -> auto& { return c.converge.input; }),
      optional_name_key("sweep.parameter",
                        [](auto& c) -> auto& { return c.sweep.axis1.parameter; }),
      number_key("sweep.min", [](auto& c) -> auto& { return c.sweep.axis1.min; }),
      number_key("sweep.max", [](auto& c) -> auto& { return c.sweep.axis1.max; }),
      int_key("sweep.points", [](auto& c) -> auto& { return c.sweep.axis1.points; }),
      string_key("sweep.scale", [](auto& c) -> auto& { return c.sweep.axis1.scale; }),
      optional_name_key("sweep.parameter2",
                        [](auto& c) -> auto& { return c.sweep.axis2.parameter; }),
      number_key("sweep.min2", [](auto& c) -> auto& { return c.sweep.axis2.min; }),
      number_key("sweep.max2", [](auto& c) -> auto& { return c.sweep.axis2.max; }),
      int_key("sweep.points2", [](auto& c) -> auto& { return c.sweep.axis2.points; }),
      string_key("sweep.scale2", [](auto& c) -> auto& { return c.sweep.axis2.scale; }),
      string_key("sweep.objective", [](auto& c) -> auto& { return c.sweep.objective; }),
      int_key("sweep.max_points", [](auto& c) -> auto& { return c.sweep.max_points; }),
      string_key("output.dir", [](auto& c) -> auto& { return c.output_dir; }),
  };
  return table;
}

// Parameters a sweep axis may reference. Keys marked `true` are the
// auto-capable ones; sweeping them pins an explicit value.
inline const std::map<std::string, bool>& sweepable_parameters() {
  static const std::map<std::string, bool> table = {
      {"system.omega_f_hz", false},
      {"system.omega_sb_hz", false},
      {"system.delta_mode_hz", false},
      {"system.gamma_f_per_s", false},
      {"system.gamma_e_per_s", false},
      {"system.nbar", false},
      {"system.heating_rate_per_s", false},
      {"gate.probe_detuning_hz", true},
      {"gate.probe_duration_s", true},
      {"gate.pump_duration_s", true},
      {"gate.dissipation_duration_s", false},
      {"gate.init_fidelity", false},
  };
  return table;
}

// Sets a swept parameter on a copy of the base config. The key must come
// from sweepable_parameters(); the binding table does the actual write.
inline void apply_sweep_value(RunConfig& cfg, const std::string& key, double value) {
  if (!sweepable_parameters().count(key))
    throw ConfigError("'" + key + "' is not a sweepable parameter");
  for (const auto& b : config_keys())
    if (b.key == key) {
      b.set(cfg, detail::format_number(value));
      return;
    }
  throw std::logic_error("sweepable parameter missing from the key schema");
}

inline void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  auto positive = [&](double x, const char* key) {
    if (!(x > 0.0) || !std::isfinite(x))
      fail(std::string(key) + " must be finite and > 0 (got " +
           detail::format_number(x) + ")");
  };
  auto non_negative = [&](double x, const char* key) {
    if (!(x >= 0.0) || !std::isfinite(x))
      fail(std::string(key) + " must be finite and >= 0 (got " +
           detail::format_number(x) + ")");
  };

  positive(omega_f_hz, "system.omega_f_hz");
  positive(omega_sb_hz, "system.omega_sb_hz");
  if (!std::isfinite(delta_mode_hz)) fail("system.delta_mode_hz must be finite");
  non_negative(gamma_f_per_s, "system.gamma_f_per_s");
  positive(gamma_e_per_s, "system.gamma_e_per_s");
  non_negative(nbar, "system.nbar");
  non_negative(heating_rate_per_s, "system.heating_rate_per_s");
  if (fock_cutoff < 1) fail("system.fock_cutoff must be >= 1");

  if (gate_kind != "or" && gate_kind != "nor")
    fail("gate.kind must be 'or' or 'nor' (got '" + gate_kind + "')");
  if (probe_detuning_hz && !std::isfinite(*probe_detuning_hz))
    fail("gate.probe_detuning_hz must be finite or auto");
  if (probe_duration_s) positive(*probe_duration_s, "gate.probe_duration_s");
  positive(dissipation_duration_s, "gate.dissipation_duration_s");
  if (pump_duration_s) positive(*pump_duration_s, "gate.pump_duration_s");
  if (pump_ions.empty()) fail("gate.pump_ions must name at least one ion");
  std::set<int> seen_ions;
  for (int ion : pump_ions) {
    if (ion != 1 && ion != 2)
      fail("gate.pump_ions entries must be 1 or 2 (got " + std::to_string(ion) + ")");
    if (!seen_ions.insert(ion).second) fail("gate.pump_ions must not repeat an ion");
  }
  if (!(init_fidelity >= 0.0 && init_fidelity <= 1.0))
    fail("gate.init_fidelity must lie in [0, 1] (got " +
         detail::format_number(init_fidelity) + ")");

  positive(rel_tol, "integrator.rel_tol");
  positive(abs_tol, "integrator.abs_tol");
  non_negative(max_step_s, "integrator.max_step_s");
  if (samples < 1) fail("integrator.samples must be >= 1");

  if (scan.kind != "probe" && scan.kind != "cooling" && scan.kind != "both")
    fail("scan.kind must be probe, cooling, or both (got '" + scan.kind + "')");
  if (scan.detuning_hz && !std::isfinite(*scan.detuning_hz))
    fail("scan.detuning_hz must be finite or auto");
  positive(scan.probe_t_max_s, "scan.probe_t_max_s");
  positive(scan.cooling_t_max_s, "scan.cooling_t_max_s");
  if (scan.points < 2) fail("scan.points must be >= 2");

  non_negative(spread.sigma_frac, "spread.sigma_frac");
  if (spread.nodes < 1) fail("spread.nodes must be >= 1");

  if (converge.cutoffs.empty()) fail("converge.cutoffs must not be empty");
  for (std::size_t i = 0; i < converge.cutoffs.size(); ++i) {
    if (converge.cutoffs[i] < 1) fail("converge.cutoffs entries must be >= 1");
    if (i > 0 && converge.cutoffs[i] <= converge.cutoffs[i - 1])
      fail("converge.cutoffs must be strictly increasing");
  }
  positive(converge.threshold, "converge.threshold");
  if (converge.input != "00" && converge.input != "01" && converge.input != "10" &&
      converge.input != "11")
    fail("converge.input must be one of 00, 01, 10, 11 (got '" + converge.input + "')");

  // `suffix` distinguishes the axis-1 keys (sweep.min, ...) from the axis-2
  // keys (sweep.min2, ...) in error messages.
  auto check_axis = [&](const SweepAxisSettings& ax, const std::string& suffix) {
    if (ax.parameter.empty()) return;
    if (!sweepable_parameters().count(ax.parameter))
      fail("sweep.parameter" + suffix + ": unknown sweepable parameter '" +
           ax.parameter + "'");
    if (!std::isfinite(ax.min) || !std::isfinite(ax.max))
      fail("sweep.min" + suffix + "/max" + suffix + " must be finite");
    if (ax.min > ax.max) fail("sweep.min" + suffix + " must be <= sweep.max" + suffix);
    if (ax.points < 1) fail("sweep.points" + suffix + " must be >= 1");
    if (ax.scale != "linear" && ax.scale != "log")
      fail("sweep.scale" + suffix + " must be linear or log (got '" + ax.scale + "')");
    if (ax.scale == "log" && !(ax.min > 0.0))
      fail("sweep.scale" + suffix + ": log scale needs sweep.min" + suffix + " > 0");
  };
  check_axis(sweep.axis1, "");
  if (!sweep.axis2.parameter.empty() && sweep.axis1.parameter.empty())
    fail("sweep.parameter2 requires sweep.parameter");
  if (!sweep.axis2.parameter.empty() && sweep.axis2.parameter == sweep.axis1.parameter)
    fail("sweep.parameter2 must differ from sweep.parameter");
  check_axis(sweep.axis2, "2");
  if (sweep.objective != "average_fidelity" && sweep.objective != "success_00" &&
      sweep.objective != "success_01" && sweep.objective != "success_10" &&
      sweep.objective != "success_11")
    fail("sweep.objective must be average_fidelity or success_XY (got '" +
         sweep.objective + "')");
  if (sweep.max_points < 1) fail("sweep.max_points must be >= 1");

  if (output_dir.empty()) fail("output.dir must not be empty");
}

// Parses a config document. Unknown keys, duplicate keys, malformed lines,
// and invalid values all throw ConfigError with the offending line number;
// the fully assembled config is then validated as a whole.
inline RunConfig parse_config(const std::string& text) {
  static const std::map<std::string, const detail::KeyBinding*> by_key = [] {
    std::map<std::string, const detail::KeyBinding*> m;
    for (const auto& b : config_keys()) m[b.key] = &b;
    return m;
  }();

  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (std::size_t hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");

    auto it = by_key.find(key);
    if (it == by_key.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key +
                        "'");
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key +
                        "'");
    try {
      it->second->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + key + ": " +
                        e.what());
    }
  }
  cfg.validate();
  return cfg;
}

// Canonical text form: every key in schema order, blank line between
// sections, numbers in shortest exact form.
inline std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& b : config_keys()) {
    std::string prefix = b.key.substr(0, b.key.find('.'));
    if (prefix != section) {
      if (!section.empty()) out << '\n';
      section = prefix;
    }
    out << b.key << " = " << b.get(cfg) << '\n';
  }
  return out.str();
}

}  // namespace lindgate
