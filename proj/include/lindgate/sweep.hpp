#pragma once

// Grid sweeps of gate performance over one or two config parameters.
//
// Each grid point is an independent job: it copies the base config, pins the
// swept values, and simulates whatever the objective needs (one input for
// success_XY, the full truth table for average_fidelity). Points run on a
// small thread pool and are merged by index, so the result, including its
// serialized form, does not depend on scheduling.
//
// The argmax scan keeps the first point that attains the maximum. Points are
// laid out with axis 1 slow and axis 2 fast over ascending grids, so a tie
// resolves toward smaller axis values.

#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lindgate/config.hpp"
#include "lindgate/gates.hpp"
#include "lindgate/output.hpp"

namespace lindgate {

struct SweepPoint {
  std::vector<double> values;        // one per axis
  double objective = 0.0;
  std::vector<TruthTableRow> rows;   // the truth-table rows this point computed
};

struct SweepResult {
  std::vector<std::string> parameters;
  std::vector<std::string> scales;
  std::vector<std::vector<double>> axis_values;
  std::string objective;
  std::vector<SweepPoint> points;  // axis 1 slow, axis 2 fast
  int best_index = 0;
};

inline std::vector<double> sweep_grid(const SweepAxisSettings& ax) {
  std::vector<double> grid;
  if (ax.points == 1) {
    grid.push_back(ax.min);
    return grid;
  }
  for (int i = 0; i < ax.points; ++i) {
    double t = static_cast<double>(i) / (ax.points - 1);
    if (ax.scale == "log")
      grid.push_back(std::exp(std::log(ax.min) + t * (std::log(ax.max) - std::log(ax.min))));
    else
      grid.push_back(ax.min + t * (ax.max - ax.min));
  }
  return grid;
}

namespace detail {

inline SweepPoint evaluate_sweep_point(const RunConfig& base,
                                       const std::vector<std::string>& parameters,
                                       const std::vector<double>& values,
                                       const std::string& objective) {
  RunConfig cfg = base;
  for (std::size_t a = 0; a < parameters.size(); ++a)
    apply_sweep_value(cfg, parameters[a], values[a]);
  cfg.validate();

  GateSpec spec = cfg.gate();
  SystemParams p = cfg.params();
  IntegratorConfig ic = cfg.integrator();

  SweepPoint point;
  point.values = values;
  if (objective == "average_fidelity") {
    TruthTable table = simulate_truth_table(spec, p, ic);
    point.rows.assign(table.rows.begin(), table.rows.end());
    point.objective = table.average_fidelity;
  } else {
    int idx = (objective[8] - '0') * 2 + (objective[9] - '0');  // "success_XY"
    TruthTableRow row = simulate_input(spec, p, ic, kLogicalInputs[idx]);
    point.objective = row.success;
    point.rows.push_back(std::move(row));
  }
  if (!std::isfinite(point.objective))
    throw std::runtime_error("sweep objective is not finite at " +
                             parameters[0] + " = " + format_number(values[0]));
  return point;
}

}  // namespace detail

// Axes and point coordinates of a sweep, checked against the budget guard
// but not yet evaluated. Shared by the real run and --dry-run planning.
struct SweepLayout {
  std::vector<std::string> parameters;
  std::vector<std::string> scales;
  std::vector<std::vector<double>> axis_values;
  std::vector<std::vector<double>> coords;  // axis 1 slow, axis 2 fast
};

inline SweepLayout sweep_layout(const RunConfig& base) {
  base.validate();
  if (base.sweep.axis1.parameter.empty())
    throw ConfigError("sweep.parameter is required for a sweep");

  SweepLayout layout;
  layout.parameters.push_back(base.sweep.axis1.parameter);
  layout.scales.push_back(base.sweep.axis1.scale);
  layout.axis_values.push_back(sweep_grid(base.sweep.axis1));
  if (!base.sweep.axis2.parameter.empty()) {
    layout.parameters.push_back(base.sweep.axis2.parameter);
    layout.scales.push_back(base.sweep.axis2.scale);
    layout.axis_values.push_back(sweep_grid(base.sweep.axis2));
  }

  std::size_t total = layout.axis_values[0].size();
  if (layout.axis_values.size() == 2) total *= layout.axis_values[1].size();
  if (total > static_cast<std::size_t>(base.sweep.max_points))
    throw ConfigError("sweep would evaluate " + std::to_string(total) +
                      " points, above sweep.max_points = " +
                      std::to_string(base.sweep.max_points));

  layout.coords.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    if (layout.axis_values.size() == 1) {
      layout.coords[i] = {layout.axis_values[0][i]};
    } else {
      std::size_t fast = layout.axis_values[1].size();
      layout.coords[i] = {layout.axis_values[0][i / fast],
                          layout.axis_values[1][i % fast]};
    }
  }
  return layout;
}

inline SweepResult run_sweep(const RunConfig& base) {
  SweepLayout layout = sweep_layout(base);
  SweepResult result;
  result.objective = base.sweep.objective;
  result.parameters = layout.parameters;
  result.scales = layout.scales;
  result.axis_values = layout.axis_values;
  const std::vector<std::vector<double>>& coords = layout.coords;
  const std::size_t total = coords.size();

  result.points.resize(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        result.points[i] = detail::evaluate_sweep_point(base, result.parameters,
                                                        coords[i], result.objective);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n_threads = std::max(1u, std::min<unsigned>(
      std::thread::hardware_concurrency(), static_cast<unsigned>(total)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (std::size_t i = 0; i < total; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);

  result.best_index = 0;
  for (std::size_t i = 1; i < total; ++i)
    if (result.points[i].objective > result.points[result.best_index].objective)
      result.best_index = static_cast<int>(i);
  return result;
}

inline ordered_json sweep_json(const RunConfig& cfg, const SweepResult& sweep) {
  ordered_json j = artifact_header("sweep", cfg);
  j["objective"] = sweep.objective;
  ordered_json axes = ordered_json::array();
  for (std::size_t a = 0; a < sweep.parameters.size(); ++a) {
    ordered_json axis = ordered_json::object();
    axis["parameter"] = sweep.parameters[a];
    axis["scale"] = sweep.scales[a];
    ordered_json values = ordered_json::array();
    for (double v : sweep.axis_values[a]) values.push_back(jnum(v));
    axis["values"] = values;
    axes.push_back(std::move(axis));
  }
  j["axes"] = axes;
  ordered_json points = ordered_json::array();
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    const SweepPoint& pt = sweep.points[i];
    ordered_json p = ordered_json::object();
    p["index"] = i;
    ordered_json values = ordered_json::array();
    for (double v : pt.values) values.push_back(jnum(v));
    p["values"] = values;
    p["objective"] = jnum(pt.objective);
    ordered_json rows = ordered_json::array();
    for (const TruthTableRow& row : pt.rows) rows.push_back(truth_row_json(row));
    p["rows"] = rows;
    points.push_back(std::move(p));
  }
  j["points"] = points;
  const SweepPoint& best = sweep.points[sweep.best_index];
  ordered_json b = ordered_json::object();
  b["index"] = sweep.best_index;
  ordered_json bvalues = ordered_json::array();
  for (double v : best.values) bvalues.push_back(jnum(v));
  b["values"] = bvalues;
  b["objective"] = jnum(best.objective);
  j["best"] = b;
  return j;
}

inline std::string sweep_csv(const RunConfig& cfg, const SweepResult& sweep) {
  std::ostringstream out;
  out << detail::csv_preamble("sweep", cfg);
  out << "index";
  for (const std::string& p : sweep.parameters) out << ',' << p;
  out << ',' << sweep.objective << '\n';
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    out << i;
    for (double v : sweep.points[i].values) out << ',' << detail::format_number(jnum(v));
    out << ',' << detail::format_number(jnum(sweep.points[i].objective)) << '\n';
  }
  return out.str();
}

inline std::string sweep_text(const SweepResult& sweep) {
  std::ostringstream out;
  out << "swept";
  for (std::size_t a = 0; a < sweep.parameters.size(); ++a) {
    const std::vector<double>& grid = sweep.axis_values[a];
    out << (a ? " x " : " ") << sweep.parameters[a] << " ["
        << detail::format_number(jnum(grid.front())) << ", "
        << detail::format_number(jnum(grid.back())) << "] ("
        << grid.size() << " points, " << sweep.scales[a] << ")";
  }
  out << "\nbest " << sweep.objective << " = "
      << detail::format_number(round_sig(sweep.points[sweep.best_index].objective, 6))
      << " at";
  const SweepPoint& best = sweep.points[sweep.best_index];
  for (std::size_t a = 0; a < sweep.parameters.size(); ++a)
    out << (a ? ", " : " ") << sweep.parameters[a] << " = "
        << detail::format_number(jnum(best.values[a]));
  out << "\n";
  return out.str();
}

}  // namespace lindgate
