#pragma once

// Seeded parameter sweeps and the discrete comparison, with CSV output.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "cecbs/baseline_cbs.hpp"
#include "cecbs/errors.hpp"
#include "cecbs/scenario.hpp"
#include "cecbs/search.hpp"

namespace cecbs {

struct RunRow {
  double value = 0.0;  // swept parameter
  std::uint64_t seed = 0;
  bool solved = false;
  double soc = 0.0;
  double mean_cost = 0.0;
  int ct_iterations = 0;
  double ms = 0.0;
  std::string reason;  // empty when solved
  Solution solution;
};

struct Table {
  std::string value_column;
  std::vector<RunRow> rows;

  // Mean soc of the solved rows with the given value; NaN when none solved.
  double mean_soc(double value) const { return mean_of(value, [](const RunRow& r) { return r.soc; }); }
  double mean_iterations(double value) const {
    return mean_of(value, [](const RunRow& r) { return static_cast<double>(r.ct_iterations); });
  }
  int solved_count(double value) const {
    int n = 0;
    for (const RunRow& r : rows) n += (r.value == value && r.solved) ? 1 : 0;
    return n;
  }

 private:
  template <class F>
  double mean_of(double value, F f) const {
    double sum = 0.0;
    int n = 0;
    for (const RunRow& r : rows) {
      if (r.value == value && r.solved) {
        sum += f(r);
        ++n;
      }
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / n;
  }
};

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string to_csv(const Table& t) {
  std::string out = t.value_column + ",seed,solved,soc,mean_cost,ct_iterations,ms,reason\n";
  for (const RunRow& r : t.rows) {
    out += format_value(r.value) + "," + std::to_string(r.seed) + "," + (r.solved ? "1" : "0") + ",";
    if (r.solved) {
      out += format_number(r.soc) + "," + format_number(r.mean_cost) + "," + std::to_string(r.ct_iterations) + "," +
             format_number(r.ms) + ",";
    } else {
      out += ",,,,";
    }
    out += r.reason + "\n";
  }
  return out;
}

inline RunRow run_once(const Scenario& sc, double value, std::uint64_t seed) {
  RunRow row;
  row.value = value;
  row.seed = seed;
  try {
    validate_scenario(sc);
  } catch (const InvalidScenario&) {
    row.reason = "invalid_scenario";
    return row;
  }
  row.solution = solve(sc, seed);
  row.solved = row.solution.solved();
  if (!row.solved) {
    row.reason = to_string(row.solution.status);
    return row;
  }
  row.soc = row.solution.soc;
  row.mean_cost = row.soc / static_cast<double>(sc.agents.size());
  row.ct_iterations = row.solution.iterations;
  row.ms = row.solution.wall_time * 1000.0;
  return row;
}

// Runs `iterations` seeds (base_seed, base_seed + 1, ...) per value.
template <class Configure>
Table sweep(const Scenario& base, const std::string& column, const std::vector<double>& values, int iterations,
            std::uint64_t base_seed, Configure configure) {
  Table t{column, {}};
  for (double v : values) {
    Scenario sc = base;
    configure(sc, v);
    for (int k = 0; k < iterations; ++k) t.rows.push_back(run_once(sc, v, base_seed + static_cast<std::uint64_t>(k)));
  }
  return t;
}

inline Table sweep_eta_max(const Scenario& sc, const std::vector<double>& values, int iterations, std::uint64_t base_seed) {
  return sweep(sc, "eta_max", values, iterations, base_seed, [](Scenario& s, double v) {
    s.params.planner.eta_max = static_cast<int>(v);
    s.params.planner.eta_min = std::min(s.params.planner.eta_min, s.params.planner.eta_max);
  });
}

inline Table sweep_radius(const Scenario& sc, const std::vector<double>& values, int iterations, std::uint64_t base_seed) {
  return sweep(sc, "r", values, iterations, base_seed, [](Scenario& s, double v) {
    for (AgentSpec& a : s.agents) a.radius = v;
  });
}

struct ComparisonReport {
  bool discrete_solved = false;
  double discrete_soc = 0.0;  // world units
  int discrete_expanded = 0;
  Table continuous;
  double continuous_mean_soc = 0.0;
  double ratio = 0.0;  // continuous / discrete
};

inline ComparisonReport compare_discrete(const Scenario& sc, double cell_size, int iterations, std::uint64_t base_seed) {
  ComparisonReport rep;
  const auto raster = discrete::rasterize(sc, cell_size);
  const auto ds = discrete::cbs_solve(raster.grid, raster.agents);
  rep.discrete_solved = ds.solved();
  rep.discrete_soc = ds.soc * cell_size;
  rep.discrete_expanded = ds.expanded;
  rep.continuous = sweep(sc, "cell_size", {cell_size}, iterations, base_seed, [](Scenario&, double) {});
  rep.continuous_mean_soc = rep.continuous.mean_soc(cell_size);
  rep.ratio = rep.discrete_soc > 0.0 ? rep.continuous_mean_soc / rep.discrete_soc : 0.0;
  return rep;
}

}  // namespace cecbs
