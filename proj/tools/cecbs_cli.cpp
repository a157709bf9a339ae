#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cecbs/cecbs.hpp"

namespace {

constexpr int kSolved = 0;
constexpr int kInputError = 1;
constexpr int kUnsolved = 2;

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw cecbs::InvalidInput("bad value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw cecbs::InvalidInput("--values must list at least one number");
  return out;
}

struct SolveArgs {
  std::string scenario;
  std::uint64_t seed = 0;
  std::optional<int> eta_max;
  std::optional<int> eta_min;
  std::optional<double> alpha;
  std::optional<double> smoothing_s;
  std::string out;
  std::string svg;
  bool tree = false;
  bool no_timing = false;
};

int run_solve(const SolveArgs& a) {
  cecbs::Scenario sc = cecbs::load_scenario(a.scenario);
  auto& p = sc.params.planner;
  if (a.eta_max) p.eta_max = *a.eta_max;
  if (a.eta_min) p.eta_min = *a.eta_min;
  if (a.alpha) p.alpha_deg = *a.alpha;
  if (a.smoothing_s) p.s_initial = *a.smoothing_s;
  p.eta_min = a.eta_min ? p.eta_min : std::min(p.eta_min, p.eta_max);
  p.record_tree = a.tree;
  sc.params.measure_time = !a.no_timing;
  cecbs::validate_scenario(sc);

  const cecbs::Solution sol = cecbs::solve(sc, a.seed);
  std::printf("status=%s soc=%.6f ct_iterations=%d wall_time=%.3f\n", cecbs::to_string(sol.status), sol.soc,
              sol.iterations, sol.wall_time);
  if (!a.out.empty()) cecbs::write_solution(cecbs::make_record(sc, sol), a.out);
  if (!a.svg.empty()) {
    std::vector<cecbs::Segment> edges;
    for (const auto& [id, r] : sol.paths) edges.insert(edges.end(), r.tree_edges.begin(), r.tree_edges.end());
    cecbs::SvgLayers layers;
    layers.paths = &sol.paths;
    if (a.tree) layers.tree = &edges;
    cecbs::write_text(a.svg, cecbs::render_svg(sc, layers));
  }
  return sol.solved() ? kSolved : kUnsolved;
}

int run_validate(const std::string& scenario, const std::string& solution, double dt_factor) {
  const cecbs::Scenario sc = cecbs::load_scenario(scenario);
  const cecbs::SolutionRecord rec = cecbs::read_solution(solution);
  if (rec.status != "solved") {
    std::printf("status=%s\n", rec.status.c_str());
    return kUnsolved;
  }
  const auto plans = cecbs::plans_of(rec);
  if (plans.size() != sc.agents.size()) throw cecbs::InvalidScenario("agents", "solution does not cover every agent");
  const cecbs::ValidationReport rep = cecbs::validate_paths(sc, plans, dt_factor);
  std::printf(
      "min_pair_distance=%.6f min_pair_slack=%.6f min_clearance_slack=%.6f min_raw_angle=%.6f endpoints=%s result=%s\n",
      rep.min_pair_distance, rep.min_pair_slack, rep.min_clearance_slack, rep.min_raw_angle,
      rep.endpoints_ok ? "ok" : "bad", rep.pass() ? "pass" : "fail");
  if (!rep.pass() && rep.violation_time >= 0.0) std::printf("first_violation_t=%.6f\n", rep.violation_time);
  return rep.pass() ? kSolved : kUnsolved;
}

int run_baseline(const std::string& scenario, double cell_size) {
  const cecbs::Scenario sc = cecbs::load_scenario(scenario);
  const auto raster = cecbs::discrete::rasterize(sc, cell_size);
  const auto ds = cecbs::discrete::cbs_solve(raster.grid, raster.agents);
  std::printf("status=%s soc=%.6f expanded=%d blocked_cells=%zu\n", ds.solved() ? "solved" : "unsolved",
              ds.soc * cell_size, ds.expanded, raster.grid.blocked_count());
  return ds.solved() ? kSolved : kUnsolved;
}

int run_bench(const std::string& kind, const std::string& scenario, const std::string& values, int iters,
              std::uint64_t seed, const std::string& out, bool no_timing) {
  cecbs::Scenario sc = cecbs::load_scenario(scenario);
  sc.params.measure_time = !no_timing;
  std::string csv;
  if (kind == "eta-max") {
    csv = cecbs::to_csv(cecbs::sweep_eta_max(sc, parse_values(values), iters, seed));
  } else if (kind == "radius") {
    csv = cecbs::to_csv(cecbs::sweep_radius(sc, parse_values(values), iters, seed));
  } else {
    const double cell = values.empty() ? 1.0 : parse_values(values).front();
    const auto rep = cecbs::compare_discrete(sc, cell, iters, seed);
    std::printf("discrete_soc=%.6f continuous_mean_soc=%.6f ratio=%.6f\n", rep.discrete_soc, rep.continuous_mean_soc,
                rep.ratio);
    csv = cecbs::to_csv(rep.continuous);
  }
  if (out.empty()) std::fputs(csv.c_str(), stdout);
  else cecbs::write_text(out, csv);
  return kSolved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-environment multi-agent path finding"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve a scenario");
  solve->add_option("--scenario", sa.scenario, "Scenario JSON")->required();
  solve->add_option("--seed", sa.seed, "Random seed");
  solve->add_option("--eta-max", sa.eta_max, "RRT* sample budget");
  solve->add_option("--eta-min", sa.eta_min, "Lower bound of the decaying budget");
  solve->add_option("--alpha", sa.alpha, "Minimum path angle in degrees");
  solve->add_option("--smoothing-s", sa.smoothing_s, "Initial smoothing parameter");
  solve->add_option("--out", sa.out, "Solution JSON to write");
  solve->add_option("--svg", sa.svg, "SVG rendering to write");
  solve->add_flag("--tree", sa.tree, "Draw the final RRT* trees");
  solve->add_flag("--no-timing", sa.no_timing, "Write zero wall times");

  std::string v_scenario, v_solution;
  double dt_factor = 0.05;
  auto* validate = app.add_subcommand("validate", "Check a solution by dense-time simulation");
  validate->add_option("--scenario", v_scenario, "Scenario JSON")->required();
  validate->add_option("--solution", v_solution, "Solution JSON")->required();
  validate->add_option("--dt-factor", dt_factor, "Time step as a fraction of r_min / v_max");

  std::string b_scenario;
  double cell_size = 1.0;
  auto* baseline = app.add_subcommand("baseline", "Run discrete CBS on the rasterized scenario");
  baseline->add_option("--scenario", b_scenario, "Scenario JSON")->required();
  baseline->add_option("--cell-size", cell_size, "Grid cell size");

  std::string kind, bench_scenario, values, bench_out;
  int iters = 10;
  std::uint64_t bench_seed = 0;
  bool bench_no_timing = false;
  auto* bench = app.add_subcommand("bench", "Parameter sweeps and the discrete comparison");
  bench->add_option("kind", kind, "eta-max, radius or compare")
      ->required()
      ->check(CLI::IsMember({"eta-max", "radius", "compare"}));
  bench->add_option("--scenario", bench_scenario, "Scenario JSON")->required();
  bench->add_option("--values", values, "Comma-separated values (cell size for compare)");
  bench->add_option("--iters", iters, "Seeds per value");
  bench->add_option("--seed", bench_seed, "First seed");
  bench->add_option("--out", bench_out, "CSV to write");
  bench->add_flag("--no-timing", bench_no_timing, "Write zero times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*solve) return run_solve(sa);
    if (*validate) return run_validate(v_scenario, v_solution, dt_factor);
    if (*baseline) return run_baseline(b_scenario, cell_size);
    if (*bench) {
      if (kind != "compare" && values.empty()) throw cecbs::InvalidInput("--values is required");
      return run_bench(kind, bench_scenario, values, iters, bench_seed, bench_out, bench_no_timing);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  }
  return kInputError;
}
