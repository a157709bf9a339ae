// One PASS/FAIL line per acceptance criterion.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cecbs/cecbs.hpp"
#include "oracles.hpp"

using namespace cecbs;

namespace {

const std::string kScenarios = CECBS_SCENARIO_DIR;
constexpr int kSeeds = 10;
constexpr std::uint64_t kBaseSeed = 1;

Scenario load(const std::string& name) {
  Scenario sc = load_scenario(kScenarios + "/" + name + ".json");
  sc.params.measure_time = false;
  return sc;
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// A finished experiment: its table plus the scenario each row was run on.
struct Experiment {
  std::string name;
  Table table;
  std::vector<Scenario> scenarios;  // parallel to table.rows
};

using Configure = std::function<void(Scenario&, double)>;

Experiment run_experiment(const std::string& name, const Scenario& base, const std::string& column,
                          const std::vector<double>& values, const Configure& configure) {
  Experiment e{name, sweep(base, column, values, kSeeds, kBaseSeed, configure), {}};
  for (const RunRow& r : e.table.rows) {
    Scenario sc = base;
    configure(sc, r.value);
    e.scenarios.push_back(std::move(sc));
  }
  return e;
}

// Every artefact of the experiments, as written to disk.
std::vector<std::pair<std::string, std::string>> artefacts(const std::vector<Experiment>& all) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Experiment& e : all) {
    out.emplace_back(e.name + ".csv", to_csv(e.table));
    for (std::size_t k = 0; k < e.table.rows.size(); ++k) {
      const RunRow& r = e.table.rows[k];
      if (!r.solved) continue;
      out.emplace_back(e.name + "_" + format_value(r.value) + "_" + std::to_string(r.seed) + ".json",
                       solution_text(make_record(e.scenarios[k], r.solution)));
    }
  }
  return out;
}

std::vector<std::string> write_all(const std::filesystem::path& dir,
                                   const std::vector<std::pair<std::string, std::string>>& files) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  for (const auto& [name, text] : files) {
    write_text((dir / name).string(), text);
    names.push_back(name);
  }
  return names;
}

struct ExperimentSet {
  std::vector<Experiment> all;
  double discrete_soc = 0.0;
  bool discrete_solved = false;
};

const Configure kNoop = [](Scenario&, double) {};

ExperimentSet run_all() {
  ExperimentSet s;
  for (const char* name : {"grid4_2agents", "grid4_3agents", "grid4_4agents", "grid4_obstacle_2agents",
                           "grid4_obstacle_3agents"}) {
    const Scenario sc = load(name);
    s.all.push_back(run_experiment(name, sc, "agents", {static_cast<double>(sc.agents.size())}, kNoop));
  }
  const Scenario cmp = load("compare_3agents");
  const auto raster = discrete::rasterize(cmp, 1.0);
  const auto ds = discrete::cbs_solve(raster.grid, raster.agents);
  s.discrete_solved = ds.solved();
  s.discrete_soc = ds.soc * raster.cell_size;
  s.all.push_back(run_experiment("compare_3agents", cmp, "cell_size", {1.0}, kNoop));
  s.all.push_back(run_experiment("star_eta_max", load("star_3agents"), "eta_max", {1000, 3000, 5000, 7000},
                                 [](Scenario& sc, double v) {
                                   sc.params.planner.eta_max = static_cast<int>(v);
                                   sc.params.planner.eta_min = std::min(sc.params.planner.eta_min, sc.params.planner.eta_max);
                                 }));
  s.all.push_back(run_experiment("swap_radius", load("swap_slalom"), "r", {3, 5, 8, 10}, [](Scenario& sc, double v) {
    for (AgentSpec& a : sc.agents) a.radius = v;
  }));
  return s;
}

bool grid_row(const Experiment& e, double paper, double smt, std::string& detail) {
  const Table& t = e.table;
  const double v = t.rows.front().value;
  const double mean = t.mean_soc(v);
  int below = 0;
  for (const RunRow& r : t.rows) below += (r.solved && r.soc <= smt) ? 1 : 0;
  if (!detail.empty()) detail += "; ";
  detail += e.name + " soc " + fmt("%.3f", mean) + " (target " + fmt("%.2f", paper) + "), " + std::to_string(below) +
            "/10 <= " + fmt("%.3f", smt);
  return t.solved_count(v) == kSeeds && std::abs(mean - paper) <= 0.15 * paper && below >= 8;
}

bool check_bspline(std::string& detail) {
  Rng rng(8);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    bspline::Curve c;
    c.degree = 1 + static_cast<int>(rng.uniform() * 5);
    const std::size_t p = static_cast<std::size_t>(c.degree);
    const std::size_t ncp = p + 1 + static_cast<std::size_t>(rng.uniform() * 10);
    std::vector<double> interior;
    for (std::size_t k = 0; k + p + 1 < ncp; ++k) interior.push_back(rng.uniform());
    if (interior.size() > 1 && rng.uniform() < 0.3) interior[1] = interior[0];
    std::sort(interior.begin(), interior.end());
    c.knots.assign(p + 1, 0.0);
    c.knots.insert(c.knots.end(), interior.begin(), interior.end());
    c.knots.insert(c.knots.end(), p + 1, 1.0);
    for (std::size_t k = 0; k < ncp; ++k) c.control_points.push_back({rng.uniform(-100, 100), rng.uniform(-100, 100)});

    if (distance(bspline::evaluate(c, 0.0), c.control_points.front()) > 1e-9) ++bad;
    if (distance(bspline::evaluate(c, 1.0), c.control_points.back()) > 1e-9) ++bad;
    for (int k = 0; k < 20; ++k) {
      const double u = k == 0 ? 1.0 : rng.uniform();
      double sum = 0.0;
      for (std::size_t i = 0; i < ncp; ++i) {
        const double b = bspline::basis(i, c.degree, u, c.knots);
        if (b < -1e-9) ++bad;
        const bool outside = u < c.knots[i] || u > c.knots[i + p + 1];
        if (outside && b != 0.0) ++bad;
        sum += b;
      }
      if (std::abs(sum - 1.0) > 1e-9) ++bad;
      if (distance(bspline::evaluate(c, u), oracle::de_boor(c, u)) > 1e-9) ++bad;
    }
  }
  const bspline::KnotVector bern{0, 0, 0, 0, 1, 1, 1, 1};
  const double b = bspline::basis(0, 3, 0.5, bern);
  const bool exact = std::abs(b - 0.125) <= 1e-12;
  detail = "1000 random curves, " + std::to_string(bad) + " property violations; basis(0,3,0.5) = " + fmt("%.15f", b);
  return bad == 0 && exact;
}

bool check_conflict_oracle(std::string& detail) {
  Rng rng(7);
  int agree = 0, with_overlap = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 200; ++trial) {
    auto random_path = [&] {
      Polyline p;
      const int n = 2 + static_cast<int>(rng.uniform() * 4);
      for (int k = 0; k < n; ++k) p.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
      return make_polyline(p);
    };
    const oracle::Body a{random_path(), rng.uniform(0.5, 2.0), rng.uniform(1, 5)};
    const oracle::Body b{random_path(), rng.uniform(0.5, 2.0), rng.uniform(1, 5)};
    std::map<AgentId, Trajectory> trajs;
    trajs.emplace(0, Trajectory(a.path, a.speed));
    trajs.emplace(1, Trajectory(b.path, b.speed));
    const bool exact = first_conflict(trajs, {{0, a.radius}, {1, b.radius}}).has_value();
    const double dt = 0.05 * std::min(a.radius, b.radius) / std::max(a.speed, b.speed);
    const oracle::Overlap sim = oracle::simulate({a, b}, dt);
    agree += exact == sim.found ? 1 : 0;
    with_overlap += sim.found ? 1 : 0;
    min_margin = std::min(min_margin, std::abs(sim.min_slack));
  }
  detail = std::to_string(agree) + "/200 agree (" + std::to_string(with_overlap) +
           " with overlap), closest sampled margin " + fmt("%.2e", min_margin);
  return agree == 200;
}

bool check_baseline(std::string& detail) {
  Rng rng(9);
  int matched = 0, instances = 0, unsolvable = 0;
  while (instances < 50) {
    const int w = 2 + static_cast<int>(rng.uniform() * 4), h = 2 + static_cast<int>(rng.uniform() * 4);
    discrete::Grid g(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (rng.uniform() < 0.2) g.set_blocked({x, y});
      }
    }
    std::vector<discrete::Cell> free_cells;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (g.free({x, y})) free_cells.push_back({x, y});
      }
    }
    const std::size_t n_agents = rng.uniform() < 0.2 ? 1 : 2;
    if (free_cells.size() < 2 * n_agents) continue;
    auto pick = [&] { return free_cells[static_cast<std::size_t>(rng.uniform() * static_cast<double>(free_cells.size()))]; };
    std::vector<discrete::GridAgent> agents;
    for (std::size_t k = 0; k < n_agents; ++k) {
      discrete::GridAgent a{static_cast<AgentId>(k), pick(), pick()};
      while (k == 1 && a.start == agents[0].start) a.start = pick();
      while (k == 1 && a.goal == agents[0].goal) a.goal = pick();
      agents.push_back(a);
    }
    ++instances;
    const int ref = oracle::joint_optimal_soc(g, agents);
    const auto sol = discrete::cbs_solve(g, agents, 5000);
    if (ref < 0) {
      ++unsolvable;
      matched += sol.solved() ? 0 : 1;
    } else {
      matched += (sol.solved() && sol.soc == ref) ? 1 : 0;
    }
  }
  detail = std::to_string(matched) + "/50 match the joint-state optimum (" + std::to_string(unsolvable) +
           " unsolvable instances)";
  return matched == 50;
}

}  // namespace

int main() {
  const ExperimentSet first = run_all();
  const auto& ex = first.all;

  // 1 and 2: grid map rows.
  {
    std::string detail;
    bool ok = grid_row(ex[0], 4.46, 4.828, detail);
    ok = grid_row(ex[1], 5.88, 6.243, detail) && ok;
    ok = grid_row(ex[2], 9.04, 9.657, detail) && ok;
    report(1, ok, detail);
  }
  {
    std::string detail;
    bool ok = grid_row(ex[3], 6.24, 7.657, detail);
    ok = grid_row(ex[4], 7.70, 9.071, detail) && ok;
    report(2, ok, detail);
  }

  // 3: continuous against discrete cost.
  {
    const Table& t = ex[5].table;
    const double mean = t.mean_soc(1.0);
    const bool ok = first.discrete_solved && t.solved_count(1.0) == kSeeds && mean < first.discrete_soc;
    report(3, ok, "continuous mean soc " + fmt("%.1f", mean) + " vs discrete soc " + fmt("%.1f", first.discrete_soc));
  }

  // 4: eta_max trend.
  {
    const Table& t = ex[6].table;
    const std::vector<double> etas{1000, 3000, 5000, 7000};
    std::string socs;
    int inversions = 0;
    bool small = true;
    bool all_solved = true;
    for (std::size_t k = 0; k < etas.size(); ++k) {
      socs += (k ? " / " : "") + fmt("%.1f", t.mean_soc(etas[k]));
      all_solved = all_solved && t.solved_count(etas[k]) == kSeeds;
      if (k > 0 && t.mean_soc(etas[k]) > t.mean_soc(etas[k - 1])) {
        ++inversions;
        small = small && t.mean_soc(etas[k]) - t.mean_soc(etas[k - 1]) <= 0.01 * t.mean_soc(etas[k - 1]);
      }
    }
    const double it_lo = t.mean_iterations(1000), it_hi = t.mean_iterations(7000);
    const bool ok = all_solved && inversions <= 1 && small && it_hi > it_lo;
    report(4, ok, "mean soc " + socs + ", CT iterations " + fmt("%.1f", it_lo) + " -> " + fmt("%.1f", it_hi));
  }

  // 5: radius trend.
  {
    const Table& t = ex[7].table;
    const std::vector<double> radii{3, 5, 8, 10};
    std::string socs;
    bool increasing = true;
    bool all_solved = true;
    for (std::size_t k = 0; k < radii.size(); ++k) {
      socs += (k ? " / " : "") + fmt("%.1f", t.mean_soc(radii[k]));
      all_solved = all_solved && t.solved_count(radii[k]) == kSeeds;
      if (k > 0) increasing = increasing && t.mean_soc(radii[k]) > t.mean_soc(radii[k - 1]);
    }
    report(5, all_solved && increasing, "mean soc for r = 3/5/8/10: " + socs);
  }

  // 6: dense-time safety of every solution.
  {
    int checked = 0, bad = 0;
    double slack = std::numeric_limits<double>::infinity(), clearance = slack, angle = 180.0;
    for (const Experiment& e : ex) {
      for (std::size_t k = 0; k < e.table.rows.size(); ++k) {
        const RunRow& r = e.table.rows[k];
        if (!r.solved) continue;
        const ValidationReport rep = validate_solution(e.scenarios[k], r.solution, 0.05);
        ++checked;
        bad += rep.pass() ? 0 : 1;
        slack = std::min(slack, rep.min_pair_slack);
        clearance = std::min(clearance, rep.min_clearance_slack);
        angle = std::min(angle, rep.min_raw_angle);
      }
    }
    report(6, bad == 0 && checked > 0,
           std::to_string(checked - bad) + "/" + std::to_string(checked) + " solutions valid; min pair slack " +
               fmt("%.4f", slack) + ", min clearance slack " + fmt("%.4f", clearance) + ", min raw angle " +
               fmt("%.2f", angle));
  }

  {
    std::string detail;
    const bool ok = check_conflict_oracle(detail);
    report(7, ok, detail);
  }
  {
    std::string detail;
    const bool ok = check_bspline(detail);
    report(8, ok, detail);
  }
  {
    std::string detail;
    const bool ok = check_baseline(detail);
    report(9, ok, detail);
  }

  // 10: a second run reproduces every file byte for byte.
  {
    const auto dir = std::filesystem::path("acceptance_out");
    const auto a = artefacts(first.all);
    const ExperimentSet second = run_all();
    const auto b = artefacts(second.all);
    const auto names = write_all(dir / "run1", a);
    write_all(dir / "run2", b);
    int identical = 0;
    for (const std::string& n : names) {
      const auto p2 = dir / "run2" / n;
      if (std::filesystem::exists(p2) && read_text((dir / "run1" / n).string()) == read_text(p2.string())) ++identical;
    }
    const bool ok = a.size() == b.size() && identical == static_cast<int>(names.size()) &&
                    first.discrete_soc == second.discrete_soc;
    report(10, ok, std::to_string(identical) + "/" + std::to_string(names.size()) + " CSV and solution files identical");
  }

  std::printf("%s\n", failures == 0 ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return failures == 0 ? 0 : 1;
}
