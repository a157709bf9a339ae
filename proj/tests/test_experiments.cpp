#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "cecbs/experiments.hpp"
#include "cecbs/scenario_io.hpp"

using namespace cecbs;
using Catch::Approx;

namespace {

Scenario grid4() {
  Scenario sc = load_scenario(std::string(CECBS_SCENARIO_DIR) + "/grid4_2agents.json");
  sc.params.measure_time = false;
  return sc;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("sweep runs every value and seed in order", "[experiments]") {
  const Table t = sweep_eta_max(grid4(), {600, 1500}, 3, 10);
  REQUIRE(t.rows.size() == 6);
  CHECK(t.value_column == "eta_max");
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    CHECK(t.rows[k].value == (k < 3 ? 600 : 1500));
    CHECK(t.rows[k].seed == 10 + k % 3);
    CHECK(t.rows[k].solved);
    CHECK(t.rows[k].mean_cost == Approx(t.rows[k].soc / 2));
  }
  CHECK(t.solved_count(600) == 3);
  const double mean = (t.rows[3].soc + t.rows[4].soc + t.rows[5].soc) / 3;
  CHECK(t.mean_soc(1500) == Approx(mean));
  CHECK(std::isnan(t.mean_soc(42)));
}

TEST_CASE("to_csv writes a header and one line per run", "[experiments]") {
  const Table t = sweep_eta_max(grid4(), {1500}, 2, 1);
  const auto lines = lines_of(to_csv(t));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "eta_max,seed,solved,soc,mean_cost,ct_iterations,ms,reason");
  CHECK(lines[1].rfind("1500,1,1,", 0) == 0);
  CHECK(lines[2].rfind("1500,2,1,", 0) == 0);
  CHECK(lines[1].find(",0.000000,") != std::string::npos);  // ms with timing disabled
  CHECK(to_csv(t) == to_csv(sweep_eta_max(grid4(), {1500}, 2, 1)));
}

TEST_CASE("invalid sweep values become failure rows", "[experiments]") {
  const Table t = sweep_radius(grid4(), {0.2, -1.0}, 1, 1);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].solved);
  CHECK_FALSE(t.rows[1].solved);
  CHECK(t.rows[1].reason == "invalid_scenario");
  const auto lines = lines_of(to_csv(t));
  CHECK(lines[2] == "-1,1,0,,,,,invalid_scenario");
}

TEST_CASE("node budget failures are reported by reason", "[experiments]") {
  Scenario sc = load_scenario(std::string(CECBS_SCENARIO_DIR) + "/grid4_4agents.json");
  sc.params.max_ct_nodes = 1;
  sc.params.measure_time = false;
  const RunRow row = run_once(sc, 0, 1);
  if (!row.solved) {
    CHECK(row.reason == "node_budget_exhausted");
  } else {
    CHECK(row.ct_iterations == 1);
  }
}

TEST_CASE("compare_discrete reports both costs in world units", "[experiments]") {
  const ComparisonReport rep = compare_discrete(grid4(), 1.0, 2, 1);
  CHECK(rep.discrete_solved);
  CHECK(rep.discrete_soc == Approx(6.0));
  CHECK(rep.continuous.rows.size() == 2);
  CHECK(rep.continuous_mean_soc < rep.discrete_soc);
  CHECK(rep.ratio == Approx(rep.continuous_mean_soc / rep.discrete_soc));
}
