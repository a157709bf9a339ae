#pragma once

// High-level constraint-tree search over RRT*-planned smooth paths.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "cecbs/conflicts.hpp"
#include "cecbs/random.hpp"
#include "cecbs/rrt_planner.hpp"
#include "cecbs/scenario.hpp"

namespace cecbs {

enum class SolveStatus { solved, node_budget_exhausted, planning_failure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::solved: return "solved";
    case SolveStatus::node_budget_exhausted: return "node_budget_exhausted";
    case SolveStatus::planning_failure: return "planning_failure";
  }
  return "unknown";
}

struct CTNode {
  int id = 0;
  int depth = 0;
  std::vector<SpaceTimeConstraint> constraints;
  std::map<AgentId, PlanResult> paths;
  double soc = 0.0;
};

struct Solution {
  SolveStatus status = SolveStatus::planning_failure;
  std::map<AgentId, PlanResult> paths;
  double soc = 0.0;
  int iterations = 0;  // constraint-tree nodes expanded
  int nodes_generated = 0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds

  bool solved() const { return status == SolveStatus::solved; }
};

inline double sum_of_costs(const std::map<AgentId, PlanResult>& paths) {
  double soc = 0.0;
  for (const auto& [id, r] : paths) soc += polyline_length(r.smooth_path);
  return soc;
}

inline std::map<AgentId, Trajectory> trajectories_of(const Scenario& sc, const std::map<AgentId, PlanResult>& paths) {
  std::map<AgentId, Trajectory> out;
  for (const auto& [id, r] : paths) out.emplace(id, Trajectory(r.smooth_path, sc.agent(id).speed));
  return out;
}

inline std::map<AgentId, double> radii_of(const Scenario& sc) {
  std::map<AgentId, double> out;
  for (const AgentSpec& a : sc.agents) out[a.id] = a.radius;
  return out;
}

inline std::map<AgentId, double> speeds_of(const Scenario& sc) {
  std::map<AgentId, double> out;
  for (const AgentSpec& a : sc.agents) out[a.id] = a.speed;
  return out;
}

inline PlanningProblem planning_problem(const Scenario& sc, const AgentSpec& a,
                                        const std::vector<SpaceTimeConstraint>& constraints) {
  PlanningProblem pr;
  pr.start = a.start;
  pr.goal = a.goal;
  pr.radius = a.radius;
  pr.speed = a.speed;
  pr.bounds = Rect{0.0, 0.0, sc.width, sc.height};
  pr.obstacles = sc.planning_obstacles();
  for (const SpaceTimeConstraint& c : constraints) {
    if (c.agent == a.id) pr.constraints.push_back(c);
  }
  return pr;
}

class CecbsSolver {
 public:
  CecbsSolver(const Scenario& scenario, std::uint64_t seed) : sc_(scenario), seed_(seed) {}

  Solution solve() {
    const auto started = std::chrono::steady_clock::now();
    Solution out = run();
    out.seed = seed_;
    if (sc_.params.measure_time) {
      out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
    return out;
  }

 private:
  struct OpenEntry {
    double soc;
    int depth;
    int order;
    bool operator>(const OpenEntry& o) const {
      if (soc != o.soc) return soc > o.soc;
      if (depth != o.depth) return depth > o.depth;
      return order > o.order;
    }
  };

  std::optional<PlanResult> plan_agent(const CTNode& node, const AgentSpec& a) const {
    const PlanningProblem pr = planning_problem(sc_, a, node.constraints);
    const std::uint64_t seed =
        derive_seed(seed_, {static_cast<std::uint64_t>(node.id), static_cast<std::uint64_t>(a.id)});
    return plan_smooth(pr, sc_.params.planner, seed);
  }

  Solution run() {
    Solution out;
    std::vector<CTNode> nodes;
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;

    CTNode root;
    for (const AgentSpec& a : sc_.agents) {
      auto r = plan_agent(root, a);
      if (!r) {
        out.status = SolveStatus::planning_failure;
        return out;
      }
      root.paths.emplace(a.id, std::move(*r));
    }
    root.soc = sum_of_costs(root.paths);
    nodes.push_back(std::move(root));
    open.push({nodes[0].soc, 0, 0});
    out.nodes_generated = 1;

    const auto radii = radii_of(sc_);
    const auto speeds = speeds_of(sc_);
    while (!open.empty()) {
      if (out.iterations >= sc_.params.max_ct_nodes) {
        out.status = SolveStatus::node_budget_exhausted;
        return out;
      }
      const int idx = open.top().order;
      open.pop();
      ++out.iterations;
      const auto conflict = first_conflict(trajectories_of(sc_, nodes[static_cast<std::size_t>(idx)].paths), radii);
      if (!conflict) {
        CTNode& goal = nodes[static_cast<std::size_t>(idx)];
        out.status = SolveStatus::solved;
        out.paths = goal.paths;
        out.soc = goal.soc;
        return out;
      }
      const auto [ci, cj] = constraints_from_conflict(*conflict, radii, speeds);
      for (const SpaceTimeConstraint& c : {ci, cj}) {
        CTNode child;
        child.id = static_cast<int>(nodes.size());
        child.depth = nodes[static_cast<std::size_t>(idx)].depth + 1;
        child.constraints = nodes[static_cast<std::size_t>(idx)].constraints;
        child.constraints.push_back(c);
        child.paths = nodes[static_cast<std::size_t>(idx)].paths;
        auto r = plan_agent(child, sc_.agent(c.agent));
        if (!r) continue;
        child.paths[c.agent] = std::move(*r);
        child.soc = sum_of_costs(child.paths);
        open.push({child.soc, child.depth, child.id});
        nodes.push_back(std::move(child));
        ++out.nodes_generated;
      }
    }
    out.status = SolveStatus::planning_failure;
    return out;
  }

  const Scenario& sc_;
  std::uint64_t seed_;
};

inline Solution solve(const Scenario& scenario, std::uint64_t seed) { return CecbsSolver(scenario, seed).solve(); }

struct ValidationReport {
  double min_pair_distance = std::numeric_limits<double>::infinity();
  double min_pair_slack = std::numeric_limits<double>::infinity();  // distance - (r_i + r_j)
  double min_clearance_slack = std::numeric_limits<double>::infinity();  // clearance - radius
  double min_raw_angle = 180.0;
  bool separation_ok = true;
  bool clearance_ok = true;
  bool angles_ok = true;
  bool endpoints_ok = true;
  double violation_time = -1.0;  // first sampled time of a separation or clearance violation

  bool pass() const { return separation_ok && clearance_ok && angles_ok && endpoints_ok; }
};

// Independent dense-time check of a set of plans: bodies never overlap,
// obstacles and the world boundary keep their clearance, and raw paths obey
// the minimum angle.
inline ValidationReport validate_paths(const Scenario& sc, const std::map<AgentId, PlanResult>& paths,
                                       double dt_factor = 0.05, double tol = 1e-6) {
  ValidationReport rep;
  const auto trajs = trajectories_of(sc, paths);
  const auto walls = sc.planning_obstacles();
  double r_min = std::numeric_limits<double>::infinity();
  double v_max = 0.0;
  double horizon = 0.0;
  for (const auto& [id, tr] : trajs) {
    const AgentSpec& a = sc.agent(id);
    r_min = std::min(r_min, a.radius);
    v_max = std::max(v_max, a.speed);
    horizon = std::max(horizon, tr.arrival());
    if (!(tr.path().front() == a.start) || !(tr.path().back() == a.goal)) rep.endpoints_ok = false;
  }
  for (const auto& [id, r] : paths) {
    if (r.raw_path.size() >= 3) rep.min_raw_angle = std::min(rep.min_raw_angle, min_interior_angle(r.raw_path));
  }
  rep.angles_ok = rep.min_raw_angle >= sc.params.planner.alpha_deg - tol;
  if (trajs.empty()) return rep;

  const double dt = dt_factor * r_min / v_max;
  const auto steps = static_cast<long long>(std::ceil(horizon / dt));
  std::vector<std::pair<AgentId, Point>> pos;
  for (long long k = 0; k <= steps + 1; ++k) {
    const double t = std::min(static_cast<double>(k) * dt, horizon);
    pos.clear();
    for (const auto& [id, tr] : trajs) pos.emplace_back(id, position_at(tr, t));
    bool violated = false;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const AgentSpec& ai = sc.agent(pos[i].first);
      for (const Rect& w : walls) {
        const double slack = segment_rect_distance(Segment{pos[i].second, pos[i].second}, w) - ai.radius;
        rep.min_clearance_slack = std::min(rep.min_clearance_slack, slack);
        if (slack < -tol) {
          rep.clearance_ok = false;
          violated = true;
        }
      }
      for (std::size_t j = i + 1; j < pos.size(); ++j) {
        const AgentSpec& aj = sc.agent(pos[j].first);
        const double d = distance(pos[i].second, pos[j].second);
        rep.min_pair_distance = std::min(rep.min_pair_distance, d);
        const double slack = d - (ai.radius + aj.radius);
        rep.min_pair_slack = std::min(rep.min_pair_slack, slack);
        if (slack < -tol) {
          rep.separation_ok = false;
          violated = true;
        }
      }
    }
    if (violated && rep.violation_time < 0.0) rep.violation_time = t;
  }
  return rep;
}

inline ValidationReport validate_solution(const Scenario& sc, const Solution& sol, double dt_factor = 0.05) {
  return validate_paths(sc, sol.paths, dt_factor);
}

}  // namespace cecbs
