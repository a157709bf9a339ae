#pragma once

// Problem instance: world, obstacles, agents and planner defaults.

#include <cmath>
#include <string>
#include <vector>

#include "cecbs/constraint.hpp"
#include "cecbs/errors.hpp"
#include "cecbs/geometry.hpp"
#include "cecbs/rrt_planner.hpp"

namespace cecbs {

struct AgentSpec {
  AgentId id = 0;
  Point start;
  Point goal;
  double radius = 1.0;
  double speed = 1.0;

  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

struct SearchParams {
  PlannerParams planner;
  int max_ct_nodes = 500;
  bool measure_time = true;  // false writes zero wall times for reproducible files
};

struct Scenario {
  std::string description;
  double width = 0.0;
  double height = 0.0;
  std::vector<Rect> obstacles;
  std::vector<AgentSpec> agents;
  SearchParams params;

  // Obstacles seen by the planner: the rectangles plus the world boundary.
  std::vector<Rect> planning_obstacles() const {
    std::vector<Rect> all = obstacles;
    for (const Rect& w : world_walls(width, height)) all.push_back(w);
    return all;
  }

  const AgentSpec& agent(AgentId id) const {
    for (const AgentSpec& a : agents) {
      if (a.id == id) return a;
    }
    throw InvalidInput("unknown agent id " + std::to_string(id));
  }
};

inline std::string agent_field(std::size_t index, const char* member) {
  return "agents[" + std::to_string(index) + "]." + member;
}

// Throws InvalidScenario naming the first offending field.
inline void validate_scenario(const Scenario& sc) {
  if (!(std::isfinite(sc.width) && sc.width > 0.0)) throw InvalidScenario("world.width", "must be positive");
  if (!(std::isfinite(sc.height) && sc.height > 0.0)) throw InvalidScenario("world.height", "must be positive");
  for (std::size_t k = 0; k < sc.obstacles.size(); ++k) {
    const Rect& r = sc.obstacles[k];
    const std::string f = "obstacles[" + std::to_string(k) + "]";
    if (!(std::isfinite(r.x) && std::isfinite(r.y))) throw InvalidScenario(f, "corner must be finite");
    if (!(std::isfinite(r.w) && r.w >= 0.0)) throw InvalidScenario(f + ".w", "must be non-negative");
    if (!(std::isfinite(r.h) && r.h >= 0.0)) throw InvalidScenario(f + ".h", "must be non-negative");
  }
  if (sc.agents.empty()) throw InvalidScenario("agents", "at least one agent required");
  const auto walls = sc.planning_obstacles();
  for (std::size_t k = 0; k < sc.agents.size(); ++k) {
    const AgentSpec& a = sc.agents[k];
    if (!(std::isfinite(a.radius) && a.radius > 0.0)) throw InvalidScenario(agent_field(k, "radius"), "must be positive");
    if (!(std::isfinite(a.speed) && a.speed > 0.0)) throw InvalidScenario(agent_field(k, "speed"), "must be positive");
    for (const auto& [pt, name] : {std::pair{a.start, "start"}, std::pair{a.goal, "goal"}}) {
      if (!is_finite(pt)) throw InvalidScenario(agent_field(k, name), "must be finite");
      if (pt.x < 0.0 || pt.y < 0.0 || pt.x > sc.width || pt.y > sc.height) {
        throw InvalidScenario(agent_field(k, name), "outside the world");
      }
      if (!obstacle_free(Segment{pt, pt}, a.radius, walls)) {
        throw InvalidScenario(agent_field(k, name), "closer than the agent radius to an obstacle or the boundary");
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      const AgentSpec& b = sc.agents[j];
      const std::string pair = " (agents " + std::to_string(b.id) + " and " + std::to_string(a.id) + ")";
      if (a.id == b.id) throw InvalidScenario(agent_field(k, "id"), "duplicate id" + pair);
      if (a.start == b.start) throw InvalidScenario(agent_field(k, "start"), "duplicate start" + pair);
      if (a.goal == b.goal) throw InvalidScenario(agent_field(k, "goal"), "duplicate goal" + pair);
      if (distance(a.start, b.start) < a.radius + b.radius) {
        throw InvalidScenario(agent_field(k, "start"), "bodies overlap at the start" + pair);
      }
      if (distance(a.goal, b.goal) < a.radius + b.radius) {
        throw InvalidScenario(agent_field(k, "goal"), "bodies overlap at the goal" + pair);
      }
    }
  }
  const PlannerParams& p = sc.params.planner;
  if (p.eta_max <= 0 || p.eta_min <= 0 || p.eta_min > p.eta_max) {
    throw InvalidScenario("params.eta_min", "need 0 < eta_min <= eta_max");
  }
  if (!(p.alpha_deg > 0.0 && p.alpha_deg <= 180.0)) throw InvalidScenario("params.alpha", "must lie in (0, 180]");
  if (!(p.step_size > 0.0)) throw InvalidScenario("params.step_size", "must be positive");
  if (!(p.goal_bias >= 0.0 && p.goal_bias <= 1.0)) throw InvalidScenario("params.goal_bias", "must lie in [0, 1]");
  if (!(p.rewire_radius_factor > 0.0)) throw InvalidScenario("params.rewire_radius_factor", "must be positive");
  if (!(p.goal_tolerance > 0.0)) throw InvalidScenario("params.goal_tolerance", "must be positive");
  if (!(p.s_initial >= 0.0)) throw InvalidScenario("params.smoothing_s", "must be non-negative");
  if (!(p.s_growth > 1.0)) throw InvalidScenario("params.s_growth", "must exceed 1");
  if (!(p.resample_spacing > 0.0)) throw InvalidScenario("params.resample_spacing", "must be positive");
  if (p.degree < 1) throw InvalidScenario("params.degree", "must be at least 1");
  if (p.max_attempts < 1) throw InvalidScenario("params.max_attempts", "must be positive");
  if (sc.params.max_ct_nodes < 1) throw InvalidScenario("params.max_ct_nodes", "must be positive");
}

}  // namespace cecbs
