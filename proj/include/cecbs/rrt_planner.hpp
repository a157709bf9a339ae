#pragma once

// Constraint-aware RRT* low-level planner.
//
// A plan is produced in two stages. RRT* grows a tree from the start,
// admitting only edges that keep the agent's disc clear of every rectangle
// and outside every space-time constraint at the time the agent would
// traverse them; the best tree node near the goal is then snapped to the goal.
// The resulting polyline has its acute vertices repaired, is smoothed with a
// clamped B-spline and resampled. Any stage that fails sends the loop back to
// RRT* with a smaller sample budget.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "cecbs/bspline.hpp"
#include "cecbs/constraint.hpp"
#include "cecbs/geometry.hpp"
#include "cecbs/random.hpp"

namespace cecbs {

struct PlannerParams {
  int eta_max = 3000;               // samples drawn by one RRT* run
  int eta_min = 500;                // floor of the decaying budget
  double alpha_deg = 90.0;          // minimum angle between raw path segments
  double step_size = 10.0;          // steering length
  double goal_bias = 0.05;
  double rewire_radius_factor = 3.0;
  double goal_tolerance = 5.0;
  double s_initial = 0.0;           // first smoothing parameter tried
  double s_growth = 2.0;
  int smoothing_escalations = 5;
  double resample_spacing = 1.0;
  double budget_decay = 0.8;
  int max_attempts = 200;
  int degree = 3;
  bool record_tree = false;
};

// Everything the low level needs to plan one agent.
struct PlanningProblem {
  Point start;
  Point goal;
  double radius = 1.0;
  double speed = 1.0;
  Rect bounds;                                   // sampling region
  std::vector<Rect> obstacles;                   // including world walls
  std::vector<SpaceTimeConstraint> constraints;  // addressed to this agent
};

struct PlanResult {
  Polyline raw_path;     // angle-feasible, before smoothing
  Polyline smooth_path;  // smoothed and resampled
  double cost = 0.0;     // polyline_length(smooth_path)
  int nodes_used = 0;    // tree size of the successful RRT* run
  int replans = 0;
  std::vector<int> budgets;  // sample budget of every RRT* run, in order
  std::vector<Segment> tree_edges;
};

// Zero-thickness rectangles along the four sides of a width x height world,
// so that disc clearance to the boundary is enforced like any obstacle.
inline std::vector<Rect> world_walls(double width, double height) {
  return {Rect{0.0, 0.0, width, 0.0}, Rect{0.0, height, width, 0.0}, Rect{0.0, 0.0, 0.0, height},
          Rect{width, 0.0, 0.0, height}};
}

inline bool obstacle_free(const Segment& s, double radius, std::span<const Rect> obstacles) {
  const double lo_x = std::min(s.a.x, s.b.x) - radius;
  const double hi_x = std::max(s.a.x, s.b.x) + radius;
  const double lo_y = std::min(s.a.y, s.b.y) - radius;
  const double hi_y = std::max(s.a.y, s.b.y) + radius;
  for (const Rect& r : obstacles) {
    if (r.x > hi_x || r.x_max() < lo_x || r.y > hi_y || r.y_max() < lo_y) continue;
    if (segment_rect_distance(s, r) < radius) return false;
  }
  return true;
}

// Edge-validity test for one segment entered at time `depart`.
inline bool edge_valid(Point a, Point b, double depart, double speed, double radius, std::span<const Rect> obstacles,
                       std::span<const SpaceTimeConstraint> constraints) {
  if (!obstacle_free(Segment{a, b}, radius, obstacles)) return false;
  if (constraints.empty()) return true;
  const double len = distance(a, b);
  const Motion m{a, len > 0.0 ? (b - a) * (speed / len) : Point{}, depart, depart + len / speed};
  return !violates_any(m, constraints);
}

inline bool edge_valid(const PlanningProblem& pr, Point a, Point b, double depart) {
  return edge_valid(a, b, depart, pr.speed, pr.radius, pr.obstacles, pr.constraints);
}

// An agent that reached its goal at `arrival` stays there forever.
inline bool parking_valid(Point goal, double arrival, std::span<const SpaceTimeConstraint> constraints) {
  const Motion parked{goal, Point{}, arrival, std::numeric_limits<double>::infinity()};
  return !violates_any(parked, constraints);
}

// Walks the path segment by segment with the elapsed time t = s / v and
// rejects it on the first segment that comes closer than agent_radius to an
// obstacle or enters a constraint disc during its unsafe interval. The agent
// parked at the final point is checked as well.
inline bool validate(std::span<const Point> path, double speed, double agent_radius, std::span<const Rect> obstacles,
                     std::span<const SpaceTimeConstraint> constraints) {
  if (path.empty()) return false;
  if (path.size() == 1 && !obstacle_free(Segment{path[0], path[0]}, agent_radius, obstacles)) return false;
  double cost = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!edge_valid(path[i], path[i + 1], cost / speed, speed, agent_radius, obstacles, constraints)) return false;
    cost += distance(path[i], path[i + 1]);
  }
  return parking_valid(path.back(), cost / speed, constraints);
}

inline bool validate(std::span<const Point> path, const PlanningProblem& pr) {
  return validate(path, pr.speed, pr.radius, pr.obstacles, pr.constraints);
}

// True when the agent standing at its start at time 0 already breaks a
// constraint or overlaps an obstacle; no path can then be valid.
inline bool start_blocked(const PlanningProblem& pr) {
  if (!obstacle_free(Segment{pr.start, pr.start}, pr.radius, pr.obstacles)) return true;
  const Motion at_start{pr.start, Point{}, 0.0, 0.0};
  return violates_any(at_start, pr.constraints);
}

inline bool goal_blocked(const PlanningProblem& pr) {
  return !obstacle_free(Segment{pr.goal, pr.goal}, pr.radius, pr.obstacles);
}

// Sampling tree of one RRT* run. Node 0 is the start.
class RrtStar {
 public:
  struct Node {
    Point p;
    int parent = -1;
    double cost = 0.0;  // path length from the start
    std::vector<int> children;
  };

  RrtStar(const PlanningProblem& problem, const PlannerParams& params) : pr_(problem), params_(params) {
    const double area = std::max(problem.bounds.w * problem.bounds.h, 1e-12);
    // Asymptotic-optimality constant for a 2D free space of this area.
    gamma_ = 2.0 * std::sqrt(1.5) * std::sqrt(area / std::numbers::pi);
  }

  // Draws `samples` samples and returns the cheapest valid start-goal path.
  std::optional<Polyline> run(int samples, Rng& rng) {
    nodes_.clear();
    nodes_.push_back(Node{pr_.start, -1, 0.0, {}});
    if (start_blocked(pr_) || goal_blocked(pr_)) return std::nullopt;
    if (pr_.start == pr_.goal) {
      if (parking_valid(pr_.goal, 0.0, pr_.constraints)) return Polyline{pr_.start};
      return std::nullopt;
    }
    for (int k = 0; k < samples; ++k) extend(sample(rng));
    return best_path();
  }

  const std::vector<Node>& nodes() const { return nodes_; }

  std::vector<Segment> edges() const {
    std::vector<Segment> out;
    out.reserve(nodes_.size());
    for (const Node& n : nodes_) {
      if (n.parent >= 0) out.push_back({nodes_[static_cast<std::size_t>(n.parent)].p, n.p});
    }
    return out;
  }

  double neighbourhood_radius() const {
    const double n = static_cast<double>(nodes_.size()) + 1.0;
    return std::min(params_.rewire_radius_factor * params_.step_size, gamma_ * std::sqrt(std::log(n) / n));
  }

 private:
  Point sample(Rng& rng) const {
    if (rng.uniform() < params_.goal_bias) return pr_.goal;
    const Rect& b = pr_.bounds;
    const double x = rng.uniform(b.x, b.x_max());
    const double y = rng.uniform(b.y, b.y_max());
    return {x, y};
  }

  int nearest(Point q) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double d = squared_distance(nodes_[i].p, q);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  bool valid_from(int parent, Point q) const {
    const Node& n = nodes_[static_cast<std::size_t>(parent)];
    return edge_valid(pr_, n.p, q, n.cost / pr_.speed);
  }

  void extend(Point target) {
    const int near_idx = nearest(target);
    const Point from = nodes_[static_cast<std::size_t>(near_idx)].p;
    const double d = distance(from, target);
    if (d == 0.0) return;
    const Point q = d <= params_.step_size ? target : from + (target - from) * (params_.step_size / d);

    const double radius = neighbourhood_radius();
    const double r2 = radius * radius;
    std::vector<std::pair<double, int>> near;  // (cost through candidate, index)
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (static_cast<int>(i) == near_idx || squared_distance(nodes_[i].p, q) <= r2) {
        if (nodes_[i].p == q) return;
        near.emplace_back(nodes_[i].cost + distance(nodes_[i].p, q), static_cast<int>(i));
      }
    }
    std::sort(near.begin(), near.end());

    int parent = -1;
    for (const auto& [c, idx] : near) {
      if (valid_from(idx, q)) {
        parent = idx;
        break;
      }
    }
    if (parent < 0) return;

    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{q, parent, nodes_[static_cast<std::size_t>(parent)].cost + distance(nodes_[static_cast<std::size_t>(parent)].p, q), {}});
    nodes_[static_cast<std::size_t>(parent)].children.push_back(id);

    for (const auto& [c, idx] : near) {
      if (idx == parent) continue;
      rewire(id, idx);
    }
  }

  // Re-parents `x` under `via` when that shortens it and keeps its whole
  // subtree valid under the earlier arrival times.
  void rewire(int via, int x) {
    Node& nx = nodes_[static_cast<std::size_t>(x)];
    const Node& nv = nodes_[static_cast<std::size_t>(via)];
    const double new_cost = nv.cost + distance(nv.p, nx.p);
    if (new_cost >= nx.cost - 1e-12) return;
    if (!edge_valid(pr_, nv.p, nx.p, nv.cost / pr_.speed)) return;
    if (!pr_.constraints.empty() && !subtree_valid(x, new_cost)) return;

    auto& siblings = nodes_[static_cast<std::size_t>(nx.parent)].children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), x));
    nx.parent = via;
    nodes_[static_cast<std::size_t>(via)].children.push_back(x);
    nx.cost = new_cost;
    propagate_cost(x);
  }

  bool subtree_valid(int root, double root_cost) const {
    std::vector<std::pair<int, double>> stack{{root, root_cost}};
    while (!stack.empty()) {
      const auto [idx, cost] = stack.back();
      stack.pop_back();
      const Node& n = nodes_[static_cast<std::size_t>(idx)];
      for (int child : n.children) {
        const Node& c = nodes_[static_cast<std::size_t>(child)];
        const double len = distance(n.p, c.p);
        const double depart = cost / pr_.speed;
        const Motion m{n.p, (c.p - n.p) * (pr_.speed / len), depart, depart + len / pr_.speed};
        if (violates_any(m, pr_.constraints)) return false;
        stack.emplace_back(child, cost + len);
      }
    }
    return true;
  }

  void propagate_cost(int root) {
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      const Node& n = nodes_[static_cast<std::size_t>(idx)];
      for (int child : n.children) {
        Node& c = nodes_[static_cast<std::size_t>(child)];
        c.cost = n.cost + distance(n.p, c.p);
        stack.push_back(child);
      }
    }
  }

  std::optional<Polyline> best_path() const {
    const double tol2 = params_.goal_tolerance * params_.goal_tolerance;
    std::vector<std::pair<double, int>> candidates;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (squared_distance(nodes_[i].p, pr_.goal) <= tol2) {
        candidates.emplace_back(nodes_[i].cost + distance(nodes_[i].p, pr_.goal), static_cast<int>(i));
      }
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [total, idx] : candidates) {
      const Node& n = nodes_[static_cast<std::size_t>(idx)];
      if (!edge_valid(pr_, n.p, pr_.goal, n.cost / pr_.speed)) continue;
      if (!parking_valid(pr_.goal, total / pr_.speed, pr_.constraints)) continue;
      Polyline path;
      for (int k = idx; k >= 0; k = nodes_[static_cast<std::size_t>(k)].parent) {
        path.push_back(nodes_[static_cast<std::size_t>(k)].p);
      }
      std::reverse(path.begin(), path.end());
      path.push_back(pr_.goal);
      return make_polyline(path);
    }
    return std::nullopt;
  }

  const PlanningProblem& pr_;
  const PlannerParams& params_;
  double gamma_ = 0.0;
  std::vector<Node> nodes_;
};

// One RRT* run with a budget of `samples`; nullopt signals planning failure.
inline std::optional<Polyline> plan(const PlanningProblem& problem, const PlannerParams& params, Rng& rng,
                                    int samples) {
  RrtStar tree(problem, params);
  return tree.run(samples, rng);
}

namespace detail {

inline bool angles_at_least(std::span<const Point> q, std::size_t first, std::size_t last, double alpha_deg) {
  for (std::size_t i = std::max<std::size_t>(first, 1); i <= last && i + 1 < q.size(); ++i) {
    if (q[i - 1] == q[i] || q[i] == q[i + 1]) return false;
    if (angle_at_vertex(q[i - 1], q[i], q[i + 1]) < alpha_deg) return false;
  }
  return true;
}

// Where an acute vertex is pushed: the foot of the perpendicular it drops on
// the line through its neighbours when that foot falls strictly inside the
// neighbours' segment, otherwise the segment's midpoint.
inline Point repair_target(Point prev, Point vertex, Point next) {
  const Point d = next - prev;
  const double len2 = dot(d, d);
  if (len2 > 0.0) {
    const double t = dot(vertex - prev, d) / len2;
    if (t > 0.0 && t < 1.0) return prev + d * t;
  }
  return prev + d * 0.5;
}

}  // namespace detail

// Raises every interior angle of `path` to at least alpha_deg, first by
// dropping the acute vertex when the bridge between its neighbours is valid
// and otherwise by sliding it towards the line through its neighbours as far
// as validity allows (bisection over the travel distance). Returns nullopt
// when some vertex cannot be fixed.
inline std::optional<Polyline> repair_angles(std::span<const Point> path, double alpha_deg,
                                             const PlanningProblem& pr) {
  Polyline q(path.begin(), path.end());
  if (q.size() < 3) return q;

  std::size_t i = 1;
  double cost_to_prev = 0.0;  // length of q[0..i-1]
  while (i + 1 < q.size()) {
    if (angle_at_vertex(q[i - 1], q[i], q[i + 1]) >= alpha_deg) {
      cost_to_prev += distance(q[i - 1], q[i]);
      ++i;
      continue;
    }
    const double depart = cost_to_prev / pr.speed;

    if (!(q[i - 1] == q[i + 1]) && edge_valid(pr, q[i - 1], q[i + 1], depart)) {
      // The bridge may sharpen the vertex before it, so step back one.
      q.erase(q.begin() + static_cast<std::ptrdiff_t>(i));
      if (i > 1) {
        --i;
        cost_to_prev = polyline_length(std::span<const Point>(q.data(), i));
      }
      continue;
    }

    const Point origin = q[i];
    const Point target = detail::repair_target(q[i - 1], q[i], q[i + 1]);
    auto position = [&](double lambda) { return origin + (target - origin) * lambda; };
    auto geometry_ok = [&](Point p) {
      if (p == q[i - 1] || p == q[i + 1]) return false;
      return edge_valid(pr, q[i - 1], p, depart) &&
             edge_valid(pr, p, q[i + 1], depart + distance(q[i - 1], p) / pr.speed);
    };
    auto angles_ok = [&](Point p) {
      Polyline trial = q;
      trial[i] = p;
      return detail::angles_at_least(trial, i - 1, i + 1, alpha_deg);
    };

    std::optional<Point> accepted;
    if (geometry_ok(target) && angles_ok(target)) {
      accepted = target;
    } else {
      double lo = 0.0;
      double hi = 1.0;
      for (int it = 0; it < 16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (geometry_ok(position(mid))) lo = mid;
        else hi = mid;
      }
      if (lo > 0.0 && angles_ok(position(lo))) accepted = position(lo);
    }
    if (!accepted) return std::nullopt;
    q[i] = *accepted;
    cost_to_prev += distance(q[i - 1], q[i]);
    ++i;
  }

  if (detail::angles_at_least(q, 1, q.size(), alpha_deg) && validate(q, pr)) return q;
  return std::nullopt;
}

// Smoothing parameter tried after `s` failed.
inline double next_smoothing(double s, std::size_t raw_points, double agent_radius, const PlannerParams& params) {
  if (s > 0.0) return s * params.s_growth;
  // Escalating from pure interpolation: allow each point to move by a tenth
  // of the agent radius on average.
  const double per_point = 0.1 * agent_radius;
  return static_cast<double>(raw_points) * per_point * per_point;
}

// The full low-level loop: plan, repair angles, smooth and validate, with the
// sample budget decaying towards eta_min on every failure. Returns nullopt
// once max_attempts RRT* runs have failed.
inline std::optional<PlanResult> plan_smooth(const PlanningProblem& pr, const PlannerParams& params,
                                             std::uint64_t seed) {
  if (start_blocked(pr) || goal_blocked(pr)) return std::nullopt;
  Rng rng(seed);
  PlanResult result;
  int budget = std::max(params.eta_max, params.eta_min);

  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    result.budgets.push_back(budget);
    RrtStar tree(pr, params);
    const std::optional<Polyline> raw = tree.run(budget, rng);
    std::optional<Polyline> repaired;
    if (raw) repaired = repair_angles(*raw, params.alpha_deg, pr);

    if (repaired) {
      auto finish = [&](Polyline smooth) {
        result.raw_path = *repaired;
        result.smooth_path = std::move(smooth);
        result.cost = polyline_length(result.smooth_path);
        result.nodes_used = static_cast<int>(tree.nodes().size());
        if (params.record_tree) result.tree_edges = tree.edges();
        return result;
      };
      if (repaired->size() == 1) return finish(*repaired);

      double s = params.s_initial;
      for (int k = 0; k <= params.smoothing_escalations; ++k) {
        const bspline::Curve curve = bspline::fit_smoothing(*repaired, {params.degree, s, params.resample_spacing});
        Polyline smooth = bspline::resample_arclength(curve, params.resample_spacing);
        if (validate(smooth, pr) && min_interior_angle(smooth) >= params.alpha_deg) return finish(std::move(smooth));
        s = next_smoothing(s, repaired->size(), pr.radius, params);
      }
    }

    ++result.replans;
    budget = std::max(params.eta_min, static_cast<int>(std::ceil(params.budget_decay * budget)));
  }
  return std::nullopt;
}

}  // namespace cecbs
