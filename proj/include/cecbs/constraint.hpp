#pragma once

// Space-time constraints and the timed view of a polyline shared by the
// planner's validity test and the conflict detector.

#include <limits>
#include <span>
#include <vector>

#include "cecbs/geometry.hpp"

namespace cecbs {

using AgentId = int;

// Agent `agent` must not come within `radius` of `p` during
// [unsafe_from, unsafe_to].
struct SpaceTimeConstraint {
  AgentId agent = 0;
  Point p;
  double unsafe_from = 0.0;
  double unsafe_to = 0.0;
  double radius = 0.0;

  friend bool operator==(const SpaceTimeConstraint&, const SpaceTimeConstraint&) = default;
};

// Splits a path traversed at constant speed from time t0 into one Motion per
// segment, followed by the agent parked at the last point forever.
inline std::vector<Motion> timed_pieces(std::span<const Point> path, double speed, double t0 = 0.0) {
  std::vector<Motion> pieces;
  if (path.empty()) return pieces;
  pieces.reserve(path.size());
  double t = t0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Point d = path[i] - path[i - 1];
    const double len = norm(d);
    const double dt = len / speed;
    pieces.push_back(Motion{path[i - 1], len > 0.0 ? d * (speed / len) : Point{}, t, t + dt});
    t += dt;
  }
  pieces.push_back(Motion{path.back(), Point{}, t, std::numeric_limits<double>::infinity()});
  return pieces;
}

inline bool violates(const Motion& m, const SpaceTimeConstraint& c) {
  const Motion held{c.p, Point{}, c.unsafe_from, c.unsafe_to};
  const auto approach = closest_approach(m, held);
  return approach && approach->distance < c.radius;
}

inline bool violates_any(const Motion& m, std::span<const SpaceTimeConstraint> constraints) {
  for (const auto& c : constraints) {
    if (violates(m, c)) return true;
  }
  return false;
}

}  // namespace cecbs
