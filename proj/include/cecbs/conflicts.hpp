#pragma once

// Continuous-time conflict detection between timed trajectories and the
// constraints that resolve a conflict.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "cecbs/constraint.hpp"
#include "cecbs/errors.hpp"
#include "cecbs/geometry.hpp"

namespace cecbs {

// A polyline traversed at constant speed from departure time t0; the agent
// stays at the last point after arrival.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(Polyline path, double speed, double t0 = 0.0) : path_(make_polyline(path)), speed_(speed), t0_(t0) {
    if (path_.empty()) throw InvalidInput("trajectory needs at least one point");
    if (!(speed > 0.0)) throw InvalidInput("trajectory speed must be positive");
    cumlen_.reserve(path_.size());
    cumlen_.push_back(0.0);
    for (std::size_t i = 1; i < path_.size(); ++i) cumlen_.push_back(cumlen_.back() + distance(path_[i - 1], path_[i]));
  }

  const Polyline& path() const { return path_; }
  double speed() const { return speed_; }
  double t0() const { return t0_; }
  const std::vector<double>& cumlen() const { return cumlen_; }
  double length() const { return cumlen_.empty() ? 0.0 : cumlen_.back(); }
  double arrival() const { return t0_ + length() / speed_; }

  std::vector<Motion> pieces() const { return timed_pieces(path_, speed_, t0_); }

 private:
  Polyline path_;
  double speed_ = 1.0;
  double t0_ = 0.0;
  std::vector<double> cumlen_;
};

inline Point position_at(const Trajectory& tr, double t) {
  if (t < tr.t0()) throw DomainError("time precedes departure");
  const double s = tr.speed() * (t - tr.t0());
  const auto& cum = tr.cumlen();
  const auto& path = tr.path();
  if (s >= tr.length()) return path.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum.begin()) - 1;
  const double seg = cum[i + 1] - cum[i];
  return Segment{path[i], path[i + 1]}.at((s - cum[i]) / seg);
}

inline double time_to_reach(const Trajectory& tr, std::size_t point_index, double offset) {
  return tr.t0() + (tr.cumlen().at(point_index) + offset) / tr.speed();
}

struct UnsafeInterval {
  double from = 0.0;
  double to = 0.0;

  bool contains(double t) const { return from <= t && t <= to; }
};

inline UnsafeInterval unsafe_interval(double t, double r_sum, double v) {
  const double half = r_sum / v;
  return {std::max(0.0, t - half), t + half};
}

struct Conflict {
  AgentId agent_i = 0;
  double t_i = 0.0;
  AgentId agent_j = 0;
  double t_j = 0.0;
  Point p_i;
  Point p_j;
};

struct ClosePair {
  std::size_t seg_i = 0;
  std::size_t seg_j = 0;
  Point on_i;
  Point on_j;
};

// Spatial filter over every segment pair of two polylines. A single-point
// path contributes one zero-length segment.
inline std::vector<ClosePair> crossing_close_traj(std::span<const Point> path_i, std::span<const Point> path_j,
                                                  double r_sum) {
  auto segments = [](std::span<const Point> p) {
    std::vector<Segment> out;
    if (p.size() == 1) out.push_back({p[0], p[0]});
    for (std::size_t k = 0; k + 1 < p.size(); ++k) out.push_back({p[k], p[k + 1]});
    return out;
  };
  const auto si = segments(path_i);
  const auto sj = segments(path_j);
  std::vector<ClosePair> out;
  for (std::size_t a = 0; a < si.size(); ++a) {
    for (std::size_t b = 0; b < sj.size(); ++b) {
      if (const auto x = segment_intersection(si[a], sj[b])) {
        out.push_back({a, b, *x, *x});
        continue;
      }
      const ClosestPoints cp = closest_points(si[a], sj[b]);
      if (cp.distance < r_sum) out.push_back({a, b, cp.on_first, cp.on_second});
    }
  }
  return out;
}

namespace detail {

// Earliest instant (by closest approach) at which two trajectories come
// closer than r_sum. Segment pairs are screened spatially first; surviving
// pairs, and every pair involving a parked agent, are resolved exactly in time.
inline std::optional<Approach> first_approach(const Trajectory& a, const Trajectory& b, double r_sum) {
  const auto pa = a.pieces();
  const auto pb = b.pieces();
  const auto close = crossing_close_traj(a.path(), b.path(), r_sum);
  // Index of the moving pieces; a single-point path only has its parking piece.
  const std::size_t moving_a = pa.size() - 1;
  const std::size_t moving_b = pb.size() - 1;

  std::optional<Approach> best;
  auto consider = [&](const Motion& m1, const Motion& m2) {
    const auto ap = closest_approach(m1, m2);
    if (!ap || !(ap->distance < r_sum)) return;
    if (!best || ap->time < best->time) best = ap;
  };
  for (const ClosePair& c : close) {
    const Motion& m1 = moving_a == 0 ? pa.back() : pa[c.seg_i];
    const Motion& m2 = moving_b == 0 ? pb.back() : pb[c.seg_j];
    consider(m1, m2);
  }
  // A parked agent sits at its final point; test it against every piece of
  // the other agent that passes near that point.
  auto swept = [](const Motion& m) {
    return std::isinf(m.t_end) ? Segment{m.origin, m.origin} : Segment{m.origin, m.at(m.t_end)};
  };
  for (const Motion& m : pb) {
    if (point_segment_distance(pa.back().origin, swept(m)) < r_sum) consider(pa.back(), m);
  }
  for (std::size_t k = 0; k < moving_a; ++k) {
    if (point_segment_distance(pb.back().origin, swept(pa[k])) < r_sum) consider(pa[k], pb.back());
  }
  return best;
}

}  // namespace detail

// Earliest conflict over all agent pairs. The witness time is the instant of
// closest approach of the two discs, and p_i, p_j are their centres then.
// Ties are broken by agent ids.
inline std::optional<Conflict> first_conflict(const std::map<AgentId, Trajectory>& trajectories,
                                              const std::map<AgentId, double>& radii) {
  std::optional<Conflict> best;
  for (auto i = trajectories.begin(); i != trajectories.end(); ++i) {
    for (auto j = std::next(i); j != trajectories.end(); ++j) {
      const double r_sum = radii.at(i->first) + radii.at(j->first);
      const auto ap = detail::first_approach(i->second, j->second, r_sum);
      if (!ap) continue;
      Conflict c{i->first, ap->time, j->first, ap->time, position_at(i->second, ap->time),
                 position_at(j->second, ap->time)};
      auto key = [](const Conflict& x) { return std::make_tuple(std::min(x.t_i, x.t_j), x.agent_i, x.agent_j, x.t_i); };
      if (!best || key(c) < key(*best)) best = c;
    }
  }
  return best;
}

inline std::pair<SpaceTimeConstraint, SpaceTimeConstraint> constraints_from_conflict(
    const Conflict& c, const std::map<AgentId, double>& radii, const std::map<AgentId, double>& speeds) {
  const double r_sum = radii.at(c.agent_i) + radii.at(c.agent_j);
  const UnsafeInterval ui = unsafe_interval(c.t_i, r_sum, speeds.at(c.agent_i));
  const UnsafeInterval uj = unsafe_interval(c.t_j, r_sum, speeds.at(c.agent_j));
  return {SpaceTimeConstraint{c.agent_i, c.p_i, ui.from, ui.to, r_sum},
          SpaceTimeConstraint{c.agent_j, c.p_j, uj.from, uj.to, r_sum}};
}

}  // namespace cecbs
