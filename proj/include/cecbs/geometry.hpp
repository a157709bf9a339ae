#pragma once

// Exact 2D primitives shared by the planner, the conflict detector and the
// benchmark harness. Everything here is a pure function over value types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "cecbs/errors.hpp"

namespace cecbs {

// Absolute tolerance of the exact-geometry predicates.
inline constexpr double kGeomEps = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(Point a, double k) { return {a.x * k, a.y * k}; }
  friend constexpr Point operator*(double k, Point a) { return {a.x * k, a.y * k}; }
  friend constexpr bool operator==(Point a, Point b) = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
constexpr double squared_distance(Point a, Point b) { return dot(a - b, a - b); }

inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Zero-length segments are allowed and behave as points.
struct Segment {
  Point a;
  Point b;

  Point at(double t) const { return a + (b - a) * t; }
  double length() const { return distance(a, b); }
  friend constexpr bool operator==(const Segment&, const Segment&) = default;
};

// Axis-aligned rectangle, (x, y) is the lower-left corner.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x_max() const { return x + w; }
  double y_max() const { return y + h; }

  bool contains(Point p) const {
    return p.x >= x && p.x <= x_max() && p.y >= y && p.y <= y_max();
  }

  // Strictly inside: on the boundary does not count.
  bool contains_interior(Point p) const {
    return p.x > x && p.x < x_max() && p.y > y && p.y < y_max();
  }

  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

// An ordered list of points with no two consecutive points equal.
using Polyline = std::vector<Point>;

// Drops consecutive duplicates so the result satisfies the Polyline invariant.
inline Polyline make_polyline(std::span<const Point> points) {
  Polyline out;
  out.reserve(points.size());
  for (const Point& p : points) {
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  return out;
}

inline double polyline_length(std::span<const Point> points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += distance(points[i - 1], points[i]);
  return total;
}

inline double point_segment_distance(Point p, const Segment& s, Point* closest = nullptr) {
  const Point d = s.b - s.a;
  const double len2 = dot(d, d);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  const Point q = s.a + d * t;
  if (closest != nullptr) *closest = q;
  return distance(p, q);
}

// A point common to both closed segments, if any. For collinear overlapping
// segments the overlap endpoint nearest s1.a is reported.
inline std::optional<Point> segment_intersection(const Segment& s1, const Segment& s2) {
  const Point d = s1.b - s1.a;
  const Point e = s2.b - s2.a;
  const double len_d = norm(d);
  const double len_e = norm(e);

  if (len_d == 0.0) {
    if (point_segment_distance(s1.a, s2) <= kGeomEps) return s1.a;
    return std::nullopt;
  }
  if (len_e == 0.0) {
    if (point_segment_distance(s2.a, s1) <= kGeomEps) return s2.a;
    return std::nullopt;
  }

  const Point w = s2.a - s1.a;
  const double denom = cross(d, e);
  if (std::abs(denom) > kGeomEps * len_d * len_e) {
    const double t = cross(w, e) / denom;
    const double u = cross(w, d) / denom;
    const double tol_t = kGeomEps / len_d;
    const double tol_u = kGeomEps / len_e;
    if (t < -tol_t || t > 1.0 + tol_t || u < -tol_u || u > 1.0 + tol_u) return std::nullopt;
    return s1.at(std::clamp(t, 0.0, 1.0));
  }

  // Parallel: only collinear segments can meet.
  if (std::abs(cross(w, d)) / len_d > kGeomEps) return std::nullopt;
  const double len2 = len_d * len_d;
  const double t0 = dot(s2.a - s1.a, d) / len2;
  const double t1 = dot(s2.b - s1.a, d) / len2;
  const double lo = std::max(0.0, std::min(t0, t1));
  const double hi = std::min(1.0, std::max(t0, t1));
  if (lo > hi + kGeomEps / len_d) return std::nullopt;
  return s1.at(std::min(lo, 1.0));
}

struct ClosestPoints {
  Point on_first;
  Point on_second;
  double distance = 0.0;
};

inline ClosestPoints closest_points(const Segment& s1, const Segment& s2) {
  if (auto x = segment_intersection(s1, s2)) return {*x, *x, 0.0};

  // Disjoint segments attain their minimum distance at an endpoint of one of them.
  ClosestPoints best{s1.a, s2.a, std::numeric_limits<double>::infinity()};
  auto consider = [&best](Point p1, Point p2) {
    const double dd = distance(p1, p2);
    if (dd < best.distance) best = {p1, p2, dd};
  };
  Point q;
  point_segment_distance(s1.a, s2, &q);
  consider(s1.a, q);
  point_segment_distance(s1.b, s2, &q);
  consider(s1.b, q);
  point_segment_distance(s2.a, s1, &q);
  consider(q, s2.a);
  point_segment_distance(s2.b, s1, &q);
  consider(q, s2.b);
  return best;
}

inline double segment_rect_distance(const Segment& s, const Rect& r) {
  if (r.contains(s.a) || r.contains(s.b)) return 0.0;
  const Point p00{r.x, r.y};
  const Point p10{r.x_max(), r.y};
  const Point p11{r.x_max(), r.y_max()};
  const Point p01{r.x, r.y_max()};
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& edge : {Segment{p00, p10}, Segment{p10, p11}, Segment{p11, p01}, Segment{p01, p00}}) {
    best = std::min(best, closest_points(s, edge).distance);
    if (best == 0.0) break;
  }
  return best;
}

// Angle at b between b->a and b->c, in degrees. 180 is a straight
// continuation, 0 a full reversal.
inline double angle_at_vertex(Point a, Point b, Point c) {
  const Point v = a - b;
  const Point w = c - b;
  const double nv = norm(v);
  const double nw = norm(w);
  if (nv == 0.0 || nw == 0.0) throw InvalidGeometry("angle_at_vertex: vertex coincides with a neighbour");
  const double cosine = std::clamp(dot(v, w) / (nv * nw), -1.0, 1.0);
  return std::acos(cosine) * 180.0 / std::numbers::pi;
}

// Smallest interior angle of a polyline; 180 when it has no interior vertex.
inline double min_interior_angle(std::span<const Point> path) {
  double best = 180.0;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    best = std::min(best, angle_at_vertex(path[i - 1], path[i], path[i + 1]));
  }
  return best;
}

// A point moving with constant velocity during [t_begin, t_end]. t_end may be
// +infinity, which models an agent parked at its goal.
struct Motion {
  Point origin;    // position at t_begin
  Point velocity;  // world units per second
  double t_begin = 0.0;
  double t_end = 0.0;

  Point at(double t) const { return origin + velocity * (t - t_begin); }
};

struct Approach {
  double time = 0.0;
  double distance = 0.0;
};

// Closest approach of two motions over the intersection of their time
// windows, or nullopt when the windows are disjoint.
inline std::optional<Approach> closest_approach(const Motion& m1, const Motion& m2) {
  const double lo = std::max(m1.t_begin, m2.t_begin);
  const double hi = std::min(m1.t_end, m2.t_end);
  if (lo > hi) return std::nullopt;
  // Relative position d(t) = d0 + dv * (t - lo).
  const Point d0 = m1.at(lo) - m2.at(lo);
  const Point dv = m1.velocity - m2.velocity;
  const double dv2 = dot(dv, dv);
  double t = lo;
  if (dv2 > 0.0) {
    const double tau = -dot(d0, dv) / dv2;
    if (tau > 0.0) t = std::min(lo + tau, hi);
  }
  return Approach{t, norm(d0 + dv * (t - lo))};
}

}  // namespace cecbs
