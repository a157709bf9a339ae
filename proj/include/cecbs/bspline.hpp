#pragma once

// Clamped B-spline curves: basis evaluation, curve evaluation, smoothing fit
// of a polyline and arc-length resampling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cecbs/errors.hpp"
#include "cecbs/geometry.hpp"

namespace cecbs::bspline {

using KnotVector = std::vector<double>;

struct Curve {
  int degree = 3;
  KnotVector knots;
  std::vector<Point> control_points;

  double first_knot() const { return knots.front(); }
  double last_knot() const { return knots.back(); }
};

struct SmoothingParams {
  int degree = 3;
  double s = 0.0;            // bound on the sum of squared residuals
  double max_spacing = 1.0;  // used by resample_arclength
};

namespace detail {

inline double basis_recursive(std::size_t i, int p, double u, std::span<const double> U) {
  if (p == 0) {
    if (U[i] <= u && u < U[i + 1]) return 1.0;
    // The last non-empty span is closed on the right so the curve is defined
    // at the final knot.
    if (u == U.back() && U[i] < U[i + 1] && U[i + 1] == U.back()) return 1.0;
    return 0.0;
  }
  double value = 0.0;
  const double left_den = U[i + p] - U[i];
  if (left_den > 0.0) value += (u - U[i]) / left_den * basis_recursive(i, p - 1, u, U);
  const double right_den = U[i + p + 1] - U[i + 1];
  if (right_den > 0.0) value += (U[i + p + 1] - u) / right_den * basis_recursive(i + 1, p - 1, u, U);
  return value;
}

// Dense Gaussian elimination with partial pivoting; `a` is row-major n x n.
inline std::vector<Point> solve_linear(std::vector<double> a, std::vector<Point> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < 1e-14) throw InvalidInput("bspline: singular fitting system");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      rhs[r] = rhs[r] - rhs[col] * f;
    }
  }
  std::vector<Point> x(n);
  for (std::size_t k = n; k-- > 0;) {
    Point acc = rhs[k];
    for (std::size_t c = k + 1; c < n; ++c) acc = acc - x[c] * a[k * n + c];
    x[k] = acc * (1.0 / a[k * n + k]);
  }
  return x;
}

}  // namespace detail

// N_{i,p}(u) by the Cox-de Boor recursion, with 0/0 taken as 0.
inline double basis(std::size_t i, int p, double u, std::span<const double> U) {
  if (p < 0 || i + static_cast<std::size_t>(p) + 1 >= U.size()) {
    throw InvalidInput("bspline::basis: index " + std::to_string(i) + " out of range for degree " +
                       std::to_string(p) + " and " + std::to_string(U.size()) + " knots");
  }
  return detail::basis_recursive(i, p, u, U);
}

// Index of the knot span containing u, for a curve with n + 1 control points.
inline std::size_t find_span(std::size_t n, int p, double u, std::span<const double> U) {
  if (u >= U[n + 1]) return n;
  if (u <= U[static_cast<std::size_t>(p)]) return static_cast<std::size_t>(p);
  std::size_t low = static_cast<std::size_t>(p);
  std::size_t high = n + 1;
  std::size_t mid = (low + high) / 2;
  while (u < U[mid] || u >= U[mid + 1]) {
    if (u < U[mid]) high = mid;
    else low = mid;
    mid = (low + high) / 2;
  }
  return mid;
}

// The p + 1 basis functions that are non-zero on `span`,
// N_{span-p,p}(u) ... N_{span,p}(u).
inline std::vector<double> nonzero_basis(std::size_t span, int p, double u, std::span<const double> U) {
  const auto deg = static_cast<std::size_t>(p);
  std::vector<double> n(deg + 1, 0.0), left(deg + 1, 0.0), right(deg + 1, 0.0);
  n[0] = 1.0;
  for (std::size_t j = 1; j <= deg; ++j) {
    left[j] = u - U[span + 1 - j];
    right[j] = U[span + j] - u;
    double saved = 0.0;
    for (std::size_t r = 0; r < j; ++r) {
      const double den = right[r + 1] + left[j - r];
      const double temp = den == 0.0 ? 0.0 : n[r] / den;
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  return n;
}

inline void check_curve(const Curve& c) {
  if (c.degree < 1) throw InvalidInput("bspline: degree must be positive");
  if (c.control_points.size() < static_cast<std::size_t>(c.degree) + 1) {
    throw InvalidInput("bspline: too few control points for the degree");
  }
  if (c.knots.size() != c.control_points.size() + static_cast<std::size_t>(c.degree) + 1) {
    throw InvalidInput("bspline: knot count must equal control points + degree + 1");
  }
  if (!std::is_sorted(c.knots.begin(), c.knots.end())) throw InvalidInput("bspline: knots must be non-decreasing");
}

inline Point evaluate(const Curve& c, double u) {
  if (!(u >= c.first_knot() && u <= c.last_knot())) {
    throw DomainError("bspline::evaluate: parameter " + std::to_string(u) + " outside the knot range");
  }
  // Clamped ends interpolate their control points exactly.
  if (u == c.first_knot()) return c.control_points.front();
  if (u == c.last_knot()) return c.control_points.back();
  const std::size_t n = c.control_points.size() - 1;
  const std::size_t span = find_span(n, c.degree, u, c.knots);
  const std::vector<double> basis_values = nonzero_basis(span, c.degree, u, c.knots);
  Point out{};
  for (std::size_t j = 0; j < basis_values.size(); ++j) {
    out = out + c.control_points[span - static_cast<std::size_t>(c.degree) + j] * basis_values[j];
  }
  return out;
}

// Normalized cumulative chord lengths, first 0 and last exactly 1.
inline std::vector<double> chord_length_params(std::span<const Point> points) {
  std::vector<double> t(points.size(), 0.0);
  const double total = polyline_length(points);
  if (points.size() < 2 || total == 0.0) throw InvalidInput("bspline: chord-length parameters need a non-degenerate polyline");
  double acc = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    acc += distance(points[k - 1], points[k]);
    t[k] = acc / total;
  }
  t.back() = 1.0;
  return t;
}

inline double squared_residual(const Curve& c, std::span<const Point> points, std::span<const double> params) {
  double sum = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) sum += squared_distance(evaluate(c, params[k]), points[k]);
  return sum;
}

namespace detail {

inline KnotVector clamped_knots(int p, const std::vector<double>& interior) {
  KnotVector U(static_cast<std::size_t>(p) + 1, 0.0);
  U.insert(U.end(), interior.begin(), interior.end());
  U.insert(U.end(), static_cast<std::size_t>(p) + 1, 1.0);
  return U;
}

// Solves for the interior control points P_1..P_{h-1} with the end control
// points pinned to the end data points. With as many interior data points as
// unknowns this is interpolation; otherwise least squares.
inline Curve fit_pinned(std::span<const Point> points, std::span<const double> params, int p, KnotVector knots,
                        std::size_t h) {
  Curve c{p, std::move(knots), std::vector<Point>(h + 1)};
  c.control_points.front() = points.front();
  c.control_points.back() = points.back();
  if (h < 2) return c;

  const std::size_t unknowns = h - 1;
  const std::size_t rows = points.size() - 2;
  // Design matrix restricted to interior data and interior control points.
  std::vector<double> design(rows * unknowns, 0.0);
  std::vector<Point> rhs(rows);
  for (std::size_t k = 0; k < rows; ++k) {
    const double u = params[k + 1];
    const std::size_t span = find_span(h, p, u, c.knots);
    const std::vector<double> nb = nonzero_basis(span, p, u, c.knots);
    Point r = points[k + 1];
    for (std::size_t j = 0; j < nb.size(); ++j) {
      const std::size_t idx = span - static_cast<std::size_t>(p) + j;
      if (idx == 0) r = r - points.front() * nb[j];
      else if (idx == h) r = r - points.back() * nb[j];
      else design[k * unknowns + (idx - 1)] = nb[j];
    }
    rhs[k] = r;
  }

  std::vector<Point> interior;
  if (rows == unknowns) {
    interior = solve_linear(std::move(design), std::move(rhs));
  } else {
    std::vector<double> normal(unknowns * unknowns, 0.0);
    std::vector<Point> nrhs(unknowns);
    for (std::size_t k = 0; k < rows; ++k) {
      for (std::size_t a = 0; a < unknowns; ++a) {
        const double na = design[k * unknowns + a];
        if (na == 0.0) continue;
        nrhs[a] = nrhs[a] + rhs[k] * na;
        for (std::size_t b = 0; b < unknowns; ++b) normal[a * unknowns + b] += na * design[k * unknowns + b];
      }
    }
    interior = solve_linear(std::move(normal), std::move(nrhs));
  }
  std::copy(interior.begin(), interior.end(), c.control_points.begin() + 1);
  return c;
}

// Interpolation with knots placed by averaging the data parameters.
inline Curve interpolate(std::span<const Point> points, std::span<const double> params, int p) {
  const std::size_t n = points.size() - 1;
  std::vector<double> interior;
  for (std::size_t j = 1; j + static_cast<std::size_t>(p) <= n; ++j) {
    double acc = 0.0;
    for (std::size_t i = j; i < j + static_cast<std::size_t>(p); ++i) acc += params[i];
    interior.push_back(acc / p);
  }
  return fit_pinned(points, params, p, clamped_knots(p, interior), n);
}

// Least-squares approximation with h + 1 control points; knots spread so that
// every span holds at least one data parameter.
inline Curve approximate(std::span<const Point> points, std::span<const double> params, int p, std::size_t h) {
  const std::size_t m = points.size() - 1;
  const double d = static_cast<double>(m + 1) / static_cast<double>(h - static_cast<std::size_t>(p) + 1);
  std::vector<double> interior;
  for (std::size_t j = 1; j + static_cast<std::size_t>(p) <= h; ++j) {
    const auto i = static_cast<std::size_t>(static_cast<double>(j) * d);
    const double alpha = static_cast<double>(j) * d - static_cast<double>(i);
    interior.push_back((1.0 - alpha) * params[i - 1] + alpha * params[i]);
  }
  return fit_pinned(points, params, p, clamped_knots(p, interior), h);
}

}  // namespace detail

// Clamped curve through the first and last input point whose squared
// residual at the chord-length parameters is at most params.s. With s = 0
// the curve interpolates every point; larger s buys a curve with fewer
// control points, up to about half as many as there are points. The degree
// drops for inputs too short to support it.
inline Curve fit_smoothing(std::span<const Point> points, const SmoothingParams& params) {
  if (points.size() < 2) throw InvalidInput("bspline::fit_smoothing: need at least 2 points");
  if (params.degree < 1) throw InvalidInput("bspline::fit_smoothing: degree must be positive");
  if (params.s < 0.0) throw InvalidInput("bspline::fit_smoothing: smoothing parameter must be non-negative");
  const std::size_t n = points.size() - 1;
  const int p = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(params.degree), n));
  const std::vector<double> t = chord_length_params(points);

  if (params.s > 0.0) {
    // Near-square least-squares systems are ill-conditioned; above this many
    // control points interpolation is used instead.
    const std::size_t h_max = std::min(n - 1, (n + 1) / 2);
    for (std::size_t h = static_cast<std::size_t>(p); h <= h_max && h > 0; ++h) {
      Curve c = detail::approximate(points, t, p, h);
      if (squared_residual(c, points, t) <= params.s) return c;
    }
  }
  return detail::interpolate(points, t, p);
}

// Points on the curve, both ends included, with consecutive points at most
// max_spacing apart. Arc length comes from a dense uniform parameter table.
inline Polyline resample_arclength(const Curve& c, double max_spacing) {
  if (!(max_spacing > 0.0)) throw InvalidInput("bspline::resample_arclength: spacing must be positive");
  const double a = c.first_knot();
  const double b = c.last_knot();
  auto param_at = [a, b](std::size_t j, std::size_t count) {
    return j == count ? b : a + (b - a) * static_cast<double>(j) / static_cast<double>(count);
  };

  double coarse = 0.0;
  constexpr std::size_t kCoarse = 64;
  Point prev = evaluate(c, a);
  for (std::size_t j = 1; j <= kCoarse; ++j) {
    const Point q = evaluate(c, param_at(j, kCoarse));
    coarse += distance(prev, q);
    prev = q;
  }
  // Aim slightly under the bound so rounding in the table rarely forces a split.
  const double target = 0.98 * max_spacing;
  const auto estimate = static_cast<std::size_t>(std::max(1.0, std::ceil(coarse / target)));

  const std::size_t dense = std::max<std::size_t>(10 * (estimate + 1), kCoarse);
  std::vector<double> u(dense + 1), s(dense + 1, 0.0);
  prev = evaluate(c, a);
  for (std::size_t j = 0; j <= dense; ++j) {
    u[j] = param_at(j, dense);
    const Point q = evaluate(c, u[j]);
    if (j > 0) s[j] = s[j - 1] + distance(prev, q);
    prev = q;
  }
  const double length = s.back();
  const auto intervals = static_cast<std::size_t>(std::max(1.0, std::ceil(length / target)));

  std::vector<double> params{a};
  std::size_t j = 0;
  for (std::size_t k = 1; k < intervals; ++k) {
    const double want = length * static_cast<double>(k) / static_cast<double>(intervals);
    while (j + 1 < dense && s[j + 1] < want) ++j;
    const double span = s[j + 1] - s[j];
    const double f = span > 0.0 ? (want - s[j]) / span : 0.0;
    params.push_back(u[j] + (u[j + 1] - u[j]) * std::clamp(f, 0.0, 1.0));
  }
  params.push_back(b);

  std::vector<Point> pts;
  pts.reserve(params.size());
  for (double p : params) pts.push_back(evaluate(c, p));

  // Greedy subdivision until the spacing bound holds everywhere.
  for (int pass = 0; pass < 64; ++pass) {
    bool split = false;
    std::vector<double> np{params.front()};
    std::vector<Point> npts{pts.front()};
    for (std::size_t k = 1; k < params.size(); ++k) {
      if (distance(pts[k - 1], pts[k]) > max_spacing) {
        const double mid = 0.5 * (params[k - 1] + params[k]);
        np.push_back(mid);
        npts.push_back(evaluate(c, mid));
        split = true;
      }
      np.push_back(params[k]);
      npts.push_back(pts[k]);
    }
    params = std::move(np);
    pts = std::move(npts);
    if (!split) break;
  }
  return make_polyline(pts);
}

}  // namespace cecbs::bspline
