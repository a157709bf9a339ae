#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cecbs/geometry.hpp"
#include "oracles.hpp"

using namespace cecbs;
using Catch::Approx;

TEST_CASE("polyline_length sums consecutive distances", "[geometry]") {
  CHECK(polyline_length(Polyline{{0, 0}, {3, 0}, {3, 4}}) == Approx(7.0));
  CHECK(polyline_length(Polyline{{5, 5}}) == 0.0);
  CHECK(polyline_length(Polyline{{0, 0}, {1, 1}}) == Approx(std::sqrt(2.0)));
}

TEST_CASE("polyline_length is invariant under rigid motion", "[geometry]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int trial = 0; trial < 100; ++trial) {
    Polyline p;
    for (int k = 0; k < 6; ++k) p.push_back({u(rng), u(rng)});
    const double th = u(rng);
    const Point shift{u(rng), u(rng)};
    Polyline q;
    for (const Point& a : p) q.push_back(Point{a.x * std::cos(th) - a.y * std::sin(th), a.x * std::sin(th) + a.y * std::cos(th)} + shift);
    CHECK(polyline_length(q) == Approx(polyline_length(p)).margin(1e-9));
  }
}

TEST_CASE("make_polyline drops consecutive duplicates", "[geometry]") {
  const Polyline p = make_polyline(Polyline{{0, 0}, {0, 0}, {1, 0}, {1, 0}, {0, 0}});
  REQUIRE(p.size() == 3);
  CHECK(p[2] == Point{0, 0});
}

TEST_CASE("segment_intersection", "[geometry]") {
  SECTION("perpendicular crossing") {
    const auto x = segment_intersection({{0, 0}, {2, 0}}, {{1, -1}, {1, 1}});
    REQUIRE(x);
    CHECK(x->x == Approx(1.0));
    CHECK(x->y == Approx(0.0).margin(1e-12));
  }
  SECTION("parallel and disjoint") { CHECK_FALSE(segment_intersection({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}})); }
  SECTION("collinear overlap reports the overlap end nearest the first segment's start") {
    const auto x = segment_intersection({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}});
    REQUIRE(x);
    CHECK(*x == Point{1, 0});
    const auto y = segment_intersection({{2, 0}, {0, 0}}, {{1, 0}, {3, 0}});
    REQUIRE(y);
    CHECK(*y == Point{2, 0});
  }
  SECTION("touching endpoints") {
    const auto x = segment_intersection({{0, 0}, {1, 1}}, {{1, 1}, {2, 0}});
    REQUIRE(x);
    CHECK(*x == Point{1, 1});
  }
  SECTION("collinear but separated") { CHECK_FALSE(segment_intersection({{0, 0}, {1, 0}}, {{2, 0}, {3, 0}})); }
}

TEST_CASE("closest_points", "[geometry]") {
  CHECK(closest_points({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}).distance == Approx(1.0));
  CHECK(closest_points({{0, 0}, {2, 2}}, {{0, 2}, {2, 0}}).distance == Approx(0.0).margin(1e-12));
  const ClosestPoints cp = closest_points({{0, 0}, {1, 0}}, {{2, 1}, {3, 1}});
  CHECK(cp.distance == Approx(std::sqrt(2.0)));
  CHECK(cp.on_first == Point{1, 0});
  CHECK(cp.on_second == Point{2, 1});
  CHECK(cp.distance == Approx(oracle::sampled_segment_distance({{0, 0}, {1, 0}}, {{2, 1}, {3, 1}}, 1000)).margin(1e-6));
}

TEST_CASE("closest_points agrees with sampling and with segment_intersection", "[geometry]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 300; ++trial) {
    const Segment a{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const Segment b{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const ClosestPoints ab = closest_points(a, b);
    const ClosestPoints ba = closest_points(b, a);
    CHECK(ab.distance == Approx(ba.distance).margin(1e-9));
    CHECK(ab.distance == Approx(distance(ab.on_first, ab.on_second)).margin(1e-9));
    CHECK(point_segment_distance(ab.on_first, a) < 1e-9);
    CHECK(point_segment_distance(ab.on_second, b) < 1e-9);
    const double sampled = oracle::sampled_segment_distance(a, b, 100);
    CHECK(ab.distance <= sampled + 1e-6);
    CHECK(sampled - ab.distance < 0.15);  // sampling grid resolution
    CHECK(segment_intersection(a, b).has_value() == (ab.distance < 1e-9));
  }
}

TEST_CASE("segment_rect_distance", "[geometry]") {
  CHECK(segment_rect_distance({{0, 0}, {0, 10}}, Rect{2, 0, 2, 2}) == Approx(2.0));
  CHECK(segment_rect_distance({{-1, 1}, {5, 1}}, Rect{0, 0, 2, 2}) == 0.0);
  CHECK(segment_rect_distance({{3, 3}, {5, 5}}, Rect{0, 0, 2, 2}) == Approx(std::sqrt(2.0)));
  CHECK(segment_rect_distance({{1, 1}, {1, 1}}, Rect{0, 0, 2, 2}) == 0.0);
  CHECK(segment_rect_distance({{0, 5}, {4, 5}}, Rect{1, 1, 0, 0}) == Approx(4.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const Segment s{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const Rect r{u(rng), u(rng), u(rng) / 3, u(rng) / 3};
    const double d = segment_rect_distance(s, r);
    const double sampled = oracle::sampled_segment_rect_distance(s, r, 20000);
    CHECK(d <= sampled + 1e-9);
    CHECK(d == Approx(sampled).margin(1e-3));
  }
}

TEST_CASE("angle_at_vertex", "[geometry]") {
  CHECK(angle_at_vertex({0, 0}, {1, 0}, {2, 0}) == Approx(180.0));
  CHECK(angle_at_vertex({0, 0}, {1, 0}, {1, 1}) == Approx(90.0));
  CHECK(angle_at_vertex({0, 0}, {1, 0}, {0, 0}) == Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(angle_at_vertex({1, 0}, {1, 0}, {2, 0}), InvalidGeometry);
  CHECK_THROWS_AS(angle_at_vertex({0, 0}, {1, 0}, {1, 0}), InvalidGeometry);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const Point a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    const double abc = angle_at_vertex(a, b, c);
    CHECK(abc == Approx(angle_at_vertex(c, b, a)).margin(1e-9));
    CHECK(abc >= 0.0);
    CHECK(abc <= 180.0);
  }
  // Nearly collinear input must not leave the acos domain.
  CHECK(angle_at_vertex({0, 0}, {1e8, 1e-8}, {2e8, 2e-8}) == Approx(180.0));
}

TEST_CASE("min_interior_angle", "[geometry]") {
  CHECK(min_interior_angle(Polyline{{0, 0}, {1, 0}}) == 180.0);
  CHECK(min_interior_angle(Polyline{{0, 0}, {1, 0}, {1, 1}, {3, 1}}) == Approx(90.0));
}

TEST_CASE("closest_approach of linear motions", "[geometry]") {
  // Head-on on a line: meet at t = 5.
  const Motion a{{0, 0}, {1, 0}, 0, 10};
  const Motion b{{10, 0}, {-1, 0}, 0, 10};
  const auto ab = closest_approach(a, b);
  REQUIRE(ab);
  CHECK(ab->time == Approx(5.0));
  CHECK(ab->distance == Approx(0.0).margin(1e-12));
  // Disjoint time windows.
  CHECK_FALSE(closest_approach(Motion{{0, 0}, {1, 0}, 0, 1}, Motion{{0, 0}, {1, 0}, 2, 3}));
  // Parked piece against a passing one.
  const Motion parked{{5, 3}, {0, 0}, 0, std::numeric_limits<double>::infinity()};
  const auto pa = closest_approach(a, parked);
  REQUIRE(pa);
  CHECK(pa->time == Approx(5.0));
  CHECK(pa->distance == Approx(3.0));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const Motion m1{{u(rng), u(rng)}, {u(rng), u(rng)}, 0, 2 + u(rng)};
    const Motion m2{{u(rng), u(rng)}, {u(rng), u(rng)}, 1 + u(rng) / 3, 4};
    const auto ap = closest_approach(m1, m2);
    const double lo = std::max(m1.t_begin, m2.t_begin), hi = std::min(m1.t_end, m2.t_end);
    REQUIRE(ap.has_value() == (lo <= hi));
    if (!ap) continue;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 2000; ++k) {
      const double t = lo + (hi - lo) * k / 2000.0;
      best = std::min(best, distance(m1.at(t), m2.at(t)));
    }
    CHECK(ap->distance <= best + 1e-9);
    CHECK(ap->distance == Approx(best).margin(1e-3));
  }
}
