#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "stabilikit/error.hpp"
#include "stabilikit/geometry.hpp"

using namespace stabilikit;

namespace {

ConvexPolygon unit_square() { return convex_hull(std::vector<Point2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

std::vector<Point2> sorted(std::vector<Point2> v) {
  std::sort(v.begin(), v.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  return v;
}

void check_invariants(const ConvexPolygon& poly) {
  const auto& v = poly.vertices();
  REQUIRE(v.size() >= 3);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % v.size()];
    const Point2 c = v[(i + 2) % v.size()];
    CHECK(cross(b - a, c - b) > 0.0);
  }
}

}  // namespace

TEST_CASE("convex_hull drops interior points") {
  const auto h = convex_hull(std::vector<Point2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  CHECK(h.size() == 4);
  check_invariants(h);
  CHECK(h.area() == doctest::Approx(1.0));
}

TEST_CASE("convex_hull removes duplicates") {
  const auto h = convex_hull(std::vector<Point2>{{0, 0}, {2, 0}, {1, 1}, {0, 0}});
  CHECK(h.size() == 3);
}

TEST_CASE("convex_hull drops collinear boundary points") {
  const auto h = convex_hull(std::vector<Point2>{{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}, {0, 1}});
  CHECK(h.size() == 4);
  check_invariants(h);
}

TEST_CASE("convex_hull degenerate input") {
  CHECK_THROWS_AS(convex_hull(std::vector<Point2>{{0, 0}, {1, 1}}), Error);
  CHECK_THROWS_AS(convex_hull(std::vector<Point2>{{0, 0}, {1, 1}, {2, 2}, {3, 3}}), Error);
  CHECK_THROWS_AS(convex_hull(std::vector<Point2>{{0, 0}, {0, 0}, {0, 0}, {1, 0}}), Error);
  try {
    convex_hull(std::vector<Point2>{{0, 0}, {1, 1}, {2, 2}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateInput);
  }
}

TEST_CASE("convex_hull of 200 points in the unit disk") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point2> pts;
  while (pts.size() < 200) {
    const Point2 p{u(rng), u(rng)};
    if (norm(p) <= 1.0) pts.push_back(p);
  }
  const auto h = convex_hull(pts);
  check_invariants(h);
  for (const auto& p : pts) CHECK(point_in_polygon(p, h) != Containment::outside);
  CHECK(sorted(h.vertices()) == oracle::brute_force_hull(pts));
}

TEST_CASE("convex_hull properties") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-500.0, 500.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point2> pts(12);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const auto h = convex_hull(pts);

    SUBCASE("idempotent") {
      const auto again = convex_hull(h.vertices());
      CHECK(again.vertices() == h.vertices());
    }
    SUBCASE("rigid equivariance") {
      const double th = 0.7;
      const Point2 t{31.0, -17.0};
      const auto tf = [&](const Point2& p) {
        return Point2{std::cos(th) * p.x - std::sin(th) * p.y + t.x,
                      std::sin(th) * p.x + std::cos(th) * p.y + t.y};
      };
      std::vector<Point2> moved;
      for (const auto& p : pts) moved.push_back(tf(p));
      const auto hm = convex_hull(moved);
      REQUIRE(hm.size() == h.size());
      for (const auto& v : h.vertices()) {
        const Point2 w = tf(v);
        const bool found = std::any_of(hm.vertices().begin(), hm.vertices().end(),
                                       [&](const Point2& q) { return norm(q - w) < 1e-9; });
        CHECK(found);
      }
    }
  }
}

TEST_CASE("signed_distance_to_boundary") {
  const auto sq = unit_square();
  CHECK(signed_distance_to_boundary({0.5, 0.5}, sq) == doctest::Approx(0.5));
  CHECK(signed_distance_to_boundary({2.0, 0.5}, sq) == doctest::Approx(-1.0));
  CHECK(signed_distance_to_boundary({0.3, 0.9}, sq) == doctest::Approx(0.1));
  CHECK(signed_distance_to_boundary({1.0, 0.5}, sq) == 0.0);
  CHECK(signed_distance_to_boundary({1.0, 1.0}, sq) == 0.0);
  CHECK(signed_distance_to_boundary({2.0, 2.0}, sq) == doctest::Approx(-std::sqrt(2.0)));
}

TEST_CASE("sign agrees with containment") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto hex = convex_hull(std::vector<Point2>{
      {1, 0}, {0.5, 0.9}, {-0.5, 0.9}, {-1, 0}, {-0.5, -0.9}, {0.5, -0.9}});
  for (int i = 0; i < 2000; ++i) {
    const Point2 p{u(rng), u(rng)};
    const double d = signed_distance_to_boundary(p, hex);
    const auto c = point_in_polygon(p, hex);
    if (c == Containment::inside) CHECK(d > 0.0);
    if (c == Containment::outside) CHECK(d < 0.0);
    if (c == Containment::boundary) CHECK(d == 0.0);
  }
}

TEST_CASE("point_in_polygon") {
  const auto sq = unit_square();
  CHECK(point_in_polygon({0.5, 0.5}, sq) == Containment::inside);
  CHECK(point_in_polygon({1.0, 0.5}, sq) == Containment::boundary);
  CHECK(point_in_polygon({1.1, 0.5}, sq) == Containment::outside);
  CHECK(point_in_polygon({0.0, 0.0}, sq) == Containment::boundary);
  CHECK(point_in_polygon({1.0 + 1e-12, 0.5}, sq) == Containment::boundary);
}

TEST_CASE("euclidean_distance") {
  CHECK(euclidean_distance(Point2{0, 0}, Point2{3, 4}) == 5.0);
  CHECK(euclidean_distance(Point2{7, 7}, Point2{7, 7}) == 0.0);
  CHECK(euclidean_distance(Point3{1, 2, 2}, Point3{0, 0, 0}) == 3.0);
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{1, 2, 3, 4};
  const std::vector<double> c{1, 2, 3};
  CHECK(euclidean_distance(a, b) == 0.0);
  CHECK_THROWS_AS(euclidean_distance(a, c), Error);
  CHECK(euclidean_distance(Point2{1, 5}, Point2{-2, 9}) == euclidean_distance(Point2{-2, 9}, Point2{1, 5}));
}

TEST_CASE("ConvexPolygon::from_ccw validates") {
  CHECK_NOTHROW(ConvexPolygon::from_ccw({{0, 0}, {1, 0}, {0, 1}}));
  CHECK_THROWS_AS(ConvexPolygon::from_ccw({{0, 0}, {0, 1}, {1, 0}}), Error);
  CHECK_THROWS_AS(ConvexPolygon::from_ccw({{0, 0}, {1, 0}}), Error);
  CHECK_THROWS_AS(ConvexPolygon::from_ccw({{0, 0}, {1, 0}, {2, 0}, {1, 1}}), Error);
}

TEST_CASE("area and centroid") {
  const auto sq = unit_square();
  CHECK(sq.area() == doctest::Approx(1.0));
  CHECK(sq.centroid().x == doctest::Approx(0.5));
  CHECK(sq.centroid().y == doctest::Approx(0.5));
}
