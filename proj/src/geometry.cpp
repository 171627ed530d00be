#include "stabilikit/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "stabilikit/error.hpp"

namespace stabilikit {

namespace {

// Signed distance of b from the directed line o -> p. Negative means b lies to
// the right, i.e. o -> b -> p is a left (CCW) turn.
double offset_from_chord(const Point2& o, const Point2& b, const Point2& p) {
  const Point2 op = p - o;
  const double len = norm(op);
  if (len == 0.0) return 0.0;
  return cross(op, b - o) / len;
}

// Signed distance of p from the infinite line through edge a -> b; positive on
// the left (interior side of a CCW polygon).
double edge_line_distance(const Point2& p, const Point2& a, const Point2& b) {
  return cross(b - a, p - a) / norm(b - a);
}

}  // namespace

double euclidean_distance(const Point2& a, const Point2& b) { return norm(a - b); }

double euclidean_distance(const Point3& a, const Point3& b) { return norm(a - b); }

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "euclidean_distance: dimensions differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

ConvexPolygon ConvexPolygon::from_ccw(std::vector<Point2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw Error(ErrorCode::DegenerateInput, "polygon needs at least 3 vertices");
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& prev = vertices[(i + n - 1) % n];
    const Point2& cur = vertices[i];
    const Point2& next = vertices[(i + 1) % n];
    if (!is_finite(cur)) throw Error(ErrorCode::DegenerateInput, "non-finite vertex");
    if (offset_from_chord(prev, cur, next) >= -kGeomTolerance) {
      throw Error(ErrorCode::DegenerateInput, "vertices are not strictly convex and CCW");
    }
    turning += std::atan2(cross(cur - prev, next - cur), dot(cur - prev, next - cur));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
    throw Error(ErrorCode::DegenerateInput, "vertex loop winds more than once");
  }
  return ConvexPolygon(std::move(vertices));
}

double ConvexPolygon::area() const {
  double twice = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(vertices_[i], vertices_[(i + 1) % n]);
  return 0.5 * twice;
}

Point2 ConvexPolygon::centroid() const {
  // Shifting to the first vertex keeps the shoelace sums well conditioned.
  const Point2 ref = vertices_.front();
  double twice = 0.0;
  Point2 acc;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices_[i] - ref;
    const Point2 b = vertices_[(i + 1) % n] - ref;
    const double w = cross(a, b);
    twice += w;
    acc += w * (a + b);
  }
  return ref + (1.0 / (3.0 * twice)) * acc;
}

Point2 ConvexPolygon::min_corner() const {
  Point2 m{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto& v : vertices_) m = {std::min(m.x, v.x), std::min(m.y, v.y)};
  return m;
}

Point2 ConvexPolygon::max_corner() const {
  Point2 m{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& v : vertices_) m = {std::max(m.x, v.x), std::max(m.y, v.y)};
  return m;
}

ConvexPolygon convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  for (const auto& p : pts) {
    if (!is_finite(p)) throw Error(ErrorCode::DegenerateInput, "non-finite input point");
  }
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    throw Error(ErrorCode::DegenerateInput, "convex hull needs at least 3 distinct points");
  }

  std::vector<Point2> hull;
  hull.reserve(2 * pts.size());
  auto push = [&hull](const Point2& p, std::size_t floor) {
    while (hull.size() >= floor + 2 &&
           offset_from_chord(hull[hull.size() - 2], hull.back(), p) >= -kGeomTolerance) {
      hull.pop_back();
    }
    hull.push_back(p);
  };
  for (const auto& p : pts) push(p, 0);
  const std::size_t lower = hull.size() - 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) push(*it, lower);
  hull.pop_back();  // last point repeats the first

  if (hull.size() < 3) throw Error(ErrorCode::DegenerateInput, "all points are collinear");
  return ConvexPolygon(std::move(hull));
}

Containment point_in_polygon(const Point2& p, const ConvexPolygon& poly) {
  const auto& v = poly.vertices();
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    min_dist = std::min(min_dist, edge_line_distance(p, v[i], v[(i + 1) % v.size()]));
  }
  if (min_dist < -kGeomTolerance) return Containment::outside;
  if (min_dist > kGeomTolerance) return Containment::inside;
  return Containment::boundary;
}

double signed_distance_to_boundary(const Point2& p, const ConvexPolygon& poly) {
  const Containment where = point_in_polygon(p, poly);
  if (where == Containment::boundary) return 0.0;
  const auto& v = poly.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    best = std::min(best, point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
  }
  return where == Containment::inside ? best : -best;
}

}  // namespace stabilikit
