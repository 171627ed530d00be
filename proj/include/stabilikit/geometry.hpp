#pragma once

/// \file geometry.hpp
/// \brief Floor-plane and 3D primitives: points, convex hulls, signed distances.
///
/// All lengths are millimetres. Every function here is pure.

#include <cmath>
#include <span>
#include <vector>

namespace stabilikit {

/// Tolerance for degeneracy and boundary classification (mm).
inline constexpr double kGeomTolerance = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
  Point2& operator+=(const Point2& o) { x += o.x; y += o.y; return *this; }
  Point2& operator-=(const Point2& o) { x -= o.x; y -= o.y; return *this; }
};

inline Point2 operator+(Point2 a, const Point2& b) { return a += b; }
inline Point2 operator-(Point2 a, const Point2& b) { return a -= b; }
inline Point2 operator*(double s, const Point2& p) { return {s * p.x, s * p.y}; }
inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3D cross product; positive when b is CCW from a.
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
  Point3& operator+=(const Point3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Point3& operator-=(const Point3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
};

inline Point3 operator+(Point3 a, const Point3& b) { return a += b; }
inline Point3 operator-(Point3 a, const Point3& b) { return a -= b; }
inline Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }
inline double norm(const Point3& a) { return std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z); }

/// Drops the vertical coordinate (floor is the z = 0 plane).
inline Point2 floor_projection(const Point3& p) { return {p.x, p.y}; }

inline bool is_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }
inline bool is_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

double euclidean_distance(const Point2& a, const Point2& b);
double euclidean_distance(const Point3& a, const Point3& b);
/// Generic N-dimensional form; throws LengthMismatch on differing sizes.
double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Distance from p to the closed segment [a, b].
double point_segment_distance(const Point2& p, const Point2& a, const Point2& b);

/// Strictly convex polygon with counter-clockwise vertices and no collinear
/// triples. Only constructible through convex_hull() or from_ccw(), both of
/// which enforce the invariants.
class ConvexPolygon {
 public:
  /// Validates an already-ordered vertex list; throws DegenerateInput if it
  /// is not strictly convex and CCW.
  static ConvexPolygon from_ccw(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }

  double area() const;
  Point2 centroid() const;
  Point2 min_corner() const;
  Point2 max_corner() const;

 private:
  explicit ConvexPolygon(std::vector<Point2> v) : vertices_(std::move(v)) {}
  std::vector<Point2> vertices_;

  friend ConvexPolygon convex_hull(std::span<const Point2> points);
};

/// Andrew's monotone chain. Exact duplicates are removed first; vertices whose
/// distance to the chord of their neighbours is within kGeomTolerance are
/// dropped. Output starts at the lowest-x (then lowest-y) vertex.
/// Throws DegenerateInput for < 3 distinct points or an all-collinear set.
ConvexPolygon convex_hull(std::span<const Point2> points);

enum class Containment { inside, boundary, outside };

Containment point_in_polygon(const Point2& p, const ConvexPolygon& poly);

/// Positive inside, negative outside, exactly zero within kGeomTolerance of
/// the boundary. Magnitude is the distance to the nearest edge.
double signed_distance_to_boundary(const Point2& p, const ConvexPolygon& poly);

}  // namespace stabilikit
