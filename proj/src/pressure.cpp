#include "stabilikit/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stabilikit/error.hpp"

namespace stabilikit {

std::string_view side_name(Side side) { return side == Side::left ? "left" : "right"; }

void PressureMap::validate() const {
  if (rows <= 0 || cols <= 0) throw Error(ErrorCode::InvalidArgument, "pressure grid is empty");
  if (!(cell_size_mm > 0.0) || !std::isfinite(cell_size_mm)) {
    throw Error(ErrorCode::InvalidArgument, "cell size must be positive");
  }
  if (values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw Error(ErrorCode::InvalidArgument, "pressure values do not match grid dimensions");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "pressure values must be finite and >= 0");
    }
  }
}

PressureMap make_pressure_map(Side side, int rows, int cols, double cell_size_mm,
                              std::int64_t frame_index, double fill) {
  PressureMap m;
  m.side = side;
  m.rows = rows;
  m.cols = cols;
  m.cell_size_mm = cell_size_mm;
  m.frame_index = frame_index;
  m.values.assign(static_cast<std::size_t>(std::max(rows, 0)) * static_cast<std::size_t>(std::max(cols, 0)), fill);
  m.validate();
  return m;
}

Point2 FootPlacement::forward() const { return {std::cos(heading), std::sin(heading)}; }

Point2 FootPlacement::lateral() const {
  const Point2 f = forward();
  // Lateral is to the left of the heading for a left foot, to the right for a right foot.
  return side == Side::left ? Point2{-f.y, f.x} : Point2{f.y, -f.x};
}

Point2 FootPlacement::to_world(double along_mm, double across_mm) const {
  return origin + along_mm * forward() + across_mm * lateral();
}

Point2 FootPlacement::cell_center(const PressureMap& map, int r, int c) const {
  return to_world((r + 0.5) * map.cell_size_mm, (c + 0.5) * map.cell_size_mm);
}

FootPlacement localize_foot(const PressureMap& map, const Point3& ankle, const Point3& toe,
                            const PlacementOptions& opts) {
  const Point2 a = floor_projection(ankle);
  const Point2 d = floor_projection(toe) - a;
  if (!is_finite(a) || !is_finite(d) || norm(d) < opts.min_foot_length_mm) {
    throw Error(ErrorCode::DegeneratePlacement, "projected ankle-toe distance below minimum");
  }
  FootPlacement fp;
  fp.side = map.side;
  fp.heading = std::atan2(d.y, d.x);
  if (fp.heading <= -std::numbers::pi) fp.heading = std::numbers::pi;
  fp.origin = a - opts.ankle_to_heel_mm * fp.forward() - (0.5 * map.width_mm()) * fp.lateral();
  return fp;
}

LocalizedPressureField localized_field(std::span<const PlacedPressureMap> feet,
                                       double threshold_kpa) {
  if (!(threshold_kpa >= 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be >= 0");
  LocalizedPressureField field;
  bool first = true;
  for (const auto& foot : feet) {
    const PressureMap& m = *foot.map;
    if (first) {
      field.frame_index = m.frame_index;
      first = false;
    }
    for (int r = 0; r < m.rows; ++r) {
      for (int c = 0; c < m.cols; ++c) {
        const double p = m.at(r, c);
        if (p > threshold_kpa) field.samples.push_back({foot.placement.cell_center(m, r, c), p});
      }
    }
  }
  if (field.samples.empty()) {
    throw Error(ErrorCode::EmptyField, "no pressure above " + std::to_string(threshold_kpa) +
                                           " kPa in frame " + std::to_string(field.frame_index));
  }
  return field;
}

LocalizedPressureField localized_field(const PlacedPressureMap& left,
                                       const PlacedPressureMap& right, double threshold_kpa) {
  const PlacedPressureMap feet[] = {left, right};
  return localized_field(std::span<const PlacedPressureMap>(feet), threshold_kpa);
}

Point2 center_of_pressure(const LocalizedPressureField& field) {
  double total = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& s : field.samples) {
    total += s.pressure;
    sx += s.pressure * s.position.x;
    sy += s.pressure * s.position.y;
  }
  if (field.samples.empty() || !(total > 0.0)) {
    throw Error(ErrorCode::EmptyField, "centre of pressure of an empty field");
  }
  return {sx / total, sy / total};
}

ConvexPolygon base_of_support(const LocalizedPressureField& field) {
  if (field.samples.empty()) throw Error(ErrorCode::EmptyField, "base of support of an empty field");
  std::vector<Point2> pts;
  pts.reserve(field.samples.size());
  for (const auto& s : field.samples) pts.push_back(s.position);
  return convex_hull(pts);
}

namespace {

// Horizontal extent of a convex polygon at height y, widened by the boundary
// tolerance. Returns false when the line misses the polygon.
bool row_extent(const ConvexPolygon& poly, double y, double& x0, double& x1) {
  const auto& v = poly.vertices();
  x0 = std::numeric_limits<double>::infinity();
  x1 = -x0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& p = v[i];
    const Point2& q = v[(i + 1) % v.size()];
    const double ylo = std::min(p.y, q.y) - kGeomTolerance;
    const double yhi = std::max(p.y, q.y) + kGeomTolerance;
    if (y < ylo || y > yhi) continue;
    if (std::abs(q.y - p.y) <= kGeomTolerance) {
      x0 = std::min({x0, p.x, q.x});
      x1 = std::max({x1, p.x, q.x});
    } else {
      const double t = std::clamp((y - p.y) / (q.y - p.y), 0.0, 1.0);
      const double x = p.x + t * (q.x - p.x);
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
    }
  }
  if (x0 > x1) return false;
  x0 -= kGeomTolerance;
  x1 += kGeomTolerance;
  return true;
}

// Number of raster columns whose centre lies in [x0, x1].
long count_centres(double x0, double x1, double lo, double cell, long nx) {
  const long first = std::max(0L, static_cast<long>(std::ceil((x0 - lo) / cell - 0.5)));
  const long last = std::min(nx - 1, static_cast<long>(std::floor((x1 - lo) / cell - 0.5)));
  return last >= first ? last - first + 1 : 0;
}

}  // namespace

double hull_iou(const ConvexPolygon& a, const ConvexPolygon& b, double raster_cell_mm) {
  if (!(raster_cell_mm > 0.0)) throw Error(ErrorCode::InvalidArgument, "raster cell must be > 0");
  const Point2 lo{std::min(a.min_corner().x, b.min_corner().x),
                  std::min(a.min_corner().y, b.min_corner().y)};
  const Point2 hi{std::max(a.max_corner().x, b.max_corner().x),
                  std::max(a.max_corner().y, b.max_corner().y)};
  const auto nx = static_cast<long>(std::ceil((hi.x - lo.x) / raster_cell_mm));
  const auto ny = static_cast<long>(std::ceil((hi.y - lo.y) / raster_cell_mm));
  long inter = 0;
  long uni = 0;
  for (long j = 0; j < ny; ++j) {
    const double y = lo.y + (static_cast<double>(j) + 0.5) * raster_cell_mm;
    double a0 = 0, a1 = 0, b0 = 0, b1 = 0;
    const bool ha = row_extent(a, y, a0, a1);
    const bool hb = row_extent(b, y, b0, b1);
    const long na = ha ? count_centres(a0, a1, lo.x, raster_cell_mm, nx) : 0;
    const long nb = hb ? count_centres(b0, b1, lo.x, raster_cell_mm, nx) : 0;
    const long nab =
        (ha && hb) ? count_centres(std::max(a0, b0), std::min(a1, b1), lo.x, raster_cell_mm, nx)
                   : 0;
    inter += nab;
    uni += na + nb - nab;
  }
  if (uni == 0) return a.vertices() == b.vertices() ? 1.0 : 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double bos_iou(const LocalizedPressureField& a, const LocalizedPressureField& b,
               double raster_cell_mm) {
  return hull_iou(base_of_support(a), base_of_support(b), raster_cell_mm);
}

}  // namespace stabilikit
