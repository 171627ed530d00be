#pragma once

/// \file pressure.hpp
/// \brief Insole pressure maps, their placement on the floor, and the CoP / BoS
/// computed from the placed field.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "stabilikit/geometry.hpp"

namespace stabilikit {

enum class Side : std::uint8_t { left, right };

std::string_view side_name(Side side);

/// Row-major insole grid in kPa. Row 0 is the heel end, column 0 the medial
/// edge.
struct PressureMap {
  Side side = Side::left;
  int rows = 0;
  int cols = 0;
  double cell_size_mm = 0.0;
  std::int64_t frame_index = 0;
  std::vector<double> values;

  double at(int r, int c) const { return values[static_cast<std::size_t>(r * cols + c)]; }
  double& at(int r, int c) { return values[static_cast<std::size_t>(r * cols + c)]; }
  double length_mm() const { return rows * cell_size_mm; }
  double width_mm() const { return cols * cell_size_mm; }
  /// Throws InvalidArgument if dimensions, cell size or values are invalid.
  void validate() const;
};

PressureMap make_pressure_map(Side side, int rows, int cols, double cell_size_mm,
                              std::int64_t frame_index = 0, double fill = 0.0);

struct PlacementOptions {
  /// Heel edge sits this far behind the projected ankle along the heading.
  double ankle_to_heel_mm = 40.0;
  /// Minimum projected ankle-to-toe distance.
  double min_foot_length_mm = 50.0;
};

/// Rigid floor-plane pose of an insole grid: origin is the heel-medial
/// corner, heading the direction of the grid's long (row) axis.
struct FootPlacement {
  Side side = Side::left;
  Point2 origin;
  double heading = 0.0;  ///< radians in (-pi, pi]

  Point2 forward() const;
  /// Unit vector pointing from the medial towards the lateral edge.
  Point2 lateral() const;
  /// World position of a point given in grid coordinates (mm from the
  /// heel-medial corner along the long axis and across it).
  Point2 to_world(double along_mm, double across_mm) const;
  Point2 cell_center(const PressureMap& map, int r, int c) const;
};

/// Places the grid so its long axis follows the floor projection of
/// (toe - ankle) and its centre line passes under the projected ankle.
/// Throws DegeneratePlacement when the projected ankle-toe distance is below
/// opts.min_foot_length_mm.
FootPlacement localize_foot(const PressureMap& map, const Point3& ankle, const Point3& toe,
                            const PlacementOptions& opts = {});

struct PressureSample {
  Point2 position;
  double pressure = 0.0;  ///< kPa
};

struct LocalizedPressureField {
  std::int64_t frame_index = 0;
  std::vector<PressureSample> samples;
};

struct PlacedPressureMap {
  const PressureMap* map = nullptr;
  FootPlacement placement;
};

/// Cells with pressure strictly above threshold become samples at their
/// world cell centres; feet are concatenated without resampling. Throws
/// EmptyField when nothing exceeds the threshold.
LocalizedPressureField localized_field(std::span<const PlacedPressureMap> feet,
                                       double threshold_kpa);
LocalizedPressureField localized_field(const PlacedPressureMap& left,
                                       const PlacedPressureMap& right, double threshold_kpa);

/// Pressure-weighted mean of the sample positions.
Point2 center_of_pressure(const LocalizedPressureField& field);

/// Convex hull of all sample positions.
ConvexPolygon base_of_support(const LocalizedPressureField& field);

inline constexpr double kDefaultRasterCellMm = 5.0;

/// Jaccard index of two convex regions rasterised on a shared grid of pitch
/// raster_cell_mm covering their joint bounding box. A raster cell belongs to
/// a region when its centre is inside or on the boundary.
double hull_iou(const ConvexPolygon& a, const ConvexPolygon& b,
                double raster_cell_mm = kDefaultRasterCellMm);

double bos_iou(const LocalizedPressureField& a, const LocalizedPressureField& b,
               double raster_cell_mm = kDefaultRasterCellMm);

}  // namespace stabilikit
