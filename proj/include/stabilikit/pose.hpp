#pragma once

/// \file pose.hpp
/// \brief Joint-set layouts, 2D/3D pose frames, two-view triangulation and
/// HybridPose assembly.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stabilikit/geometry.hpp"

namespace stabilikit {

/// Every joint identifier used by any layout. Names follow the BODY_25
/// convention of the OpenPose detector.
enum class Joint : std::uint8_t {
  Nose, Neck, RShoulder, RElbow, RWrist, LShoulder, LElbow, LWrist, MidHip,
  RHip, RKnee, RAnkle, LHip, LKnee, LAnkle, REye, LEye, REar, LEar,
  LBigToe, LSmallToe, LHeel, RBigToe, RSmallToe, RHeel,
};

inline constexpr std::size_t kJointCount = 25;

std::string_view joint_name(Joint j);
std::optional<Joint> joint_from_name(std::string_view name);

enum class LayoutKind : std::uint8_t { OP, GT, BP, HP };

std::string_view layout_name(LayoutKind kind);
std::optional<LayoutKind> layout_from_name(std::string_view name);

/// Ordered joint list of one joint set.
///
/// - OP: the 25 detector joints in detector order.
/// - GT: the 21 motion-capture joints.
/// - BP: the 12 limb joints common to every set (shoulders, elbows, wrists,
///   hips, knees, ankles).
/// - HP: the 12 BP joints first, followed by the 13 remaining OP joints in OP
///   order.
class JointSetLayout {
 public:
  static const JointSetLayout& get(LayoutKind kind);

  LayoutKind kind() const noexcept { return kind_; }
  std::span<const Joint> joints() const noexcept { return joints_; }
  std::size_t size() const noexcept { return joints_.size(); }
  std::optional<std::size_t> index_of(Joint j) const;
  bool contains(Joint j) const { return index_of(j).has_value(); }

 private:
  JointSetLayout(LayoutKind kind, std::vector<Joint> joints);
  LayoutKind kind_;
  std::vector<Joint> joints_;
};

struct Joint2d {
  double u = 0.0;  ///< pixels
  double v = 0.0;  ///< pixels
  double confidence = 0.0;
  bool valid = false;
};

struct Pose2dFrame {
  std::int64_t frame_index = 0;
  std::string camera_id;
  LayoutKind layout = LayoutKind::OP;
  std::vector<Joint2d> joints;  ///< indexed by layout position
};

/// 3x4 pinhole projection, world millimetres to homogeneous pixels.
struct CameraProjection {
  std::string camera_id;
  Eigen::Matrix<double, 3, 4> P = Eigen::Matrix<double, 3, 4>::Zero();

  Point2 project(const Point3& X) const;
  Point3 center() const;
  /// Unit direction of the viewing ray through a pixel.
  Eigen::Vector3d ray_direction(const Point2& pixel) const;
  /// Image of the principal axis.
  Point2 principal_point() const;

  /// P = K [R | -R C] from focal length (px), principal point, camera centre
  /// and a look-at target. World z is up.
  static CameraProjection look_at(std::string id, double focal_px, Point2 principal,
                                  const Point3& center, const Point3& target);
};

struct Joint3d {
  Point3 position;
  bool valid = false;
};

struct Pose3dFrame {
  std::int64_t frame_index = 0;
  double timestamp = 0.0;  ///< seconds
  LayoutKind layout = LayoutKind::GT;
  std::vector<Joint3d> joints;  ///< indexed by layout position

  const JointSetLayout& joint_layout() const { return JointSetLayout::get(layout); }
  /// nullptr when the joint is not part of the layout.
  const Joint3d* find(Joint j) const;
  /// Position of a valid joint; throws MissingObservation otherwise.
  Point3 at(Joint j) const;
  bool all_valid() const;
};

/// Builds a frame of the given layout from a joint lookup. Joints that the
/// lookup does not provide are marked invalid.
Pose3dFrame select_layout(const Pose3dFrame& source, LayoutKind target);

struct TriangulationOptions {
  double min_ray_angle_deg = 1.0;
  double min_confidence = 0.1;
};

struct Observation {
  Point2 pixel;
  const CameraProjection* camera = nullptr;
  bool valid = true;
};

struct Triangulation {
  Point3 point;
  /// Largest per-view reprojection distance (px).
  double residual_px = 0.0;
};

/// Linear DLT on the four projection constraints with Hartley normalisation
/// of both image and world coordinates.
Triangulation triangulate_joint(const Observation& a, const Observation& b,
                                const TriangulationOptions& opts = {});

/// Joint-wise triangulation. A 3D joint is valid iff both 2D joints are valid,
/// both confidences reach opts.min_confidence and triangulation succeeds.
Pose3dFrame triangulate_frame(const Pose2dFrame& fa, const Pose2dFrame& fb,
                              const CameraProjection& cam_a, const CameraProjection& cam_b,
                              double timestamp = 0.0, const TriangulationOptions& opts = {});

/// BP joints fill the 12 shared slots; the 13 remaining slots come from OP.
Pose3dFrame assemble_hybrid_pose(const Pose3dFrame& bp, const Pose3dFrame& op);

/// Midpoint of the two hip joints.
Point3 hip_center(const Pose3dFrame& pose);

}  // namespace stabilikit
