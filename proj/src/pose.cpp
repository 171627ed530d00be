#include "stabilikit/pose.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "stabilikit/error.hpp"

namespace stabilikit {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "Nose",   "Neck",    "RShoulder", "RElbow",    "RWrist", "LShoulder", "LElbow",
    "LWrist", "MidHip",  "RHip",      "RKnee",     "RAnkle", "LHip",      "LKnee",
    "LAnkle", "REye",    "LEye",      "REar",      "LEar",   "LBigToe",   "LSmallToe",
    "LHeel",  "RBigToe", "RSmallToe", "RHeel",
};

std::vector<Joint> op_joints() {
  std::vector<Joint> out;
  for (std::size_t i = 0; i < kJointCount; ++i) out.push_back(static_cast<Joint>(i));
  return out;
}

std::vector<Joint> bp_joints() {
  using enum Joint;
  return {RShoulder, RElbow, RWrist, LShoulder, LElbow, LWrist,
          RHip,      RKnee,  RAnkle, LHip,      LKnee,  LAnkle};
}

std::vector<Joint> gt_joints() {
  using enum Joint;
  auto out = bp_joints();
  for (Joint j : {Nose, Neck, MidHip, REar, LEar, LBigToe, LHeel, RBigToe, RHeel}) {
    out.push_back(j);
  }
  return out;
}

std::vector<Joint> hp_joints() {
  auto out = bp_joints();
  for (Joint j : op_joints()) {
    if (std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
  }
  return out;
}

Eigen::Vector4d homogeneous(const Point3& p) { return {p.x, p.y, p.z, 1.0}; }

// Similarity that moves the centroid of pts to the origin and sets their mean
// distance from it to sqrt(2). fallback_scale applies when all points coincide.
Eigen::Matrix3d hartley_transform(std::span<const Point2> pts, double fallback_scale) {
  Point2 c;
  for (const auto& p : pts) c += p;
  c = (1.0 / static_cast<double>(pts.size())) * c;
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += norm(p - c);
  mean_dist /= static_cast<double>(pts.size());
  const double s = mean_dist > 1e-12 ? std::numbers::sqrt2 / mean_dist : fallback_scale;
  Eigen::Matrix3d T;
  T << s, 0, -s * c.x, 0, s, -s * c.y, 0, 0, 1;
  return T;
}

}  // namespace

std::string_view joint_name(Joint j) { return kJointNames[static_cast<std::size_t>(j)]; }

std::optional<Joint> joint_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (kJointNames[i] == name) return static_cast<Joint>(i);
  }
  return std::nullopt;
}

std::string_view layout_name(LayoutKind kind) {
  switch (kind) {
    case LayoutKind::OP: return "OP";
    case LayoutKind::GT: return "GT";
    case LayoutKind::BP: return "BP";
    case LayoutKind::HP: return "HP";
  }
  return "?";
}

std::optional<LayoutKind> layout_from_name(std::string_view name) {
  for (auto k : {LayoutKind::OP, LayoutKind::GT, LayoutKind::BP, LayoutKind::HP}) {
    if (layout_name(k) == name) return k;
  }
  return std::nullopt;
}

JointSetLayout::JointSetLayout(LayoutKind kind, std::vector<Joint> joints)
    : kind_(kind), joints_(std::move(joints)) {}

const JointSetLayout& JointSetLayout::get(LayoutKind kind) {
  static const JointSetLayout op(LayoutKind::OP, op_joints());
  static const JointSetLayout gt(LayoutKind::GT, gt_joints());
  static const JointSetLayout bp(LayoutKind::BP, bp_joints());
  static const JointSetLayout hp(LayoutKind::HP, hp_joints());
  switch (kind) {
    case LayoutKind::OP: return op;
    case LayoutKind::GT: return gt;
    case LayoutKind::BP: return bp;
    case LayoutKind::HP: return hp;
  }
  return op;
}

std::optional<std::size_t> JointSetLayout::index_of(Joint j) const {
  const auto it = std::find(joints_.begin(), joints_.end(), j);
  if (it == joints_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - joints_.begin());
}

Point2 CameraProjection::project(const Point3& X) const {
  const Eigen::Vector3d h = P * homogeneous(X);
  return {h.x() / h.z(), h.y() / h.z()};
}

Point3 CameraProjection::center() const {
  const Eigen::Vector3d c = -P.leftCols<3>().partialPivLu().solve(P.col(3));
  return {c.x(), c.y(), c.z()};
}

Eigen::Vector3d CameraProjection::ray_direction(const Point2& pixel) const {
  return P.leftCols<3>().partialPivLu().solve(Eigen::Vector3d(pixel.x, pixel.y, 1.0)).normalized();
}

Point2 CameraProjection::principal_point() const {
  const Eigen::Vector3d x0 = P.leftCols<3>() * P.block<1, 3>(2, 0).transpose();
  return {x0.x() / x0.z(), x0.y() / x0.z()};
}

CameraProjection CameraProjection::look_at(std::string id, double focal_px, Point2 principal,
                                           const Point3& center, const Point3& target) {
  const Eigen::Vector3d c(center.x, center.y, center.z);
  const Eigen::Vector3d forward =
      (Eigen::Vector3d(target.x, target.y, target.z) - c).normalized();
  const Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitZ()).normalized();
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d R;
  R.row(0) = right.transpose();
  R.row(1) = down.transpose();
  R.row(2) = forward.transpose();
  Eigen::Matrix3d K;
  K << focal_px, 0, principal.x, 0, focal_px, principal.y, 0, 0, 1;
  CameraProjection cam;
  cam.camera_id = std::move(id);
  cam.P.leftCols<3>() = K * R;
  cam.P.col(3) = -K * R * c;
  return cam;
}

const Joint3d* Pose3dFrame::find(Joint j) const {
  const auto idx = joint_layout().index_of(j);
  if (!idx || *idx >= joints.size()) return nullptr;
  return &joints[*idx];
}

Point3 Pose3dFrame::at(Joint j) const {
  const Joint3d* jt = find(j);
  if (jt == nullptr || !jt->valid) {
    throw Error(ErrorCode::MissingObservation,
                "joint " + std::string(joint_name(j)) + " missing in frame " +
                    std::to_string(frame_index));
  }
  return jt->position;
}

bool Pose3dFrame::all_valid() const {
  return joints.size() == joint_layout().size() &&
         std::all_of(joints.begin(), joints.end(), [](const Joint3d& j) { return j.valid; });
}

Pose3dFrame select_layout(const Pose3dFrame& source, LayoutKind target) {
  Pose3dFrame out;
  out.frame_index = source.frame_index;
  out.timestamp = source.timestamp;
  out.layout = target;
  for (Joint j : JointSetLayout::get(target).joints()) {
    const Joint3d* src = source.find(j);
    out.joints.push_back(src != nullptr ? *src : Joint3d{});
  }
  return out;
}

Triangulation triangulate_joint(const Observation& a, const Observation& b,
                                const TriangulationOptions& opts) {
  if (!a.valid || !b.valid || a.camera == nullptr || b.camera == nullptr) {
    throw Error(ErrorCode::MissingObservation, "triangulation needs two valid observations");
  }
  const Point3 ca = a.camera->center();
  const Point3 cb = b.camera->center();
  const double baseline = euclidean_distance(ca, cb);
  const double cos_angle =
      std::clamp(a.camera->ray_direction(a.pixel).dot(b.camera->ray_direction(b.pixel)), -1.0, 1.0);
  const double angle = std::acos(std::abs(cos_angle));
  if (baseline < kGeomTolerance || angle < opts.min_ray_angle_deg * std::numbers::pi / 180.0) {
    throw Error(ErrorCode::DegenerateGeometry, "viewing rays are near-parallel");
  }

  // World similarity: camera-centre midpoint to the origin, half baseline to sqrt(3).
  const Point3 mid = 0.5 * (ca + cb);
  const double sw = std::sqrt(3.0) / (0.5 * baseline);
  Eigen::Matrix4d world_inv = Eigen::Matrix4d::Identity();
  world_inv.topLeftCorner<3, 3>() *= 1.0 / sw;
  world_inv.topRightCorner<3, 1>() = Eigen::Vector3d(mid.x, mid.y, mid.z);

  Eigen::Matrix4d A;
  int row = 0;
  for (const Observation* obs : {&a, &b}) {
    const auto& P = obs->camera->P;
    const double focal = P.block<1, 3>(0, 0).norm() / P.block<1, 3>(2, 0).norm();
    const std::array<Point2, 2> pts = {obs->pixel, obs->camera->principal_point()};
    const Eigen::Matrix3d T = hartley_transform(pts, std::numbers::sqrt2 / focal);
    const Eigen::Matrix<double, 3, 4> Pn = T * P * world_inv;
    const Eigen::Vector3d x = T * Eigen::Vector3d(obs->pixel.x, obs->pixel.y, 1.0);
    A.row(row++) = x.x() * Pn.row(2) - Pn.row(0);
    A.row(row++) = x.y() * Pn.row(2) - Pn.row(1);
  }
  const Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullV);
  const Eigen::Vector4d Xh = world_inv * svd.matrixV().col(3);
  if (std::abs(Xh.w()) < 1e-12 * Xh.head<3>().norm()) {
    throw Error(ErrorCode::DegenerateGeometry, "triangulated point at infinity");
  }
  Triangulation out;
  out.point = {Xh.x() / Xh.w(), Xh.y() / Xh.w(), Xh.z() / Xh.w()};
  out.residual_px = std::max(euclidean_distance(a.camera->project(out.point), a.pixel),
                             euclidean_distance(b.camera->project(out.point), b.pixel));
  return out;
}

Pose3dFrame triangulate_frame(const Pose2dFrame& fa, const Pose2dFrame& fb,
                              const CameraProjection& cam_a, const CameraProjection& cam_b,
                              double timestamp, const TriangulationOptions& opts) {
  if (fa.frame_index != fb.frame_index || fa.layout != fb.layout) {
    throw Error(ErrorCode::FrameMismatch, "views disagree on frame index or layout (frame " +
                                              std::to_string(fa.frame_index) + ")");
  }
  const std::size_t n = JointSetLayout::get(fa.layout).size();
  if (fa.joints.size() != n || fb.joints.size() != n) {
    throw Error(ErrorCode::FrameMismatch, "joint count does not match layout");
  }
  Pose3dFrame out;
  out.frame_index = fa.frame_index;
  out.timestamp = timestamp;
  out.layout = fa.layout;
  out.joints.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Joint2d& ja = fa.joints[i];
    const Joint2d& jb = fb.joints[i];
    if (!ja.valid || !jb.valid || ja.confidence < opts.min_confidence ||
        jb.confidence < opts.min_confidence) {
      continue;
    }
    try {
      const auto t = triangulate_joint({{ja.u, ja.v}, &cam_a, true}, {{jb.u, jb.v}, &cam_b, true},
                                       opts);
      out.joints[i] = {t.point, is_finite(t.point)};
    } catch (const Error&) {
      out.joints[i] = {};
    }
  }
  return out;
}

Pose3dFrame assemble_hybrid_pose(const Pose3dFrame& bp, const Pose3dFrame& op) {
  if (bp.layout != LayoutKind::BP || op.layout != LayoutKind::OP ||
      bp.frame_index != op.frame_index) {
    throw Error(ErrorCode::FrameMismatch, "hybrid pose needs BP and OP frames of the same index");
  }
  Pose3dFrame out;
  out.frame_index = op.frame_index;
  out.timestamp = op.timestamp;
  out.layout = LayoutKind::HP;
  for (Joint j : JointSetLayout::get(LayoutKind::HP).joints()) {
    const Joint3d* src = bp.find(j);
    if (src == nullptr) src = op.find(j);
    out.joints.push_back(src != nullptr ? *src : Joint3d{});
  }
  return out;
}

Point3 hip_center(const Pose3dFrame& pose) {
  return 0.5 * (pose.at(Joint::LHip) + pose.at(Joint::RHip));
}

}  // namespace stabilikit
