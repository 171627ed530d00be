#pragma once

/// \file take.hpp
/// \brief Time-aligned per-take streams shared by the stability, evaluation,
/// synthesis and I/O layers.

#include <cstdint>
#include <string>
#include <vector>

#include "stabilikit/geometry.hpp"
#include "stabilikit/pose.hpp"
#include "stabilikit/pressure.hpp"

namespace stabilikit {

struct ComFrame {
  std::int64_t frame_index = 0;
  double timestamp = 0.0;
  Point3 position;
  bool valid = false;
};

/// One performance. Every non-empty stream has one entry per frame, in the
/// same frame order.
///
/// gt_* streams come from motion capture and the instrumented insoles; hp_pose,
/// op_pose and im_* streams are image-based estimates. im_com is optional: when
/// empty, the image-based CoM is estimated from hp_pose.
struct TakeData {
  std::string subject_id;
  std::string take_id;
  double sample_rate_hz = 5.0;

  std::vector<Pose3dFrame> gt_pose;  ///< GT layout
  std::vector<Pose3dFrame> hp_pose;  ///< HP layout
  std::vector<Pose3dFrame> op_pose;  ///< OP layout, optional
  std::vector<ComFrame> gt_com;
  std::vector<ComFrame> im_com;

  std::vector<PressureMap> gt_left;
  std::vector<PressureMap> gt_right;
  std::vector<PressureMap> im_left;
  std::vector<PressureMap> im_right;

  /// Length of the frame axis, defined by the first non-empty stream among
  /// gt_com, gt_pose, hp_pose and gt_left.
  std::size_t frame_count() const;
  std::int64_t frame_index(std::size_t i) const;
  double timestamp(std::size_t i) const;

  /// Throws StreamMisalignment naming the first stream and position whose
  /// length or frame index disagrees with the frame axis.
  void check_alignment() const;
};

}  // namespace stabilikit
