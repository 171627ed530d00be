#pragma once

/// \file com_model.hpp
/// \brief Segmental (Dempster) centre-of-mass model and leave-one-subject-out
/// splitting.

#include <span>
#include <string>
#include <vector>

#include "stabilikit/geometry.hpp"
#include "stabilikit/pose.hpp"

namespace stabilikit {

struct BodySegment {
  std::string name;
  Joint proximal;
  Joint distal;
  double mass_fraction = 0.0;  ///< of total body mass
  double com_ratio = 0.0;      ///< from the proximal end, fraction of segment length
};

/// Segment inertial table. Mass fractions sum to one and ratios lie in [0, 1].
class ComModel {
 public:
  /// Validates the table; throws InvalidArgument on violation.
  explicit ComModel(std::vector<BodySegment> segments);

  /// Twelve segments from Winter's anthropometric table (Dempster data):
  /// head-neck, trunk, and per side upper arm, forearm+hand, thigh, leg, foot.
  static ComModel winter();

  const std::vector<BodySegment>& segments() const noexcept { return segments_; }
  /// Distinct joints referenced by the table.
  std::vector<Joint> required_joints() const;

 private:
  std::vector<BodySegment> segments_;
};

/// Sum over segments of mass_fraction * (proximal + ratio * (distal - proximal)).
/// Throws MissingObservation naming every absent joint.
Point3 dempster_com(const Pose3dFrame& pose, const ComModel& model);

struct LosoSplit {
  std::string test_subject;
  std::vector<std::size_t> train;  ///< indices into the take list
  std::vector<std::size_t> test;
};

/// One split per distinct subject, in order of first appearance. Throws
/// InsufficientSubjects for fewer than two subjects.
std::vector<LosoSplit> loso_splits(std::span<const std::string> subject_of_take);

}  // namespace stabilikit
