#include "stabilikit/com_model.hpp"

#include <algorithm>
#include <cmath>

#include "stabilikit/error.hpp"

namespace stabilikit {

ComModel::ComModel(std::vector<BodySegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw Error(ErrorCode::InvalidArgument, "segment table is empty");
  double total = 0.0;
  for (const auto& s : segments_) {
    if (!(s.mass_fraction > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "segment " + s.name + ": mass fraction must be > 0");
    }
    if (!(s.com_ratio >= 0.0 && s.com_ratio <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "segment " + s.name + ": ratio outside [0, 1]");
    }
    total += s.mass_fraction;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw Error(ErrorCode::InvalidArgument,
                "mass fractions sum to " + std::to_string(total) + ", expected 1");
  }
}

ComModel ComModel::winter() {
  using enum Joint;
  // Winter, Biomechanics and Motor Control of Human Movement, Table 4.1.
  return ComModel({
      {"head_neck", Neck, Nose, 0.081, 1.000},
      {"trunk", MidHip, Neck, 0.497, 0.500},
      {"upper_arm_r", RShoulder, RElbow, 0.028, 0.436},
      {"upper_arm_l", LShoulder, LElbow, 0.028, 0.436},
      {"forearm_hand_r", RElbow, RWrist, 0.022, 0.682},
      {"forearm_hand_l", LElbow, LWrist, 0.022, 0.682},
      {"thigh_r", RHip, RKnee, 0.100, 0.433},
      {"thigh_l", LHip, LKnee, 0.100, 0.433},
      {"leg_r", RKnee, RAnkle, 0.0465, 0.433},
      {"leg_l", LKnee, LAnkle, 0.0465, 0.433},
      {"foot_r", RAnkle, RBigToe, 0.0145, 0.500},
      {"foot_l", LAnkle, LBigToe, 0.0145, 0.500},
  });
}

std::vector<Joint> ComModel::required_joints() const {
  std::vector<Joint> out;
  for (const auto& s : segments_) {
    for (Joint j : {s.proximal, s.distal}) {
      if (std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
    }
  }
  return out;
}

Point3 dempster_com(const Pose3dFrame& pose, const ComModel& model) {
  std::string missing;
  for (Joint j : model.required_joints()) {
    const Joint3d* jt = pose.find(j);
    if (jt == nullptr || !jt->valid) {
      missing += (missing.empty() ? "" : ",") + std::string(joint_name(j));
    }
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::MissingObservation,
                "frame " + std::to_string(pose.frame_index) + " lacks joints: " + missing);
  }
  Point3 com;
  for (const auto& s : model.segments()) {
    const Point3 p = pose.at(s.proximal);
    const Point3 d = pose.at(s.distal);
    com += s.mass_fraction * (p + s.com_ratio * (d - p));
  }
  return com;
}

std::vector<LosoSplit> loso_splits(std::span<const std::string> subject_of_take) {
  std::vector<std::string> subjects;
  for (const auto& s : subject_of_take) {
    if (std::find(subjects.begin(), subjects.end(), s) == subjects.end()) subjects.push_back(s);
  }
  if (subjects.size() < 2) {
    throw Error(ErrorCode::InsufficientSubjects, "leave-one-subject-out needs >= 2 subjects");
  }
  std::vector<LosoSplit> splits;
  for (const auto& subject : subjects) {
    LosoSplit split;
    split.test_subject = subject;
    for (std::size_t i = 0; i < subject_of_take.size(); ++i) {
      (subject_of_take[i] == subject ? split.test : split.train).push_back(i);
    }
    splits.push_back(std::move(split));
  }
  return splits;
}

}  // namespace stabilikit
