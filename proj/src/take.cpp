#include "stabilikit/take.hpp"

#include <stdexcept>
#include <utility>

#include "stabilikit/error.hpp"

namespace stabilikit {

namespace {

// Stream that defines the frame axis: the first non-empty of gt_com, gt_pose,
// hp_pose and gt_left.
template <typename F>
auto with_axis(const TakeData& t, F f) {
  if (!t.gt_com.empty()) return f(t.gt_com.size(), [&](std::size_t i) {
    return std::pair{t.gt_com[i].frame_index, t.gt_com[i].timestamp};
  });
  if (!t.gt_pose.empty()) return f(t.gt_pose.size(), [&](std::size_t i) {
    return std::pair{t.gt_pose[i].frame_index, t.gt_pose[i].timestamp};
  });
  if (!t.hp_pose.empty()) return f(t.hp_pose.size(), [&](std::size_t i) {
    return std::pair{t.hp_pose[i].frame_index, t.hp_pose[i].timestamp};
  });
  return f(t.gt_left.size(), [&](std::size_t i) {
    return std::pair{t.gt_left[i].frame_index,
                     static_cast<double>(t.gt_left[i].frame_index) / t.sample_rate_hz};
  });
}

}  // namespace

std::size_t TakeData::frame_count() const {
  return with_axis(*this, [](std::size_t n, auto) { return n; });
}

std::int64_t TakeData::frame_index(std::size_t i) const {
  if (i >= frame_count()) throw std::out_of_range("frame position out of range");
  return with_axis(*this, [i](std::size_t, auto at) { return at(i).first; });
}

double TakeData::timestamp(std::size_t i) const {
  if (i >= frame_count()) throw std::out_of_range("frame position out of range");
  return with_axis(*this, [i](std::size_t, auto at) { return at(i).second; });
}

namespace {

template <typename Frame, typename IndexOf>
void check_stream(const char* name, const std::vector<Frame>& stream, const TakeData& take,
                  IndexOf index_of) {
  if (stream.empty()) return;
  const std::size_t n = take.frame_count();
  if (stream.size() != n) {
    throw Error(ErrorCode::StreamMisalignment,
                std::string(name) + " has " + std::to_string(stream.size()) + " frames, expected " +
                    std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (index_of(stream[i]) != take.frame_index(i)) {
      throw Error(ErrorCode::StreamMisalignment,
                  std::string(name) + " frame index " + std::to_string(index_of(stream[i])) +
                      " at position " + std::to_string(i) + ", expected " +
                      std::to_string(take.frame_index(i)));
    }
  }
}

}  // namespace

void TakeData::check_alignment() const {
  if (!(sample_rate_hz > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample rate must be > 0");
  const auto pose_idx = [](const Pose3dFrame& f) { return f.frame_index; };
  const auto com_idx = [](const ComFrame& f) { return f.frame_index; };
  const auto map_idx = [](const PressureMap& m) { return m.frame_index; };
  check_stream("gt_pose", gt_pose, *this, pose_idx);
  check_stream("hp_pose", hp_pose, *this, pose_idx);
  check_stream("op_pose", op_pose, *this, pose_idx);
  check_stream("gt_com", gt_com, *this, com_idx);
  check_stream("im_com", im_com, *this, com_idx);
  check_stream("gt_left", gt_left, *this, map_idx);
  check_stream("gt_right", gt_right, *this, map_idx);
  check_stream("im_left", im_left, *this, map_idx);
  check_stream("im_right", im_right, *this, map_idx);
}

}  // namespace stabilikit
