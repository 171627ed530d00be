#include "stabilikit/stability.hpp"

#include <cmath>

#include "stabilikit/error.hpp"
#include "stabilikit/filter.hpp"

namespace stabilikit {

double com_to_cop(const Point2& com2d, const Point2& cop) { return euclidean_distance(com2d, cop); }

double com_to_bos(const Point2& com2d, const ConvexPolygon& bos) {
  return signed_distance_to_boundary(com2d, bos);
}

std::string ChannelSelection::label() const {
  const auto s = [](Source x) { return x == Source::GT ? "GT" : "IM"; };
  return std::string(s(pressure)) + "-" + s(localization) + "-" + s(com);
}

std::optional<ChannelSelection> ChannelSelection::parse(std::string_view label) {
  for (const auto& c : all()) {
    if (c.label() == label) return c;
  }
  return std::nullopt;
}

std::array<ChannelSelection, 8> ChannelSelection::all() {
  std::array<ChannelSelection, 8> out;
  for (int i = 0; i < 8; ++i) {
    out[static_cast<std::size_t>(i)] = {(i & 4) ? Source::IM : Source::GT,
                                        (i & 2) ? Source::IM : Source::GT,
                                        (i & 1) ? Source::IM : Source::GT};
  }
  return out;
}

std::string_view pose_source_name(PoseSource s) {
  switch (s) {
    case PoseSource::GT: return "GT";
    case PoseSource::HP: return "HP";
    case PoseSource::OP: return "OP";
  }
  return "?";
}

std::optional<PoseSource> pose_source_from_name(std::string_view name) {
  for (PoseSource s : {PoseSource::GT, PoseSource::HP, PoseSource::OP}) {
    if (pose_source_name(s) == name) return s;
  }
  return std::nullopt;
}

Point3 ComEstimator::operator()(const Pose3dFrame& pose) const {
  if (kind == Kind::comnet) {
    if (!comnet) throw Error(ErrorCode::InvalidArgument, "CoMNet estimator without parameters");
    return comnet_forward(pose, *comnet);
  }
  return dempster_com(pose, model);
}

ComEstimator ComEstimator::dempster(ComModel model) {
  ComEstimator e;
  e.model = std::move(model);
  return e;
}

ComEstimator ComEstimator::network(std::shared_ptr<const ComNetParams> params) {
  ComEstimator e;
  e.kind = Kind::comnet;
  e.comnet = std::move(params);
  return e;
}

std::size_t StabilitySeries::valid_cop_frames() const {
  std::size_t n = 0;
  for (const auto& f : frames) n += f.cop_metric_valid() ? 1 : 0;
  return n;
}

std::size_t StabilitySeries::valid_bos_frames() const {
  std::size_t n = 0;
  for (const auto& f : frames) n += f.bos_metric_valid() ? 1 : 0;
  return n;
}

std::optional<std::array<FootPlacement, 2>> place_feet(const Pose3dFrame& pose,
                                                       const PressureMap& left,
                                                       const PressureMap& right,
                                                       const PlacementOptions& opts) {
  const auto joint = [&](Joint j) -> const Joint3d* {
    const Joint3d* p = pose.find(j);
    return (p != nullptr && p->valid) ? p : nullptr;
  };
  const Joint3d* la = joint(Joint::LAnkle);
  const Joint3d* lt = joint(Joint::LBigToe);
  const Joint3d* ra = joint(Joint::RAnkle);
  const Joint3d* rt = joint(Joint::RBigToe);
  if (!la || !lt || !ra || !rt) return std::nullopt;
  try {
    return std::array<FootPlacement, 2>{localize_foot(left, la->position, lt->position, opts),
                                        localize_foot(right, ra->position, rt->position, opts)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegeneratePlacement) return std::nullopt;
    throw;
  }
}

const std::vector<Pose3dFrame>& localization_stream(const TakeData& take, PoseSource source) {
  const std::vector<Pose3dFrame>* s = nullptr;
  switch (source) {
    case PoseSource::GT: s = &take.gt_pose; break;
    case PoseSource::HP: s = &take.hp_pose; break;
    case PoseSource::OP: s = &take.op_pose; break;
  }
  if (s->empty() && take.frame_count() > 0) {
    throw Error(ErrorCode::InvalidArgument, "take " + take.take_id + " has no " +
                                                std::string(pose_source_name(source)) +
                                                " pose stream");
  }
  return *s;
}

StabilitySeries compute_series(const TakeData& take, const ChannelSelection& channels,
                               const SeriesOptions& opts) {
  take.check_alignment();
  const std::size_t n = take.frame_count();

  const bool im_pressure = channels.pressure == Source::IM;
  const auto& left = im_pressure ? take.im_left : take.gt_left;
  const auto& right = im_pressure ? take.im_right : take.gt_right;
  if (n > 0 && (left.empty() || right.empty())) {
    throw Error(ErrorCode::InvalidArgument,
                "take " + take.take_id + " lacks " + (im_pressure ? "predicted" : "GT") +
                    " pressure maps");
  }
  const auto& loc_pose = localization_stream(
      take, channels.localization == Source::GT ? PoseSource::GT : PoseSource::HP);
  const bool im_com_stream = channels.com == Source::IM && !take.im_com.empty();
  if (n > 0 && channels.com == Source::GT && take.gt_com.empty()) {
    throw Error(ErrorCode::InvalidArgument, "take " + take.take_id + " lacks GT CoM");
  }
  if (n > 0 && channels.com == Source::IM && !im_com_stream && take.hp_pose.empty()) {
    throw Error(ErrorCode::InvalidArgument, "take " + take.take_id + " has no image-based CoM");
  }

  StabilitySeries series;
  series.take_id = take.take_id;
  series.subject_id = take.subject_id;
  series.sample_rate_hz = take.sample_rate_hz;
  series.channels = channels;
  series.frames.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    StabilityFrame& f = series.frames[i];
    f.frame_index = take.frame_index(i);
    f.timestamp = take.timestamp(i);

    if (channels.com == Source::GT) {
      f.com_valid = take.gt_com[i].valid;
      f.com2d = floor_projection(take.gt_com[i].position);
    } else if (im_com_stream) {
      f.com_valid = take.im_com[i].valid;
      f.com2d = floor_projection(take.im_com[i].position);
    } else {
      try {
        f.com2d = floor_projection(opts.im_com(take.hp_pose[i]));
        f.com_valid = is_finite(f.com2d);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::MissingObservation) throw;
      }
    }

    const auto feet = place_feet(loc_pose[i], left[i], right[i], opts.placement);
    if (feet) {
      const std::array<PlacedPressureMap, 2> placed{PlacedPressureMap{&left[i], (*feet)[0]},
                                                    PlacedPressureMap{&right[i], (*feet)[1]}};
      try {
        const LocalizedPressureField field = localized_field(placed, opts.threshold_kpa);
        f.cop = center_of_pressure(field);
        f.cop_valid = true;
        f.bos = base_of_support(field);
        f.bos_valid = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyField && e.code() != ErrorCode::DegenerateInput) throw;
      }
    }

    if (f.cop_metric_valid()) f.com_to_cop = com_to_cop(f.com2d, f.cop);
    if (f.bos_metric_valid()) f.com_to_bos = com_to_bos(f.com2d, *f.bos);
  }
  return series;
}

namespace {

// Filters every run of consecutive valid values; returns whether any run was
// long enough to be filtered.
template <typename IsValid, typename Value, typename Flag>
bool filter_runs(std::vector<StabilityFrame>& frames, const ButterworthLowpass& lp,
                 std::size_t min_run, IsValid is_valid, Value value, Flag flag) {
  bool any = false;
  std::size_t i = 0;
  while (i < frames.size()) {
    if (!is_valid(frames[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < frames.size() && is_valid(frames[j])) ++j;
    if (j - i >= min_run) {
      std::vector<double> x;
      x.reserve(j - i);
      for (std::size_t k = i; k < j; ++k) x.push_back(value(frames[k]));
      const std::vector<double> y = lp.filtfilt(x);
      for (std::size_t k = i; k < j; ++k) value(frames[k]) = y[k - i];
      any = true;
    } else {
      for (std::size_t k = i; k < j; ++k) flag(frames[k]) = true;
    }
    i = j;
  }
  return any;
}

}  // namespace

StabilitySeries lowpass_trend(const StabilitySeries& series, double cutoff_hz, int order) {
  const ButterworthLowpass lp =
      ButterworthLowpass::for_zero_phase(order, cutoff_hz, series.sample_rate_hz);
  const std::size_t min_run = 3 * lp.settling_samples();

  StabilitySeries out = series;
  const bool cop_ok = filter_runs(
      out.frames, lp, min_run, [](const StabilityFrame& f) { return f.cop_metric_valid(); },
      [](StabilityFrame& f) -> double& { return f.com_to_cop; },
      [](StabilityFrame& f) -> bool& { return f.cop_passthrough; });
  const bool bos_ok = filter_runs(
      out.frames, lp, min_run, [](const StabilityFrame& f) { return f.bos_metric_valid(); },
      [](StabilityFrame& f) -> double& { return f.com_to_bos; },
      [](StabilityFrame& f) -> bool& { return f.bos_passthrough; });
  if (!cop_ok && !bos_ok) {
    throw Error(ErrorCode::SeriesTooShort,
                "no run of valid frames reaches " + std::to_string(min_run) + " samples");
  }
  return out;
}

}  // namespace stabilikit
