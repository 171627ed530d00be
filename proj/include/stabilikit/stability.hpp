#pragma once

/// \file stability.hpp
/// \brief CoMtoCoP / CoMtoBoS per frame, their series over a take, and the
/// low-frequency trend.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stabilikit/com_model.hpp"
#include "stabilikit/comnet.hpp"
#include "stabilikit/geometry.hpp"
#include "stabilikit/pressure.hpp"
#include "stabilikit/take.hpp"

namespace stabilikit {

/// Distance between the floor-projected CoM and the CoP.
double com_to_cop(const Point2& com2d, const Point2& cop);

/// Signed distance from the floor-projected CoM to the BoS boundary; positive
/// inside.
double com_to_bos(const Point2& com2d, const ConvexPolygon& bos);

enum class Source : std::uint8_t { GT, IM };

/// Provenance of the three inputs, in the order pressure, localization, CoM.
struct ChannelSelection {
  Source pressure = Source::GT;
  Source localization = Source::GT;
  Source com = Source::GT;

  friend bool operator==(const ChannelSelection&, const ChannelSelection&) = default;

  /// "GT-IM-GT" style label.
  std::string label() const;
  static std::optional<ChannelSelection> parse(std::string_view label);
  /// The eight combinations, GT-GT-GT first, IM-IM-IM last.
  static std::array<ChannelSelection, 8> all();
};

/// Which pose stream drives foot localization.
enum class PoseSource : std::uint8_t { GT, HP, OP };

std::string_view pose_source_name(PoseSource s);
std::optional<PoseSource> pose_source_from_name(std::string_view name);

/// Image-based CoM from an HP pose: the segmental table or a trained CoMNet.
struct ComEstimator {
  enum class Kind { dempster, comnet };

  Kind kind = Kind::dempster;
  ComModel model = ComModel::winter();
  std::shared_ptr<const ComNetParams> comnet;

  Point3 operator()(const Pose3dFrame& pose) const;
  static ComEstimator dempster(ComModel model = ComModel::winter());
  static ComEstimator network(std::shared_ptr<const ComNetParams> params);
};

struct StabilityFrame {
  std::int64_t frame_index = 0;
  double timestamp = 0.0;
  Point2 com2d;
  Point2 cop;
  std::optional<ConvexPolygon> bos;
  double com_to_cop = 0.0;  ///< meaningful when cop_metric_valid()
  double com_to_bos = 0.0;  ///< meaningful when bos_metric_valid()
  bool com_valid = false;
  bool cop_valid = false;
  bool bos_valid = false;
  /// Set by lowpass_trend when the metric was too short a segment to filter
  /// and was passed through unchanged.
  bool cop_passthrough = false;
  bool bos_passthrough = false;

  bool cop_metric_valid() const { return com_valid && cop_valid; }
  bool bos_metric_valid() const { return com_valid && bos_valid; }
};

struct StabilitySeries {
  std::string take_id;
  std::string subject_id;
  double sample_rate_hz = 5.0;
  ChannelSelection channels;
  std::vector<StabilityFrame> frames;

  std::size_t valid_cop_frames() const;
  std::size_t valid_bos_frames() const;
};

struct SeriesOptions {
  double threshold_kpa = 10.0;
  PlacementOptions placement;
  ComEstimator im_com;
};

/// Feet placed from the ankle and big-toe joints of one pose stream. Returns
/// nothing when a joint is missing or the placement is degenerate.
std::optional<std::array<FootPlacement, 2>> place_feet(const Pose3dFrame& pose,
                                                       const PressureMap& left,
                                                       const PressureMap& right,
                                                       const PlacementOptions& opts = {});

/// Pose stream of a take for the given localization source. Throws
/// InvalidArgument if the take lacks it.
const std::vector<Pose3dFrame>& localization_stream(const TakeData& take, PoseSource source);

/// Per-frame metrics for one channel combination. Frames whose field is empty,
/// whose hull is degenerate or whose joints are missing are kept but flagged
/// invalid. Throws StreamMisalignment for misaligned streams and
/// InvalidArgument if an IM channel is requested but the take lacks it.
StabilitySeries compute_series(const TakeData& take, const ChannelSelection& channels,
                               const SeriesOptions& opts = {});

inline constexpr double kDefaultTrendCutoffHz = 0.2;
inline constexpr int kDefaultTrendOrder = 4;

/// Zero-phase low-pass of both metric channels. Each run of consecutive valid
/// frames is filtered on its own; runs shorter than three settling lengths are
/// copied and flagged. Throws SeriesTooShort when no run of either metric is
/// long enough.
StabilitySeries lowpass_trend(const StabilitySeries& series,
                              double cutoff_hz = kDefaultTrendCutoffHz,
                              int order = kDefaultTrendOrder);

}  // namespace stabilikit
