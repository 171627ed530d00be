#pragma once

/// \file evaluation.hpp
/// \brief CoM error summaries, CoP / BoS threshold sweeps and the
/// combinatorial GT/IM correlation study.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stabilikit/comnet.hpp"
#include "stabilikit/stability.hpp"
#include "stabilikit/statistics.hpp"
#include "stabilikit/take.hpp"

namespace stabilikit {

// ---------------------------------------------------------------------------
// CoM

/// 3D distance between an estimator applied to hp_pose and the GT CoM, over
/// frames where both exist.
std::vector<double> com_errors(const TakeData& take, const ComEstimator& estimator);

/// Same, with the hip centre of hp_pose standing in for the CoM.
std::vector<double> hip_baseline_errors(const TakeData& take);

/// (hp_pose, gt_com) pairs from the given takes, valid frames only.
std::vector<TrainSample> com_training_set(std::span<const TakeData> takes,
                                          std::span<const std::size_t> indices);

struct ComFoldReport {
  std::string test_subject;
  std::shared_ptr<const ComNetParams> params;
  std::vector<EpochLog> log;
  std::vector<double> comnet_errors;
  std::vector<double> dempster_errors;
  std::vector<double> hip_errors;
};

/// Leave-one-subject-out CoMNet training and evaluation. on_epoch receives
/// the fold's test subject alongside each epoch log.
std::vector<ComFoldReport> loso_comnet(
    std::span<const TakeData> takes, const TrainConfig& cfg,
    const std::function<void(const std::string&, const EpochLog&)>& on_epoch = {});

// ---------------------------------------------------------------------------
// Threshold sweeps

enum class SweepMetric { cop_error, bos_iou };

std::string_view sweep_metric_name(SweepMetric m);
std::optional<SweepMetric> sweep_metric_from_name(std::string_view name);

/// 0 to 30 kPa in steps of 2.5.
std::vector<double> default_threshold_grid();

struct SweepOptions {
  PlacementOptions placement;
  double raster_cell_mm = kDefaultRasterCellMm;
};

struct SweepResult {
  SweepMetric metric = SweepMetric::cop_error;
  PoseSource localization = PoseSource::GT;
  std::vector<double> thresholds;
  std::vector<std::string> subjects;
  /// [threshold][subject]; NaN when the subject has no usable frame.
  std::vector<std::vector<double>> subject_mean;
  std::vector<double> mean;    ///< over pooled frames
  std::vector<double> median;  ///< over pooled frames
  std::vector<std::size_t> frames;  ///< usable frames per threshold
  std::vector<std::size_t> gaps;    ///< frames skipped per threshold
};

/// For each threshold, thresholds both the GT and the predicted pressure,
/// places GT maps with GT joints and predicted maps with the chosen pose
/// stream, and compares the CoP (distance) or BoS (IoU). Frames where either
/// side fails are gaps. Throws InvalidArgument for non-increasing
/// thresholds, EmptyDataset for no takes.
SweepResult threshold_sweep(std::span<const TakeData> takes, PoseSource localization,
                            SweepMetric metric, std::span<const double> thresholds,
                            const SweepOptions& opts = {});

// ---------------------------------------------------------------------------
// Combinatorial study

struct StudyCell {
  double r_mean = 0.0;
  double r_std = 0.0;   ///< across folds
  double p_mean = 0.0;
  double mae = 0.0;     ///< pooled over frames
  double mae_std = 0.0;
  std::size_t folds = 0;          ///< folds that produced a correlation
  std::size_t skipped_folds = 0;  ///< folds without variance or pairs
  std::size_t frames = 0;
  std::size_t dropped = 0;
};

struct StudyRow {
  ChannelSelection channels;
  StudyCell com_to_cop;
  StudyCell com_to_bos;
};

struct StudyOptions {
  SeriesOptions series;
  /// Takes whose GT-GT-GT series has a lower fraction of valid frames (for
  /// either metric) are left out.
  double min_valid_fraction = 0.9;
  /// Image-based CoM estimator used for the fold of a given test subject.
  /// Defaults to series.im_com for every fold.
  std::function<ComEstimator(const std::string&)> im_com_for_subject;
};

struct StudyReport {
  std::vector<std::string> subjects;
  std::vector<std::string> excluded_takes;
  std::vector<StudyRow> rows;
};

/// Pearson r and MAE of every channel combination against GT-GT-GT. Each
/// subject's takes form one fold; r is averaged over folds and MAE pooled
/// over frames. Throws EmptyDataset when no take survives the filter.
StudyReport combinatorial_study(std::span<const TakeData> takes, const StudyOptions& opts = {},
                                std::span<const ChannelSelection> combinations = {});

}  // namespace stabilikit
