#include "stabilikit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "stabilikit/error.hpp"

namespace stabilikit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> subjects_in_order(std::span<const TakeData> takes) {
  std::vector<std::string> out;
  for (const auto& t : takes) {
    if (std::find(out.begin(), out.end(), t.subject_id) == out.end()) out.push_back(t.subject_id);
  }
  return out;
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> com_errors(const TakeData& take, const ComEstimator& estimator) {
  take.check_alignment();
  std::vector<double> out;
  for (std::size_t i = 0; i < take.hp_pose.size() && i < take.gt_com.size(); ++i) {
    if (!take.gt_com[i].valid) continue;
    try {
      out.push_back(euclidean_distance(estimator(take.hp_pose[i]), take.gt_com[i].position));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MissingObservation) throw;
    }
  }
  return out;
}

std::vector<double> hip_baseline_errors(const TakeData& take) {
  take.check_alignment();
  std::vector<double> out;
  for (std::size_t i = 0; i < take.hp_pose.size() && i < take.gt_com.size(); ++i) {
    if (!take.gt_com[i].valid) continue;
    try {
      out.push_back(euclidean_distance(hip_center(take.hp_pose[i]), take.gt_com[i].position));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MissingObservation) throw;
    }
  }
  return out;
}

std::vector<TrainSample> com_training_set(std::span<const TakeData> takes,
                                          std::span<const std::size_t> indices) {
  std::vector<TrainSample> out;
  for (std::size_t ti : indices) {
    const TakeData& t = takes[ti];
    t.check_alignment();
    for (std::size_t i = 0; i < t.hp_pose.size() && i < t.gt_com.size(); ++i) {
      if (t.gt_com[i].valid && t.hp_pose[i].all_valid()) {
        out.push_back({t.hp_pose[i], t.gt_com[i].position});
      }
    }
  }
  return out;
}

std::vector<ComFoldReport> loso_comnet(
    std::span<const TakeData> takes, const TrainConfig& cfg,
    const std::function<void(const std::string&, const EpochLog&)>& on_epoch) {
  std::vector<std::string> subject_of_take;
  for (const auto& t : takes) subject_of_take.push_back(t.subject_id);
  const ComEstimator dempster = ComEstimator::dempster();

  std::vector<ComFoldReport> out;
  for (const LosoSplit& split : loso_splits(subject_of_take)) {
    ComFoldReport fold;
    fold.test_subject = split.test_subject;
    const std::vector<TrainSample> train = com_training_set(takes, split.train);
    EpochCallback cb;
    if (on_epoch) cb = [&](const EpochLog& e) { on_epoch(split.test_subject, e); };
    TrainResult<float> result = comnet_train<float>(train, cfg, cb);
    fold.log = std::move(result.log);
    fold.params = std::make_shared<const ComNetParams>(std::move(result.params));
    const ComEstimator net = ComEstimator::network(fold.params);
    for (std::size_t ti : split.test) {
      const auto a = com_errors(takes[ti], net);
      const auto b = com_errors(takes[ti], dempster);
      const auto c = hip_baseline_errors(takes[ti]);
      fold.comnet_errors.insert(fold.comnet_errors.end(), a.begin(), a.end());
      fold.dempster_errors.insert(fold.dempster_errors.end(), b.begin(), b.end());
      fold.hip_errors.insert(fold.hip_errors.end(), c.begin(), c.end());
    }
    out.push_back(std::move(fold));
  }
  return out;
}

std::string_view sweep_metric_name(SweepMetric m) {
  return m == SweepMetric::cop_error ? "cop_error" : "bos_iou";
}

std::optional<SweepMetric> sweep_metric_from_name(std::string_view name) {
  if (name == "cop_error") return SweepMetric::cop_error;
  if (name == "bos_iou") return SweepMetric::bos_iou;
  return std::nullopt;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> out;
  for (int i = 0; i <= 12; ++i) out.push_back(2.5 * i);
  return out;
}

SweepResult threshold_sweep(std::span<const TakeData> takes, PoseSource localization,
                            SweepMetric metric, std::span<const double> thresholds,
                            const SweepOptions& opts) {
  if (takes.empty()) throw Error(ErrorCode::EmptyDataset, "threshold sweep over no takes");
  if (thresholds.empty()) throw Error(ErrorCode::InvalidArgument, "no thresholds");
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (!(thresholds[k] >= 0.0) || (k > 0 && !(thresholds[k] > thresholds[k - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "thresholds must be >= 0 and strictly increasing");
    }
  }

  SweepResult res;
  res.metric = metric;
  res.localization = localization;
  res.thresholds.assign(thresholds.begin(), thresholds.end());
  res.subjects = subjects_in_order(takes);
  const std::size_t nt = thresholds.size();
  const std::size_t ns = res.subjects.size();
  std::vector<std::vector<std::vector<double>>> per_subject(
      nt, std::vector<std::vector<double>>(ns));
  res.gaps.assign(nt, 0);

  for (const TakeData& take : takes) {
    take.check_alignment();
    if (take.frame_count() > 0 && (take.im_left.empty() || take.im_right.empty())) {
      throw Error(ErrorCode::InvalidArgument, "take " + take.take_id + " lacks predicted pressure");
    }
    const auto& gt_pose = localization_stream(take, PoseSource::GT);
    const auto& pred_pose = localization_stream(take, localization);
    const std::size_t s =
        static_cast<std::size_t>(std::find(res.subjects.begin(), res.subjects.end(),
                                           take.subject_id) - res.subjects.begin());
    for (std::size_t i = 0; i < take.frame_count(); ++i) {
      const auto gt_feet = place_feet(gt_pose[i], take.gt_left[i], take.gt_right[i], opts.placement);
      const auto pr_feet =
          place_feet(pred_pose[i], take.im_left[i], take.im_right[i], opts.placement);
      if (!gt_feet || !pr_feet) {
        for (auto& g : res.gaps) ++g;
        continue;
      }
      const std::array<PlacedPressureMap, 2> gt{PlacedPressureMap{&take.gt_left[i], (*gt_feet)[0]},
                                                PlacedPressureMap{&take.gt_right[i], (*gt_feet)[1]}};
      const std::array<PlacedPressureMap, 2> pr{PlacedPressureMap{&take.im_left[i], (*pr_feet)[0]},
                                                PlacedPressureMap{&take.im_right[i], (*pr_feet)[1]}};
      for (std::size_t k = 0; k < nt; ++k) {
        try {
          const LocalizedPressureField fg = localized_field(gt, thresholds[k]);
          const LocalizedPressureField fp = localized_field(pr, thresholds[k]);
          const double v = metric == SweepMetric::cop_error
                               ? euclidean_distance(center_of_pressure(fg), center_of_pressure(fp))
                               : bos_iou(fg, fp, opts.raster_cell_mm);
          per_subject[k][s].push_back(v);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::EmptyField && e.code() != ErrorCode::DegenerateInput) throw;
          ++res.gaps[k];
        }
      }
    }
  }

  res.subject_mean.assign(nt, std::vector<double>(ns, kNaN));
  res.mean.assign(nt, kNaN);
  res.median.assign(nt, kNaN);
  res.frames.assign(nt, 0);
  for (std::size_t k = 0; k < nt; ++k) {
    std::vector<double> pooled;
    for (std::size_t s = 0; s < ns; ++s) {
      res.subject_mean[k][s] = mean_of(per_subject[k][s]);
      pooled.insert(pooled.end(), per_subject[k][s].begin(), per_subject[k][s].end());
    }
    res.frames[k] = pooled.size();
    if (!pooled.empty()) {
      res.mean[k] = mean_of(pooled);
      res.median[k] = median(pooled);
    }
  }
  return res;
}

namespace {

std::vector<double> cop_metric(const StabilitySeries& s) {
  std::vector<double> out;
  out.reserve(s.frames.size());
  for (const auto& f : s.frames) out.push_back(f.cop_metric_valid() ? f.com_to_cop : kNaN);
  return out;
}

std::vector<double> bos_metric(const StabilitySeries& s) {
  std::vector<double> out;
  out.reserve(s.frames.size());
  for (const auto& f : s.frames) out.push_back(f.bos_metric_valid() ? f.com_to_bos : kNaN);
  return out;
}

// Accumulates one metric of one combination across folds.
struct CellAccumulator {
  std::vector<double> r;
  std::vector<double> p;
  std::vector<double> abs_err;
  std::size_t skipped = 0;
  std::size_t dropped = 0;

  void add_fold(const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::isfinite(x[i]) && std::isfinite(y[i])) abs_err.push_back(std::abs(x[i] - y[i]));
    }
    try {
      const CorrelationResult c = pearson(x, y);
      r.push_back(c.r);
      p.push_back(c.p);
      dropped += c.dropped;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroVariance && e.code() != ErrorCode::NoValidFrames &&
          e.code() != ErrorCode::InvalidArgument) {
        throw;
      }
      ++skipped;
    }
  }

  StudyCell finish() const {
    StudyCell c;
    c.folds = r.size();
    c.skipped_folds = skipped;
    c.frames = abs_err.size();
    c.dropped = dropped;
    if (!r.empty()) {
      const ErrorStats rs = error_stats(r);
      c.r_mean = rs.mean;
      c.r_std = rs.std;
      c.p_mean = mean_of(p);
    } else {
      c.r_mean = c.r_std = c.p_mean = kNaN;
    }
    if (!abs_err.empty()) {
      const ErrorStats es = error_stats(abs_err);
      c.mae = es.mean;
      c.mae_std = es.std;
    } else {
      c.mae = c.mae_std = kNaN;
    }
    return c;
  }
};

}  // namespace

StudyReport combinatorial_study(std::span<const TakeData> takes, const StudyOptions& opts,
                                std::span<const ChannelSelection> combinations) {
  const auto all = ChannelSelection::all();
  if (combinations.empty()) combinations = all;
  const ChannelSelection reference{};

  StudyReport report;
  std::vector<const TakeData*> kept;
  std::vector<StabilitySeries> reference_series;
  for (const TakeData& t : takes) {
    StabilitySeries ref = compute_series(t, reference, opts.series);
    const double n = static_cast<double>(std::max<std::size_t>(ref.frames.size(), 1));
    const double frac = std::min(static_cast<double>(ref.valid_cop_frames()),
                                 static_cast<double>(ref.valid_bos_frames())) / n;
    if (ref.frames.empty() || frac < opts.min_valid_fraction) {
      report.excluded_takes.push_back(t.take_id);
      continue;
    }
    kept.push_back(&t);
    reference_series.push_back(std::move(ref));
  }
  if (kept.empty()) throw Error(ErrorCode::EmptyDataset, "no take passes the validity filter");
  for (const TakeData* t : kept) {
    if (std::find(report.subjects.begin(), report.subjects.end(), t->subject_id) ==
        report.subjects.end()) {
      report.subjects.push_back(t->subject_id);
    }
  }

  for (const ChannelSelection& ch : combinations) {
    CellAccumulator cop;
    CellAccumulator bos;
    for (const std::string& subject : report.subjects) {
      SeriesOptions so = opts.series;
      if (opts.im_com_for_subject && ch.com == Source::IM) so.im_com = opts.im_com_for_subject(subject);
      std::vector<double> xc, yc, xb, yb;
      for (std::size_t k = 0; k < kept.size(); ++k) {
        if (kept[k]->subject_id != subject) continue;
        const StabilitySeries& ref = reference_series[k];
        const StabilitySeries s = ch == reference ? ref : compute_series(*kept[k], ch, so);
        const auto rc = cop_metric(ref);
        const auto rb = bos_metric(ref);
        const auto sc = cop_metric(s);
        const auto sb = bos_metric(s);
        xc.insert(xc.end(), rc.begin(), rc.end());
        yc.insert(yc.end(), sc.begin(), sc.end());
        xb.insert(xb.end(), rb.begin(), rb.end());
        yb.insert(yb.end(), sb.begin(), sb.end());
      }
      cop.add_fold(xc, yc);
      bos.add_fold(xb, yb);
    }
    report.rows.push_back({ch, cop.finish(), bos.finish()});
  }
  return report;
}

}  // namespace stabilikit
