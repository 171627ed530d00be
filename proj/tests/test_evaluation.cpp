#include <doctest.h>

#include <cmath>

#include "stabilikit/error.hpp"
#include "stabilikit/evaluation.hpp"
#include "stabilikit/synth.hpp"

using namespace stabilikit;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::IoError;
}

std::vector<TakeData> cohort(int subjects, std::vector<MotionProgram> programs, double duration,
                             const NoiseSpec& noise = {}, std::uint64_t seed = 1) {
  SynthRig rig;
  rig.seed = seed;
  NoiseSpec n = noise;
  n.seed = seed;
  std::vector<TakeData> out;
  for (auto& t : generate_cohort(rig, subjects, programs, duration, n)) out.push_back(std::move(t.data));
  return out;
}

void shift_pose(std::vector<Pose3dFrame>& poses, Point3 d) {
  for (auto& p : poses) {
    for (auto& j : p.joints) j.position += d;
  }
}

}  // namespace

TEST_CASE("threshold grid") {
  const auto g = default_threshold_grid();
  REQUIRE(g.size() == 13);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 30.0);
  CHECK(g[4] == 10.0);
  CHECK(sweep_metric_from_name(sweep_metric_name(SweepMetric::bos_iou)) == SweepMetric::bos_iou);
}

TEST_CASE("sweep self-comparison") {
  const auto takes = cohort(2, {MotionProgram::sway}, 10.0);
  const auto grid = default_threshold_grid();
  const auto cop = threshold_sweep(takes, PoseSource::GT, SweepMetric::cop_error, grid);
  const auto iou = threshold_sweep(takes, PoseSource::GT, SweepMetric::bos_iou, grid);
  CHECK(cop.subjects.size() == 2);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (cop.frames[k] == 0) continue;
    CHECK(cop.mean[k] == 0.0);
    CHECK(iou.mean[k] == 1.0);
  }
  CHECK(cop.frames[4] == 100);
  CHECK(cop.gaps[4] == 0);
  // Nothing exceeds a very high threshold: every frame is a gap.
  const std::vector<double> high{1e6};
  const auto none = threshold_sweep(takes, PoseSource::GT, SweepMetric::cop_error, high);
  CHECK(none.frames[0] == 0);
  CHECK(none.gaps[0] == 100);
  CHECK(std::isnan(none.mean[0]));
}

TEST_CASE("sweep under a rigid localization shift") {
  auto takes = cohort(1, {MotionProgram::static_stance, MotionProgram::sway}, 10.0);
  for (auto& t : takes) shift_pose(t.hp_pose, {20.0, 0.0, 0.0});
  const auto grid = default_threshold_grid();
  const auto r = threshold_sweep(takes, PoseSource::HP, SweepMetric::cop_error, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (r.frames[k] == 0) continue;
    CHECK(std::abs(r.mean[k] - 20.0) < 0.5);
    CHECK(std::abs(r.median[k] - 20.0) < 0.5);
  }
}

TEST_CASE("IoU falls as the shift grows") {
  const auto base = cohort(1, {MotionProgram::static_stance}, 4.0);
  double prev = 2.0;
  const std::vector<double> t10{10.0};
  for (double shift : {0.0, 10.0, 20.0, 40.0}) {
    auto takes = base;
    shift_pose(takes[0].hp_pose, {shift, 0.0, 0.0});
    const auto r = threshold_sweep(takes, PoseSource::HP, SweepMetric::bos_iou, t10);
    CHECK(r.mean[0] < prev);
    prev = r.mean[0];
  }
}

TEST_CASE("sweep errors and determinism") {
  const auto takes = cohort(1, {MotionProgram::sway}, 4.0);
  const std::vector<double> bad{5.0, 5.0};
  CHECK(code_of([&] { threshold_sweep(takes, PoseSource::GT, SweepMetric::cop_error, bad); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] {
          threshold_sweep(std::vector<TakeData>{}, PoseSource::GT, SweepMetric::cop_error,
                          default_threshold_grid());
        }) == ErrorCode::EmptyDataset);
  const auto a = threshold_sweep(takes, PoseSource::OP, SweepMetric::bos_iou, default_threshold_grid());
  const auto b = threshold_sweep(takes, PoseSource::OP, SweepMetric::bos_iou, default_threshold_grid());
  CHECK(a.mean == b.mean);
  CHECK(a.subject_mean == b.subject_mean);
}

TEST_CASE("com errors") {
  const auto takes = cohort(1, {MotionProgram::lunge}, 6.0);
  const auto e = com_errors(takes[0], ComEstimator::dempster());
  REQUIRE(e.size() == 30);
  for (double v : e) CHECK(v < 1e-6);
  const auto h = hip_baseline_errors(takes[0]);
  REQUIRE(h.size() == 30);
  for (double v : h) CHECK(v > 10.0);
  const std::vector<std::size_t> idx{0};
  CHECK(com_training_set(takes, idx).size() == 30);
}

TEST_CASE("study GT-GT-GT row") {
  const auto takes = cohort(2, {MotionProgram::sway, MotionProgram::weight_shift}, 20.0);
  const auto rep = combinatorial_study(takes);
  REQUIRE(rep.rows.size() == 8);
  CHECK(rep.rows[0].channels.label() == "GT-GT-GT");
  for (const auto* c : {&rep.rows[0].com_to_cop, &rep.rows[0].com_to_bos}) {
    CHECK(c->r_mean == 1.0);
    CHECK(c->r_std == 0.0);
    CHECK(c->mae == 0.0);
    CHECK(c->folds == 2);
  }
  CHECK(rep.subjects.size() == 2);
  CHECK(code_of([] { combinatorial_study(std::vector<TakeData>{}); }) == ErrorCode::EmptyDataset);
}

TEST_CASE("noise on one channel lowers r for its column") {
  NoiseSpec n;
  n.pressure_kpa = 5.0;
  n.joint_mm = 5.0;
  n.com_mm = 5.0;
  const auto takes = cohort(2, {MotionProgram::sway, MotionProgram::lunge}, 30.0, n);
  const std::vector<ChannelSelection> combos{*ChannelSelection::parse("IM-GT-GT"),
                                             *ChannelSelection::parse("GT-IM-GT"),
                                             *ChannelSelection::parse("GT-GT-IM")};
  const auto rep = combinatorial_study(takes, {}, combos);
  for (const auto& row : rep.rows) {
    INFO(row.channels.label());
    CHECK(row.com_to_cop.r_mean < 1.0);
    CHECK(row.com_to_bos.r_mean < 1.0);
    CHECK(row.com_to_cop.mae > 0.0);
  }
}

TEST_CASE("study excludes takes with too few valid frames") {
  auto takes = cohort(2, {MotionProgram::sway}, 10.0);
  for (std::size_t i = 0; i < 10; ++i) std::fill(takes[0].gt_left[i].values.begin(), takes[0].gt_left[i].values.end(), 0.0);
  for (std::size_t i = 0; i < 10; ++i) std::fill(takes[0].gt_right[i].values.begin(), takes[0].gt_right[i].values.end(), 0.0);
  const auto rep = combinatorial_study(takes);
  REQUIRE(rep.excluded_takes.size() == 1);
  CHECK(rep.excluded_takes[0] == takes[0].take_id);
}
