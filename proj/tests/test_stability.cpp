#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "stabilikit/error.hpp"
#include "stabilikit/stability.hpp"
#include "stabilikit/statistics.hpp"
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

ConvexPolygon square100() {
  return convex_hull(std::vector<Point2>{{0, 0}, {100, 0}, {100, 100}, {0, 100}});
}

SynthTake take_of(MotionProgram p, double duration, std::uint64_t seed = 1) {
  SynthRig rig;
  rig.seed = seed;
  return generate_take(rig, SynthSubject::sample("S01", seed), p, duration);
}

StabilitySeries series_of(std::vector<double> cop, std::vector<double> bos) {
  StabilitySeries s;
  s.take_id = "t";
  for (std::size_t i = 0; i < cop.size(); ++i) {
    StabilityFrame f;
    f.frame_index = static_cast<std::int64_t>(i);
    f.timestamp = static_cast<double>(i) / 5.0;
    f.com_to_cop = cop[i];
    f.com_to_bos = bos[i];
    f.com_valid = true;
    f.cop_valid = std::isfinite(cop[i]);
    f.bos_valid = std::isfinite(bos[i]);
    s.frames.push_back(f);
  }
  return s;
}

}  // namespace

TEST_CASE("com_to_cop") {
  CHECK(com_to_cop({3, 3}, {3, 3}) == 0.0);
  CHECK(com_to_cop({30, 40}, {0, 0}) == 50.0);
}

TEST_CASE("com_to_bos") {
  const auto sq = square100();
  CHECK(com_to_bos({50, 50}, sq) == doctest::Approx(50.0));
  CHECK(com_to_bos({120, 50}, sq) == doctest::Approx(-20.0));
  CHECK(com_to_bos({100, 30}, sq) == 0.0);
}

TEST_CASE("com_to_bos is continuous through the boundary") {
  const auto sq = square100();
  double prev = com_to_bos({90, 50}, sq);
  for (double x = 90.5; x <= 110.0; x += 0.5) {
    const double v = com_to_bos({x, 50}, sq);
    CHECK(v < prev);
    CHECK(std::abs(v - prev) <= 0.5 + 1e-12);
    prev = v;
  }
}

TEST_CASE("com_to_bos never exceeds the grid maximum") {
  const auto tri = convex_hull(std::vector<Point2>{{0, 0}, {120, 10}, {40, 90}});
  double best = -INFINITY;
  for (double x = 0; x <= 120; x += 0.25) {
    for (double y = 0; y <= 90; y += 0.25) best = std::max(best, com_to_bos({x, y}, tri));
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 120.0);
  for (int i = 0; i < 500; ++i) CHECK(com_to_bos({u(rng), u(rng)}, tri) <= best + 0.5);
}

TEST_CASE("metrics are invariant to joint rigid transforms") {
  const auto sq = square100();
  const double th = 1.1;
  const auto tf = [&](Point2 p) {
    return Point2{std::cos(th) * p.x - std::sin(th) * p.y + 40, std::sin(th) * p.x + std::cos(th) * p.y - 9};
  };
  std::vector<Point2> moved;
  for (const auto& v : sq.vertices()) moved.push_back(tf(v));
  const auto msq = convex_hull(moved);
  for (Point2 c : {Point2{30, 70}, Point2{-15, 40}, Point2{100, 100}}) {
    CHECK(com_to_bos(tf(c), msq) == doctest::Approx(com_to_bos(c, sq)).epsilon(1e-9));
    CHECK(com_to_cop(tf(c), tf({5, 5})) == doctest::Approx(com_to_cop(c, {5, 5})).epsilon(1e-12));
  }
}

TEST_CASE("ChannelSelection") {
  const auto all = ChannelSelection::all();
  CHECK(all[0].label() == "GT-GT-GT");
  std::set<std::string> labels;
  for (const auto& c : all) {
    labels.insert(c.label());
    CHECK(ChannelSelection::parse(c.label())->label() == c.label());
  }
  CHECK(labels.size() == 8);
  CHECK_FALSE(ChannelSelection::parse("GT-XX-GT"));
  CHECK_FALSE(ChannelSelection::parse("GT-GT"));
  CHECK(pose_source_from_name("HP") == PoseSource::HP);
  CHECK_FALSE(pose_source_from_name("hp2"));
}

TEST_CASE("compute_series matches the synthetic truth") {
  const auto take = take_of(MotionProgram::sway, 20.0);
  const auto s = compute_series(take.data, {});
  REQUIRE(s.frames.size() == take.truth.size());
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    const auto& f = s.frames[i];
    const auto& a = take.truth[i];
    REQUIRE(f.cop_metric_valid());
    REQUIRE(f.bos_metric_valid());
    const Point2 com = floor_projection(a.com);
    CHECK(std::abs(f.com_to_cop - com_to_cop(com, a.cop)) < 1e-6);
    CHECK(std::abs(f.com_to_bos - com_to_bos(com, *a.bos)) < 1e-6);
    CHECK((f.com_to_bos > 0) == (point_in_polygon(f.com2d, *f.bos) == Containment::inside));
    if (i > 0) CHECK(f.frame_index > s.frames[i - 1].frame_index);
  }
}

TEST_CASE("balanced standing frame") {
  const auto take = take_of(MotionProgram::static_stance, 4.0);
  const auto s = compute_series(take.data, {});
  const auto& a = take.truth[0];
  CHECK(std::abs(s.frames[0].com_to_cop - euclidean_distance(floor_projection(a.com), a.cop)) < 1e-9);
}

TEST_CASE("GT-GT-GT against itself") {
  const auto take = take_of(MotionProgram::weight_shift, 30.0);
  const auto s = compute_series(take.data, {});
  std::vector<double> cop, bos;
  for (const auto& f : s.frames) {
    cop.push_back(f.com_to_cop);
    bos.push_back(f.com_to_bos);
  }
  const auto rc = pearson(cop, cop);
  const auto rb = pearson(bos, bos);
  CHECK(rc.r == 1.0);
  CHECK(rb.r == 1.0);
  CHECK(rc.mae == 0.0);
  CHECK(rb.mae == 0.0);
}

TEST_CASE("all-invalid pressure gives no valid frames") {
  auto take = take_of(MotionProgram::sway, 6.0);
  for (auto* maps : {&take.data.gt_left, &take.data.gt_right}) {
    for (auto& m : *maps) std::fill(m.values.begin(), m.values.end(), 0.0);
  }
  const auto s = compute_series(take.data, {});
  CHECK(s.valid_cop_frames() == 0);
  CHECK(s.valid_bos_frames() == 0);
  std::vector<double> cop;
  for (const auto& f : s.frames) cop.push_back(f.cop_metric_valid() ? f.com_to_cop : NAN);
  CHECK(code_of([&] { pearson(cop, cop); }) == ErrorCode::NoValidFrames);
}

TEST_CASE("compute_series channel handling") {
  auto take = take_of(MotionProgram::sway, 6.0);
  const auto im = *ChannelSelection::parse("IM-IM-IM");
  // No im_com stream: the image CoM comes from the segmental model on HP joints.
  const auto s = compute_series(take.data, im);
  CHECK(s.valid_cop_frames() == s.frames.size());
  CHECK(s.channels.label() == "IM-IM-IM");

  take.data.hp_pose.clear();
  CHECK(code_of([&] { compute_series(take.data, im); }) == ErrorCode::InvalidArgument);

  auto bad = take_of(MotionProgram::sway, 6.0);
  bad.data.gt_left.pop_back();
  CHECK(code_of([&] { compute_series(bad.data, {}); }) == ErrorCode::StreamMisalignment);
}

TEST_CASE("missing joints invalidate only the affected frames") {
  auto take = take_of(MotionProgram::sway, 6.0);
  auto& p = take.data.gt_pose[3];
  p.joints[*p.joint_layout().index_of(Joint::LAnkle)].valid = false;
  const auto s = compute_series(take.data, {});
  CHECK_FALSE(s.frames[3].cop_valid);
  CHECK(s.frames[2].cop_valid);
  CHECK(s.valid_cop_frames() == s.frames.size() - 1);
}

TEST_CASE("lowpass_trend") {
  const std::size_t n = 400;
  SUBCASE("constant series is unchanged") {
    const auto s = series_of(std::vector<double>(n, 12.5), std::vector<double>(n, -3.0));
    const auto t = lowpass_trend(s);
    REQUIRE(t.frames.size() == n);
    for (const auto& f : t.frames) {
      CHECK(f.com_to_cop == doctest::Approx(12.5).epsilon(1e-12));
      CHECK(f.com_to_bos == doctest::Approx(-3.0).epsilon(1e-12));
    }
  }
  SUBCASE("1 Hz is removed, 0.05 Hz kept") {
    std::vector<double> hi(n), lo(n);
    for (std::size_t i = 0; i < n; ++i) {
      hi[i] = 10.0 + std::sin(2 * std::numbers::pi * 1.0 * i / 5.0);
      lo[i] = std::sin(2 * std::numbers::pi * 0.05 * i / 5.0);
    }
    const auto t = lowpass_trend(series_of(hi, lo));
    double max_hi = 0.0;
    double max_lo = 0.0;
    for (std::size_t i = 50; i < n - 50; ++i) {
      max_hi = std::max(max_hi, std::abs(t.frames[i].com_to_cop - 10.0));
      max_lo = std::max(max_lo, std::abs(t.frames[i].com_to_bos));
    }
    CHECK(max_hi < 0.05);
    CHECK(max_lo > 0.95);
  }
  SUBCASE("gaps split the series and short runs pass through") {
    std::vector<double> cop(n, 1.0);
    for (std::size_t i = 0; i < 20; ++i) cop[i] = static_cast<double>(i);
    cop[20] = NAN;
    const auto t = lowpass_trend(series_of(cop, std::vector<double>(n, 2.0)));
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(t.frames[i].cop_passthrough);
      CHECK(t.frames[i].com_to_cop == static_cast<double>(i));
    }
    CHECK_FALSE(t.frames[20].cop_metric_valid());
    CHECK_FALSE(t.frames[100].cop_passthrough);
    CHECK(t.frames[100].com_to_cop == doctest::Approx(1.0));
  }
  SUBCASE("too short") {
    const auto s = series_of(std::vector<double>(30, 1.0), std::vector<double>(30, 1.0));
    CHECK(code_of([&] { lowpass_trend(s); }) == ErrorCode::SeriesTooShort);
    CHECK_THROWS_AS(lowpass_trend(series_of(std::vector<double>(n, 1.0), std::vector<double>(n, 1.0)), 3.0), Error);
  }
}

TEST_CASE("ComEstimator") {
  const auto take = take_of(MotionProgram::lunge, 4.0);
  const auto est = ComEstimator::dempster();
  CHECK(norm(est(take.data.gt_pose[0]) - take.data.gt_com[0].position) < 1e-9);
  CHECK_THROWS_AS(ComEstimator::network(nullptr)(take.data.hp_pose[0]), Error);
}
