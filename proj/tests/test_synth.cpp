#include <doctest.h>

#include <algorithm>

#include "stabilikit/error.hpp"
#include "stabilikit/stability.hpp"
#include "stabilikit/synth.hpp"

using namespace stabilikit;

namespace {

SynthTake make(MotionProgram p, double duration, std::uint64_t seed = 1, const NoiseSpec& n = {}) {
  SynthRig rig;
  rig.seed = seed;
  return generate_take(rig, SynthSubject::sample("S01", seed), p, duration, n);
}

bool same_poses(const std::vector<Pose3dFrame>& a, const std::vector<Pose3dFrame>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].joints.size() != b[i].joints.size()) return false;
    for (std::size_t j = 0; j < a[i].joints.size(); ++j) {
      if (!(a[i].joints[j].position == b[i].joints[j].position) ||
          a[i].joints[j].valid != b[i].joints[j].valid) {
        return false;
      }
    }
  }
  return true;
}

bool same_maps(const std::vector<PressureMap>& a, const std::vector<PressureMap>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].values != b[i].values) return false;
  }
  return true;
}

double total_force(const TakeData& d, std::size_t i) {
  double kpa = 0.0;
  for (const auto* maps : {&d.gt_left, &d.gt_right}) {
    const auto& m = (*maps)[i];
    for (double v : m.values) kpa += v;
  }
  const double cell_m2 = 25e-6;
  return kpa * 1e3 * cell_m2;
}

}  // namespace

TEST_CASE("program names") {
  for (auto p : all_programs()) CHECK(program_from_name(program_name(p)) == p);
  CHECK_THROWS_AS(program_from_name("moonwalk"), Error);
  SynthRig rig;
  try {
    generate_take(rig, SynthSubject::sample("S01", 1), MotionProgram::sway, 0.0);
    FAIL("expected InvalidProgram");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidProgram);
  }
}

TEST_CASE("subjects stay in the documented height range") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto subj = SynthSubject::sample("S", s);
    CHECK(subj.height_mm >= 1540.0);
    CHECK(subj.height_mm <= 1800.0);
  }
}

TEST_CASE("static stance is symmetric") {
  SynthRig rig;
  SynthSubject subj;
  subj.id = "S01";
  subj.toe_out_rad = 0.0;
  const auto t = generate_take(rig, subj, MotionProgram::static_stance, 2.0);
  for (const auto& a : t.truth) {
    const Point2 mid = 0.5 * (a.feet[0].to_world(150.0, 52.5) + a.feet[1].to_world(150.0, 52.5));
    CHECK(std::abs(a.cop.y - mid.y) < 1.0);
    CHECK(norm(floor_projection(a.com) - a.cop) < 1.0);
  }
}

TEST_CASE("weight shift moves the CoM and CoP from left to right") {
  const auto t = make(MotionProgram::weight_shift, 30.0);
  // The CoP leads the CoM and briefly moves against it while the shift
  // accelerates, so only the CoM is monotone.
  for (std::size_t i = 1; i < t.truth.size(); ++i) CHECK(t.truth[i].com.y <= t.truth[i - 1].com.y + 1e-9);
  CHECK(t.truth.front().cop.y > 0.0);
  CHECK(t.truth.back().cop.y < 0.0);
}

TEST_CASE("single-support lift") {
  const auto t = make(MotionProgram::single_support_lift, 30.0);
  const auto s = compute_series(t.data, {});
  std::size_t single = 0;
  for (std::size_t i = 0; i < t.truth.size(); ++i) {
    const auto& a = t.truth[i];
    if (a.double_support) continue;
    ++single;
    CHECK(a.bos->area() < t.truth[0].bos->area());
    CHECK(s.frames[i].com_to_bos < s.frames[0].com_to_bos);
    for (double v : t.data.gt_right[i].values) CHECK(v == 0.0);
  }
  CHECK(single > 0);
}

TEST_CASE("generated takes are physically consistent") {
  for (auto p : all_programs()) {
    const auto t = make(p, 20.0, 5);
    INFO(program_name(p));
    const double f0 = total_force(t.data, 0);
    for (std::size_t i = 0; i < t.truth.size(); ++i) {
      const auto& a = t.truth[i];
      CHECK(point_in_polygon(a.cop, *a.bos) != Containment::outside);
      CHECK(std::abs(total_force(t.data, i) - f0) <= 1e-6 * f0);
      CHECK(a.total_force_n == doctest::Approx(f0).epsilon(1e-6));
    }
  }
}

TEST_CASE("generation is deterministic") {
  const auto a = make(MotionProgram::lunge, 10.0, 3);
  const auto b = make(MotionProgram::lunge, 10.0, 3);
  CHECK(same_poses(a.data.gt_pose, b.data.gt_pose));
  CHECK(same_poses(a.data.hp_pose, b.data.hp_pose));
  CHECK(same_maps(a.data.gt_left, b.data.gt_left));
  const auto c = make(MotionProgram::lunge, 10.0, 4);
  CHECK_FALSE(same_poses(a.data.gt_pose, c.data.gt_pose));
}

TEST_CASE("noise_model channel isolation") {
  const auto clean = make(MotionProgram::sway, 10.0);

  const auto same = noise_model(clean, NoiseSpec{});
  CHECK(same_poses(same.data.hp_pose, clean.data.hp_pose));
  CHECK(same_maps(same.data.im_left, clean.data.im_left));
  CHECK(same.data.im_com.size() == clean.data.im_com.size());

  NoiseSpec pressure;
  pressure.pressure_kpa = 5.0;
  const auto p = noise_model(clean, pressure);
  CHECK(same_poses(p.data.hp_pose, clean.data.hp_pose));
  CHECK(same_poses(p.data.op_pose, clean.data.op_pose));
  CHECK(same_poses(p.data.gt_pose, clean.data.gt_pose));
  CHECK(same_maps(p.data.gt_left, clean.data.gt_left));
  CHECK_FALSE(same_maps(p.data.im_left, clean.data.im_left));
  for (const auto& m : p.data.im_left) {
    for (double v : m.values) CHECK(v >= 0.0);
  }

  NoiseSpec joints;
  joints.joint_mm = 10.0;
  const auto j = noise_model(clean, joints);
  CHECK_FALSE(same_poses(j.data.hp_pose, clean.data.hp_pose));
  const auto s0 = compute_series(clean.data, {});
  const auto s1 = compute_series(j.data, {});
  for (std::size_t i = 0; i < s0.frames.size(); ++i) CHECK(s0.frames[i].cop == s1.frames[i].cop);

  NoiseSpec com;
  com.com_mm = 5.0;
  const auto c = noise_model(clean, com);
  REQUIRE(c.data.im_com.size() == clean.data.gt_com.size());
  CHECK_FALSE(c.data.im_com[0].position == clean.data.gt_com[0].position);

  NoiseSpec bad;
  bad.joint_mm = -1.0;
  CHECK_THROWS_AS(noise_model(clean, bad), Error);
}

TEST_CASE("cohort layout") {
  SynthRig rig;
  const auto c = generate_cohort(rig, 3, {MotionProgram::sway, MotionProgram::lunge}, 4.0);
  REQUIRE(c.size() == 6);
  CHECK(c[0].data.subject_id == "S01");
  CHECK(c[5].data.subject_id == "S03");
  CHECK(c[1].data.take_id == "S01_lunge");
  for (const auto& t : c) CHECK_NOTHROW(t.data.check_alignment());
}
