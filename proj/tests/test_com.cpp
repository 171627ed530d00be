#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "grad_check.hpp"
#include "stabilikit/com_model.hpp"
#include "stabilikit/comnet.hpp"
#include "stabilikit/error.hpp"
#include "stabilikit/synth.hpp"

using namespace stabilikit;

namespace {

Pose3dFrame random_pose(LayoutKind layout, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> xy(-300.0, 300.0);
  std::uniform_real_distribution<double> z(0.0, 1800.0);
  Pose3dFrame f;
  f.layout = layout;
  f.joints.resize(JointSetLayout::get(layout).size());
  for (auto& j : f.joints) j = {{xy(rng), xy(rng), z(rng)}, true};
  return f;
}

void set(Pose3dFrame& p, Joint j, Point3 v) { p.joints[*p.joint_layout().index_of(j)] = {v, true}; }

}  // namespace

TEST_CASE("Winter table is a valid model") {
  const ComModel m = ComModel::winter();
  double sum = 0.0;
  for (const auto& s : m.segments()) {
    CHECK(s.mass_fraction > 0.0);
    CHECK(s.com_ratio >= 0.0);
    CHECK(s.com_ratio <= 1.0);
    sum += s.mass_fraction;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  for (Joint j : m.required_joints()) CHECK(JointSetLayout::get(LayoutKind::GT).contains(j));
  CHECK_THROWS_AS(ComModel({{"a", Joint::Neck, Joint::MidHip, 0.5, 0.5}}), Error);
  CHECK_THROWS_AS(ComModel({{"a", Joint::Neck, Joint::MidHip, 1.0, 1.5}}), Error);
}

TEST_CASE("dempster_com single and two-segment models") {
  Pose3dFrame p;
  p.layout = LayoutKind::OP;
  p.joints.resize(25);
  set(p, Joint::MidHip, {0, 0, 0});
  set(p, Joint::Neck, {0, 0, 1000});
  CHECK(dempster_com(p, ComModel({{"trunk", Joint::MidHip, Joint::Neck, 1.0, 0.5}})) ==
        Point3{0, 0, 500});

  set(p, Joint::RHip, {1, 0, 0});
  set(p, Joint::LHip, {0, 1, 0});
  const ComModel two({{"a", Joint::MidHip, Joint::RHip, 0.5, 0.5},
                      {"b", Joint::MidHip, Joint::LHip, 0.5, 0.5}});
  const Point3 c = dempster_com(p, two);
  CHECK(c.x == doctest::Approx(0.25));
  CHECK(c.y == doctest::Approx(0.25));
  CHECK(c.z == 0.0);
}

TEST_CASE("dempster_com mirrored T-pose lies on x = 0") {
  std::mt19937_64 rng(3);
  Pose3dFrame p = random_pose(LayoutKind::GT, rng);
  const auto& l = p.joint_layout();
  const std::vector<std::pair<Joint, Joint>> mirror = {
      {Joint::LShoulder, Joint::RShoulder}, {Joint::LElbow, Joint::RElbow},
      {Joint::LWrist, Joint::RWrist},       {Joint::LHip, Joint::RHip},
      {Joint::LKnee, Joint::RKnee},         {Joint::LAnkle, Joint::RAnkle},
      {Joint::LBigToe, Joint::RBigToe},     {Joint::LHeel, Joint::RHeel},
      {Joint::LEar, Joint::REar},           {Joint::LEye, Joint::REye},
      {Joint::LSmallToe, Joint::RSmallToe}};
  for (auto [a, b] : mirror) {
    if (!l.contains(a)) continue;
    Point3 v = p.at(a);
    set(p, b, {-v.x, v.y, v.z});
  }
  for (Joint j : {Joint::Nose, Joint::Neck, Joint::MidHip}) {
    if (l.contains(j)) set(p, j, {0.0, p.at(j).y, p.at(j).z});
  }
  CHECK(std::abs(dempster_com(p, ComModel::winter()).x) < 1e-9);
}

TEST_CASE("dempster_com errors and equivariance") {
  std::mt19937_64 rng(5);
  Pose3dFrame p = random_pose(LayoutKind::GT, rng);
  const Point3 c = dempster_com(p, ComModel::winter());
  Pose3dFrame moved = p;
  for (auto& j : moved.joints) j.position += Point3{10, -20, 30};
  CHECK(norm(dempster_com(moved, ComModel::winter()) - (c + Point3{10, -20, 30})) < 1e-9);

  p.joints[*p.joint_layout().index_of(Joint::LKnee)].valid = false;
  try {
    dempster_com(p, ComModel::winter());
    FAIL("expected MissingObservation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingObservation);
    CHECK(std::string(e.what()).find("LKnee") != std::string::npos);
  }
}

TEST_CASE("loso_splits") {
  std::vector<std::string> subj;
  for (int s = 0; s < 10; ++s) {
    for (int t = 0; t < 3; ++t) subj.push_back("S" + std::to_string(s));
  }
  const auto splits = loso_splits(subj);
  CHECK(splits.size() == 10);
  std::vector<int> seen(subj.size(), 0);
  for (const auto& sp : splits) {
    CHECK(sp.test.size() == 3);
    CHECK(sp.train.size() + sp.test.size() == subj.size());
    for (auto i : sp.test) {
      CHECK(subj[i] == sp.test_subject);
      ++seen[i];
    }
    for (auto i : sp.train) CHECK(subj[i] != sp.test_subject);
  }
  for (int s : seen) CHECK(s == 1);

  const std::vector<std::string> two{"a", "a", "a", "b", "b", "b"};
  CHECK(loso_splits(two).size() == 2);
  const std::vector<std::string> one{"a", "a"};
  CHECK_THROWS_AS(loso_splits(one), Error);
}

TEST_CASE("comnet zero network predicts the hip centre") {
  std::mt19937_64 rng(1);
  const auto pose = random_pose(LayoutKind::HP, rng);
  const auto params = ComNetParams::zeros(LayoutKind::HP, 16, 0.5);
  const Point3 out = comnet_forward(pose, params);
  CHECK(out == hip_center(pose));
}

TEST_CASE("comnet eval mode is deterministic and translation equivariant") {
  std::mt19937_64 rng(2);
  const auto pose = random_pose(LayoutKind::HP, rng);
  auto params = MlpParams<double>::initialized(LayoutKind::HP, 32, 0.5, 7);
  const Point3 a = comnet_forward(pose, params);
  const Point3 b = comnet_forward(pose, params);
  CHECK(a == b);
  Pose3dFrame moved = pose;
  for (auto& j : moved.joints) j.position += Point3{100, 50, -20};
  CHECK(norm(comnet_forward(moved, params) - (a + Point3{100, 50, -20})) < 1e-9);

  const auto bp = select_layout(pose, LayoutKind::BP);
  CHECK_THROWS_AS(comnet_forward(bp, params), Error);
  Pose3dFrame broken = pose;
  broken.joints[4].valid = false;
  CHECK_THROWS_AS(comnet_forward(broken, params), Error);
  CHECK(pose_features(pose).size() == 75);
  CHECK(pose_features(bp).size() == 36);
}

TEST_CASE("comnet parameter validation") {
  auto p = MlpParams<double>::initialized(LayoutKind::HP, 8, 0.5, 1);
  CHECK_NOTHROW(p.validate());
  p.running_var[0](0) = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = MlpParams<double>::initialized(LayoutKind::HP, 8, 1.0, 1);
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("comnet gradients match finite differences") {
  for (auto mode : {BatchNormMode::running_statistics, BatchNormMode::batch_statistics}) {
    const auto errs = gradcheck::relative_errors(16, mode, 12);
    for (std::size_t g = 0; g < kParamGroupCount; ++g) {
      INFO(param_group_name(g));
      CHECK(errs[g] < 1e-4);
    }
  }
}

TEST_CASE("comnet memorises a single pose") {
  std::mt19937_64 rng(4);
  const auto pose = random_pose(LayoutKind::HP, rng);
  const Point3 com = hip_center(pose) + Point3{12.0, -7.0, 95.0};
  std::vector<TrainSample> data(8, TrainSample{pose, com});
  TrainConfig cfg;
  cfg.width = 32;
  cfg.batch_size = 8;
  cfg.epochs = 200;
  cfg.dropout = 0.0;
  cfg.lr_drop_every = 1000;
  cfg.initial_lr = 1e-3;
  const auto res = comnet_train<double>(data, cfg);
  CHECK(res.log.back().eval_rmse_mm < 0.1);
}

TEST_CASE("comnet training is deterministic and improves after one epoch") {
  SynthRig rig;
  rig.seed = 2;
  std::vector<TrainSample> data;
  for (auto prog : {MotionProgram::sway, MotionProgram::lunge}) {
    const auto take = generate_take(rig, SynthSubject::sample("S01", 2), prog, 40.0);
    for (std::size_t i = 0; i < take.data.frame_count(); ++i) {
      data.push_back({take.data.hp_pose[i], take.data.gt_com[i].position});
    }
  }
  TrainConfig cfg;
  cfg.width = 64;
  cfg.batch_size = 32;
  cfg.epochs = 2;
  cfg.seed = 9;
  const auto a = comnet_train<float>(data, cfg);
  const auto b = comnet_train<float>(data, cfg);
  CHECK(a.log[0].eval_rmse_mm < a.initial_eval_rmse_mm);
  for (std::size_t g = 0; g < kParamGroupCount; ++g) CHECK(a.params.weights[g] == b.params.weights[g]);
  CHECK(comnet_rmse_mm(data, a.params) == doctest::Approx(a.log.back().eval_rmse_mm).epsilon(1e-6));

  CHECK_THROWS_AS(comnet_train<float>(std::vector<TrainSample>{}, cfg), Error);
  TrainConfig bad = cfg;
  bad.epochs = 0;
  CHECK_THROWS_AS(comnet_train<float>(data, bad), Error);
}

TEST_CASE("learning-rate schedule") {
  TrainConfig cfg;
  CHECK(learning_rate_at(cfg, 0) == doctest::Approx(5e-4));
  CHECK(learning_rate_at(cfg, 4) == doctest::Approx(5e-4));
  CHECK(learning_rate_at(cfg, 5) == doctest::Approx(1.25e-4));
  CHECK(learning_rate_at(cfg, 24) == doctest::Approx(5e-4 * std::pow(0.25, 4)));
}
