#include "stabilikit/synth.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "stabilikit/error.hpp"

namespace stabilikit {

namespace {

constexpr double kGravityMmPerS2 = 9810.0;
constexpr double kGravity = 9.81;
constexpr double kAnkleToHeelMm = 40.0;
constexpr double kMinTiltFactor = 0.2;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// --- insole profile -------------------------------------------------------

struct SoleCell {
  int r = 0;
  int c = 0;
  Point2 local;  // (along, across) of the cell centre
  double g = 0.0;
};

struct SoleProfile {
  std::vector<SoleCell> cells;
  Point2 centroid;  // g-weighted, local
  double sum_g = 0.0;
  Eigen::Matrix2d second_moment = Eigen::Matrix2d::Zero();
};

SoleProfile make_profile(const InsoleSpec& spec) {
  const double L = spec.rows * spec.cell_size_mm;
  const double W = spec.cols * spec.cell_size_mm;
  SoleProfile prof;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const double a = (r + 0.5) * spec.cell_size_mm;
      const double b = (c + 0.5) * spec.cell_size_mm;
      const double ea = (a - 0.4333 * L) / (0.4 * L);
      const double eb = (b - 0.5 * W) / (0.4286 * W);
      if (ea * ea + eb * eb > 1.0) continue;
      const auto blob = [&](double ca, double cb, double sa, double sb) {
        const double u = (a - ca) / sa;
        const double v = (b - cb) / sb;
        return std::exp(-0.5 * (u * u + v * v));
      };
      const double g = 0.4 + 0.8 * blob(0.17 * L, 0.5 * W, 0.08 * L, 0.17 * W) +
                       0.7 * blob(0.68 * L, 0.43 * W, 0.1 * L, 0.24 * W);
      prof.cells.push_back({r, c, {a, b}, g});
    }
  }
  for (const auto& s : prof.cells) {
    prof.sum_g += s.g;
    prof.centroid += s.g * s.local;
  }
  prof.centroid = (1.0 / prof.sum_g) * prof.centroid;
  for (const auto& s : prof.cells) {
    const Eigen::Vector2d d(s.local.x - prof.centroid.x, s.local.y - prof.centroid.y);
    prof.second_moment += s.g * d * d.transpose();
  }
  return prof;
}

// Load force_n spread over the sole with its weighted centroid at target
// (local coordinates), when feasible.
PressureMap foot_map(const InsoleSpec& spec, const SoleProfile& prof, Side side,
                     std::int64_t frame, double force_n, const Point2& target) {
  PressureMap m = make_pressure_map(side, spec.rows, spec.cols, spec.cell_size_mm, frame);
  if (!(force_n > 0.0)) return m;
  const double area = spec.cell_size_mm * spec.cell_size_mm;
  const double s = force_n * 1000.0 / (area * prof.sum_g);
  const Eigen::Vector2d off(target.x - prof.centroid.x, target.y - prof.centroid.y);
  Eigen::Vector2d a = prof.sum_g * prof.second_moment.ldlt().solve(off);
  double lowest = 0.0;
  for (const auto& c : prof.cells) {
    lowest = std::min(lowest, a.x() * (c.local.x - prof.centroid.x) +
                                  a.y() * (c.local.y - prof.centroid.y));
  }
  // Scale the tilt back toward the profile centroid if it would drive a cell
  // too close to zero.
  if (1.0 + lowest < kMinTiltFactor) a *= (1.0 - kMinTiltFactor) / -lowest;
  for (const auto& c : prof.cells) {
    const double tilt =
        1.0 + a.x() * (c.local.x - prof.centroid.x) + a.y() * (c.local.y - prof.centroid.y);
    m.at(c.r, c.c) = s * c.g * tilt;
  }
  return m;
}

// --- body -----------------------------------------------------------------

struct FootState {
  Point2 ankle;
  double heading = 0.0;
  double lift = 0.0;
};

struct ProgramState {
  Point2 com;
  Point2 com_acc;
  std::array<FootState, 2> feet;  // left, right
  double pelvis_z = 0.0;
  double lean = 0.0;
  double arm = 0.1;
};

struct Body {
  double H;
  double ankle_h, toe_len, shank, thigh, hip_hw, trunk, upper_arm, forearm, shoulder_hw;
  explicit Body(double height)
      : H(height),
        ankle_h(0.039 * height),
        toe_len(0.12 * height),
        shank(0.246 * height),
        thigh(0.245 * height),
        hip_hw(0.052 * height),
        trunk(0.288 * height),
        upper_arm(0.186 * height),
        forearm(0.146 * height),
        shoulder_hw(0.1 * height) {}
  double leg() const { return shank + thigh; }
};

Point2 heading_dir(double h) { return {std::cos(h), std::sin(h)}; }

Point2 lateral_dir(Side side, double h) {
  const Point2 f = heading_dir(h);
  return side == Side::left ? Point2{-f.y, f.x} : Point2{f.y, -f.x};
}

FootPlacement placement_of(Side side, const FootState& foot, double insole_width_mm) {
  FootPlacement p;
  p.side = side;
  p.heading = foot.heading;
  p.origin = foot.ankle - kAnkleToHeelMm * heading_dir(foot.heading) -
             (0.5 * insole_width_mm) * lateral_dir(side, foot.heading);
  return p;
}

Point2 place(const FootPlacement& p, const Point2& local) {
  return p.origin + local.x * heading_dir(p.heading) + local.y * lateral_dir(p.side, p.heading);
}

Point2 unplace(const FootPlacement& p, const Point2& world) {
  const Point2 v = world - p.origin;
  return {dot(v, heading_dir(p.heading)), dot(v, lateral_dir(p.side, p.heading))};
}

Point3 knee_ik(const Point3& hip, const Point3& ankle, double thigh, double shank,
               const Point2& forward) {
  const Eigen::Vector3d h(hip.x, hip.y, hip.z);
  const Eigen::Vector3d a(ankle.x, ankle.y, ankle.z);
  const double d = (a - h).norm();
  Eigen::Vector3d k;
  if (d >= thigh + shank || d <= std::abs(thigh - shank)) {
    k = h + (thigh / (thigh + shank)) * (a - h);
  } else {
    const Eigen::Vector3d u = (a - h) / d;
    const double along = (thigh * thigh - shank * shank + d * d) / (2.0 * d);
    const double perp = std::sqrt(std::max(0.0, thigh * thigh - along * along));
    Eigen::Vector3d n(forward.x, forward.y, 0.0);
    n -= n.dot(u) * u;
    n.normalize();
    k = h + along * u + perp * n;
  }
  return {k.x(), k.y(), k.z()};
}

using JointArray = std::array<Point3, kJointCount>;

Point3& J(JointArray& a, Joint j) { return a[static_cast<std::size_t>(j)]; }
const Point3& J(const JointArray& a, Joint j) { return a[static_cast<std::size_t>(j)]; }

JointArray build_pose(const Body& b, const ProgramState& st, const Point2& pelvis_xy) {
  using enum Joint;
  JointArray p{};
  const Point3 P{pelvis_xy.x, pelvis_xy.y, st.pelvis_z};
  J(p, MidHip) = P;
  J(p, LHip) = P + Point3{0, b.hip_hw, 0};
  J(p, RHip) = P + Point3{0, -b.hip_hw, 0};

  const std::array<Side, 2> sides{Side::left, Side::right};
  for (std::size_t s = 0; s < 2; ++s) {
    const FootState& f = st.feet[s];
    const Point2 fw = heading_dir(f.heading);
    const Point2 lat = lateral_dir(sides[s], f.heading);
    const Point3 ankle{f.ankle.x, f.ankle.y, b.ankle_h + f.lift};
    const Point2 toe = f.ankle + b.toe_len * fw;
    const Point2 small = toe - (0.02 * b.H) * fw + (0.035 * b.H) * lat;
    const Point2 heel = f.ankle - (0.035 * b.H) * fw;
    const bool left = s == 0;
    J(p, left ? LAnkle : RAnkle) = ankle;
    J(p, left ? LBigToe : RBigToe) = {toe.x, toe.y, 0.012 * b.H + f.lift};
    J(p, left ? LSmallToe : RSmallToe) = {small.x, small.y, 0.012 * b.H + f.lift};
    J(p, left ? LHeel : RHeel) = {heel.x, heel.y, 0.01 * b.H + f.lift};
    J(p, left ? LKnee : RKnee) = knee_ik(J(p, left ? LHip : RHip), ankle, b.thigh, b.shank, fw);
  }

  const Point3 neck = P + Point3{st.lean, 0, b.trunk};
  J(p, Neck) = neck;
  const std::array<double, 2> swing{-0.5 * st.arm, st.arm};  // left, right
  for (std::size_t s = 0; s < 2; ++s) {
    const bool left = s == 0;
    const Point3 sh = neck + Point3{0, left ? b.shoulder_hw : -b.shoulder_hw, -0.02 * b.H};
    const double a = swing[s];
    const Point3 el = sh + b.upper_arm * Point3{std::sin(a), 0, -std::cos(a)};
    const Point3 wr = el + b.forearm * Point3{std::sin(a + 0.35), 0, -std::cos(a + 0.35)};
    J(p, left ? LShoulder : RShoulder) = sh;
    J(p, left ? LElbow : RElbow) = el;
    J(p, left ? LWrist : RWrist) = wr;
  }
  const Point3 nose = neck + Point3{0.04 * b.H, 0, 0.1 * b.H};
  J(p, Nose) = nose;
  J(p, LEye) = nose + Point3{-0.015 * b.H, 0.02 * b.H, 0.015 * b.H};
  J(p, REye) = nose + Point3{-0.015 * b.H, -0.02 * b.H, 0.015 * b.H};
  J(p, LEar) = neck + Point3{-0.005 * b.H, 0.04 * b.H, 0.09 * b.H};
  J(p, REar) = neck + Point3{-0.005 * b.H, -0.04 * b.H, 0.09 * b.H};
  return p;
}

Point3 segment_com(const JointArray& p, const ComModel& model) {
  Point3 com;
  for (const auto& s : model.segments()) {
    const Point3& a = J(p, s.proximal);
    const Point3& d = J(p, s.distal);
    com += s.mass_fraction * (a + s.com_ratio * (d - a));
  }
  return com;
}

// --- motion programs ------------------------------------------------------

struct Smooth {
  double s, s2;  // value and second derivative with respect to time
};

Smooth smoothstep(double t, double t0, double t1) {
  if (t <= t0) return {0.0, 0.0};
  if (t >= t1) return {1.0, 0.0};
  const double T = t1 - t0;
  const double u = (t - t0) / T;
  return {u * u * (3.0 - 2.0 * u), (6.0 - 12.0 * u) / (T * T)};
}

struct ProgramParams {
  double fx, fy, phx, phy, ax, ay;
  double lunge_f, lunge_ph;
};

ProgramParams draw_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ProgramParams p{};
  p.fx = uniform(rng, 0.08, 0.25);
  p.fy = uniform(rng, 0.08, 0.25);
  p.phx = uniform(rng, 0.0, kTwoPi);
  p.phy = uniform(rng, 0.0, kTwoPi);
  p.ax = uniform(rng, 10.0, 20.0);
  p.ay = uniform(rng, 12.0, 25.0);
  p.lunge_f = uniform(rng, 0.1, 0.2);
  p.lunge_ph = uniform(rng, 0.0, kTwoPi);
  return p;
}

struct Sinusoid {
  double v, acc;
};

Sinusoid sinusoid(double amp, double f, double ph, double t) {
  const double w = kTwoPi * f;
  const double v = amp * std::sin(w * t + ph);
  return {v, -w * w * v};
}

ProgramState program_state(MotionProgram prog, const ProgramParams& pp, const Body& b,
                           const SynthSubject& subj, const InsoleSpec& insole,
                           const SoleProfile& prof, double t, double T) {
  ProgramState st;
  const double w = subj.stance_half_width_mm;
  st.feet[0] = {{0.0, w}, subj.toe_out_rad, 0.0};
  st.feet[1] = {{0.0, -w}, -subj.toe_out_rad, 0.0};
  st.pelvis_z = b.ankle_h + 0.96 * b.leg();
  st.arm = 0.1 + 0.05 * std::sin(kTwoPi * 0.1 * t + pp.phx);
  if (prog == MotionProgram::lunge) {
    st.feet[0].ankle = {0.17 * b.H, w};
    st.feet[1].ankle = {-0.12 * b.H, -w};
  }
  const double width = insole.cols * insole.cell_size_mm;
  const Point2 gl = place(placement_of(Side::left, st.feet[0], width), prof.centroid);
  const Point2 gr = place(placement_of(Side::right, st.feet[1], width), prof.centroid);
  const Point2 mid = 0.5 * (gl + gr);

  switch (prog) {
    case MotionProgram::static_stance:
      st.com = mid;
      break;
    case MotionProgram::sway: {
      const Sinusoid sx = sinusoid(pp.ax, pp.fx, pp.phx, t);
      const Sinusoid sy = sinusoid(pp.ay, pp.fy, pp.phy, t);
      st.com = mid + Point2{sx.v, sy.v};
      st.com_acc = {sx.acc, sy.acc};
      break;
    }
    case MotionProgram::weight_shift: {
      const Smooth s = smoothstep(t, 0.0, T);
      st.com = gl + s.s * (gr - gl);
      st.com_acc = s.s2 * (gr - gl);
      break;
    }
    case MotionProgram::single_support_lift: {
      const Smooth in = smoothstep(t, 0.0, 0.2 * T);
      const Smooth out = smoothstep(t, 0.8 * T, T);
      const Smooth up = smoothstep(t, 0.2 * T, 0.3 * T);
      const Smooth down = smoothstep(t, 0.7 * T, 0.8 * T);
      const double hold = (t > 0.3 * T && t < 0.7 * T) ? 1.0 : 0.0;
      const Sinusoid sx = sinusoid(0.4 * pp.ax * hold, pp.fx, pp.phx, t);
      const Sinusoid sy = sinusoid(0.3 * pp.ay * hold, pp.fy, pp.phy, t);
      const double k = in.s - out.s;
      st.com = mid + k * (gl - mid) + Point2{sx.v, sy.v};
      st.com_acc = (in.s2 - out.s2) * (gl - mid) + Point2{sx.acc, sy.acc};
      st.feet[1].lift = 80.0 * (up.s - down.s);
      break;
    }
    case MotionProgram::lunge: {
      const Sinusoid s = sinusoid(0.25, pp.lunge_f, pp.lunge_ph, t);
      st.com = mid + s.v * (gl - gr);
      st.com_acc = s.acc * (gl - gr);
      const double dip = 0.5 * (1.0 - std::cos(kTwoPi * pp.lunge_f * t + pp.lunge_ph));
      st.pelvis_z = b.ankle_h + 0.88 * b.leg() - 0.03 * b.H * dip;
      st.lean = 0.02 * b.H;
      break;
    }
  }
  return st;
}

// --- detections -----------------------------------------------------------

Pose3dFrame as_pose(const JointArray& p, LayoutKind layout, std::int64_t frame, double ts) {
  Pose3dFrame f;
  f.frame_index = frame;
  f.timestamp = ts;
  f.layout = layout;
  for (Joint j : JointSetLayout::get(layout).joints()) f.joints.push_back({J(p, j), true});
  return f;
}

Pose2dFrame detect(const Pose3dFrame& pose, LayoutKind layout, const CameraProjection& cam,
                   double pixel_sigma, double dropout, std::mt19937_64& rng) {
  Pose2dFrame out;
  out.frame_index = pose.frame_index;
  out.camera_id = cam.camera_id;
  out.layout = layout;
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (Joint j : JointSetLayout::get(layout).joints()) {
    const Joint3d* src = pose.find(j);
    Joint2d d;
    if (src != nullptr && src->valid) {
      const Point2 px = cam.project(src->position);
      d.u = px.x;
      d.v = px.y;
      if (pixel_sigma > 0.0) {
        d.u += pixel_sigma * noise(rng);
        d.v += pixel_sigma * noise(rng);
      }
      d.confidence = 0.9;
      d.valid = true;
      if (dropout > 0.0 && coin(rng) < dropout) {
        d.valid = false;
        d.confidence = 0.0;
      }
    }
    out.joints.push_back(d);
  }
  return out;
}

Pose3dFrame jitter(const Pose3dFrame& pose, double sigma, std::mt19937_64& rng) {
  Pose3dFrame out = pose;
  if (sigma <= 0.0) return out;
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& j : out.joints) {
    j.position.x += noise(rng);
    j.position.y += noise(rng);
    j.position.z += noise(rng);
  }
  return out;
}

void make_detections(SynthTake& take, const NoiseSpec& noise) {
  std::mt19937_64 rng(mix(noise.seed, fnv1a(take.data.take_id) ^ 0xd1b54a32d192ed03ULL));
  for (auto& v : take.op2d) v.clear();
  for (auto& v : take.bp2d) v.clear();
  for (const Pose3dFrame& truth : take.true_pose) {
    const Pose3dFrame op = jitter(truth, noise.joint_mm, rng);
    const Pose3dFrame bp = jitter(select_layout(truth, LayoutKind::BP), noise.joint_mm, rng);
    for (std::size_t c = 0; c < 2; ++c) {
      take.op2d[c].push_back(
          detect(op, LayoutKind::OP, take.cameras[c], noise.pixel_px, noise.dropout, rng));
      take.bp2d[c].push_back(
          detect(bp, LayoutKind::BP, take.cameras[c], noise.pixel_px, noise.dropout, rng));
    }
  }
}

}  // namespace

std::string_view program_name(MotionProgram p) {
  switch (p) {
    case MotionProgram::static_stance: return "static_stance";
    case MotionProgram::sway: return "sway";
    case MotionProgram::weight_shift: return "weight_shift";
    case MotionProgram::single_support_lift: return "single_support_lift";
    case MotionProgram::lunge: return "lunge";
  }
  return "?";
}

MotionProgram program_from_name(std::string_view name) {
  for (MotionProgram p : all_programs()) {
    if (program_name(p) == name) return p;
  }
  throw Error(ErrorCode::InvalidProgram, "unknown motion program '" + std::string(name) + "'");
}

std::array<MotionProgram, 5> all_programs() {
  return {MotionProgram::static_stance, MotionProgram::sway, MotionProgram::weight_shift,
          MotionProgram::single_support_lift, MotionProgram::lunge};
}

std::array<CameraProjection, 2> SynthRig::default_cameras() {
  const Point3 target{0.0, 0.0, 900.0};
  return {CameraProjection::look_at("cam0", 1000.0, {640.0, 360.0}, {1732.0, 1000.0, 1000.0},
                                    target),
          CameraProjection::look_at("cam1", 1000.0, {640.0, 360.0}, {1732.0, -1000.0, 1000.0},
                                    target)};
}

SynthSubject SynthSubject::sample(std::string id, std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed, fnv1a(id)));
  SynthSubject s;
  s.id = std::move(id);
  s.height_mm = uniform(rng, 1540.0, 1800.0);
  s.mass_kg = uniform(rng, 50.0, 90.0);
  s.stance_half_width_mm = uniform(rng, 85.0, 110.0);
  s.toe_out_rad = uniform(rng, 0.05, 0.2);
  return s;
}

void NoiseSpec::validate() const {
  if (!(pixel_px >= 0.0 && joint_mm >= 0.0 && pressure_kpa >= 0.0 && com_mm >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise magnitudes must be >= 0");
  }
  if (!(dropout >= 0.0 && dropout <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "dropout probability outside [0, 1]");
  }
}

void rebuild_image_poses(SynthTake& take) {
  TakeData& d = take.data;
  d.op_pose.clear();
  d.hp_pose.clear();
  for (std::size_t i = 0; i < take.op2d[0].size(); ++i) {
    const double ts = d.timestamp(i);
    Pose3dFrame op =
        triangulate_frame(take.op2d[0][i], take.op2d[1][i], take.cameras[0], take.cameras[1], ts);
    const Pose3dFrame bp =
        triangulate_frame(take.bp2d[0][i], take.bp2d[1][i], take.cameras[0], take.cameras[1], ts);
    d.hp_pose.push_back(assemble_hybrid_pose(bp, op));
    d.op_pose.push_back(std::move(op));
  }
}

SynthTake generate_take(const SynthRig& rig, const SynthSubject& subject, MotionProgram program,
                        double duration_s, const NoiseSpec& noise) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw Error(ErrorCode::InvalidProgram, "duration must be > 0");
  }
  if (!(rig.sample_rate_hz > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample rate must be > 0");
  noise.validate();

  const Body body(subject.height_mm);
  const SoleProfile prof = make_profile(rig.insole);
  const double width = rig.insole.cols * rig.insole.cell_size_mm;
  const double cell_area = rig.insole.cell_size_mm * rig.insole.cell_size_mm;
  const ProgramParams pp = draw_params(mix(rig.seed, fnv1a(subject.id) ^ static_cast<std::uint64_t>(program)));
  const double weight_n = subject.mass_kg * kGravity;
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(duration_s * rig.sample_rate_hz)));

  SynthTake take;
  take.program = program;
  take.cameras = rig.cameras;
  TakeData& d = take.data;
  d.subject_id = subject.id;
  d.take_id = subject.id + "_" + std::string(program_name(program));
  d.sample_rate_hz = rig.sample_rate_hz;

  for (std::size_t i = 0; i < n; ++i) {
    const auto frame = static_cast<std::int64_t>(i);
    const double t = static_cast<double>(i) / rig.sample_rate_hz;
    const ProgramState st = program_state(program, pp, body, subject, rig.insole, prof, t, duration_s);

    // Pelvis position that puts the segmental CoM over the prescribed point.
    Point2 pelvis = st.com;
    JointArray joints = build_pose(body, st, pelvis);
    Point3 com = segment_com(joints, rig.model);
    for (int it = 0; it < 200; ++it) {
      const Point2 err = st.com - floor_projection(com);
      if (norm(err) < 1e-11) break;
      pelvis += err;
      joints = build_pose(body, st, pelvis);
      com = segment_com(joints, rig.model);
    }

    AnalyticFrame af;
    af.com = com;
    af.feet = {placement_of(Side::left, st.feet[0], width),
               placement_of(Side::right, st.feet[1], width)};
    af.target_cop = st.com - (com.z / kGravityMmPerS2) * st.com_acc;
    af.double_support = st.feet[1].lift <= 0.0;

    // Lever rule along the line between the two loaded-sole centroids.
    const Point2 gl = place(af.feet[0], prof.centroid);
    const Point2 gr = place(af.feet[1], prof.centroid);
    double lambda = 0.0;
    if (af.double_support) {
      const Point2 axis = gr - gl;
      lambda = std::clamp(dot(af.target_cop - gl, axis) / dot(axis, axis), 0.0, 1.0);
    }
    const Point2 offset = af.target_cop - (gl + lambda * (gr - gl));
    PressureMap left = foot_map(rig.insole, prof, Side::left, frame, (1.0 - lambda) * weight_n,
                                unplace(af.feet[0], gl + offset));
    PressureMap right = foot_map(rig.insole, prof, Side::right, frame, lambda * weight_n,
                                 unplace(af.feet[1], gr + offset));

    // Reference CoP / BoS from the maps and the generator's own transforms.
    std::vector<Point2> support;
    double wsum = 0.0;
    Point2 wpos;
    for (std::size_t s = 0; s < 2; ++s) {
      const PressureMap& m = s == 0 ? left : right;
      for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
          const double p = m.at(r, c);
          af.total_force_n += p * cell_area * 1e-3;
          if (p <= rig.reference_threshold_kpa) continue;
          const Point2 w = place(af.feet[s], {(r + 0.5) * m.cell_size_mm, (c + 0.5) * m.cell_size_mm});
          support.push_back(w);
          wsum += p;
          wpos += p * w;
        }
      }
    }
    if (wsum > 0.0) {
      af.cop = (1.0 / wsum) * wpos;
      af.cop_valid = true;
      try {
        af.bos = convex_hull(support);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateInput) throw;
      }
    }

    take.true_pose.push_back(as_pose(joints, LayoutKind::OP, frame, t));
    d.gt_pose.push_back(as_pose(joints, LayoutKind::GT, frame, t));
    d.gt_com.push_back({frame, t, com, true});
    d.im_left.push_back(left);
    d.im_right.push_back(right);
    d.gt_left.push_back(std::move(left));
    d.gt_right.push_back(std::move(right));
    take.truth.push_back(std::move(af));
  }

  make_detections(take, NoiseSpec{});
  rebuild_image_poses(take);
  return noise.is_zero() ? take : noise_model(take, noise);
}

SynthTake noise_model(const SynthTake& clean, const NoiseSpec& spec) {
  spec.validate();
  SynthTake out = clean;
  if (spec.is_zero()) return out;
  const std::uint64_t base = mix(spec.seed, fnv1a(clean.data.take_id));

  if (spec.pixel_px > 0.0 || spec.joint_mm > 0.0 || spec.dropout > 0.0) {
    make_detections(out, spec);
    rebuild_image_poses(out);
  }
  if (spec.pressure_kpa > 0.0) {
    std::mt19937_64 rng(mix(base, 0x5851f42d4c957f2dULL));
    std::normal_distribution<double> noise(0.0, spec.pressure_kpa);
    for (auto* stream : {&out.data.im_left, &out.data.im_right}) {
      for (PressureMap& m : *stream) {
        for (double& v : m.values) v = std::max(0.0, v + noise(rng));
      }
    }
  }
  if (spec.com_mm > 0.0) {
    std::mt19937_64 rng(mix(base, 0x14057b7ef767814fULL));
    std::normal_distribution<double> noise(0.0, spec.com_mm);
    out.data.im_com = out.data.gt_com;
    for (ComFrame& c : out.data.im_com) {
      c.position.x += noise(rng);
      c.position.y += noise(rng);
      c.position.z += noise(rng);
    }
  }
  return out;
}

std::vector<SynthTake> generate_cohort(const SynthRig& rig, int n_subjects,
                                       const std::vector<MotionProgram>& programs,
                                       double duration_s, const NoiseSpec& noise) {
  if (n_subjects < 1) throw Error(ErrorCode::InvalidArgument, "need at least one subject");
  std::vector<SynthTake> out;
  for (int s = 0; s < n_subjects; ++s) {
    char id[16];
    std::snprintf(id, sizeof id, "S%02d", s + 1);
    const SynthSubject subject = SynthSubject::sample(id, rig.seed);
    for (MotionProgram p : programs) out.push_back(generate_take(rig, subject, p, duration_s, noise));
  }
  return out;
}

}  // namespace stabilikit
