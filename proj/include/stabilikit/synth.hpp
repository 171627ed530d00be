#pragma once

/// \file synth.hpp
/// \brief Deterministic synthetic takes with known CoM, CoP and BoS.
///
/// World frame: x forward (the subject faces +x), y to the subject's left,
/// z up, millimetres. Every random choice derives from explicit seeds.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stabilikit/com_model.hpp"
#include "stabilikit/pose.hpp"
#include "stabilikit/pressure.hpp"
#include "stabilikit/take.hpp"

namespace stabilikit {

enum class MotionProgram { static_stance, sway, weight_shift, single_support_lift, lunge };

std::string_view program_name(MotionProgram p);
/// Throws InvalidProgram for unknown names.
MotionProgram program_from_name(std::string_view name);
std::array<MotionProgram, 5> all_programs();

struct InsoleSpec {
  int rows = 60;
  int cols = 21;
  double cell_size_mm = 5.0;
};

struct SynthRig {
  std::array<CameraProjection, 2> cameras = default_cameras();
  InsoleSpec insole;
  ComModel model = ComModel::winter();
  double sample_rate_hz = 5.0;
  /// Threshold at which the analytic CoP and BoS are reported.
  double reference_threshold_kpa = 10.0;
  std::uint64_t seed = 0;

  /// Two cameras 2 m apart in front of the subject, looking at the pelvis.
  static std::array<CameraProjection, 2> default_cameras();
};

struct SynthSubject {
  std::string id;
  double height_mm = 1700.0;
  double mass_kg = 70.0;
  double stance_half_width_mm = 95.0;
  double toe_out_rad = 0.1;

  /// Height in [1540, 1800] mm, mass in [50, 90] kg, stance and toe-out drawn
  /// around their defaults.
  static SynthSubject sample(std::string id, std::uint64_t seed);
};

/// Seeded perturbations of the image-based channels. Ground-truth streams are
/// never touched.
struct NoiseSpec {
  double pixel_px = 0.0;      ///< on every 2D detection
  double joint_mm = 0.0;      ///< on the 3D joints behind the 2D detections
  double pressure_kpa = 0.0;  ///< on every predicted pressure cell, clamped at 0
  double com_mm = 0.0;        ///< fills im_com with GT CoM plus noise
  double dropout = 0.0;       ///< probability that a 2D detection is missing
  std::uint64_t seed = 0;

  bool is_zero() const {
    return pixel_px == 0.0 && joint_mm == 0.0 && pressure_kpa == 0.0 && com_mm == 0.0 &&
           dropout == 0.0;
  }
  /// Throws InvalidArgument for negative magnitudes or dropout outside [0, 1].
  void validate() const;
};

/// Ground truth of one frame, computed by the generator from its own foot
/// transforms and maps.
struct AnalyticFrame {
  Point3 com;
  /// CoP and BoS of the GT maps above the rig's reference threshold.
  Point2 cop;
  std::optional<ConvexPolygon> bos;
  bool cop_valid = false;
  std::array<FootPlacement, 2> feet;
  /// CoP the load split aimed for (inverted-pendulum target).
  Point2 target_cop;
  double total_force_n = 0.0;
  bool double_support = true;
};

struct SynthTake {
  TakeData data;
  MotionProgram program = MotionProgram::static_stance;
  std::array<CameraProjection, 2> cameras;
  /// Noise-free 25-joint pose, OP layout.
  std::vector<Pose3dFrame> true_pose;
  /// Detections per camera: full detector set and the 12 corrected joints.
  std::array<std::vector<Pose2dFrame>, 2> op2d;
  std::array<std::vector<Pose2dFrame>, 2> bp2d;
  std::vector<AnalyticFrame> truth;
};

/// Throws InvalidProgram for a non-positive duration.
SynthTake generate_take(const SynthRig& rig, const SynthSubject& subject, MotionProgram program,
                        double duration_s, const NoiseSpec& noise = {});

/// Returns a copy with the noise applied. Only channels with a non-zero
/// magnitude are regenerated, so the others stay bit-identical.
SynthTake noise_model(const SynthTake& clean, const NoiseSpec& spec);

/// Triangulates both detector sets and assembles the HP stream.
void rebuild_image_poses(SynthTake& take);

/// n subjects drawn from seed, each performing every listed program once.
std::vector<SynthTake> generate_cohort(const SynthRig& rig, int n_subjects,
                                       const std::vector<MotionProgram>& programs,
                                       double duration_s, const NoiseSpec& noise = {});

}  // namespace stabilikit
