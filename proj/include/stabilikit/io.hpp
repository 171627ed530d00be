#pragma once

/// \file io.hpp
/// \brief On-disk formats: pose / CoM CSV, pressure blocks, calibration and
/// manifest JSON, stability series CSV and the CoMNet model container.
///
/// Every file starts with a format_version field. CSV files carry it on a
/// leading `#format_version=1,kind=...` line followed by a header row.
/// Doubles are written in shortest round-trip form, so write-then-read is
/// bit-exact.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stabilikit/comnet.hpp"
#include "stabilikit/pose.hpp"
#include "stabilikit/pressure.hpp"
#include "stabilikit/stability.hpp"
#include "stabilikit/synth.hpp"
#include "stabilikit/take.hpp"

namespace stabilikit::io {

namespace fs = std::filesystem;

inline constexpr int kFormatVersion = 1;

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

void write_pose3d(const fs::path& path, const std::vector<Pose3dFrame>& frames,
                  LayoutKind layout);
/// Timestamps are frame / rate_hz. Throws ParseError (file, line, reason).
std::vector<Pose3dFrame> read_pose3d(const fs::path& path, double rate_hz);

/// One camera per file.
void write_pose2d(const fs::path& path, const std::vector<Pose2dFrame>& frames,
                  LayoutKind layout, const std::string& camera_id);
std::vector<Pose2dFrame> read_pose2d(const fs::path& path);

void write_com(const fs::path& path, const std::vector<ComFrame>& frames);
std::vector<ComFrame> read_com(const fs::path& path, double rate_hz);

/// JSON header line, then per frame a `#frame,<index>` row followed by one
/// CSV row of kPa values per grid row. All maps must share one grid.
void write_pressure(const fs::path& path, const std::vector<PressureMap>& maps);
std::vector<PressureMap> read_pressure(const fs::path& path);

void write_calibration(const fs::path& path, const std::vector<CameraProjection>& cameras);
std::vector<CameraProjection> read_calibration(const fs::path& path);

struct TakeFiles {
  std::string calibration;
  std::vector<std::string> pose2d_op;  ///< one per camera, two cameras
  std::vector<std::string> pose2d_bp;  ///< optional
  std::string gt_pose;                 ///< optional
  std::string gt_com;                  ///< optional
  std::string im_com;                  ///< optional
  std::string pressure_left;
  std::string pressure_right;
  std::string predicted_left;   ///< optional
  std::string predicted_right;  ///< optional
};

struct TakeManifest {
  std::string subject_id;
  std::string take_id;
  double sample_rate_hz = 5.0;
  double raw_rate_hz = 5.0;
  TakeFiles files;  ///< relative to the manifest's directory
  bool excluded = false;
  std::string exclusion_reason;
};

void write_manifest(const fs::path& path, const TakeManifest& m);
TakeManifest read_manifest(const fs::path& path);

/// Loads, decimates from raw_rate_hz to sample_rate_hz, triangulates the 2D
/// detections into OP / HP streams and checks alignment. Throws ExcludedTake
/// with the manifest's reason, ParseError for malformed files and
/// AlignmentError naming the first mismatching index.
TakeData load_take(const fs::path& manifest_path);

/// Writes every stream of a synthetic take next to a manifest; returns the
/// manifest path.
fs::path write_synth_take(const fs::path& dir, const SynthTake& take);

/// {"format_version": 1, "takes": ["relative/manifest.json", ...]}
void write_dataset(const fs::path& path, const std::vector<fs::path>& manifests);

struct Dataset {
  std::vector<TakeData> takes;
  std::vector<std::pair<std::string, std::string>> excluded;  ///< take id, reason
};

Dataset load_dataset(const fs::path& path);

/// Per-frame metric file consumed by `trend`.
void write_series(const fs::path& path, const StabilitySeries& series);
StabilitySeries read_series(const fs::path& path);

void write_comnet(const fs::path& path, const ComNetParams& params);
ComNetParams read_comnet(const fs::path& path);

/// Reads a whole file; throws IoError.
std::string read_text(const fs::path& path);
/// Writes a whole file, creating parent directories; throws IoError.
void write_text(const fs::path& path, std::string_view text);

}  // namespace stabilikit::io
