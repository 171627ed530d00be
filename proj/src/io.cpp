#include "stabilikit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"
#include "stabilikit/com_model.hpp"
#include "stabilikit/error.hpp"

namespace stabilikit::io {

using json = nlohmann::json;

namespace {

constexpr char kModelMagic[8] = {'S', 'K', 'C', 'O', 'M', 'N', 'E', 'T'};
constexpr std::uint32_t kModelVersion = 1;

[[noreturn]] void parse_error(const fs::path& path, std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line) + ": " + reason);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Line-oriented reader that tracks 1-based line numbers for error messages.
class Lines {
 public:
  explicit Lines(const fs::path& path) : path_(path) {
    std::istringstream in(read_text(path));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines_.push_back(std::move(line));
    }
  }

  bool done() const { return pos_ >= lines_.size(); }
  const std::string& next() {
    if (done()) fail("unexpected end of file");
    return lines_[pos_++];
  }
  const std::string& peek() const { return lines_[pos_]; }
  std::size_t line_no() const { return pos_; }
  [[noreturn]] void fail(const std::string& reason) const { parse_error(path_, pos_, reason); }

  double number(std::string_view s) const {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) fail("not a number: '" + std::string(s) + "'");
    return v;
  }

  std::int64_t integer(std::string_view s) const {
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) fail("not an integer: '" + std::string(s) + "'");
    return v;
  }

  bool flag(std::string_view s) const {
    if (s == "1") return true;
    if (s == "0") return false;
    fail("expected 0 or 1, got '" + std::string(s) + "'");
  }

  // Parses the `#format_version=1,kind=...` line and checks version and kind.
  std::map<std::string, std::string> preamble(std::string_view kind) {
    const std::string& line = next();
    if (line.empty() || line.front() != '#') fail("missing format_version line");
    std::map<std::string, std::string> kv;
    for (auto item : split(std::string_view(line).substr(1), ',')) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) fail("malformed preamble entry '" + std::string(item) + "'");
      kv[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    }
    if (kv["format_version"] != std::to_string(kFormatVersion)) fail("unsupported format_version");
    if (kv["kind"] != kind) fail("expected kind=" + std::string(kind));
    return kv;
  }

  void header(std::string_view expected) {
    if (next() != expected) fail("expected header '" + std::string(expected) + "'");
  }

  std::vector<std::string_view> row(std::size_t columns) {
    const std::string& line = next();
    auto cells = split(line, ',');
    if (cells.size() != columns) {
      fail("expected " + std::to_string(columns) + " columns, got " + std::to_string(cells.size()));
    }
    return cells;
  }

 private:
  fs::path path_;
  std::vector<std::string> lines_;
  std::size_t pos_ = 0;
};

LayoutKind layout_of(const Lines& in, const std::string& name) {
  const auto l = layout_from_name(name);
  if (!l) in.fail("unknown layout '" + name + "'");
  return *l;
}

std::size_t joint_slot(const Lines& in, LayoutKind layout, std::string_view name) {
  const auto j = joint_from_name(name);
  if (!j) in.fail("unknown joint '" + std::string(name) + "'");
  const auto idx = JointSetLayout::get(layout).index_of(*j);
  if (!idx) in.fail("joint '" + std::string(name) + "' not in layout " +
                    std::string(layout_name(layout)));
  return *idx;
}

std::string side_str(Side s) { return std::string(side_name(s)); }

Side side_of(const fs::path& path, const std::string& s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  parse_error(path, 1, "unknown side '" + s + "'");
}

json parse_json(const fs::path& path, std::string_view text, std::size_t line = 1) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    parse_error(path, line, e.what());
  }
}

template <typename T>
T field(const fs::path& path, const json& j, const char* key) {
  if (!j.contains(key)) parse_error(path, 1, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    parse_error(path, 1, std::string("field '") + key + "': " + e.what());
  }
}

void check_version(const fs::path& path, const json& j) {
  if (field<int>(path, j, "format_version") != kFormatVersion) {
    parse_error(path, 1, "unsupported format_version");
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

// --- poses ----------------------------------------------------------------

void write_pose3d(const fs::path& path, const std::vector<Pose3dFrame>& frames,
                  LayoutKind layout) {
  std::string s = "#format_version=1,kind=pose3d,layout=" + std::string(layout_name(layout)) +
                  "\nframe,joint,x,y,z,valid\n";
  const auto joints = JointSetLayout::get(layout).joints();
  for (const auto& f : frames) {
    if (f.layout != layout) throw Error(ErrorCode::ShapeMismatch, "mixed layouts in pose stream");
    for (std::size_t k = 0; k < joints.size(); ++k) {
      const Joint3d& j = f.joints.at(k);
      s += std::to_string(f.frame_index) + "," + std::string(joint_name(joints[k])) + "," +
           format_double(j.position.x) + "," + format_double(j.position.y) + "," +
           format_double(j.position.z) + "," + (j.valid ? "1" : "0") + "\n";
    }
  }
  write_text(path, s);
}

std::vector<Pose3dFrame> read_pose3d(const fs::path& path, double rate_hz) {
  Lines in(path);
  auto meta = in.preamble("pose3d");
  const LayoutKind layout = layout_of(in, meta["layout"]);
  const std::size_t nj = JointSetLayout::get(layout).size();
  in.header("frame,joint,x,y,z,valid");
  std::vector<Pose3dFrame> out;
  while (!in.done()) {
    if (in.peek().empty()) {
      in.next();
      continue;
    }
    const auto c = in.row(6);
    const std::int64_t frame = in.integer(c[0]);
    if (out.empty() || out.back().frame_index != frame) {
      if (!out.empty() && frame < out.back().frame_index) in.fail("frame indices not increasing");
      Pose3dFrame f;
      f.frame_index = frame;
      f.timestamp = static_cast<double>(frame) / rate_hz;
      f.layout = layout;
      f.joints.assign(nj, Joint3d{});
      out.push_back(std::move(f));
    }
    Joint3d& j = out.back().joints[joint_slot(in, layout, c[1])];
    j.position = {in.number(c[2]), in.number(c[3]), in.number(c[4])};
    j.valid = in.flag(c[5]);
  }
  return out;
}

void write_pose2d(const fs::path& path, const std::vector<Pose2dFrame>& frames,
                  LayoutKind layout, const std::string& camera_id) {
  std::string s = "#format_version=1,kind=pose2d,layout=" + std::string(layout_name(layout)) +
                  ",camera=" + camera_id + "\nframe,joint,u,v,conf,valid\n";
  const auto joints = JointSetLayout::get(layout).joints();
  for (const auto& f : frames) {
    if (f.layout != layout) throw Error(ErrorCode::ShapeMismatch, "mixed layouts in pose stream");
    for (std::size_t k = 0; k < joints.size(); ++k) {
      const Joint2d& j = f.joints.at(k);
      s += std::to_string(f.frame_index) + "," + std::string(joint_name(joints[k])) + "," +
           format_double(j.u) + "," + format_double(j.v) + "," + format_double(j.confidence) +
           "," + (j.valid ? "1" : "0") + "\n";
    }
  }
  write_text(path, s);
}

std::vector<Pose2dFrame> read_pose2d(const fs::path& path) {
  Lines in(path);
  auto meta = in.preamble("pose2d");
  const LayoutKind layout = layout_of(in, meta["layout"]);
  const std::string camera = meta["camera"];
  const std::size_t nj = JointSetLayout::get(layout).size();
  in.header("frame,joint,u,v,conf,valid");
  std::vector<Pose2dFrame> out;
  while (!in.done()) {
    if (in.peek().empty()) {
      in.next();
      continue;
    }
    const auto c = in.row(6);
    const std::int64_t frame = in.integer(c[0]);
    if (out.empty() || out.back().frame_index != frame) {
      if (!out.empty() && frame < out.back().frame_index) in.fail("frame indices not increasing");
      Pose2dFrame f;
      f.frame_index = frame;
      f.camera_id = camera;
      f.layout = layout;
      f.joints.assign(nj, Joint2d{});
      out.push_back(std::move(f));
    }
    Joint2d& j = out.back().joints[joint_slot(in, layout, c[1])];
    j.u = in.number(c[2]);
    j.v = in.number(c[3]);
    j.confidence = in.number(c[4]);
    j.valid = in.flag(c[5]);
  }
  return out;
}

void write_com(const fs::path& path, const std::vector<ComFrame>& frames) {
  std::string s = "#format_version=1,kind=com\nframe,x,y,z,valid\n";
  for (const auto& f : frames) {
    s += std::to_string(f.frame_index) + "," + format_double(f.position.x) + "," +
         format_double(f.position.y) + "," + format_double(f.position.z) + "," +
         (f.valid ? "1" : "0") + "\n";
  }
  write_text(path, s);
}

std::vector<ComFrame> read_com(const fs::path& path, double rate_hz) {
  Lines in(path);
  in.preamble("com");
  in.header("frame,x,y,z,valid");
  std::vector<ComFrame> out;
  while (!in.done()) {
    if (in.peek().empty()) {
      in.next();
      continue;
    }
    const auto c = in.row(5);
    ComFrame f;
    f.frame_index = in.integer(c[0]);
    if (!out.empty() && f.frame_index <= out.back().frame_index) in.fail("frame indices not increasing");
    f.timestamp = static_cast<double>(f.frame_index) / rate_hz;
    f.position = {in.number(c[1]), in.number(c[2]), in.number(c[3])};
    f.valid = in.flag(c[4]);
    out.push_back(f);
  }
  return out;
}

// --- pressure -------------------------------------------------------------

void write_pressure(const fs::path& path, const std::vector<PressureMap>& maps) {
  if (maps.empty()) throw Error(ErrorCode::InvalidArgument, "no pressure maps to write");
  const PressureMap& first = maps.front();
  json header = {{"format_version", kFormatVersion}, {"kind", "pressure"},
                 {"rows", first.rows},               {"cols", first.cols},
                 {"cell_size_mm", first.cell_size_mm}, {"side", side_str(first.side)}};
  std::string s = header.dump() + "\n";
  for (const auto& m : maps) {
    if (m.rows != first.rows || m.cols != first.cols || m.cell_size_mm != first.cell_size_mm ||
        m.side != first.side) {
      throw Error(ErrorCode::ShapeMismatch, "pressure maps of one file must share a grid");
    }
    s += "#frame," + std::to_string(m.frame_index) + "\n";
    for (int r = 0; r < m.rows; ++r) {
      for (int c = 0; c < m.cols; ++c) {
        if (c > 0) s += ',';
        s += format_double(m.at(r, c));
      }
      s += '\n';
    }
  }
  write_text(path, s);
}

std::vector<PressureMap> read_pressure(const fs::path& path) {
  Lines in(path);
  const json header = parse_json(path, in.next());
  check_version(path, header);
  if (field<std::string>(path, header, "kind") != "pressure") in.fail("expected kind pressure");
  const int rows = field<int>(path, header, "rows");
  const int cols = field<int>(path, header, "cols");
  const double cell = field<double>(path, header, "cell_size_mm");
  const Side side = side_of(path, field<std::string>(path, header, "side"));
  if (rows <= 0 || cols <= 0 || !(cell > 0.0)) in.fail("invalid grid in header");

  std::vector<PressureMap> out;
  while (!in.done()) {
    if (in.peek().empty()) {
      in.next();
      continue;
    }
    const auto sentinel = in.row(2);
    if (sentinel[0] != "#frame") in.fail("expected '#frame,<index>' row");
    PressureMap m = make_pressure_map(side, rows, cols, cell, in.integer(sentinel[1]));
    if (!out.empty() && m.frame_index <= out.back().frame_index) in.fail("frame indices not increasing");
    for (int r = 0; r < rows; ++r) {
      const auto c = in.row(static_cast<std::size_t>(cols));
      for (int k = 0; k < cols; ++k) {
        const double v = in.number(c[static_cast<std::size_t>(k)]);
        if (!(v >= 0.0) || !std::isfinite(v)) in.fail("pressure must be finite and >= 0");
        m.at(r, k) = v;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

// --- calibration / manifests ---------------------------------------------

void write_calibration(const fs::path& path, const std::vector<CameraProjection>& cameras) {
  json cams = json::array();
  for (const auto& c : cameras) {
    std::vector<double> p;
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 4; ++k) p.push_back(c.P(r, k));
    }
    cams.push_back({{"id", c.camera_id}, {"P", p}});
  }
  write_text(path, dump({{"format_version", kFormatVersion}, {"cameras", cams}}));
}

std::vector<CameraProjection> read_calibration(const fs::path& path) {
  const json j = parse_json(path, read_text(path));
  check_version(path, j);
  std::vector<CameraProjection> out;
  for (const auto& c : field<json>(path, j, "cameras")) {
    CameraProjection cam;
    cam.camera_id = field<std::string>(path, c, "id");
    const auto p = field<std::vector<double>>(path, c, "P");
    if (p.size() != 12) parse_error(path, 1, "projection matrix needs 12 values");
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 4; ++k) cam.P(r, k) = p[static_cast<std::size_t>(4 * r + k)];
    }
    out.push_back(std::move(cam));
  }
  return out;
}

void write_manifest(const fs::path& path, const TakeManifest& m) {
  const TakeFiles& f = m.files;
  json files = {{"calibration", f.calibration},       {"pose2d_op", f.pose2d_op},
                {"pose2d_bp", f.pose2d_bp},           {"gt_pose", f.gt_pose},
                {"gt_com", f.gt_com},                 {"im_com", f.im_com},
                {"pressure_left", f.pressure_left},   {"pressure_right", f.pressure_right},
                {"predicted_left", f.predicted_left}, {"predicted_right", f.predicted_right}};
  json j = {{"format_version", kFormatVersion},
            {"subject_id", m.subject_id},
            {"take_id", m.take_id},
            {"sample_rate_hz", m.sample_rate_hz},
            {"raw_rate_hz", m.raw_rate_hz},
            {"files", files},
            {"excluded", m.excluded},
            {"exclusion_reason", m.exclusion_reason}};
  write_text(path, dump(j));
}

TakeManifest read_manifest(const fs::path& path) {
  const json j = parse_json(path, read_text(path));
  check_version(path, j);
  TakeManifest m;
  m.subject_id = field<std::string>(path, j, "subject_id");
  m.take_id = field<std::string>(path, j, "take_id");
  m.sample_rate_hz = field<double>(path, j, "sample_rate_hz");
  m.raw_rate_hz = j.contains("raw_rate_hz") ? field<double>(path, j, "raw_rate_hz") : m.sample_rate_hz;
  m.excluded = j.contains("excluded") && field<bool>(path, j, "excluded");
  if (j.contains("exclusion_reason")) m.exclusion_reason = field<std::string>(path, j, "exclusion_reason");
  const json files = field<json>(path, j, "files");
  const auto opt = [&](const char* key) {
    return files.contains(key) ? field<std::string>(path, files, key) : std::string();
  };
  const auto opt_list = [&](const char* key) {
    return files.contains(key) ? field<std::vector<std::string>>(path, files, key)
                               : std::vector<std::string>();
  };
  m.files.calibration = opt("calibration");
  m.files.pose2d_op = opt_list("pose2d_op");
  m.files.pose2d_bp = opt_list("pose2d_bp");
  m.files.gt_pose = opt("gt_pose");
  m.files.gt_com = opt("gt_com");
  m.files.im_com = opt("im_com");
  m.files.pressure_left = opt("pressure_left");
  m.files.pressure_right = opt("pressure_right");
  m.files.predicted_left = opt("predicted_left");
  m.files.predicted_right = opt("predicted_right");
  if (!(m.sample_rate_hz > 0.0) || !(m.raw_rate_hz >= m.sample_rate_hz)) {
    parse_error(path, 1, "sample rates must satisfy 0 < sample_rate_hz <= raw_rate_hz");
  }
  if (m.files.pressure_left.empty() || m.files.pressure_right.empty()) {
    parse_error(path, 1, "pressure_left and pressure_right are required");
  }
  if (m.files.pose2d_op.size() != 2 || (!m.files.pose2d_bp.empty() && m.files.pose2d_bp.size() != 2)) {
    parse_error(path, 1, "pose2d_op (and pose2d_bp if given) need exactly two cameras");
  }
  if (m.files.calibration.empty()) parse_error(path, 1, "calibration is required");
  return m;
}

namespace {

template <typename T, typename IndexOf>
std::vector<T> decimate(std::vector<T> v, std::int64_t factor, IndexOf index_of) {
  if (factor == 1) return v;
  std::vector<T> out;
  for (auto& x : v) {
    if (index_of(x) % factor == 0) out.push_back(std::move(x));
  }
  return out;
}

struct IndexStream {
  std::string name;
  std::vector<std::int64_t> index;
};

template <typename T, typename IndexOf>
IndexStream indices(std::string name, const std::vector<T>& v, IndexOf index_of) {
  IndexStream s{std::move(name), {}};
  for (const auto& x : v) s.index.push_back(index_of(x));
  return s;
}

void check_aligned(const std::string& take_id, const std::vector<IndexStream>& streams) {
  const IndexStream& ref = streams.front();
  for (const auto& s : streams) {
    const std::size_t n = std::min(s.index.size(), ref.index.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (s.index[i] != ref.index[i]) {
        throw Error(ErrorCode::AlignmentError,
                    take_id + ": " + s.name + " has frame " + std::to_string(s.index[i]) +
                        " where " + ref.name + " has frame " + std::to_string(ref.index[i]) +
                        " (position " + std::to_string(i) + ")");
      }
    }
    if (s.index.size() != ref.index.size()) {
      const bool shorter = s.index.size() < ref.index.size();
      const std::int64_t at = shorter ? ref.index[n] : s.index[n];
      throw Error(ErrorCode::AlignmentError,
                  take_id + ": " + s.name + " has " + std::to_string(s.index.size()) +
                      " frames, " + ref.name + " has " + std::to_string(ref.index.size()) +
                      "; first unmatched frame index " + std::to_string(at));
    }
  }
}

}  // namespace

TakeData load_take(const fs::path& manifest_path) {
  const TakeManifest m = read_manifest(manifest_path);
  if (m.excluded) {
    throw Error(ErrorCode::ExcludedTake, m.take_id + " is excluded: " + m.exclusion_reason);
  }
  const fs::path dir = manifest_path.parent_path();
  const auto at = [&](const std::string& rel) { return dir / rel; };
  const double ratio = m.raw_rate_hz / m.sample_rate_hz;
  const auto factor = static_cast<std::int64_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(factor)) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, m.take_id + ": raw rate is not an integer multiple "
                                                       "of the sample rate");
  }
  const auto pose_idx = [](const auto& f) { return f.frame_index; };

  TakeData t;
  t.subject_id = m.subject_id;
  t.take_id = m.take_id;
  t.sample_rate_hz = m.sample_rate_hz;
  const double raw = m.raw_rate_hz;

  if (!m.files.gt_pose.empty()) t.gt_pose = decimate(read_pose3d(at(m.files.gt_pose), raw), factor, pose_idx);
  if (!m.files.gt_com.empty()) t.gt_com = decimate(read_com(at(m.files.gt_com), raw), factor, pose_idx);
  if (!m.files.im_com.empty()) t.im_com = decimate(read_com(at(m.files.im_com), raw), factor, pose_idx);
  t.gt_left = decimate(read_pressure(at(m.files.pressure_left)), factor, pose_idx);
  t.gt_right = decimate(read_pressure(at(m.files.pressure_right)), factor, pose_idx);
  if (!m.files.predicted_left.empty()) {
    t.im_left = decimate(read_pressure(at(m.files.predicted_left)), factor, pose_idx);
  }
  if (!m.files.predicted_right.empty()) {
    t.im_right = decimate(read_pressure(at(m.files.predicted_right)), factor, pose_idx);
  }
  std::array<std::vector<Pose2dFrame>, 2> op;
  std::array<std::vector<Pose2dFrame>, 2> bp;
  for (std::size_t c = 0; c < 2; ++c) {
    op[c] = decimate(read_pose2d(at(m.files.pose2d_op[c])), factor, pose_idx);
    if (!m.files.pose2d_bp.empty()) {
      bp[c] = decimate(read_pose2d(at(m.files.pose2d_bp[c])), factor, pose_idx);
    }
  }

  std::vector<IndexStream> streams;
  if (!t.gt_com.empty()) streams.push_back(indices("gt_com", t.gt_com, pose_idx));
  if (!t.gt_pose.empty()) streams.push_back(indices("gt_pose", t.gt_pose, pose_idx));
  streams.push_back(indices("pose2d_op[0]", op[0], pose_idx));
  streams.push_back(indices("pose2d_op[1]", op[1], pose_idx));
  if (!bp[0].empty()) {
    streams.push_back(indices("pose2d_bp[0]", bp[0], pose_idx));
    streams.push_back(indices("pose2d_bp[1]", bp[1], pose_idx));
  }
  if (!t.im_com.empty()) streams.push_back(indices("im_com", t.im_com, pose_idx));
  streams.push_back(indices("pressure_left", t.gt_left, pose_idx));
  streams.push_back(indices("pressure_right", t.gt_right, pose_idx));
  if (!t.im_left.empty()) streams.push_back(indices("predicted_left", t.im_left, pose_idx));
  if (!t.im_right.empty()) streams.push_back(indices("predicted_right", t.im_right, pose_idx));
  check_aligned(t.take_id, streams);

  // Ground-truth CoM, if not supplied, from the segmental model on GT joints.
  if (t.gt_com.empty() && !t.gt_pose.empty()) {
    const ComModel model = ComModel::winter();
    for (const auto& f : t.gt_pose) {
      ComFrame c{f.frame_index, f.timestamp, {}, false};
      try {
        c.position = dempster_com(f, model);
        c.valid = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::MissingObservation) throw;
      }
      t.gt_com.push_back(c);
    }
  }

  const auto cams = read_calibration(at(m.files.calibration));
  const auto camera = [&](const std::string& id) -> const CameraProjection& {
    for (const auto& c : cams) {
      if (c.camera_id == id) return c;
    }
    throw Error(ErrorCode::ParseError, at(m.files.calibration).string() +
                                           ":1: no calibration for camera '" + id + "'");
  };
  for (std::size_t i = 0; i < op[0].size(); ++i) {
    const double ts = static_cast<double>(op[0][i].frame_index) / raw;
    Pose3dFrame o = triangulate_frame(op[0][i], op[1][i], camera(op[0][i].camera_id),
                                      camera(op[1][i].camera_id), ts);
    if (!bp[0].empty()) {
      const Pose3dFrame b = triangulate_frame(bp[0][i], bp[1][i], camera(bp[0][i].camera_id),
                                              camera(bp[1][i].camera_id), ts);
      t.hp_pose.push_back(assemble_hybrid_pose(b, o));
    } else {
      t.hp_pose.push_back(select_layout(o, LayoutKind::HP));
    }
    t.op_pose.push_back(std::move(o));
  }

  try {
    t.check_alignment();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::StreamMisalignment) throw;
    throw Error(ErrorCode::AlignmentError, e.what());
  }
  return t;
}

fs::path write_synth_take(const fs::path& dir, const SynthTake& take) {
  const TakeData& d = take.data;
  const fs::path root = dir / d.take_id;
  TakeManifest m;
  m.subject_id = d.subject_id;
  m.take_id = d.take_id;
  m.sample_rate_hz = d.sample_rate_hz;
  m.raw_rate_hz = d.sample_rate_hz;
  m.files.calibration = "calibration.json";
  write_calibration(root / m.files.calibration,
                    std::vector<CameraProjection>(take.cameras.begin(), take.cameras.end()));
  for (std::size_t c = 0; c < 2; ++c) {
    const std::string& id = take.cameras[c].camera_id;
    m.files.pose2d_op.push_back("op_" + id + ".csv");
    m.files.pose2d_bp.push_back("bp_" + id + ".csv");
    write_pose2d(root / m.files.pose2d_op.back(), take.op2d[c], LayoutKind::OP, id);
    write_pose2d(root / m.files.pose2d_bp.back(), take.bp2d[c], LayoutKind::BP, id);
  }
  m.files.gt_pose = "gt_pose.csv";
  write_pose3d(root / m.files.gt_pose, d.gt_pose, LayoutKind::GT);
  m.files.gt_com = "gt_com.csv";
  write_com(root / m.files.gt_com, d.gt_com);
  if (!d.im_com.empty()) {
    m.files.im_com = "im_com.csv";
    write_com(root / m.files.im_com, d.im_com);
  }
  m.files.pressure_left = "pressure_left.txt";
  m.files.pressure_right = "pressure_right.txt";
  m.files.predicted_left = "predicted_left.txt";
  m.files.predicted_right = "predicted_right.txt";
  write_pressure(root / m.files.pressure_left, d.gt_left);
  write_pressure(root / m.files.pressure_right, d.gt_right);
  write_pressure(root / m.files.predicted_left, d.im_left);
  write_pressure(root / m.files.predicted_right, d.im_right);

  std::string truth =
      "#format_version=1,kind=synth_truth,program=" + std::string(program_name(take.program)) +
      "\nframe,com_x,com_y,com_z,cop_x,cop_y,cop_valid,target_cop_x,target_cop_y,total_force_n,"
      "double_support\n";
  for (std::size_t i = 0; i < take.truth.size(); ++i) {
    const AnalyticFrame& a = take.truth[i];
    truth += std::to_string(d.frame_index(i)) + "," + format_double(a.com.x) + "," +
             format_double(a.com.y) + "," + format_double(a.com.z) + "," + format_double(a.cop.x) +
             "," + format_double(a.cop.y) + "," + (a.cop_valid ? "1" : "0") + "," +
             format_double(a.target_cop.x) + "," + format_double(a.target_cop.y) + "," +
             format_double(a.total_force_n) + "," + (a.double_support ? "1" : "0") + "\n";
  }
  write_text(root / "truth.csv", truth);

  const fs::path manifest = root / "manifest.json";
  write_manifest(manifest, m);
  return manifest;
}

void write_dataset(const fs::path& path, const std::vector<fs::path>& manifests) {
  json takes = json::array();
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  for (const auto& p : manifests) takes.push_back(fs::relative(p, base).generic_string());
  write_text(path, dump({{"format_version", kFormatVersion}, {"takes", takes}}));
}

Dataset load_dataset(const fs::path& path) {
  const json j = parse_json(path, read_text(path));
  check_version(path, j);
  Dataset ds;
  const fs::path base = path.parent_path();
  for (const auto& rel : field<std::vector<std::string>>(path, j, "takes")) {
    const fs::path mp = base / rel;
    const TakeManifest m = read_manifest(mp);
    if (m.excluded) {
      ds.excluded.emplace_back(m.take_id, m.exclusion_reason);
      continue;
    }
    ds.takes.push_back(load_take(mp));
  }
  return ds;
}

// --- series ---------------------------------------------------------------

namespace {

constexpr std::string_view kSeriesHeader =
    "frame,timestamp,com_x,com_y,cop_x,cop_y,com_to_cop,com_to_bos,com_valid,cop_valid,"
    "bos_valid,cop_passthrough,bos_passthrough,bos";

}  // namespace

void write_series(const fs::path& path, const StabilitySeries& series) {
  std::string s = "#format_version=1,kind=series,take=" + series.take_id +
                  ",subject=" + series.subject_id + ",channels=" + series.channels.label() +
                  ",sample_rate_hz=" + format_double(series.sample_rate_hz) + "\n" +
                  std::string(kSeriesHeader) + "\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& f : series.frames) {
    std::string bos;
    if (f.bos) {
      for (const auto& v : f.bos->vertices()) {
        if (!bos.empty()) bos += ';';
        bos += format_double(v.x) + ":" + format_double(v.y);
      }
    }
    s += std::to_string(f.frame_index) + "," + format_double(f.timestamp) + "," +
         format_double(f.com_valid ? f.com2d.x : nan) + "," +
         format_double(f.com_valid ? f.com2d.y : nan) + "," +
         format_double(f.cop_valid ? f.cop.x : nan) + "," +
         format_double(f.cop_valid ? f.cop.y : nan) + "," +
         format_double(f.cop_metric_valid() ? f.com_to_cop : nan) + "," +
         format_double(f.bos_metric_valid() ? f.com_to_bos : nan) + "," +
         (f.com_valid ? "1" : "0") + "," + (f.cop_valid ? "1" : "0") + "," +
         (f.bos_valid ? "1" : "0") + "," + (f.cop_passthrough ? "1" : "0") + "," +
         (f.bos_passthrough ? "1" : "0") + "," + bos + "\n";
  }
  write_text(path, s);
}

StabilitySeries read_series(const fs::path& path) {
  Lines in(path);
  auto meta = in.preamble("series");
  StabilitySeries s;
  s.take_id = meta["take"];
  s.subject_id = meta["subject"];
  const auto ch = ChannelSelection::parse(meta["channels"]);
  if (!ch) in.fail("unknown channel combination '" + meta["channels"] + "'");
  s.channels = *ch;
  s.sample_rate_hz = in.number(meta["sample_rate_hz"]);
  if (!(s.sample_rate_hz > 0.0)) in.fail("sample_rate_hz must be > 0");
  in.header(kSeriesHeader);
  while (!in.done()) {
    if (in.peek().empty()) {
      in.next();
      continue;
    }
    const auto c = in.row(14);
    StabilityFrame f;
    f.frame_index = in.integer(c[0]);
    if (!s.frames.empty() && f.frame_index <= s.frames.back().frame_index) {
      in.fail("frame indices not increasing");
    }
    f.timestamp = in.number(c[1]);
    f.com2d = {in.number(c[2]), in.number(c[3])};
    f.cop = {in.number(c[4]), in.number(c[5])};
    f.com_to_cop = in.number(c[6]);
    f.com_to_bos = in.number(c[7]);
    f.com_valid = in.flag(c[8]);
    f.cop_valid = in.flag(c[9]);
    f.bos_valid = in.flag(c[10]);
    f.cop_passthrough = in.flag(c[11]);
    f.bos_passthrough = in.flag(c[12]);
    if (!c[13].empty()) {
      std::vector<Point2> verts;
      for (auto v : split(c[13], ';')) {
        const auto xy = split(v, ':');
        if (xy.size() != 2) in.fail("malformed BoS vertex '" + std::string(v) + "'");
        verts.push_back({in.number(xy[0]), in.number(xy[1])});
      }
      try {
        f.bos = ConvexPolygon::from_ccw(std::move(verts));
      } catch (const Error& e) {
        in.fail(std::string("invalid BoS polygon: ") + e.what());
      }
    }
    if (!f.com_valid) f.com2d = {};
    if (!f.cop_valid) f.cop = {};
    if (!f.cop_metric_valid()) f.com_to_cop = 0.0;
    if (!f.bos_metric_valid()) f.com_to_bos = 0.0;
    s.frames.push_back(std::move(f));
  }
  return s;
}

// --- CoMNet container -----------------------------------------------------

void write_comnet(const fs::path& path, const ComNetParams& params) {
  params.validate();
  std::vector<std::pair<std::string, Eigen::MatrixXf>> tensors;
  for (std::size_t g = 0; g < kParamGroupCount; ++g) {
    tensors.emplace_back(std::string(param_group_name(g)), params.weights[g]);
  }
  for (std::size_t k = 0; k < 2; ++k) {
    tensors.emplace_back("running_mean" + std::to_string(k + 1), params.running_mean[k]);
    tensors.emplace_back("running_var" + std::to_string(k + 1), params.running_var[k]);
  }
  tensors.emplace_back("input_mean", params.input_mean);
  tensors.emplace_back("input_std", params.input_std);

  json shapes = json::array();
  for (const auto& [name, m] : tensors) {
    shapes.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  }
  const json header = {{"format_version", kFormatVersion},
                       {"layout", std::string(layout_name(params.layout))},
                       {"width", params.width},
                       {"dropout", params.dropout},
                       {"target_mean", {params.target_mean.x(), params.target_mean.y(),
                                        params.target_mean.z()}},
                       {"target_scale", params.target_scale},
                       {"tensors", shapes}};
  const std::string h = header.dump();
  std::string out(kModelMagic, sizeof kModelMagic);
  const auto append = [&](const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
  };
  append(&kModelVersion, sizeof kModelVersion);
  const std::uint64_t hlen = h.size();
  append(&hlen, sizeof hlen);
  out += h;
  for (const auto& [name, m] : tensors) {
    append(m.data(), static_cast<std::size_t>(m.size()) * sizeof(float));
  }
  write_text(path, out);
}

ComNetParams read_comnet(const fs::path& path) {
  const std::string data = read_text(path);
  std::size_t pos = 0;
  const auto take = [&](void* dst, std::size_t n) {
    if (pos + n > data.size()) parse_error(path, 0, "truncated model file");
    std::memcpy(dst, data.data() + pos, n);
    pos += n;
  };
  char magic[8];
  take(magic, sizeof magic);
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0) parse_error(path, 0, "not a CoMNet model");
  std::uint32_t version = 0;
  take(&version, sizeof version);
  if (version != kModelVersion) parse_error(path, 0, "unsupported model version");
  std::uint64_t hlen = 0;
  take(&hlen, sizeof hlen);
  if (pos + hlen > data.size()) parse_error(path, 0, "truncated model header");
  const json header = parse_json(path, std::string_view(data).substr(pos, hlen), 0);
  pos += hlen;
  check_version(path, header);

  ComNetParams p;
  const auto layout = layout_from_name(field<std::string>(path, header, "layout"));
  if (!layout) parse_error(path, 0, "unknown layout");
  p.layout = *layout;
  p.width = field<int>(path, header, "width");
  p.dropout = field<double>(path, header, "dropout");
  const auto tm = field<std::vector<double>>(path, header, "target_mean");
  if (tm.size() != 3) parse_error(path, 0, "target_mean needs 3 values");
  p.target_mean = {tm[0], tm[1], tm[2]};
  p.target_scale = field<double>(path, header, "target_scale");

  std::map<std::string, Eigen::MatrixXf*> slots;
  for (std::size_t g = 0; g < kParamGroupCount; ++g) {
    slots[std::string(param_group_name(g))] = &p.weights[g];
  }
  std::array<Eigen::MatrixXf, 6> vecs;
  slots["running_mean1"] = &vecs[0];
  slots["running_var1"] = &vecs[1];
  slots["running_mean2"] = &vecs[2];
  slots["running_var2"] = &vecs[3];
  slots["input_mean"] = &vecs[4];
  slots["input_std"] = &vecs[5];
  std::size_t seen = 0;
  for (const auto& t : field<json>(path, header, "tensors")) {
    const auto name = field<std::string>(path, t, "name");
    const auto rows = field<long>(path, t, "rows");
    const auto cols = field<long>(path, t, "cols");
    const auto it = slots.find(name);
    if (it == slots.end() || rows < 0 || cols < 0) parse_error(path, 0, "bad tensor '" + name + "'");
    it->second->resize(rows, cols);
    take(it->second->data(), static_cast<std::size_t>(rows * cols) * sizeof(float));
    ++seen;
  }
  if (seen != slots.size()) parse_error(path, 0, "model file lacks tensors");
  if (pos != data.size()) parse_error(path, 0, "trailing bytes in model file");
  p.running_mean[0] = vecs[0];
  p.running_var[0] = vecs[1];
  p.running_mean[1] = vecs[2];
  p.running_var[1] = vecs[3];
  p.input_mean = vecs[4];
  p.input_std = vecs[5];
  p.validate();
  return p;
}

}  // namespace stabilikit::io
