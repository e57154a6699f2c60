#include "sparseloc/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "sparseloc/error.hpp"

namespace sparseloc {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

[[noreturn]] void format_error(std::string_view source, const std::string& what) {
  throw Error(ErrorCode::InputFormat, std::string(source) + ": " + what);
}

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    format_error(source, std::string("invalid JSON: ") + e.what());
  }
}

// Field accessors that report the JSON path on failure.
class Reader {
 public:
  Reader(std::string_view source) : source_(source) {}

  const json& field(const json& obj, const std::string& key, const std::string& where) const {
    if (!obj.is_object()) fail(where + " must be an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail("missing required field '" + where + "." + key + "'");
    return *it;
  }

  double number(const json& v, const std::string& where) const {
    if (!v.is_number()) fail("'" + where + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail("'" + where + "' must be finite");
    return d;
  }

  long long integer(const json& v, const std::string& where) const {
    if (!v.is_number_integer()) fail("'" + where + "' must be an integer");
    return v.get<long long>();
  }

  std::string string(const json& v, const std::string& where) const {
    if (!v.is_string()) fail("'" + where + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, std::size_t n, const std::string& where) const {
    if (!v.is_array() || v.size() != n) {
      fail("'" + where + "' must be an array of " + std::to_string(n) + " numbers");
    }
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  Vec3 vec3(const json& v, const std::string& where) const {
    const auto a = numbers(v, 3, where);
    return {a[0], a[1], a[2]};
  }

  [[noreturn]] void fail(const std::string& what) const { format_error(source_, what); }

 private:
  std::string_view source_;
};

CameraRig camera_from_json(const json& obj, const Reader& r, const std::string& where) {
  CameraRig rig;
  const auto m = r.numbers(r.field(obj, "camera_to_world", where), 16, where + ".camera_to_world");
  std::copy(m.begin(), m.end(), rig.camera_to_world.m.begin());
  rig.fov_y = r.number(r.field(obj, "fov_y_deg", where), where + ".fov_y_deg") * kDeg;
  rig.aspect = r.number(r.field(obj, "aspect", where), where + ".aspect");
  rig.near_clip = r.number(r.field(obj, "near", where), where + ".near");
  rig.far_clip = r.number(r.field(obj, "far", where), where + ".far");
  try {
    rig.validate();
  } catch (const Error& e) {
    r.fail(where + ": " + e.what());
  }
  return rig;
}

std::string join_numbers(std::span<const double> values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_number(values[i]);
  }
  return out + "]";
}

std::string vec3_json(const Vec3& v) {
  const std::array<double, 3> a{v.x, v.y, v.z};
  return join_numbers(a);
}

std::string json_string(std::string_view s) { return json(std::string(s)).dump(); }

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) format_error(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) format_error(path.string(), "read failed");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) format_error(path.string(), "cannot open file for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) format_error(path.string(), "write failed");
}

// --- cloud CSV ---------------------------------------------------------------

std::vector<Landmark> parse_cloud_csv(std::string_view text, std::string_view source) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
      s.remove_suffix(1);
    }
    return s;
  };

  std::vector<Landmark> cloud;
  std::unordered_set<std::int64_t> seen;
  bool header = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (!header) {
      if (line != "id,x,y,z") format_error(source, where + ": expected header 'id,x,y,z'");
      header = true;
      continue;
    }

    std::array<std::string_view, 4> fields;
    std::size_t count = 0;
    for (std::string_view rest = line;; ) {
      const std::size_t comma = rest.find(',');
      if (count == fields.size()) format_error(source, where + ": expected 4 fields");
      fields[count++] = trim(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (count != 4) format_error(source, where + ": expected 4 fields");

    Landmark l;
    auto [p, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), l.id);
    if (ec != std::errc{} || p != fields[0].data() + fields[0].size()) {
      format_error(source, where + ": invalid id '" + std::string(fields[0]) + "'");
    }
    for (std::size_t k = 0; k < 3; ++k) {
      const std::string_view f = fields[k + 1];
      double v = 0.0;
      auto [q, ec2] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec2 != std::errc{} || q != f.data() + f.size() || !std::isfinite(v)) {
        format_error(source, where + ": invalid coordinate '" + std::string(f) + "'");
      }
      l.position[k] = v;
    }
    if (!seen.insert(l.id).second) {
      format_error(source, where + ": duplicate landmark id " + std::to_string(l.id));
    }
    cloud.push_back(l);
  }
  if (!header) format_error(source, "missing header 'id,x,y,z'");
  return cloud;
}

std::vector<Landmark> read_cloud_csv(const std::filesystem::path& path) {
  return parse_cloud_csv(read_text_file(path), path.string());
}

std::string format_cloud_csv(std::span<const Landmark> cloud) {
  std::string out = "id,x,y,z\n";
  for (const Landmark& l : cloud) {
    out += std::to_string(l.id) + "," + format_number(l.position.x) + "," +
           format_number(l.position.y) + "," + format_number(l.position.z) + "\n";
  }
  return out;
}

// --- cameras -----------------------------------------------------------------

std::vector<CameraRig> parse_cameras_json(std::string_view text, std::string_view source) {
  const json doc = parse_json(text, source);
  const Reader r(source);
  std::vector<CameraRig> rigs;
  if (doc.is_object()) {
    rigs.push_back(camera_from_json(doc, r, "camera"));
  } else if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      rigs.push_back(camera_from_json(doc[i], r, "cameras[" + std::to_string(i) + "]"));
    }
  } else {
    r.fail("expected a camera object or an array of camera objects");
  }
  return rigs;
}

std::vector<CameraRig> read_cameras_json(const std::filesystem::path& path) {
  return parse_cameras_json(read_text_file(path), path.string());
}

std::string format_camera_json(const CameraRig& rig) {
  return "{\"camera_to_world\": " + join_numbers(rig.camera_to_world.m) +
         ", \"fov_y_deg\": " + format_number(rig.fov_y / kDeg) +
         ", \"aspect\": " + format_number(rig.aspect) +
         ", \"near\": " + format_number(rig.near_clip) +
         ", \"far\": " + format_number(rig.far_clip) + "}";
}

std::string format_cameras_json(std::span<const CameraRig> rigs) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < rigs.size(); ++i) {
    out += "  " + format_camera_json(rigs[i]) + (i + 1 < rigs.size() ? ",\n" : "\n");
  }
  return out + "]\n";
}

// --- detections --------------------------------------------------------------

std::vector<Detection> parse_detections_json(std::string_view text, std::string_view source) {
  const json doc = parse_json(text, source);
  const Reader r(source);
  if (!doc.is_array()) r.fail("expected an array of detections");
  std::vector<Detection> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "detections[" + std::to_string(i) + "]";
    const json& d = doc[i];
    Detection det;
    const long long frame = r.integer(r.field(d, "frame", where), where + ".frame");
    if (frame < 0 || frame > std::numeric_limits<int>::max()) {
      r.fail("'" + where + ".frame' must be a non-negative int");
    }
    det.frame_id = static_cast<int>(frame);
    det.box.class_label = r.string(r.field(d, "class", where), where + ".class");
    det.box.confidence = r.number(r.field(d, "confidence", where), where + ".confidence");
    const auto b = r.numbers(r.field(d, "box_px", where), 4, where + ".box_px");
    det.box.x_min = b[0];
    det.box.y_min = b[1];
    det.box.x_max = b[2];
    det.box.y_max = b[3];
    const json& size = r.field(d, "image_size", where);
    if (!size.is_array() || size.size() != 2) r.fail("'" + where + ".image_size' must be [w, h]");
    const long long w = r.integer(size[0], where + ".image_size[0]");
    const long long h = r.integer(size[1], where + ".image_size[1]");
    if (w <= 0 || h <= 0 || w > std::numeric_limits<int>::max() ||
        h > std::numeric_limits<int>::max()) {
      r.fail("'" + where + ".image_size' must be positive");
    }
    det.box.image_width = static_cast<int>(w);
    det.box.image_height = static_cast<int>(h);
    try {
      det.box.validate();
    } catch (const Error& e) {
      r.fail(where + ": " + e.what());
    }
    out.push_back(std::move(det));
  }
  return out;
}

std::vector<Detection> read_detections_json(const std::filesystem::path& path) {
  return parse_detections_json(read_text_file(path), path.string());
}

std::string format_detections_json(std::span<const Detection> detections) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Detection& d = detections[i];
    const std::array<double, 4> box{d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max};
    out += "  {\"frame\": " + std::to_string(d.frame_id) +
           ", \"class\": " + json_string(d.box.class_label) +
           ", \"confidence\": " + format_number(d.box.confidence) +
           ", \"box_px\": " + join_numbers(box) +
           ", \"image_size\": [" + std::to_string(d.box.image_width) + ", " +
           std::to_string(d.box.image_height) + "]}" +
           (i + 1 < detections.size() ? ",\n" : "\n");
  }
  return out + "]\n";
}

// --- pose ----------------------------------------------------------------------

std::string format_pose_json(const TargetPose& pose) {
  std::string out = "{\n";
  out += "  \"center\": " + vec3_json(pose.center) + ",\n";
  out += "  \"axes\": [" + vec3_json(pose.axes[0]) + ", " + vec3_json(pose.axes[1]) + ", " +
         vec3_json(pose.axes[2]) + "],\n";
  out += "  \"eigenvalues\": " + join_numbers(pose.eigenvalues) + ",\n";
  out += "  \"point_count\": " + std::to_string(pose.point_count) + ",\n";
  out += std::string("  \"isotropy_flag\": ") + (pose.isotropy_flag ? "true" : "false") + "\n";
  return out + "}\n";
}

TargetPose parse_pose_json(std::string_view text, std::string_view source) {
  const json doc = parse_json(text, source);
  const Reader r(source);
  TargetPose pose;
  pose.center = r.vec3(r.field(doc, "center", "pose"), "pose.center");
  const json& axes = r.field(doc, "axes", "pose");
  if (!axes.is_array() || axes.size() != 3) r.fail("'pose.axes' must hold 3 rows");
  for (std::size_t i = 0; i < 3; ++i) {
    pose.axes[i] = r.vec3(axes[i], "pose.axes[" + std::to_string(i) + "]");
  }
  const auto ev = r.numbers(r.field(doc, "eigenvalues", "pose"), 3, "pose.eigenvalues");
  std::copy(ev.begin(), ev.end(), pose.eigenvalues.begin());
  const long long count = r.integer(r.field(doc, "point_count", "pose"), "pose.point_count");
  if (count < 0) r.fail("'pose.point_count' must be non-negative");
  pose.point_count = static_cast<std::size_t>(count);
  const json& flag = r.field(doc, "isotropy_flag", "pose");
  if (!flag.is_boolean()) r.fail("'pose.isotropy_flag' must be a boolean");
  pose.isotropy_flag = flag.get<bool>();
  return pose;
}

// --- scene spec ----------------------------------------------------------------

SceneSpec parse_scene_spec(std::string_view text, std::string_view source) {
  const json doc = parse_json(text, source);
  const Reader r(source);
  SceneSpec spec;

  const json& seed = r.field(doc, "seed", "scene");
  if (seed.is_number_unsigned()) {
    spec.seed = seed.get<std::uint64_t>();
  } else {
    const long long s = r.integer(seed, "scene.seed");
    if (s < 0) r.fail("'scene.seed' must be non-negative");
    spec.seed = static_cast<std::uint64_t>(s);
  }

  const json& target = r.field(doc, "target", "scene");
  spec.target.center = r.vec3(r.field(target, "center", "scene.target"), "scene.target.center");
  if (target.contains("rotation")) {
    const auto m = r.numbers(target["rotation"], 9, "scene.target.rotation");
    std::copy(m.begin(), m.end(), spec.target.rotation.m.begin());
  }
  const auto ext = r.numbers(r.field(target, "extents", "scene.target"), 3, "scene.target.extents");
  std::copy(ext.begin(), ext.end(), spec.target.extents.begin());
  const long long nt = r.integer(r.field(target, "n_points", "scene.target"), "scene.target.n_points");
  if (nt < 0 || nt > 10'000'000) r.fail("'scene.target.n_points' out of range");
  spec.target.n_points = static_cast<int>(nt);
  if (target.contains("class")) spec.target.class_label = r.string(target["class"], "scene.target.class");

  if (doc.contains("clutter")) {
    const json& clutter = doc["clutter"];
    const long long nc = r.integer(r.field(clutter, "n_points", "scene.clutter"), "scene.clutter.n_points");
    if (nc < 0 || nc > 10'000'000) r.fail("'scene.clutter.n_points' out of range");
    spec.clutter.n_points = static_cast<int>(nc);
    spec.clutter.bounds_min = r.vec3(r.field(clutter, "bounds_min", "scene.clutter"), "scene.clutter.bounds_min");
    spec.clutter.bounds_max = r.vec3(r.field(clutter, "bounds_max", "scene.clutter"), "scene.clutter.bounds_max");
  }

  spec.noise_sigma = r.number(r.field(doc, "noise_sigma", "scene"), "scene.noise_sigma");
  if (doc.contains("image_size")) {
    const json& size = doc["image_size"];
    if (!size.is_array() || size.size() != 2) r.fail("'scene.image_size' must be [w, h]");
    const long long w = r.integer(size[0], "scene.image_size[0]");
    const long long h = r.integer(size[1], "scene.image_size[1]");
    if (w <= 0 || h <= 0 || w > 1'000'000 || h > 1'000'000) r.fail("'scene.image_size' out of range");
    spec.image_width = static_cast<int>(w);
    spec.image_height = static_cast<int>(h);
  }
  if (doc.contains("discovery_fraction")) {
    spec.discovery_fraction = r.number(doc["discovery_fraction"], "scene.discovery_fraction");
  }

  const bool has_traj = doc.contains("trajectory");
  const bool has_orbit = doc.contains("orbit");
  if (has_traj == has_orbit) r.fail("scene needs exactly one of 'trajectory' or 'orbit'");
  if (has_traj) {
    const json& traj = doc["trajectory"];
    if (!traj.is_array()) r.fail("'scene.trajectory' must be an array of cameras");
    for (std::size_t i = 0; i < traj.size(); ++i) {
      spec.trajectory.push_back(
          camera_from_json(traj[i], r, "scene.trajectory[" + std::to_string(i) + "]"));
    }
  } else {
    const json& o = doc["orbit"];
    const std::string w = "scene.orbit";
    OrbitSpec orbit;
    orbit.look_at = r.vec3(r.field(o, "look_at", w), w + ".look_at");
    orbit.radius = r.number(r.field(o, "radius", w), w + ".radius");
    orbit.height = r.number(r.field(o, "height", w), w + ".height");
    orbit.start_deg = r.number(r.field(o, "start_deg", w), w + ".start_deg");
    orbit.sweep_deg = r.number(r.field(o, "sweep_deg", w), w + ".sweep_deg");
    const long long frames = r.integer(r.field(o, "frames", w), w + ".frames");
    if (frames < 1 || frames > 100'000) r.fail("'scene.orbit.frames' out of range");
    orbit.frames = static_cast<int>(frames);
    orbit.fov_y_deg = r.number(r.field(o, "fov_y_deg", w), w + ".fov_y_deg");
    orbit.aspect = r.number(r.field(o, "aspect", w), w + ".aspect");
    orbit.near_clip = r.number(r.field(o, "near", w), w + ".near");
    orbit.far_clip = r.number(r.field(o, "far", w), w + ".far");
    try {
      spec.trajectory = orbit_trajectory(orbit);
    } catch (const Error& e) {
      r.fail(w + ": " + e.what());
    }
  }
  if (spec.trajectory.empty()) r.fail("scene trajectory is empty");

  try {
    spec.validate();
  } catch (const Error& e) {
    r.fail(e.what());
  }
  return spec;
}

SceneSpec read_scene_spec(const std::filesystem::path& path) {
  return parse_scene_spec(read_text_file(path), path.string());
}

std::string format_scene_spec(const SceneSpec& spec) {
  std::string out = "{\n";
  out += "  \"seed\": " + std::to_string(spec.seed) + ",\n";
  out += "  \"target\": {\"center\": " + vec3_json(spec.target.center) +
         ", \"rotation\": " + join_numbers(spec.target.rotation.m) +
         ", \"extents\": " + join_numbers(spec.target.extents) +
         ", \"n_points\": " + std::to_string(spec.target.n_points) +
         ", \"class\": " + json_string(spec.target.class_label) + "},\n";
  out += "  \"clutter\": {\"n_points\": " + std::to_string(spec.clutter.n_points) +
         ", \"bounds_min\": " + vec3_json(spec.clutter.bounds_min) +
         ", \"bounds_max\": " + vec3_json(spec.clutter.bounds_max) + "},\n";
  out += "  \"noise_sigma\": " + format_number(spec.noise_sigma) + ",\n";
  out += "  \"image_size\": [" + std::to_string(spec.image_width) + ", " +
         std::to_string(spec.image_height) + "],\n";
  out += "  \"discovery_fraction\": " + format_number(spec.discovery_fraction) + ",\n";
  out += "  \"trajectory\": [\n";
  for (std::size_t i = 0; i < spec.trajectory.size(); ++i) {
    out += "    " + format_camera_json(spec.trajectory[i]) +
           (i + 1 < spec.trajectory.size() ? ",\n" : "\n");
  }
  return out + "  ]\n}\n";
}

}  // namespace sparseloc
