#include "sparseloc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sparseloc/error.hpp"

namespace sparseloc {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  const auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(bound));
  return std::min(k, bound - 1);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(seed ^ (stream * 0x9E3779B97F4A7C15ULL)).next();
}

namespace {

enum Stream : std::uint64_t { kTargetStream = 1, kClutterStream = 2, kDiscoveryStream = 3 };

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidInput, "scene spec: " + what);
}

bool orthonormal(const Mat3& r) {
  const Mat3 rtr = r.transposed() * r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (std::abs(rtr(i, j) - (i == j ? 1.0 : 0.0)) > 1e-9) return false;
  return std::abs(r.determinant() - 1.0) <= 1e-9;
}

}  // namespace

void SceneSpec::validate() const {
  require(is_finite(target.center), "target center must be finite");
  require(orthonormal(target.rotation), "target rotation must be a proper rotation");
  for (double e : target.extents) require(std::isfinite(e) && e > 0.0, "extents must be positive");
  require(target.extents[0] >= target.extents[1] && target.extents[1] >= target.extents[2],
          "extents must be sorted descending");
  require(target.n_points >= 0, "target n_points must be non-negative");
  require(clutter.n_points >= 0, "clutter n_points must be non-negative");
  if (clutter.n_points > 0) {
    require(is_finite(clutter.bounds_min) && is_finite(clutter.bounds_max),
            "clutter bounds must be finite");
    require(clutter.bounds_min.x <= clutter.bounds_max.x &&
                clutter.bounds_min.y <= clutter.bounds_max.y &&
                clutter.bounds_min.z <= clutter.bounds_max.z,
            "clutter bounds_min must not exceed bounds_max");
  }
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "noise_sigma must be >= 0");
  require(image_width > 0 && image_height > 0, "image size must be positive");
  require(discovery_fraction > 0.0 && discovery_fraction <= 1.0,
          "discovery_fraction must lie in (0, 1]");
  for (const CameraRig& rig : trajectory) rig.validate();
}

std::vector<Landmark> gen_target_cloud(const SceneSpec& spec) {
  spec.validate();
  SplitMix64 rng(derive_seed(spec.seed, kTargetStream));
  const TargetSpec& t = spec.target;
  const auto n = static_cast<std::size_t>(t.n_points);

  // Half-turns about the local x, y and z axes plus the identity.
  constexpr std::array<std::array<double, 3>, 4> kSigns{{{1, 1, 1}, {-1, -1, 1}, {-1, 1, -1}, {1, -1, -1}}};

  std::vector<Landmark> out;
  out.reserve(n);
  while (out.size() < n) {
    Vec3 dir;
    double len = 0.0;
    do {
      dir = {rng.normal(), rng.normal(), rng.normal()};
      len = norm(dir);
    } while (!(len > 1e-12));
    dir = dir / len;
    const Vec3 local{t.extents[0] * dir.x, t.extents[1] * dir.y, t.extents[2] * dir.z};
    for (const auto& s : kSigns) {
      if (out.size() == n) break;
      const Vec3 image{s[0] * local.x, s[1] * local.y, s[2] * local.z};
      Vec3 p = t.center + t.rotation * image;
      if (spec.noise_sigma > 0.0) {
        p += Vec3{rng.normal(), rng.normal(), rng.normal()} * spec.noise_sigma;
      }
      out.push_back({static_cast<std::int64_t>(out.size()), p});
    }
  }
  return out;
}

std::vector<Landmark> gen_clutter_cloud(const SceneSpec& spec) {
  spec.validate();
  SplitMix64 rng(derive_seed(spec.seed, kClutterStream));
  const ClutterSpec& c = spec.clutter;
  std::vector<Landmark> out;
  out.reserve(static_cast<std::size_t>(c.n_points));
  const Vec3 span = c.bounds_max - c.bounds_min;
  for (int i = 0; i < c.n_points; ++i) {
    const double ux = rng.uniform();
    const double uy = rng.uniform();
    const double uz = rng.uniform();
    out.push_back({static_cast<std::int64_t>(spec.target.n_points) + i,
                   c.bounds_min + Vec3{ux * span.x, uy * span.y, uz * span.z}});
  }
  return out;
}

std::vector<Landmark> gen_landmarks(const SceneSpec& spec) {
  std::vector<Landmark> all = gen_target_cloud(spec);
  const std::vector<Landmark> clutter = gen_clutter_cloud(spec);
  all.insert(all.end(), clutter.begin(), clutter.end());
  return all;
}

GroundTruth ground_truth(const SceneSpec& spec) {
  GroundTruth g;
  g.center = spec.target.center;
  for (std::size_t i = 0; i < 3; ++i) g.axes[i] = spec.target.rotation.column(i);
  g.extents = spec.target.extents;
  return g;
}

bool is_target_landmark(const SceneSpec& spec, std::int64_t id) {
  return id >= 0 && id < spec.target.n_points;
}

std::vector<SceneFrame> gen_frames(const SceneSpec& spec) {
  spec.validate();
  if (spec.trajectory.empty()) {
    throw Error(ErrorCode::InvalidInput, "scene spec: trajectory is empty");
  }
  const std::vector<Landmark> all = gen_landmarks(spec);
  const GroundTruth truth = ground_truth(spec);

  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 rng(derive_seed(spec.seed, kDiscoveryStream));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }

  std::vector<SceneFrame> frames;
  frames.reserve(spec.trajectory.size());
  std::vector<Landmark> discovered;
  discovered.reserve(all.size());
  for (std::size_t f = 0; f < spec.trajectory.size(); ++f) {
    const std::size_t remaining = all.size() - discovered.size();
    const auto reveal = static_cast<std::size_t>(
        std::ceil(spec.discovery_fraction * static_cast<double>(remaining) - 1e-9));
    for (std::size_t k = 0; k < std::min(reveal, remaining); ++k) {
      discovered.push_back(all[order[discovered.size()]]);
    }

    SceneFrame frame;
    frame.frame_id = static_cast<int>(f);
    frame.rig = spec.trajectory[f];
    frame.visible_cloud = discovered;
    frame.truth = truth;

    const Projector projector(frame.rig);
    double x_min = std::numeric_limits<double>::infinity();
    double y_min = x_min;
    double x_max = -x_min;
    double y_max = -x_min;
    bool any = false;
    for (const Landmark& l : discovered) {
      if (!is_target_landmark(spec, l.id)) continue;
      const auto ndc = projector.project(l.position);
      if (!ndc) continue;
      const PixelPoint px = ndc_to_pixel(ndc->x, ndc->y, spec.image_width, spec.image_height);
      x_min = std::min(x_min, px.x);
      x_max = std::max(x_max, px.x);
      y_min = std::min(y_min, px.y);
      y_max = std::max(y_max, px.y);
      any = true;
    }
    if (any) {
      PixelBox box;
      box.x_min = std::max(0.0, x_min - kTruthBoxMarginPx);
      box.y_min = std::max(0.0, y_min - kTruthBoxMarginPx);
      box.x_max = std::min(static_cast<double>(spec.image_width), x_max + kTruthBoxMarginPx);
      box.y_max = std::min(static_cast<double>(spec.image_height), y_max + kTruthBoxMarginPx);
      box.image_width = spec.image_width;
      box.image_height = spec.image_height;
      box.class_label = spec.target.class_label;
      box.confidence = 1.0;
      frame.truth_box = box;
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::array<Vec3, 8> target_bounding_corners(const SceneSpec& spec,
                                            std::span<const Landmark> target_cloud) {
  const TargetSpec& t = spec.target;
  const Mat3 to_local = t.rotation.transposed();
  Vec3 half{t.extents[0], t.extents[1], t.extents[2]};
  if (!target_cloud.empty()) {
    half = {};
    for (const Landmark& l : target_cloud) {
      const Vec3 local = to_local * (l.position - t.center);
      half.x = std::max(half.x, std::abs(local.x));
      half.y = std::max(half.y, std::abs(local.y));
      half.z = std::max(half.z, std::abs(local.z));
    }
  }
  std::array<Vec3, 8> corners{};
  for (std::size_t i = 0; i < 8; ++i) {
    const Vec3 local{(i & 1) ? half.x : -half.x, (i & 2) ? half.y : -half.y,
                     (i & 4) ? half.z : -half.z};
    corners[i] = t.center + t.rotation * local;
  }
  return corners;
}

OracleDetector make_oracle_detector(const SceneSpec& spec) {
  const std::vector<Landmark> target = gen_target_cloud(spec);
  return OracleDetector(spec.trajectory, target_bounding_corners(spec, target),
                        spec.image_width, spec.image_height, spec.target.class_label);
}

std::vector<CameraRig> orbit_trajectory(const OrbitSpec& orbit) {
  if (orbit.frames < 1) {
    throw Error(ErrorCode::InvalidInput, "orbit: frames must be at least 1");
  }
  constexpr double kDeg = std::numbers::pi / 180.0;
  std::vector<CameraRig> rigs;
  rigs.reserve(static_cast<std::size_t>(orbit.frames));
  for (int k = 0; k < orbit.frames; ++k) {
    const double frac = orbit.frames > 1 ? static_cast<double>(k) / (orbit.frames - 1) : 0.0;
    const double angle = (orbit.start_deg + frac * orbit.sweep_deg) * kDeg;
    const Vec3 eye = orbit.look_at + Vec3{orbit.radius * std::cos(angle), orbit.height,
                                          orbit.radius * std::sin(angle)};
    CameraRig rig;
    rig.camera_to_world = look_at(eye, orbit.look_at);
    rig.fov_y = orbit.fov_y_deg * kDeg;
    rig.aspect = orbit.aspect;
    rig.near_clip = orbit.near_clip;
    rig.far_clip = orbit.far_clip;
    rig.validate();
    rigs.push_back(rig);
  }
  return rigs;
}

SceneSpec default_scene() {
  SceneSpec spec;
  spec.seed = 4;
  spec.target.center = {0.0, 0.0, 0.0};
  spec.target.rotation = Mat3::rotation({0.0, 0.0, 1.0}, std::numbers::pi / 6.0);
  spec.target.extents = {12.0, 2.0, 1.0};
  spec.target.n_points = 300;
  spec.clutter.n_points = 160;
  // backdrop slab just behind the target, inside the box from every view
  spec.clutter.bounds_min = {-20.0, -10.0, -3.0};
  spec.clutter.bounds_max = {20.0, 10.0, -2.0};
  spec.noise_sigma = 0.05;
  spec.image_width = 640;
  spec.image_height = 480;
  spec.discovery_fraction = 0.05;

  OrbitSpec orbit;
  orbit.look_at = spec.target.center;
  orbit.radius = 40.0;
  orbit.height = 12.0;
  orbit.start_deg = 60.0;
  orbit.sweep_deg = 60.0;
  orbit.frames = 40;
  orbit.fov_y_deg = 60.0;
  orbit.aspect = 4.0 / 3.0;
  orbit.near_clip = 0.1;
  orbit.far_clip = 200.0;
  spec.trajectory = orbit_trajectory(orbit);
  return spec;
}

}  // namespace sparseloc
