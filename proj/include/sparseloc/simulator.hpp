#pragma once

// Deterministic synthetic scenes with known ground truth: an ellipsoidal
// target, uniform background clutter and a camera trajectory along which
// the landmark map is discovered gradually.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparseloc/camera.hpp"
#include "sparseloc/detection.hpp"
#include "sparseloc/linalg3.hpp"
#include "sparseloc/locator.hpp"

namespace sparseloc {

/// SplitMix64 (Steele, Lea and Flood 2014). Chosen over the standard
/// engines because every derived draw below is specified bit-for-bit, so
/// the fixtures can be regenerated in any language.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Top 53 bits scaled to [0, 1).
  double uniform();
  /// Box-Muller, cosine branch only: sqrt(-2 ln(1 - u1)) cos(2 pi u2).
  double normal();
  /// floor(uniform() * bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

/// Seed for an independent stream: first output of SplitMix64(seed ^ (stream * golden)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct TargetSpec {
  Vec3 center;
  Mat3 rotation = Mat3::identity();
  std::array<double, 3> extents{10.0, 3.0, 1.0};  // ellipsoid semi-axes, descending
  int n_points = 500;
  std::string class_label = "target";
};

struct ClutterSpec {
  int n_points = 0;
  Vec3 bounds_min;
  Vec3 bounds_max;
};

struct OrbitSpec {
  Vec3 look_at;
  double radius = 40.0;
  double height = 10.0;
  double start_deg = 0.0;
  double sweep_deg = 90.0;
  int frames = 40;
  double fov_y_deg = 60.0;
  double aspect = 4.0 / 3.0;
  double near_clip = 0.1;
  double far_clip = 200.0;
};

struct SceneSpec {
  std::uint64_t seed = 1;
  TargetSpec target;
  ClutterSpec clutter;
  double noise_sigma = 0.0;
  std::vector<CameraRig> trajectory;
  int image_width = 640;
  int image_height = 480;
  double discovery_fraction = 0.1;

  /// Throws Error(InvalidInput) on a malformed spec.
  void validate() const;
};

struct GroundTruth {
  Vec3 center;
  std::array<Vec3, 3> axes{};  // columns of the target rotation
  std::array<double, 3> extents{};
};

struct SceneFrame {
  int frame_id = 0;
  CameraRig rig;
  /// Landmarks discovered up to and including this frame, in discovery order.
  std::vector<Landmark> visible_cloud;
  /// Pixel hull of the visible target points plus a 2 pixel margin, clipped
  /// to the image; empty when no target point is in view.
  std::optional<PixelBox> truth_box;
  GroundTruth truth;
};

inline constexpr double kTruthBoxMarginPx = 2.0;

/// Ellipsoid surface samples with ids 0..n-1. Directions are drawn in orbits
/// of four under the half-turns about the target's own axes, so the
/// noiseless sample has the true centre as its mean and the target axes as
/// its principal axes. Isotropic Gaussian noise is added per point.
std::vector<Landmark> gen_target_cloud(const SceneSpec& spec);
/// Uniform samples in the clutter bounds with ids following the target's.
std::vector<Landmark> gen_clutter_cloud(const SceneSpec& spec);
/// Target followed by clutter.
std::vector<Landmark> gen_landmarks(const SceneSpec& spec);

std::vector<SceneFrame> gen_frames(const SceneSpec& spec);

GroundTruth ground_truth(const SceneSpec& spec);
bool is_target_landmark(const SceneSpec& spec, std::int64_t id);

/// Oriented box (in the target frame) enclosing every target point.
std::array<Vec3, 8> target_bounding_corners(const SceneSpec& spec,
                                            std::span<const Landmark> target_cloud);

OracleDetector make_oracle_detector(const SceneSpec& spec);

std::vector<CameraRig> orbit_trajectory(const OrbitSpec& orbit);

/// The scene used by the end-to-end checks and `--simulate` examples.
SceneSpec default_scene();

}  // namespace sparseloc
