#pragma once

// Perspective camera: world -> camera -> normalized device cube.
//
// Conventions: right-handed world and camera frames, the camera looks
// along its local -z axis with +y up, column vectors, and NDC is the cube
// [-1, 1]^3 with z = -1 on the near plane and z = +1 on the far plane.
//
// The projection is factored in two stages,
//
//   P_ndc ~ M_persp * M_norm * M_view * P_world,
//
// where M_view is the inverse of the camera pose, M_norm rescales x and y
// so that the frustum becomes the symmetric 90 degree square frustum, and
// M_persp is the canonical perspective map of that frustum onto the cube.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sparseloc/linalg3.hpp"

namespace sparseloc {

struct CameraRig {
  Mat4 camera_to_world = Mat4::identity();
  double fov_y = 1.5707963267948966;  // radians
  double aspect = 1.0;                // width / height
  double near_clip = 0.1;
  double far_clip = 100.0;

  /// Throws Error(InvalidCamera) unless 0 < near < far, 0 < fov_y < pi,
  /// aspect > 0, all entries are finite and the pose is invertible.
  void validate() const;
};

struct NdcPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::size_t source_index = 0;
};

/// Camera pose looking from `eye` towards `target`.
Mat4 look_at(const Vec3& eye, const Vec3& target, const Vec3& up = {0.0, 1.0, 0.0});

/// World-to-camera transform (inverse of the pose).
Mat4 view_matrix(const CameraRig& rig);
Mat4 frustum_normalization(const CameraRig& rig);
Mat4 canonical_perspective(const CameraRig& rig);
/// canonical_perspective * frustum_normalization.
Mat4 projection_matrix(const CameraRig& rig);

inline constexpr double kCullEpsilon = 1e-9;
inline constexpr double kMinClipW = 1e-9;

/// Caches the composite world-to-clip matrix of one rig.
class Projector {
 public:
  explicit Projector(const CameraRig& rig);

  /// Returns nullopt when the point is at or behind the camera or outside
  /// the cube by more than kCullEpsilon.
  std::optional<NdcPoint> project(const Vec3& world, std::size_t source_index = 0) const;
  Vec3 unproject(const Vec3& ndc) const;

  const Mat4& view_projection() const { return view_projection_; }

 private:
  Mat4 view_projection_;
  Mat4 inverse_;
};

std::optional<NdcPoint> project_to_ndc(const Vec3& world, const CameraRig& rig,
                                       std::size_t source_index = 0);

/// Element-wise projection; culled points are dropped and survivors keep the
/// index of their source point.
std::vector<NdcPoint> project_cloud(std::span<const Vec3> cloud, const CameraRig& rig);

}  // namespace sparseloc
