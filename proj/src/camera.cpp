#include "sparseloc/camera.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sparseloc/error.hpp"

namespace sparseloc {

void CameraRig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidCamera, why); };
  if (!is_finite(camera_to_world)) fail("camera_to_world has non-finite entries");
  if (!std::isfinite(fov_y) || !(fov_y > 0.0 && fov_y < std::numbers::pi)) {
    fail("fov_y must lie in (0, pi)");
  }
  if (!std::isfinite(aspect) || !(aspect > 0.0)) fail("aspect must be positive");
  if (!std::isfinite(near_clip) || !std::isfinite(far_clip) || !(near_clip > 0.0) ||
      !(near_clip < far_clip)) {
    fail("clip planes must satisfy 0 < near < far");
  }
  if (!(std::abs(determinant(camera_to_world)) > 1e-12)) {
    fail("camera_to_world is not invertible");
  }
}

Mat4 look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 back = normalized(eye - target);
  const Vec3 right = normalized(cross(up, back));
  const Vec3 true_up = cross(back, right);
  return Mat4::rigid(Mat3::from_columns(right, true_up, back), eye);
}

Mat4 view_matrix(const CameraRig& rig) {
  rig.validate();
  return inverse(rig.camera_to_world);
}

Mat4 frustum_normalization(const CameraRig& rig) {
  rig.validate();
  const double half = std::tan(0.5 * rig.fov_y);
  Mat4 m = Mat4::identity();
  m(0, 0) = 1.0 / (rig.aspect * half);
  m(1, 1) = 1.0 / half;
  return m;
}

Mat4 canonical_perspective(const CameraRig& rig) {
  rig.validate();
  const double n = rig.near_clip;
  const double f = rig.far_clip;
  Mat4 m;
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 2) = -(f + n) / (f - n);
  m(2, 3) = -2.0 * f * n / (f - n);
  m(3, 2) = -1.0;
  return m;
}

Mat4 projection_matrix(const CameraRig& rig) {
  return canonical_perspective(rig) * frustum_normalization(rig);
}

Projector::Projector(const CameraRig& rig)
    : view_projection_(projection_matrix(rig) * view_matrix(rig)),
      inverse_(inverse(view_projection_)) {}

std::optional<NdcPoint> Projector::project(const Vec3& world, std::size_t source_index) const {
  const Homogeneous clip = transform_point(view_projection_, world);
  if (!(clip.w > kMinClipW)) return std::nullopt;
  const Vec3 ndc = clip.xyz / clip.w;
  constexpr double kLimit = 1.0 + kCullEpsilon;
  if (!(std::abs(ndc.x) <= kLimit && std::abs(ndc.y) <= kLimit && std::abs(ndc.z) <= kLimit)) {
    return std::nullopt;
  }
  return NdcPoint{ndc.x, ndc.y, ndc.z, source_index};
}

Vec3 Projector::unproject(const Vec3& ndc) const {
  const Homogeneous h = transform_point(inverse_, ndc);
  return h.xyz / h.w;
}

std::optional<NdcPoint> project_to_ndc(const Vec3& world, const CameraRig& rig,
                                       std::size_t source_index) {
  return Projector(rig).project(world, source_index);
}

std::vector<NdcPoint> project_cloud(std::span<const Vec3> cloud, const CameraRig& rig) {
  const Projector projector(rig);
  std::vector<NdcPoint> out;
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (auto p = projector.project(cloud[i], i)) out.push_back(*p);
  }
  return out;
}

}  // namespace sparseloc
