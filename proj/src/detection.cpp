#include "sparseloc/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparseloc/error.hpp"
#include "sparseloc/io.hpp"

namespace sparseloc {

void PixelBox::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidBox, why); };
  if (image_width <= 0 || image_height <= 0) fail("image size must be positive");
  if (!std::isfinite(x_min) || !std::isfinite(y_min) || !std::isfinite(x_max) ||
      !std::isfinite(y_max)) {
    fail("box coordinates must be finite");
  }
  if (!(0.0 <= x_min && x_min < x_max && x_max <= image_width)) {
    fail("box must satisfy 0 <= x_min < x_max <= image_width");
  }
  if (!(0.0 <= y_min && y_min < y_max && y_max <= image_height)) {
    fail("box must satisfy 0 <= y_min < y_max <= image_height");
  }
  if (!(confidence >= 0.0 && confidence <= 1.0)) fail("confidence must lie in [0, 1]");
}

PixelPoint ndc_to_pixel(double x, double y, int width, int height) {
  return {0.5 * (x + 1.0) * width, 0.5 * (1.0 - y) * height};
}

PixelPoint pixel_to_ndc(double px, double py, int width, int height) {
  return {2.0 * px / width - 1.0, 1.0 - 2.0 * py / height};
}

NdcBox normalize_box(const PixelBox& box) {
  box.validate();
  const PixelPoint lo = pixel_to_ndc(box.x_min, box.y_max, box.image_width, box.image_height);
  const PixelPoint hi = pixel_to_ndc(box.x_max, box.y_min, box.image_width, box.image_height);
  return {lo.x, lo.y, hi.x, hi.y};
}

PixelBox denormalize_box(const NdcBox& box, int width, int height) {
  const PixelPoint top_left = ndc_to_pixel(box.x_min, box.y_max, width, height);
  const PixelPoint bottom_right = ndc_to_pixel(box.x_max, box.y_min, width, height);
  PixelBox out;
  out.x_min = top_left.x;
  out.y_min = top_left.y;
  out.x_max = bottom_right.x;
  out.y_max = bottom_right.y;
  out.image_width = width;
  out.image_height = height;
  return out;
}

std::optional<Detection> select_detection(std::span<const Detection> detections,
                                          std::string_view class_label) {
  const Detection* best = nullptr;
  for (const Detection& d : detections) {
    if (d.box.class_label != class_label) continue;
    if (best == nullptr || d.box.confidence > best->box.confidence ||
        (d.box.confidence == best->box.confidence && d.box.area() > best->box.area())) {
      best = &d;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

FileDetector::FileDetector(std::vector<Detection> detections) {
  for (Detection& d : detections) {
    by_frame_[d.frame_id].push_back(std::move(d));
  }
}

FileDetector FileDetector::from_file(const std::filesystem::path& path) {
  return FileDetector(read_detections_json(path));
}

std::vector<Detection> FileDetector::detect(int frame_id) const {
  const auto it = by_frame_.find(frame_id);
  if (it == by_frame_.end()) return {};
  return it->second;
}

OracleDetector::OracleDetector(std::vector<CameraRig> trajectory,
                               std::array<Vec3, 8> volume_corners, int image_width,
                               int image_height, std::string class_label)
    : trajectory_(std::move(trajectory)),
      corners_(volume_corners),
      width_(image_width),
      height_(image_height),
      label_(std::move(class_label)) {
  if (width_ <= 0 || height_ <= 0) {
    throw Error(ErrorCode::InvalidInput, "OracleDetector: image size must be positive");
  }
}

std::vector<Detection> OracleDetector::detect(int frame_id) const {
  if (frame_id < 0 || static_cast<std::size_t>(frame_id) >= trajectory_.size()) return {};
  const Projector projector(trajectory_[static_cast<std::size_t>(frame_id)]);

  double x_min = std::numeric_limits<double>::infinity();
  double y_min = x_min;
  double x_max = -x_min;
  double y_max = -x_min;
  bool behind = false;
  for (const Vec3& c : corners_) {
    const Homogeneous clip = transform_point(projector.view_projection(), c);
    if (!(clip.w > kMinClipW)) {
      behind = true;
      break;
    }
    const PixelPoint px = ndc_to_pixel(clip.xyz.x / clip.w, clip.xyz.y / clip.w, width_, height_);
    x_min = std::min(x_min, px.x);
    x_max = std::max(x_max, px.x);
    y_min = std::min(y_min, px.y);
    y_max = std::max(y_max, px.y);
  }
  if (behind) {
    // The volume straddles the camera plane; its image is unbounded.
    x_min = y_min = 0.0;
    x_max = width_;
    y_max = height_;
  }

  PixelBox box;
  box.x_min = std::clamp(x_min, 0.0, static_cast<double>(width_));
  box.x_max = std::clamp(x_max, 0.0, static_cast<double>(width_));
  box.y_min = std::clamp(y_min, 0.0, static_cast<double>(height_));
  box.y_max = std::clamp(y_max, 0.0, static_cast<double>(height_));
  if (!(box.x_min < box.x_max && box.y_min < box.y_max)) return {};
  box.image_width = width_;
  box.image_height = height_;
  box.class_label = label_;
  box.confidence = 1.0;
  return {Detection{frame_id, std::move(box)}};
}

}  // namespace sparseloc
