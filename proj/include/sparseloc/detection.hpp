#pragma once

// 2D detections and the detector seam. Pixel boxes use a top-left origin
// with y pointing down; NDC boxes use the centre origin with y up.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparseloc/camera.hpp"

namespace sparseloc {

struct PixelBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
  int image_width = 0;
  int image_height = 0;
  std::string class_label;
  double confidence = 1.0;

  /// Throws Error(InvalidBox) on an empty or out-of-image box, a
  /// non-positive image size or a confidence outside [0, 1].
  void validate() const;
  double area() const { return (x_max - x_min) * (y_max - y_min); }
  /// Closed-boundary membership.
  bool contains(double px, double py) const {
    return px >= x_min && px <= x_max && py >= y_min && py <= y_max;
  }
};

struct NdcBox {
  double x_min = -1.0;
  double y_min = -1.0;
  double x_max = 1.0;
  double y_max = 1.0;

  /// Closed-boundary membership.
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

struct Detection {
  int frame_id = 0;
  PixelBox box;
};

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
};

PixelPoint ndc_to_pixel(double x, double y, int width, int height);
PixelPoint pixel_to_ndc(double px, double py, int width, int height);

NdcBox normalize_box(const PixelBox& box);
/// Inverse of normalize_box for an image of the given size.
PixelBox denormalize_box(const NdcBox& box, int width, int height);

/// Best box for `class_label`: highest confidence, then larger area, then
/// earliest position in `detections`.
std::optional<Detection> select_detection(std::span<const Detection> detections,
                                          std::string_view class_label);

class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<Detection> detect(int frame_id) const = 0;
};

/// Replays recorded detections, indexed by frame at construction.
class FileDetector final : public Detector {
 public:
  explicit FileDetector(std::vector<Detection> detections);
  /// Throws Error(InputFormat) when the file is unreadable or malformed.
  static FileDetector from_file(const std::filesystem::path& path);

  std::vector<Detection> detect(int frame_id) const override;

 private:
  std::map<int, std::vector<Detection>> by_frame_;
};

/// Projects the corners of a known bounding volume through each frame's
/// camera and reports their pixel hull, clipped to the image.
class OracleDetector final : public Detector {
 public:
  OracleDetector(std::vector<CameraRig> trajectory, std::array<Vec3, 8> volume_corners,
                 int image_width, int image_height, std::string class_label);

  std::vector<Detection> detect(int frame_id) const override;

 private:
  std::vector<CameraRig> trajectory_;
  std::array<Vec3, 8> corners_;
  int width_;
  int height_;
  std::string label_;
};

}  // namespace sparseloc
