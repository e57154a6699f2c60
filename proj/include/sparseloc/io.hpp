#pragma once

// File formats. Every reader throws Error(InputFormat) with the offending
// source name in the message; every writer is deterministic and prints
// reals with 17 significant digits.
//
//   cloud CSV       header "id,x,y,z", one landmark per line
//   camera JSON     {"camera_to_world": [16, row-major], "fov_y_deg", "aspect",
//                    "near", "far"}; camera files hold one object or an array
//                    of them (array index = frame)
//   detections      [{"frame", "class", "confidence", "box_px": [4],
//                     "image_size": [w, h]}, ...]
//   pose JSON       {"center", "axes" (rows), "eigenvalues", "point_count",
//                    "isotropy_flag"}
//   scene spec      see parse_scene_spec

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparseloc/camera.hpp"
#include "sparseloc/detection.hpp"
#include "sparseloc/locator.hpp"
#include "sparseloc/simulator.hpp"

namespace sparseloc {

/// printf("%.17g"); integral values print without exponent or point.
std::string format_number(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::vector<Landmark> parse_cloud_csv(std::string_view text, std::string_view source);
std::vector<Landmark> read_cloud_csv(const std::filesystem::path& path);
std::string format_cloud_csv(std::span<const Landmark> cloud);

std::vector<CameraRig> parse_cameras_json(std::string_view text, std::string_view source);
std::vector<CameraRig> read_cameras_json(const std::filesystem::path& path);
std::string format_camera_json(const CameraRig& rig);
std::string format_cameras_json(std::span<const CameraRig> rigs);

std::vector<Detection> parse_detections_json(std::string_view text, std::string_view source);
std::vector<Detection> read_detections_json(const std::filesystem::path& path);
std::string format_detections_json(std::span<const Detection> detections);

std::string format_pose_json(const TargetPose& pose);
TargetPose parse_pose_json(std::string_view text, std::string_view source);

/// {"seed": int, "target": {"center": [3], "rotation": [9, row-major]?,
///  "extents": [3], "n_points": int, "class": str?}, "clutter": {"n_points",
///  "bounds_min", "bounds_max"}?, "noise_sigma": number, "image_size": [w, h]?,
///  "discovery_fraction": number?, and either "trajectory": [camera...] or
///  "orbit": {"look_at", "radius", "height", "start_deg", "sweep_deg",
///  "frames", "fov_y_deg", "aspect", "near", "far"}}.
SceneSpec parse_scene_spec(std::string_view text, std::string_view source);
SceneSpec read_scene_spec(const std::filesystem::path& path);
/// Writes the trajectory out as explicit cameras.
std::string format_scene_spec(const SceneSpec& spec);

}  // namespace sparseloc
