#pragma once

// Batch pipeline: per frame, project the map, pick the detection, filter the
// projected landmarks by its box and accumulate them; the first frame at
// which the threshold is met produces the pose estimate.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparseloc/camera.hpp"
#include "sparseloc/detection.hpp"
#include "sparseloc/locator.hpp"

namespace sparseloc {

enum class ExitCode : int {
  Success = 0,
  Internal = 1,
  InputFormat = 2,
  BelowThreshold = 3,
  DegenerateCloud = 4,
};

enum class InputMode { Files, Simulate };

struct RunConfig {
  InputMode mode = InputMode::Files;
  std::filesystem::path cloud;
  std::filesystem::path cameras;
  std::optional<std::filesystem::path> detections;  // required in Files mode
  std::filesystem::path scene_spec;
  LocatorConfig locator;
  std::optional<std::filesystem::path> pose_out;
  std::optional<std::filesystem::path> svg_out;
  std::optional<std::filesystem::path> metrics_out;
  std::optional<std::filesystem::path> fixtures_dir;  // Simulate mode only
};

struct FrameInput {
  int frame_id = 0;
  CameraRig rig;
  std::vector<Landmark> cloud;
};

struct FrameMetrics {
  int frame = 0;
  std::size_t projected = 0;
  bool detected = false;
  std::size_t filtered = 0;
  std::size_t accumulated = 0;
};

/// Projection, box and filter membership of one frame, for rendering.
struct FrameDebug {
  int frame_id = 0;
  std::vector<NdcPoint> projected;
  std::optional<NdcBox> box;
  std::vector<std::size_t> filtered_sources;  // NdcPoint::source_index values
};

struct PipelineResult {
  ExitCode status = ExitCode::Success;
  std::string message;
  std::optional<TargetPose> pose;
  std::optional<int> ready_frame;
  std::vector<FrameMetrics> frames;
  std::size_t max_accumulated = 0;
  FilteredSet accumulated;
  std::optional<FrameDebug> debug;  // the frame that produced the pose
};

/// Runs frames in order and stops at the first frame where the accumulated
/// set is ready. Frames without a matching detection add nothing and keep
/// the accumulated state.
PipelineResult locate(std::span<const FrameInput> frames, const Detector& detector,
                      const LocatorConfig& cfg);

/// Unit-square SVG of the NDC plane with every projected point, the box
/// outline and the filtered points highlighted. Byte-identical for
/// identical input.
std::string render_debug_svg(const FrameDebug& frame);

struct RunOutput {
  int exit_code = 0;
  std::string message;
  std::string pose_json;     // empty unless exit_code == 0
  std::string metrics_json;  // empty on input errors
  std::string svg;           // empty unless exit_code == 0
};

/// Loads inputs, runs the pipeline and writes the requested outputs. Input
/// problems never produce partial output: nothing is written on exit 2.
RunOutput run_locate(const RunConfig& cfg);

}  // namespace sparseloc
