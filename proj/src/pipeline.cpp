#include "sparseloc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <unordered_set>

#include "sparseloc/error.hpp"
#include "sparseloc/io.hpp"
#include "sparseloc/simulator.hpp"

namespace sparseloc {

PipelineResult locate(std::span<const FrameInput> frames, const Detector& detector,
                      const LocatorConfig& cfg) {
  cfg.validate();
  PipelineResult result;
  for (const FrameInput& frame : frames) {
    const std::vector<NdcPoint> projected = project_cloud(positions(frame.cloud), frame.rig);
    const std::vector<Detection> detections = detector.detect(frame.frame_id);
    const std::optional<Detection> chosen = select_detection(detections, cfg.class_label);

    FrameMetrics m;
    m.frame = frame.frame_id;
    m.projected = projected.size();
    m.detected = chosen.has_value();

    std::optional<NdcBox> box;
    FilteredSet filtered;
    if (chosen) {
      box = normalize_box(chosen->box);
      filtered = filter_in_box(projected, *box, frame.cloud, frame.frame_id);
      result.accumulated = accumulate(std::move(result.accumulated), filtered);
    }
    m.filtered = filtered.size();
    m.accumulated = result.accumulated.size();
    result.max_accumulated = std::max(result.max_accumulated, m.accumulated);
    result.frames.push_back(m);

    if (ready(result.accumulated, cfg)) {
      result.ready_frame = frame.frame_id;
      FrameDebug debug;
      debug.frame_id = frame.frame_id;
      debug.projected = projected;
      debug.box = box;
      std::unordered_set<std::int64_t> ids;
      for (const Landmark& l : filtered.points) ids.insert(l.id);
      for (const NdcPoint& p : projected) {
        if (ids.count(frame.cloud[p.source_index].id)) debug.filtered_sources.push_back(p.source_index);
      }
      result.debug = std::move(debug);
      try {
        result.pose = estimate_pose(result.accumulated, cfg);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateCloud) throw;
        result.status = ExitCode::DegenerateCloud;
        result.message = e.what();
      }
      return result;
    }
  }
  result.status = ExitCode::BelowThreshold;
  result.message = "never reached threshold_n = " + std::to_string(cfg.threshold_n) +
                   " (max accumulated count " + std::to_string(result.max_accumulated) + ")";
  return result;
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

constexpr double kSvgMargin = 10.0;
constexpr double kSvgHalf = 250.0;

double svg_x(double x) { return kSvgMargin + (x + 1.0) * kSvgHalf; }
double svg_y(double y) { return kSvgMargin + (1.0 - y) * kSvgHalf; }

std::string metrics_json(const PipelineResult& r, InputMode mode, const LocatorConfig& cfg,
                         const SceneSpec* scene) {
  std::string out = "{\n";
  out += std::string("  \"mode\": \"") + (mode == InputMode::Files ? "files" : "simulate") + "\",\n";
  out += "  \"threshold_n\": " + std::to_string(cfg.threshold_n) + ",\n";
  out += "  \"status\": " + std::to_string(static_cast<int>(r.status)) + ",\n";
  out += "  \"frames\": [\n";
  for (std::size_t i = 0; i < r.frames.size(); ++i) {
    const FrameMetrics& f = r.frames[i];
    out += "    {\"frame\": " + std::to_string(f.frame) +
           ", \"projected\": " + std::to_string(f.projected) +
           ", \"detected\": " + (f.detected ? "true" : "false") +
           ", \"filtered\": " + std::to_string(f.filtered) +
           ", \"accumulated\": " + std::to_string(f.accumulated) + "}" +
           (i + 1 < r.frames.size() ? ",\n" : "\n");
  }
  out += "  ],\n";
  out += "  \"max_accumulated\": " + std::to_string(r.max_accumulated) + ",\n";
  out += "  \"ready_frame\": " + (r.ready_frame ? std::to_string(*r.ready_frame) : "null");
  if (scene != nullptr && r.pose) {
    const GroundTruth truth = ground_truth(*scene);
    const double center_error = norm(r.pose->center - truth.center);
    const double c = std::min(1.0, std::abs(dot(r.pose->axes[0], truth.axes[0])));
    const double angle_deg = std::acos(c) * 180.0 / std::numbers::pi;
    std::size_t clutter = 0;
    for (const Landmark& l : r.accumulated.points) {
      if (!is_target_landmark(*scene, l.id)) ++clutter;
    }
    const double clutter_fraction =
        r.accumulated.empty() ? 0.0
                              : static_cast<double>(clutter) / static_cast<double>(r.accumulated.size());
    out += ",\n  \"center_error\": " + format_number(center_error);
    out += ",\n  \"axis_angle_error_deg\": " + format_number(angle_deg);
    out += ",\n  \"clutter_fraction\": " + format_number(clutter_fraction);
  }
  return out + "\n}\n";
}

}  // namespace

std::string render_debug_svg(const FrameDebug& frame) {
  const double size = 2.0 * (kSvgMargin + kSvgHalf);
  const std::string s = fixed3(size);
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + s + "\" height=\"" + s +
         "\" viewBox=\"0 0 " + s + " " + s + "\">\n";
  out += "<title>frame " + std::to_string(frame.frame_id) + "</title>\n";
  out += "<style>.point{fill:#9a9a9a}.filtered{fill:#d62728}.box{fill:none;stroke:#1f77b4;"
         "stroke-width:2}.ndc{fill:#ffffff;stroke:#000000;stroke-width:1}</style>\n";
  out += "<rect class=\"ndc\" x=\"" + fixed3(svg_x(-1.0)) + "\" y=\"" + fixed3(svg_y(1.0)) +
         "\" width=\"" + fixed3(2.0 * kSvgHalf) + "\" height=\"" + fixed3(2.0 * kSvgHalf) + "\"/>\n";
  if (frame.box) {
    const NdcBox& b = *frame.box;
    out += "<rect class=\"box\" x=\"" + fixed3(svg_x(b.x_min)) + "\" y=\"" + fixed3(svg_y(b.y_max)) +
           "\" width=\"" + fixed3((b.x_max - b.x_min) * kSvgHalf) + "\" height=\"" +
           fixed3((b.y_max - b.y_min) * kSvgHalf) + "\"/>\n";
  }
  const std::unordered_set<std::size_t> hit(frame.filtered_sources.begin(),
                                            frame.filtered_sources.end());
  for (const NdcPoint& p : frame.projected) {
    const bool filtered = hit.count(p.source_index) != 0;
    out += std::string("<circle class=\"") + (filtered ? "point filtered" : "point") +
           "\" cx=\"" + fixed3(svg_x(p.x)) + "\" cy=\"" + fixed3(svg_y(p.y)) + "\" r=\"" +
           (filtered ? "3" : "2") + "\"/>\n";
  }
  return out + "</svg>\n";
}

RunOutput run_locate(const RunConfig& cfg) {
  RunOutput out;
  std::vector<FrameInput> frames;
  std::unique_ptr<Detector> detector;
  std::optional<SceneSpec> scene;

  try {
    cfg.locator.validate();
    if (cfg.mode == InputMode::Files) {
      if (!cfg.detections) {
        throw Error(ErrorCode::InputFormat, "files mode requires a detections file");
      }
      const std::vector<Landmark> cloud = read_cloud_csv(cfg.cloud);
      const std::vector<CameraRig> rigs = read_cameras_json(cfg.cameras);
      detector = std::make_unique<FileDetector>(FileDetector::from_file(*cfg.detections));
      for (std::size_t i = 0; i < rigs.size(); ++i) {
        frames.push_back({static_cast<int>(i), rigs[i], cloud});
      }
    } else {
      scene = read_scene_spec(cfg.scene_spec);
      for (SceneFrame& f : gen_frames(*scene)) {
        frames.push_back({f.frame_id, f.rig, std::move(f.visible_cloud)});
      }
      OracleDetector oracle = make_oracle_detector(*scene);
      if (cfg.fixtures_dir) {
        std::vector<Detection> all;
        for (const FrameInput& f : frames) {
          for (Detection& d : oracle.detect(f.frame_id)) all.push_back(std::move(d));
        }
        std::filesystem::create_directories(*cfg.fixtures_dir);
        write_text_file(*cfg.fixtures_dir / "cloud.csv", format_cloud_csv(gen_landmarks(*scene)));
        write_text_file(*cfg.fixtures_dir / "cameras.json", format_cameras_json(scene->trajectory));
        write_text_file(*cfg.fixtures_dir / "detections.json", format_detections_json(all));
      }
      if (cfg.detections) {
        detector = std::make_unique<FileDetector>(FileDetector::from_file(*cfg.detections));
      } else {
        detector = std::make_unique<OracleDetector>(std::move(oracle));
      }
    }
  } catch (const Error& e) {
    out.exit_code = static_cast<int>(ExitCode::InputFormat);
    out.message = e.what();
    return out;
  } catch (const std::filesystem::filesystem_error& e) {
    out.exit_code = static_cast<int>(ExitCode::InputFormat);
    out.message = e.what();
    return out;
  }

  PipelineResult result;
  try {
    result = locate(frames, *detector, cfg.locator);
  } catch (const Error& e) {
    out.exit_code = static_cast<int>(ExitCode::Internal);
    out.message = e.what();
    return out;
  }

  out.exit_code = static_cast<int>(result.status);
  out.message = result.message;
  out.metrics_json = metrics_json(result, cfg.mode, cfg.locator, scene ? &*scene : nullptr);
  if (result.pose) {
    out.pose_json = format_pose_json(*result.pose);
    if (result.debug) out.svg = render_debug_svg(*result.debug);
  }

  try {
    if (cfg.metrics_out) write_text_file(*cfg.metrics_out, out.metrics_json);
    if (result.pose) {
      if (cfg.pose_out) write_text_file(*cfg.pose_out, out.pose_json);
      if (cfg.svg_out) write_text_file(*cfg.svg_out, out.svg);
    }
  } catch (const Error& e) {
    out.exit_code = static_cast<int>(ExitCode::InputFormat);
    out.message = e.what();
  }
  return out;
}

}  // namespace sparseloc
