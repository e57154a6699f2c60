#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "sparseloc/io.hpp"
#include "sparseloc/pipeline.hpp"
#include "sparseloc/simulator.hpp"

using namespace sparseloc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sparseloc_test_pipeline" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

constexpr const char* kIdentityCamera =
    R"({"camera_to_world": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1], "fov_y_deg": 90, "aspect": 1,
        "near": 0.1, "far": 100})";

constexpr const char* kFullBox =
    R"([{"frame": 0, "class": "target", "confidence": 1, "box_px": [0, 0, 100, 100], "image_size": [100, 100]}])";

/// A line of `n` points in front of an identity camera; `spread` = 0 makes them coincide.
std::string line_cloud(int n, double spread) {
  std::string csv = "id,x,y,z\n";
  for (int i = 0; i < n; ++i) {
    csv += std::to_string(i) + "," + format_number(spread * (i - n / 2) * 0.01) + ",0,-5\n";
  }
  return csv;
}

RunConfig files_config(const fs::path& dir, const std::string& cloud, const std::string& cams,
                       const std::string& det) {
  write_text_file(dir / "cloud.csv", cloud);
  write_text_file(dir / "cams.json", cams);
  write_text_file(dir / "det.json", det);
  RunConfig cfg;
  cfg.mode = InputMode::Files;
  cfg.cloud = dir / "cloud.csv";
  cfg.cameras = dir / "cams.json";
  cfg.detections = dir / "det.json";
  cfg.pose_out = dir / "pose.json";
  cfg.metrics_out = dir / "metrics.json";
  cfg.svg_out = dir / "debug.svg";
  return cfg;
}

fs::path write_default_spec(const fs::path& dir) {
  const fs::path p = dir / "scene.json";
  write_text_file(p, format_scene_spec(default_scene()));
  return p;
}

}  // namespace

TEST_CASE("files mode: success writes pose, metrics and SVG") {
  const fs::path dir = scratch("ok");
  const RunOutput out = run_locate(files_config(dir, line_cloud(40, 1.0), kIdentityCamera, kFullBox));
  REQUIRE(out.exit_code == 0);
  CHECK(fs::exists(dir / "pose.json"));
  CHECK(fs::exists(dir / "metrics.json"));
  CHECK(fs::exists(dir / "debug.svg"));
  const TargetPose p = parse_pose_json(read_text_file(dir / "pose.json"), "pose");
  CHECK(p.point_count == 40);
  CHECK(p.axes[0].x == doctest::Approx(1.0));
}

TEST_CASE("files mode: empty detections never reach the threshold") {
  const fs::path dir = scratch("empty");
  const RunOutput out = run_locate(files_config(dir, line_cloud(40, 1.0), kIdentityCamera, "[]"));
  CHECK(out.exit_code == 3);
  CHECK(out.message.find("max accumulated count 0") != std::string::npos);
  CHECK(fs::exists(dir / "metrics.json"));
  CHECK_FALSE(fs::exists(dir / "pose.json"));
}

TEST_CASE("files mode: too few points reports the best count") {
  const fs::path dir = scratch("few");
  const RunOutput out = run_locate(files_config(dir, line_cloud(12, 1.0), kIdentityCamera, kFullBox));
  CHECK(out.exit_code == 3);
  CHECK(out.message.find("max accumulated count 12") != std::string::npos);
}

TEST_CASE("files mode: coincident points are degenerate") {
  const fs::path dir = scratch("degenerate");
  const RunOutput out = run_locate(files_config(dir, line_cloud(40, 0.0), kIdentityCamera, kFullBox));
  CHECK(out.exit_code == 4);
  CHECK_FALSE(fs::exists(dir / "pose.json"));
}

TEST_CASE("files mode: malformed inputs exit 2 and write nothing") {
  const fs::path dir = scratch("malformed");
  RunConfig cfg = files_config(dir, line_cloud(40, 1.0), R"({"camera_to_world": [1, 2]})", kFullBox);
  RunOutput out = run_locate(cfg);
  CHECK(out.exit_code == 2);
  CHECK(out.message.find((dir / "cams.json").string()) != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "pose.json"));
  CHECK_FALSE(fs::exists(dir / "metrics.json"));

  cfg = files_config(dir, "id,x,y\n", kIdentityCamera, kFullBox);
  CHECK(run_locate(cfg).exit_code == 2);
  cfg = files_config(dir, line_cloud(40, 1.0), kIdentityCamera, R"([{"frame": 0}])");
  CHECK(run_locate(cfg).exit_code == 2);
  cfg = files_config(dir, line_cloud(40, 1.0), kIdentityCamera, kFullBox);
  cfg.cloud = dir / "missing.csv";
  CHECK(run_locate(cfg).exit_code == 2);
  cfg = files_config(dir, line_cloud(40, 1.0), kIdentityCamera, kFullBox);
  cfg.locator.threshold_n = 2;
  CHECK(run_locate(cfg).exit_code == 2);
  CHECK_FALSE(fs::exists(dir / "metrics.json"));
}

TEST_CASE("simulate mode: default scene succeeds and is reproducible") {
  const fs::path dir = scratch("simulate");
  RunConfig cfg;
  cfg.mode = InputMode::Simulate;
  cfg.scene_spec = write_default_spec(dir);
  const RunOutput a = run_locate(cfg);
  const RunOutput b = run_locate(cfg);
  REQUIRE(a.exit_code == 0);
  CHECK(a.pose_json.find("\"isotropy_flag\": false") != std::string::npos);
  CHECK(a.metrics_json.find("axis_angle_error_deg") != std::string::npos);
  CHECK(a.pose_json == b.pose_json);
  CHECK(a.metrics_json == b.metrics_json);
  CHECK(a.svg == b.svg);
}

TEST_CASE("simulate mode: emitted fixtures replay to the same pose") {
  const fs::path dir = scratch("fixtures");
  RunConfig sim;
  sim.mode = InputMode::Simulate;
  sim.scene_spec = write_default_spec(dir);
  sim.fixtures_dir = dir / "fx";
  const RunOutput a = run_locate(sim);
  REQUIRE(a.exit_code == 0);

  RunConfig replay;
  replay.mode = InputMode::Simulate;
  replay.scene_spec = sim.scene_spec;
  replay.detections = dir / "fx" / "detections.json";
  const RunOutput b = run_locate(replay);
  REQUIRE(b.exit_code == 0);
  CHECK(a.pose_json == b.pose_json);
  CHECK(fs::exists(dir / "fx" / "cloud.csv"));
  CHECK(read_cameras_json(dir / "fx" / "cameras.json").size() == 40);
}

TEST_CASE("locate: frames without detections keep the accumulated state") {
  std::vector<FrameInput> frames;
  std::vector<Landmark> cloud;
  for (int i = 0; i < 40; ++i) cloud.push_back({i, {0.1 * i - 2.0, 0.002 * i * i - 1.0, -5.0}});
  for (int f = 0; f < 3; ++f) frames.push_back({f, CameraRig{}, cloud});
  PixelBox left{0, 0, 55, 100, 100, 100, "target", 1.0};
  PixelBox right{45, 0, 100, 100, 100, 100, "target", 1.0};
  const FileDetector det({{0, left}, {2, right}});
  LocatorConfig cfg;
  cfg.threshold_n = 40;
  const PipelineResult r = locate(frames, det, cfg);
  REQUIRE(r.frames.size() == 3);
  CHECK_FALSE(r.frames[1].detected);
  CHECK(r.frames[1].accumulated == r.frames[0].accumulated);
  CHECK(r.frames[2].accumulated == 40);
  CHECK(r.ready_frame == 2);
  REQUIRE(r.pose);
}

TEST_CASE("render_debug_svg: empty frame, all filtered, golden file") {
  FrameDebug empty;
  empty.box = NdcBox{-0.5, -0.5, 0.5, 0.5};
  const std::string e = render_debug_svg(empty);
  CHECK(e.find("<circle") == std::string::npos);
  CHECK(e.find("class=\"box\"") != std::string::npos);
  CHECK(e.find("class=\"ndc\"") != std::string::npos);

  FrameDebug all;
  all.frame_id = 1;
  all.box = NdcBox{};
  all.projected = {{0.1, 0.1, 0, 0}, {-0.2, 0.3, 0, 1}};
  all.filtered_sources = {0, 1};
  const std::string s = render_debug_svg(all);
  std::size_t highlighted = 0;
  for (std::size_t pos = 0; (pos = s.find("point filtered", pos)) != std::string::npos; ++pos) ++highlighted;
  CHECK(highlighted == 2);

  FrameDebug fixture;
  fixture.frame_id = 7;
  fixture.box = NdcBox{-0.25, -0.4, 0.35, 0.2};
  fixture.projected = {{0.0, 0.0, 0.1, 0}, {0.3, 0.1, 0.2, 1}, {-0.8, 0.7, -0.5, 2},
                       {0.9, -0.9, 0.9, 3}, {-0.1, -0.3, 0.0, 4}};
  fixture.filtered_sources = {0, 1, 4};
  const std::string svg = render_debug_svg(fixture);
  const fs::path golden = fs::path(SPARSELOC_GOLDEN_DIR) / "debug_frame.svg";
  if (std::getenv("SPARSELOC_UPDATE_GOLDEN") != nullptr) write_text_file(golden, svg);
  CHECK(svg == read_text_file(golden));
}
