// sparseloc: locate a detected target in a sparse landmark map.
//
//   sparseloc --cloud map.csv --cameras cams.json --detections det.json --out pose.json
//   sparseloc --simulate scene.json --out pose.json --metrics metrics.json --svg frame.svg

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "sparseloc/io.hpp"
#include "sparseloc/pipeline.hpp"
#include "sparseloc/simulator.hpp"

int main(int argc, char** argv) {
  using namespace sparseloc;

  CLI::App app{"Locate a detected object in a sparse point cloud by box filtering and PCA"};
  app.set_version_flag("--version", "sparseloc 0.1.0");

  RunConfig cfg;
  std::string cloud, cameras, detections, simulate, out, svg, metrics, fixtures;
  std::string policy = "largest";
  bool continuous = false;
  bool print_default_scene = false;

  auto* cloud_opt = app.add_option("--cloud", cloud, "Landmark CSV (id,x,y,z)");
  auto* cameras_opt = app.add_option("--cameras", cameras, "Camera JSON, one object or an array (index = frame)");
  app.add_option("--detections", detections,
                 "Detections JSON; required with --cloud, optional with --simulate");
  auto* sim_opt = app.add_option("--simulate", simulate, "Scene spec JSON; runs on a synthetic scene");
  app.add_option("--class", cfg.locator.class_label, "Detection class to locate")
      ->capture_default_str();
  app.add_option("--threshold", cfg.locator.threshold_n, "Points required before estimating")
      ->check(CLI::Range(4, 1 << 30))
      ->capture_default_str();
  app.add_option("--isotropy-ratio", cfg.locator.isotropy_ratio,
                 "lambda1/lambda2 at or below which the pose is flagged isotropic")
      ->capture_default_str();
  app.add_option("--sign-policy", policy, "Eigenvector sign rule")
      ->check(CLI::IsMember({"largest", "align-prev"}))
      ->capture_default_str();
  app.add_option("--out", out, "Pose JSON output (stdout when omitted)");
  app.add_option("--svg", svg, "Debug SVG of the estimating frame");
  app.add_option("--metrics", metrics, "Per-frame metrics JSON");
  app.add_option("--emit-fixtures", fixtures,
                 "With --simulate: write cloud.csv, cameras.json and detections.json here");
  app.add_flag("--continuous", continuous, "Keep refining after the first estimate (reserved)");
  app.add_flag("--print-default-scene", print_default_scene,
               "Print the built-in scene spec and exit");

  cloud_opt->excludes(sim_opt);
  cameras_opt->excludes(sim_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::InputFormat);
  }

  if (print_default_scene) {
    std::cout << format_scene_spec(default_scene());
    return 0;
  }
  if (continuous) {
    std::cerr << "error: --continuous is reserved and not implemented\n";
    return static_cast<int>(ExitCode::InputFormat);
  }

  if (!simulate.empty()) {
    cfg.mode = InputMode::Simulate;
    cfg.scene_spec = simulate;
  } else if (!cloud.empty() && !cameras.empty() && !detections.empty()) {
    cfg.mode = InputMode::Files;
    cfg.cloud = cloud;
    cfg.cameras = cameras;
  } else {
    std::cerr << "error: give either --simulate SPEC or all of --cloud, --cameras, --detections\n";
    return static_cast<int>(ExitCode::InputFormat);
  }
  if (!detections.empty()) cfg.detections = detections;
  if (!fixtures.empty()) {
    if (cfg.mode != InputMode::Simulate) {
      std::cerr << "error: --emit-fixtures needs --simulate\n";
      return static_cast<int>(ExitCode::InputFormat);
    }
    cfg.fixtures_dir = fixtures;
  }
  cfg.locator.sign_policy =
      policy == "align-prev" ? SignPolicy::AlignPrevious : SignPolicy::LargestComponentPositive;
  if (!out.empty()) cfg.pose_out = out;
  if (!svg.empty()) cfg.svg_out = svg;
  if (!metrics.empty()) cfg.metrics_out = metrics;

  const RunOutput result = run_locate(cfg);
  if (result.exit_code != 0) {
    std::cerr << "error: " << result.message << "\n";
    return result.exit_code;
  }
  if (!cfg.pose_out) std::cout << result.pose_json;
  return 0;
}
