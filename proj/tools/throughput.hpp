#pragma once

// Shared by the benchmark tool and the acceptance suite: times one pass of
// project + filter + estimate on a synthetic map.

#include <algorithm>
#include <chrono>
#include <vector>

#include "sparseloc/camera.hpp"
#include "sparseloc/locator.hpp"
#include "sparseloc/simulator.hpp"

namespace sparseloc::bench {

struct ThroughputResult {
  std::size_t cloud_size = 0;
  std::size_t filtered = 0;
  double median_ms = 0.0;
  double best_ms = 0.0;
};

inline SceneSpec throughput_scene(int total_points) {
  SceneSpec spec = default_scene();
  spec.target.n_points = total_points / 5;
  spec.clutter.n_points = total_points - spec.target.n_points;
  return spec;
}

inline ThroughputResult measure_throughput(int total_points, int repeats) {
  const SceneSpec spec = throughput_scene(total_points);
  const std::vector<Landmark> cloud = gen_landmarks(spec);
  const std::vector<Vec3> points = positions(cloud);
  const CameraRig& rig = spec.trajectory.front();
  const auto detections = make_oracle_detector(spec).detect(0);
  const NdcBox box = detections.empty() ? NdcBox{} : normalize_box(detections.front().box);
  LocatorConfig cfg;

  ThroughputResult result;
  result.cloud_size = cloud.size();
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(repeats));
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<NdcPoint> projected = project_cloud(points, rig);
    const FilteredSet filtered = filter_in_box(projected, box, cloud, 0);
    const TargetPose pose = estimate_pose(filtered, cfg);
    const auto stop = std::chrono::steady_clock::now();
    result.filtered = pose.point_count;
    samples.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  std::sort(samples.begin(), samples.end());
  result.median_ms = samples[samples.size() / 2];
  result.best_ms = samples.front();
  return result;
}

}  // namespace sparseloc::bench
