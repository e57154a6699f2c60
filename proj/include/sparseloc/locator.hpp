#pragma once

// Target localization from a sparse landmark map: keep the landmarks whose
// projections fall inside the detection box, accumulate them across frames
// and, once enough are known, estimate centre and principal axes by PCA on
// their world coordinates.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparseloc/camera.hpp"
#include "sparseloc/detection.hpp"
#include "sparseloc/linalg3.hpp"

namespace sparseloc {

/// A world-space map point with a stable identity.
struct Landmark {
  std::int64_t id = 0;
  Vec3 position;

  friend bool operator==(const Landmark&, const Landmark&) = default;
};

std::vector<Vec3> positions(std::span<const Landmark> cloud);

struct FrameSpan {
  int first = 0;
  int last = 0;

  friend bool operator==(const FrameSpan&, const FrameSpan&) = default;
};

/// Landmarks attributed to the target, unique by id.
struct FilteredSet {
  std::vector<Landmark> points;
  std::optional<FrameSpan> frame_span;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

enum class SignPolicy { LargestComponentPositive, AlignPrevious };

struct LocatorConfig {
  int threshold_n = 30;
  std::string class_label = "target";
  double isotropy_ratio = 1.2;
  SignPolicy sign_policy = SignPolicy::LargestComponentPositive;

  /// Throws Error(InvalidInput) unless threshold_n >= 4 and isotropy_ratio > 1.
  void validate() const;
};

struct TargetPose {
  Vec3 center;
  std::array<Vec3, 3> axes{};           // descending variance, right-handed
  std::array<double, 3> eigenvalues{};  // descending
  std::size_t point_count = 0;
  bool isotropy_flag = false;
};

enum class PcaRoute { Covariance, Svd };

/// World positions of the projected points whose x, y lie in the closed box
/// and whose z lies in [-1, 1]. Input order is preserved; a repeated id keeps
/// its first position and takes the later coordinate.
FilteredSet filter_in_box(std::span<const NdcPoint> projected, const NdcBox& box,
                          std::span<const Landmark> cloud, int frame_id);

/// Union by landmark id; re-observed landmarks take the newer coordinate.
FilteredSet accumulate(FilteredSet state, const FilteredSet& incoming);

bool ready(const FilteredSet& state, const LocatorConfig& cfg);

Vec3 centroid(std::span<const Landmark> points);
inline Vec3 centroid(const FilteredSet& set) { return centroid(set.points); }

/// Columns P_i - c. Requires at least two points.
DataMatrix center_data(std::span<const Landmark> points, const Vec3& c);
inline DataMatrix center_data(const FilteredSet& set, const Vec3& c) {
  return center_data(set.points, c);
}

/// X X^T / (n - 1).
SymMatrix3 covariance(const DataMatrix& x);

/// Resolves the sign of each eigenvector and repairs handedness so that the
/// returned triple has determinant +1. `previous` is only consulted under
/// SignPolicy::AlignPrevious; without it that policy falls back to
/// largest-component-positive.
std::array<Vec3, 3> canonicalize_axes(const std::array<Vec3, 3>& raw, SignPolicy policy,
                                      const std::optional<TargetPose>& previous = std::nullopt);

TargetPose estimate_pose(const FilteredSet& state, const LocatorConfig& cfg,
                         const std::optional<TargetPose>& previous = std::nullopt,
                         PcaRoute route = PcaRoute::Covariance);

}  // namespace sparseloc
