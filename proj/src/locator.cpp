#include "sparseloc/locator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "sparseloc/error.hpp"

namespace sparseloc {

std::vector<Vec3> positions(std::span<const Landmark> cloud) {
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const Landmark& l : cloud) out.push_back(l.position);
  return out;
}

void LocatorConfig::validate() const {
  if (threshold_n < 4) {
    throw Error(ErrorCode::InvalidInput, "threshold_n must be at least 4");
  }
  if (!(isotropy_ratio > 1.0) || !std::isfinite(isotropy_ratio)) {
    throw Error(ErrorCode::InvalidInput, "isotropy_ratio must be a finite number > 1");
  }
}

namespace {

// Inserts or replaces by id, keeping first-seen order.
class IdIndex {
 public:
  explicit IdIndex(std::vector<Landmark>& points) : points_(points) {
    index_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) index_.emplace(points[i].id, i);
  }

  void upsert(const Landmark& l) {
    const auto [it, inserted] = index_.emplace(l.id, points_.size());
    if (inserted) {
      points_.push_back(l);
    } else {
      points_[it->second].position = l.position;
    }
  }

 private:
  std::vector<Landmark>& points_;
  std::unordered_map<std::int64_t, std::size_t> index_;
};

FrameSpan merge(const std::optional<FrameSpan>& a, const FrameSpan& b) {
  if (!a) return b;
  return {std::min(a->first, b.first), std::max(a->last, b.last)};
}

}  // namespace

FilteredSet filter_in_box(std::span<const NdcPoint> projected, const NdcBox& box,
                          std::span<const Landmark> cloud, int frame_id) {
  FilteredSet out;
  IdIndex index(out.points);
  for (const NdcPoint& p : projected) {
    if (p.source_index >= cloud.size()) {
      throw Error(ErrorCode::InvalidInput, "filter_in_box: source_index out of range");
    }
    if (box.contains(p.x, p.y) && p.z >= -1.0 && p.z <= 1.0) {
      index.upsert(cloud[p.source_index]);
    }
  }
  if (!out.points.empty()) out.frame_span = FrameSpan{frame_id, frame_id};
  return out;
}

FilteredSet accumulate(FilteredSet state, const FilteredSet& incoming) {
  if (incoming.points.empty()) return state;
  IdIndex index(state.points);
  for (const Landmark& l : incoming.points) index.upsert(l);
  if (incoming.frame_span) state.frame_span = merge(state.frame_span, *incoming.frame_span);
  return state;
}

bool ready(const FilteredSet& state, const LocatorConfig& cfg) {
  return state.size() >= static_cast<std::size_t>(std::max(cfg.threshold_n, 0));
}

Vec3 centroid(std::span<const Landmark> points) {
  if (points.empty()) {
    throw Error(ErrorCode::InsufficientData, "centroid of an empty set");
  }
  Vec3 sum;
  for (const Landmark& l : points) sum += l.position;
  return sum / static_cast<double>(points.size());
}

DataMatrix center_data(std::span<const Landmark> points, const Vec3& c) {
  if (points.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "data matrix needs at least 2 points");
  }
  DataMatrix x;
  x.columns.reserve(points.size());
  for (const Landmark& l : points) x.columns.push_back(l.position - c);
  return x;
}

SymMatrix3 covariance(const DataMatrix& x) {
  if (x.cols() < 2) {
    throw Error(ErrorCode::InsufficientData, "covariance needs at least 2 columns");
  }
  const SymMatrix3 g = gram(x);
  const double inv = 1.0 / static_cast<double>(x.cols() - 1);
  return {g.a11 * inv, g.a12 * inv, g.a13 * inv, g.a22 * inv, g.a23 * inv, g.a33 * inv};
}

std::array<Vec3, 3> canonicalize_axes(const std::array<Vec3, 3>& raw, SignPolicy policy,
                                      const std::optional<TargetPose>& previous) {
  std::array<Vec3, 3> axes = raw;
  const bool align = policy == SignPolicy::AlignPrevious && previous.has_value();
  for (std::size_t i = 0; i < 3; ++i) {
    Vec3& a = axes[i];
    bool flip = false;
    if (align) {
      flip = dot(a, previous->axes[i]) < 0.0;
    } else {
      // Strict comparison keeps the earliest of equal magnitudes (x, then y, then z).
      std::size_t k = 0;
      for (std::size_t j = 1; j < 3; ++j) {
        if (std::abs(a[j]) > std::abs(a[k])) k = j;
      }
      flip = a[k] < 0.0;
    }
    if (flip) a = -a;
  }
  if (dot(axes[0], cross(axes[1], axes[2])) < 0.0) axes[2] = -axes[2];
  return axes;
}

TargetPose estimate_pose(const FilteredSet& state, const LocatorConfig& cfg,
                         const std::optional<TargetPose>& previous, PcaRoute route) {
  cfg.validate();
  if (!ready(state, cfg)) {
    throw Error(ErrorCode::InsufficientData,
                "estimate_pose: " + std::to_string(state.size()) + " points, threshold is " +
                    std::to_string(cfg.threshold_n));
  }
  const Vec3 center = centroid(state);
  const DataMatrix x = center_data(state, center);
  const double n1 = static_cast<double>(x.cols() - 1);

  std::array<double, 3> values{};
  std::array<Vec3, 3> vectors{};
  if (route == PcaRoute::Covariance) {
    const EigenTriple eig = sym_eigen3(covariance(x));
    values = eig.values;
    vectors = eig.vectors;
  } else {
    const RightSingular svd = svd_right3(x);
    for (std::size_t i = 0; i < 3; ++i) {
      values[i] = svd.singular_values[i] * svd.singular_values[i] / n1;
    }
    vectors = svd.v;
  }

  const double scale = 1e-12 * std::max(1.0, norm(center));
  if (!(values[0] + values[1] + values[2] > scale * scale)) {
    throw Error(ErrorCode::DegenerateCloud, "estimate_pose: all points coincide");
  }

  TargetPose pose;
  pose.center = center;
  pose.axes = canonicalize_axes(vectors, cfg.sign_policy, previous);
  for (std::size_t i = 0; i < 3; ++i) pose.eigenvalues[i] = std::max(values[i], 0.0);
  pose.point_count = state.size();
  pose.isotropy_flag = pose.eigenvalues[0] <= cfg.isotropy_ratio * pose.eigenvalues[1];
  return pose;
}

}  // namespace sparseloc
