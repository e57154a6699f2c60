#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sparseloc/error.hpp"
#include "sparseloc/locator.hpp"
#include "sparseloc/simulator.hpp"
#include "test_support.hpp"

using namespace sparseloc;
using sparseloc::testing::as_set;
using sparseloc::testing::random_cloud;
using sparseloc::testing::random_rotation;
using sparseloc::testing::random_vec;
using sparseloc::testing::rel_err;
using sparseloc::testing::uniform_in;

namespace {

std::vector<Landmark> numbered(std::initializer_list<Vec3> pts, std::int64_t first = 0) {
  std::vector<Landmark> out;
  for (const Vec3& p : pts) out.push_back({first++, p});
  return out;
}

double det3(const std::array<Vec3, 3>& a) { return dot(a[0], cross(a[1], a[2])); }

LocatorConfig small_cfg() {
  LocatorConfig cfg;
  cfg.threshold_n = 4;
  return cfg;
}

}  // namespace

TEST_CASE("filter_in_box: whole screen, empty intersection, depth bound") {
  const auto cloud = numbered({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}});
  const std::vector<NdcPoint> projected{{0.1, 0.2, 0.0, 0}, {-0.9, 0.9, 0.5, 1}, {1.0, -1.0, 1.0, 2}};

  const FilteredSet all = filter_in_box(projected, NdcBox{}, cloud, 3);
  REQUIRE(all.size() == 3);
  CHECK(all.points[1].id == 1);
  REQUIRE(all.frame_span);
  CHECK(*all.frame_span == FrameSpan{3, 3});

  const FilteredSet none = filter_in_box(projected, NdcBox{0.5, 0.5, 0.6, 0.6}, cloud, 0);
  CHECK(none.empty());
  CHECK_FALSE(none.frame_span);

  const std::vector<NdcPoint> deep{{0.0, 0.0, 1.0 + 1e-10, 0}};
  CHECK(filter_in_box(deep, NdcBox{}, cloud, 0).empty());

  const std::vector<NdcPoint> bad{{0.0, 0.0, 0.0, 7}};
  CHECK_THROWS_AS(filter_in_box(bad, NdcBox{}, cloud, 0), Error);
}

TEST_CASE("filter_in_box: matches brute-force membership") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Landmark> cloud;
    std::vector<NdcPoint> projected;
    for (std::size_t i = 0; i < 100; ++i) {
      cloud.push_back({static_cast<std::int64_t>(i), random_vec(rng, -5, 5)});
      projected.push_back({uniform_in(rng, -1, 1), uniform_in(rng, -1, 1), uniform_in(rng, -1.01, 1.01), i});
    }
    const double x0 = uniform_in(rng, -1, 1), x1 = uniform_in(rng, -1, 1);
    const double y0 = uniform_in(rng, -1, 1), y1 = uniform_in(rng, -1, 1);
    const NdcBox box{std::min(x0, x1), std::min(y0, y1), std::max(x0, x1), std::max(y0, y1)};

    std::vector<Landmark> expected;
    for (const NdcPoint& p : projected) {
      const bool in = p.x >= box.x_min && p.x <= box.x_max && p.y >= box.y_min &&
                      p.y <= box.y_max && p.z >= -1.0 && p.z <= 1.0;
      if (in) expected.push_back(cloud[p.source_index]);
    }
    CHECK(filter_in_box(projected, box, cloud, 0).points == expected);
  }
}

TEST_CASE("accumulate: identity, idempotence, replacement, threshold boundary") {
  const FilteredSet s = as_set(numbered({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}));
  CHECK(accumulate(FilteredSet{}, s).points == s.points);
  CHECK(accumulate(s, s).size() == 3);

  FilteredSet moved = as_set({{1, {5, 5, 5}}});
  const FilteredSet merged = accumulate(s, moved);
  REQUIRE(merged.size() == 3);
  CHECK(merged.points[1].position == Vec3{5, 5, 5});

  LocatorConfig cfg;
  cfg.threshold_n = 4;
  CHECK_FALSE(ready(s, cfg));
  CHECK(ready(accumulate(s, as_set({{9, {1, 1, 1}}})), cfg));
  CHECK_FALSE(ready(accumulate(s, as_set({{2, {1, 1, 1}}})), cfg));
}

TEST_CASE("accumulate: frame span covers both inputs") {
  FilteredSet a = as_set({{0, {0, 0, 0}}});
  a.frame_span = FrameSpan{2, 2};
  FilteredSet b = as_set({{1, {0, 0, 0}}});
  b.frame_span = FrameSpan{5, 5};
  const FilteredSet m = accumulate(a, b);
  REQUIRE(m.frame_span);
  CHECK(*m.frame_span == FrameSpan{2, 5});
}

TEST_CASE("centroid: examples") {
  CHECK(centroid(numbered({{0, 0, 0}, {2, 0, 0}})) == Vec3{1, 0, 0});
  CHECK(centroid(numbered({{3, -4, 5}})) == Vec3{3, -4, 5});
  std::vector<Landmark> cube;
  for (int i = 0; i < 8; ++i) cube.push_back({i, {double(i & 1), double((i >> 1) & 1), double(i >> 2)}});
  CHECK(centroid(cube) == Vec3{0.5, 0.5, 0.5});
  CHECK_THROWS_AS(centroid(std::vector<Landmark>{}), Error);
}

TEST_CASE("center_data: columns, vanishing row means, translation invariance") {
  const DataMatrix x = center_data(numbered({{1, 0, 0}, {-1, 0, 0}}), {0, 0, 0});
  REQUIRE(x.cols() == 2);
  CHECK(x.columns[0] == Vec3{1, 0, 0});
  CHECK(x.columns[1] == Vec3{-1, 0, 0});
  CHECK_THROWS_AS(center_data(numbered({{1, 2, 3}}), {0, 0, 0}), Error);

  SplitMix64 rng(4);
  auto cloud = random_cloud(rng, 57);
  const Vec3 c = centroid(cloud);
  const DataMatrix d = center_data(cloud, c);
  Vec3 sum;
  for (const Vec3& col : d.columns) sum += col;
  CHECK(norm(sum) <= 1e-12 * 57 * 20.0);

  const Vec3 t{100, -50, 25};
  auto shifted = cloud;
  for (Landmark& l : shifted) l.position += t;
  const DataMatrix ds = center_data(shifted, c + t);
  for (std::size_t i = 0; i < d.cols(); ++i) CHECK(norm(ds.columns[i] - d.columns[i]) <= 1e-12);
}

TEST_CASE("covariance: hand examples and direct summation") {
  const SymMatrix3 a = covariance(DataMatrix{{{1, 0, 0}, {-1, 0, 0}}});
  CHECK(a.a11 == 2.0);
  CHECK(a.a22 == 0.0);
  CHECK(a.a12 == 0.0);

  const SymMatrix3 b = covariance(DataMatrix{{{1, 1, 0}, {1, -1, 0}, {-1, 1, 0}, {-1, -1, 0}}});
  CHECK(b.a11 == doctest::Approx(4.0 / 3.0));
  CHECK(b.a22 == doctest::Approx(4.0 / 3.0));
  CHECK(b.a12 == 0.0);
  CHECK(b.a33 == 0.0);

  CHECK_THROWS_AS(covariance(DataMatrix{{{1, 0, 0}}}), Error);

  SplitMix64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    DataMatrix x;
    const std::size_t n = 2 + rng.below(200);
    for (std::size_t i = 0; i < n; ++i) x.columns.push_back(random_vec(rng, -4, 4));
    double s[3][3] = {};
    for (const Vec3& col : x.columns) {
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) s[r][c] += col[r] * col[c];
    }
    const SymMatrix3 cov = covariance(x);
    const double scale = cov.frobenius_norm();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        CHECK(std::abs(cov(r, c) - s[r][c] / double(n - 1)) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("canonicalize_axes: sign rule and handedness repair") {
  const auto a = canonicalize_axes({Vec3{-1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}},
                                   SignPolicy::LargestComponentPositive);
  CHECK(a[0] == Vec3{1, 0, 0});

  const auto b = canonicalize_axes({Vec3{1, 0, 0}, Vec3{0, -0.8, 0.6}, Vec3{0, 0.6, 0.8}},
                                   SignPolicy::LargestComponentPositive);
  CHECK(b[1] == Vec3{0, 0.8, -0.6});
  CHECK(det3(b) == doctest::Approx(1.0));

  // Left-handed after the sign pass: the third axis takes the blame.
  const auto c = canonicalize_axes({Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}},
                                   SignPolicy::LargestComponentPositive);
  CHECK(det3(c) == 1.0);
  const auto d = canonicalize_axes({Vec3{0, 1, 0}, Vec3{1, 0, 0}, Vec3{0, 0, 1}},
                                   SignPolicy::LargestComponentPositive);
  CHECK(d[2] == Vec3{0, 0, -1});
  CHECK(det3(d) == 1.0);

  // Equal magnitudes: x wins, then y.
  const double h = 1.0 / std::sqrt(2.0);
  const auto e = canonicalize_axes({Vec3{-h, h, 0}, Vec3{h, h, 0}, Vec3{0, 0, 1}},
                                   SignPolicy::LargestComponentPositive);
  CHECK(e[0].x > 0.0);
}

TEST_CASE("canonicalize_axes: align-previous and idempotence") {
  TargetPose prev;
  prev.axes = {Vec3{-1, 0, 0}, Vec3{0, -1, 0}, Vec3{0, 0, 1}};
  const auto a = canonicalize_axes({Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}},
                                   SignPolicy::AlignPrevious, prev);
  CHECK(a[0] == Vec3{-1, 0, 0});
  CHECK(a[1] == Vec3{0, -1, 0});
  CHECK(det3(a) == 1.0);

  // Without a previous pose the policy falls back to the sign rule.
  const auto b = canonicalize_axes({Vec3{-1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, -1}},
                                   SignPolicy::AlignPrevious);
  CHECK(b[0] == Vec3{1, 0, 0});

  SplitMix64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat3 r = random_rotation(rng);
    std::array<Vec3, 3> raw{r.column(0), r.column(1), r.column(2)};
    for (Vec3& v : raw) {
      if (rng.below(2)) v = -v;
    }
    const auto once = canonicalize_axes(raw, SignPolicy::LargestComponentPositive);
    const auto twice = canonicalize_axes(once, SignPolicy::LargestComponentPositive);
    CHECK(once == twice);
    CHECK(det3(once) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("estimate_pose: noiseless ellipsoid, axis-aligned and rotated") {
  SceneSpec spec;
  spec.seed = 99;
  spec.target.extents = {10, 3, 1};
  spec.target.n_points = 500;
  spec.target.center = {1, 2, 3};
  spec.trajectory = {CameraRig{}};
  LocatorConfig cfg;

  const TargetPose p = estimate_pose(as_set(gen_target_cloud(spec)), cfg);
  CHECK(norm(p.center - spec.target.center) <= 1e-6 * norm(spec.target.center));
  CHECK(p.axes[0].x == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p.axes[1].y == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p.axes[2].z == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(p.isotropy_flag);
  CHECK(p.point_count == 500);

  spec.target.rotation = Mat3::rotation({0, 0, 1}, std::numbers::pi / 6.0);
  const TargetPose q = estimate_pose(as_set(gen_target_cloud(spec)), cfg);
  CHECK(q.axes[0].x == doctest::Approx(std::cos(std::numbers::pi / 6.0)).epsilon(1e-6));
  CHECK(q.axes[0].y == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(q.axes[0].z) <= 1e-6);
}

TEST_CASE("estimate_pose: error paths") {
  LocatorConfig cfg;
  SplitMix64 rng(2);
  auto cloud = random_cloud(rng, 29);
  CHECK_THROWS_AS(estimate_pose(as_set(cloud), cfg), Error);
  cloud.push_back({1000, {0, 0, 0}});
  CHECK_NOTHROW(estimate_pose(as_set(cloud), cfg));

  std::vector<Landmark> same;
  for (int i = 0; i < 30; ++i) same.push_back({i, {4, 5, 6}});
  try {
    estimate_pose(as_set(same), cfg);
    FAIL("expected a degenerate-cloud error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateCloud);
  }

  cfg.threshold_n = 3;
  CHECK_THROWS_AS(estimate_pose(as_set(cloud), cfg), Error);
}

TEST_CASE("estimate_pose: isotropic clouds are flagged") {
  std::vector<Landmark> ring;
  for (int i = 0; i < 64; ++i) {
    const double t = 2.0 * std::numbers::pi * i / 64.0;
    ring.push_back({i, {std::cos(t), std::sin(t), 0.0}});
  }
  CHECK(estimate_pose(as_set(ring), small_cfg()).isotropy_flag);
}

TEST_CASE("estimate_pose: covariance and SVD routes agree") {
  SplitMix64 rng(40);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cloud = as_set(random_cloud(rng, 4 + rng.below(300)));
    const TargetPose a = estimate_pose(cloud, small_cfg(), std::nullopt, PcaRoute::Covariance);
    const TargetPose b = estimate_pose(cloud, small_cfg(), std::nullopt, PcaRoute::Svd);
    for (int i = 0; i < 3; ++i) {
      CHECK(rel_err(a.eigenvalues[i], b.eigenvalues[i], 0.0) <= 1e-9);
      CHECK(norm(a.axes[i] - b.axes[i]) <= 1e-9);
    }
  }
}

TEST_CASE("estimate_pose: translation, rotation and scale laws") {
  SplitMix64 rng(50);
  for (int trial = 0; trial < 30; ++trial) {
    const auto cloud = random_cloud(rng, 40 + rng.below(100));
    const TargetPose base = estimate_pose(as_set(cloud), small_cfg());

    const Vec3 t = random_vec(rng, -100, 100);
    const Mat3 r = random_rotation(rng);
    const double s = uniform_in(rng, 0.2, 5.0);
    std::vector<Landmark> moved = cloud, turned = cloud, scaled = cloud;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      moved[i].position += t;
      turned[i].position = r * cloud[i].position;
      scaled[i].position = s * cloud[i].position;
    }
    const TargetPose pt = estimate_pose(as_set(moved), small_cfg());
    const TargetPose pr = estimate_pose(as_set(turned), small_cfg());
    const TargetPose ps = estimate_pose(as_set(scaled), small_cfg());
    CHECK(norm(pt.center - (base.center + t)) <= 1e-9 * std::max(1.0, norm(t)));
    for (int i = 0; i < 3; ++i) {
      CHECK(rel_err(pt.eigenvalues[i], base.eigenvalues[i]) <= 1e-9);
      CHECK(rel_err(pr.eigenvalues[i], base.eigenvalues[i]) <= 1e-9);
      CHECK(rel_err(ps.eigenvalues[i], s * s * base.eigenvalues[i]) <= 1e-9);
      CHECK(std::abs(std::abs(dot(pt.axes[i], base.axes[i])) - 1.0) <= 1e-9);
      CHECK(std::abs(std::abs(dot(pr.axes[i], r * base.axes[i])) - 1.0) <= 1e-9);
      CHECK(std::abs(std::abs(dot(ps.axes[i], base.axes[i])) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("estimate_pose: eigenvalue sum equals the unbiased mean squared radius") {
  SplitMix64 rng(60);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cloud = random_cloud(rng, 5 + rng.below(200));
    const TargetPose p = estimate_pose(as_set(cloud), small_cfg());
    double ss = 0.0;
    for (const Landmark& l : cloud) ss += dot(l.position - p.center, l.position - p.center);
    const double n = static_cast<double>(cloud.size());
    CHECK(rel_err(p.eigenvalues[0] + p.eigenvalues[1] + p.eigenvalues[2], ss / n * n / (n - 1), 0.0) <=
          1e-9);
  }
}

TEST_CASE("LocatorConfig::validate") {
  LocatorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.isotropy_ratio = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = LocatorConfig{};
  cfg.threshold_n = 3;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
