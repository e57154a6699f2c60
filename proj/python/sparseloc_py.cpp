#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "sparseloc/camera.hpp"
#include "sparseloc/detection.hpp"
#include "sparseloc/error.hpp"
#include "sparseloc/io.hpp"
#include "sparseloc/linalg3.hpp"
#include "sparseloc/locator.hpp"
#include "sparseloc/pipeline.hpp"
#include "sparseloc/simulator.hpp"

namespace py = pybind11;
using namespace sparseloc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

SymMatrix3 sym_from(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != 3 || a.shape(1) != 3) {
    throw py::value_error("expected a 3x3 array");
  }
  auto m = a.unchecked<2>();
  return {m(0, 0), m(0, 1), m(0, 2), m(1, 1), m(1, 2), m(2, 2)};
}

std::vector<Vec3> points_from(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw py::value_error("expected an (N, 3) array");
  auto m = a.unchecked<2>();
  std::vector<Vec3> out(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) out[i] = {m(i, 0), m(i, 1), m(i, 2)};
  return out;
}

std::vector<Landmark> landmarks_from(const Array& a) {
  std::vector<Vec3> pts = points_from(a);
  std::vector<Landmark> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = {static_cast<std::int64_t>(i), pts[i]};
  return out;
}

py::array_t<double> columns_to_array(const std::array<Vec3, 3>& cols) {
  py::array_t<double> out({3, 3});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t r = 0; r < 3; ++r) m(r, c) = cols[c][r];
  return out;
}

py::array_t<double> mat4_to_array(const Mat4& mat) {
  py::array_t<double> out({4, 4});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) m(r, c) = mat(r, c);
  return out;
}

Mat4 mat4_from(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != 4 || a.shape(1) != 4) throw py::value_error("expected 4x4");
  auto m = a.unchecked<2>();
  Mat4 out;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) out(r, c) = m(r, c);
  return out;
}

py::dict pose_to_dict(const TargetPose& p) {
  py::dict d;
  d["center"] = py::make_tuple(p.center.x, p.center.y, p.center.z);
  py::array_t<double> axes({3, 3});
  auto m = axes.mutable_unchecked<2>();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) m(i, k) = p.axes[i][k];
  d["axes"] = axes;  // rows are principal directions
  d["eigenvalues"] = py::make_tuple(p.eigenvalues[0], p.eigenvalues[1], p.eigenvalues[2]);
  d["point_count"] = p.point_count;
  d["isotropy_flag"] = p.isotropy_flag;
  return d;
}

}  // namespace

PYBIND11_MODULE(_sparseloc, m) {
  m.doc() = "Target localization in sparse point clouds by box filtering and PCA";

  py::register_exception<Error>(m, "SparselocError", PyExc_ValueError);

  py::class_<CameraRig>(m, "CameraRig")
      .def(py::init([](std::optional<Array> pose, double fov_y, double aspect, double near_clip,
                       double far_clip) {
             CameraRig rig;
             if (pose) rig.camera_to_world = mat4_from(*pose);
             rig.fov_y = fov_y;
             rig.aspect = aspect;
             rig.near_clip = near_clip;
             rig.far_clip = far_clip;
             rig.validate();
             return rig;
           }),
           py::arg("camera_to_world") = py::none(), py::arg("fov_y") = 1.5707963267948966,
           py::arg("aspect") = 1.0, py::arg("near") = 0.1, py::arg("far") = 100.0)
      .def_static("look_at",
                  [](std::array<double, 3> eye, std::array<double, 3> target, double fov_y,
                     double aspect, double near_clip, double far_clip) {
                    CameraRig rig;
                    rig.camera_to_world = look_at({eye[0], eye[1], eye[2]},
                                                  {target[0], target[1], target[2]});
                    rig.fov_y = fov_y;
                    rig.aspect = aspect;
                    rig.near_clip = near_clip;
                    rig.far_clip = far_clip;
                    rig.validate();
                    return rig;
                  },
                  py::arg("eye"), py::arg("target"), py::arg("fov_y") = 1.0471975511965976,
                  py::arg("aspect") = 4.0 / 3.0, py::arg("near") = 0.1, py::arg("far") = 200.0)
      .def_property_readonly("camera_to_world",
                             [](const CameraRig& r) { return mat4_to_array(r.camera_to_world); })
      .def_readonly("fov_y", &CameraRig::fov_y)
      .def_readonly("aspect", &CameraRig::aspect)
      .def_readonly("near", &CameraRig::near_clip)
      .def_readonly("far", &CameraRig::far_clip);

  m.def("sym_eigen3",
        [](const Array& s) {
          const EigenTriple e = sym_eigen3(sym_from(s));
          return py::make_tuple(py::make_tuple(e.values[0], e.values[1], e.values[2]),
                                columns_to_array(e.vectors));
        },
        py::arg("s"), "Eigenvalues (descending) and eigenvectors (columns) of a symmetric 3x3.");

  m.def("char_poly_roots3",
        [](const Array& s) {
          const auto r = char_poly_roots3(sym_from(s));
          return py::make_tuple(r[0], r[1], r[2]);
        },
        py::arg("s"));

  m.def("svd_right3",
        [](const Array& x) {
          if (x.ndim() != 2 || x.shape(0) != 3) throw py::value_error("expected a (3, N) array");
          auto v = x.unchecked<2>();
          DataMatrix dm;
          for (py::ssize_t c = 0; c < x.shape(1); ++c) dm.columns.push_back({v(0, c), v(1, c), v(2, c)});
          const RightSingular s = svd_right3(dm);
          return py::make_tuple(
              py::make_tuple(s.singular_values[0], s.singular_values[1], s.singular_values[2]),
              columns_to_array(s.v));
        },
        py::arg("x"), "Singular values and right singular vectors (columns) of a 3xN matrix.");

  m.def("projection_matrix", [](const CameraRig& rig) { return mat4_to_array(projection_matrix(rig)); },
        py::arg("rig"));

  m.def("project_cloud",
        [](const Array& points, const CameraRig& rig) {
          const std::vector<NdcPoint> ndc = project_cloud(points_from(points), rig);
          py::array_t<double> coords({static_cast<py::ssize_t>(ndc.size()), py::ssize_t{3}});
          py::array_t<std::int64_t> index(std::vector<py::ssize_t>{static_cast<py::ssize_t>(ndc.size())});
          auto c = coords.mutable_unchecked<2>();
          auto k = index.mutable_unchecked<1>();
          for (std::size_t i = 0; i < ndc.size(); ++i) {
            const auto row = static_cast<py::ssize_t>(i);
            c(row, 0) = ndc[i].x;
            c(row, 1) = ndc[i].y;
            c(row, 2) = ndc[i].z;
            k(row) = static_cast<std::int64_t>(ndc[i].source_index);
          }
          return py::make_tuple(coords, index);
        },
        py::arg("points"), py::arg("rig"),
        "NDC coordinates of the non-culled points and the index of each in `points`.");

  m.def("normalize_box",
        [](double x_min, double y_min, double x_max, double y_max, int width, int height) {
          PixelBox b;
          b.x_min = x_min;
          b.y_min = y_min;
          b.x_max = x_max;
          b.y_max = y_max;
          b.image_width = width;
          b.image_height = height;
          const NdcBox n = normalize_box(b);
          return py::make_tuple(n.x_min, n.y_min, n.x_max, n.y_max);
        },
        py::arg("x_min"), py::arg("y_min"), py::arg("x_max"), py::arg("y_max"), py::arg("width"),
        py::arg("height"));

  m.def("filter_in_box",
        [](const Array& points, const CameraRig& rig, std::array<double, 4> box) {
          const std::vector<Landmark> cloud = landmarks_from(points);
          const std::vector<NdcPoint> ndc = project_cloud(positions(cloud), rig);
          const FilteredSet set = filter_in_box(ndc, {box[0], box[1], box[2], box[3]}, cloud, 0);
          std::vector<std::int64_t> ids;
          ids.reserve(set.size());
          for (const Landmark& l : set.points) ids.push_back(l.id);
          return ids;
        },
        py::arg("points"), py::arg("rig"), py::arg("ndc_box"),
        "Indices of the points whose projection lies in the NDC box (x_min, y_min, x_max, y_max).");

  m.def("estimate_pose",
        [](const Array& points, int threshold_n, double isotropy_ratio, const std::string& route) {
          LocatorConfig cfg;
          cfg.threshold_n = threshold_n;
          cfg.isotropy_ratio = isotropy_ratio;
          FilteredSet set;
          set.points = landmarks_from(points);
          PcaRoute r = PcaRoute::Covariance;
          if (route == "svd") {
            r = PcaRoute::Svd;
          } else if (route != "covariance") {
            throw py::value_error("route must be 'covariance' or 'svd'");
          }
          return pose_to_dict(estimate_pose(set, cfg, std::nullopt, r));
        },
        py::arg("points"), py::arg("threshold_n") = 30, py::arg("isotropy_ratio") = 1.2,
        py::arg("route") = "covariance");

  m.def("default_scene_json", [] { return format_scene_spec(default_scene()); });

  m.def("gen_target_cloud",
        [](const std::string& scene_json) {
          const std::vector<Landmark> cloud = gen_target_cloud(parse_scene_spec(scene_json, "scene"));
          py::array_t<double> out({static_cast<py::ssize_t>(cloud.size()), py::ssize_t{3}});
          auto a = out.mutable_unchecked<2>();
          for (std::size_t i = 0; i < cloud.size(); ++i)
            for (std::size_t k = 0; k < 3; ++k) a(i, k) = cloud[i].position[k];
          return out;
        },
        py::arg("scene_json"));

  m.def("run_locate",
        [](std::optional<std::string> simulate, std::optional<std::string> cloud,
           std::optional<std::string> cameras, std::optional<std::string> detections,
           const std::string& class_label, int threshold, const std::string& sign_policy,
           std::optional<std::string> out, std::optional<std::string> svg,
           std::optional<std::string> metrics) {
          RunConfig cfg;
          if (simulate) {
            cfg.mode = InputMode::Simulate;
            cfg.scene_spec = *simulate;
          } else {
            if (!cloud || !cameras) throw py::value_error("need simulate or cloud + cameras");
            cfg.cloud = *cloud;
            cfg.cameras = *cameras;
          }
          if (detections) cfg.detections = *detections;
          cfg.locator.class_label = class_label;
          cfg.locator.threshold_n = threshold;
          cfg.locator.sign_policy = sign_policy == "align-prev" ? SignPolicy::AlignPrevious
                                                                : SignPolicy::LargestComponentPositive;
          if (out) cfg.pose_out = *out;
          if (svg) cfg.svg_out = *svg;
          if (metrics) cfg.metrics_out = *metrics;
          const RunOutput r = run_locate(cfg);
          py::dict d;
          d["exit_code"] = r.exit_code;
          d["message"] = r.message;
          d["pose_json"] = r.pose_json;
          d["metrics_json"] = r.metrics_json;
          d["svg"] = r.svg;
          return d;
        },
        py::arg("simulate") = py::none(), py::arg("cloud") = py::none(),
        py::arg("cameras") = py::none(), py::arg("detections") = py::none(),
        py::arg("class_label") = "target", py::arg("threshold") = 30,
        py::arg("sign_policy") = "largest", py::arg("out") = py::none(),
        py::arg("svg") = py::none(), py::arg("metrics") = py::none(),
        "Run the batch pipeline; returns the exit code and the rendered outputs.");
}
