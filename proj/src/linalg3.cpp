#include "sparseloc/linalg3.hpp"

#include <algorithm>
#include <numbers>
#include <utility>

#include "sparseloc/error.hpp"

namespace sparseloc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid input";
    case ErrorCode::InvalidCamera: return "invalid camera";
    case ErrorCode::InvalidBox: return "invalid box";
    case ErrorCode::InsufficientData: return "insufficient data";
    case ErrorCode::DegenerateCloud: return "degenerate cloud";
    case ErrorCode::InputFormat: return "input format";
  }
  return "unknown";
}

Mat3 Mat3::rotation(const Vec3& axis, double angle) {
  const Vec3 u = normalized(axis);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  return {{t * u.x * u.x + c, t * u.x * u.y - s * u.z, t * u.x * u.z + s * u.y,
           t * u.x * u.y + s * u.z, t * u.y * u.y + c, t * u.y * u.z - s * u.x,
           t * u.x * u.z - s * u.y, t * u.y * u.z + s * u.x, t * u.z * u.z + c}};
}

Mat3 Mat3::transposed() const {
  Mat3 t;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Mat3::determinant() const {
  return dot(row(0), cross(row(1), row(2)));
}

Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {dot(a.row(0), v), dot(a.row(1), v), dot(a.row(2), v)};
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 out;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      out(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c) + a(r, 2) * b(2, c);
  return out;
}

Mat4 Mat4::translation(const Vec3& t) {
  Mat4 out = identity();
  out(0, 3) = t.x;
  out(1, 3) = t.y;
  out(2, 3) = t.z;
  return out;
}

Mat4 Mat4::rigid(const Mat3& rotation, const Vec3& t) {
  Mat4 out = translation(t);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) out(r, c) = rotation(r, c);
  return out;
}

Mat4 mat4_mul(const Mat4& a, const Mat4& b) {
  Mat4 out;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      double sum = 0.0;
      for (std::size_t k = 0; k < 4; ++k) sum += a(r, k) * b(k, c);
      out(r, c) = sum;
    }
  }
  return out;
}

Homogeneous transform_point(const Mat4& m, const Vec3& p) {
  auto row = [&](std::size_t r) {
    return m(r, 0) * p.x + m(r, 1) * p.y + m(r, 2) * p.z + m(r, 3);
  };
  return {{row(0), row(1), row(2)}, row(3)};
}

namespace {

// 2x2 minors of rows (0,1) and rows (2,3); the Laplace expansion along
// these row pairs gives both the determinant and the adjugate.
struct Minors4 {
  double s0, s1, s2, s3, s4, s5;
  double c0, c1, c2, c3, c4, c5;
};

Minors4 minors(const Mat4& a) {
  return {a(0, 0) * a(1, 1) - a(1, 0) * a(0, 1), a(0, 0) * a(1, 2) - a(1, 0) * a(0, 2),
          a(0, 0) * a(1, 3) - a(1, 0) * a(0, 3), a(0, 1) * a(1, 2) - a(1, 1) * a(0, 2),
          a(0, 1) * a(1, 3) - a(1, 1) * a(0, 3), a(0, 2) * a(1, 3) - a(1, 2) * a(0, 3),
          a(2, 0) * a(3, 1) - a(3, 0) * a(2, 1), a(2, 0) * a(3, 2) - a(3, 0) * a(2, 2),
          a(2, 0) * a(3, 3) - a(3, 0) * a(2, 3), a(2, 1) * a(3, 2) - a(3, 1) * a(2, 2),
          a(2, 1) * a(3, 3) - a(3, 1) * a(2, 3), a(2, 2) * a(3, 3) - a(3, 2) * a(2, 3)};
}

double det_from(const Minors4& k) {
  return k.s0 * k.c5 - k.s1 * k.c4 + k.s2 * k.c3 + k.s3 * k.c2 - k.s4 * k.c1 + k.s5 * k.c0;
}

}  // namespace

double determinant(const Mat4& m) { return det_from(minors(m)); }

Mat4 inverse(const Mat4& a) {
  const Minors4 k = minors(a);
  const double det = det_from(k);
  if (!(std::abs(det) > 1e-12)) {
    throw Error(ErrorCode::InvalidInput, "matrix is singular (|det| <= 1e-12)");
  }
  const double inv = 1.0 / det;
  Mat4 b;
  b(0, 0) = (a(1, 1) * k.c5 - a(1, 2) * k.c4 + a(1, 3) * k.c3) * inv;
  b(0, 1) = (-a(0, 1) * k.c5 + a(0, 2) * k.c4 - a(0, 3) * k.c3) * inv;
  b(0, 2) = (a(3, 1) * k.s5 - a(3, 2) * k.s4 + a(3, 3) * k.s3) * inv;
  b(0, 3) = (-a(2, 1) * k.s5 + a(2, 2) * k.s4 - a(2, 3) * k.s3) * inv;
  b(1, 0) = (-a(1, 0) * k.c5 + a(1, 2) * k.c2 - a(1, 3) * k.c1) * inv;
  b(1, 1) = (a(0, 0) * k.c5 - a(0, 2) * k.c2 + a(0, 3) * k.c1) * inv;
  b(1, 2) = (-a(3, 0) * k.s5 + a(3, 2) * k.s2 - a(3, 3) * k.s1) * inv;
  b(1, 3) = (a(2, 0) * k.s5 - a(2, 2) * k.s2 + a(2, 3) * k.s1) * inv;
  b(2, 0) = (a(1, 0) * k.c4 - a(1, 1) * k.c2 + a(1, 3) * k.c0) * inv;
  b(2, 1) = (-a(0, 0) * k.c4 + a(0, 1) * k.c2 - a(0, 3) * k.c0) * inv;
  b(2, 2) = (a(3, 0) * k.s4 - a(3, 1) * k.s2 + a(3, 3) * k.s0) * inv;
  b(2, 3) = (-a(2, 0) * k.s4 + a(2, 1) * k.s2 - a(2, 3) * k.s0) * inv;
  b(3, 0) = (-a(1, 0) * k.c3 + a(1, 1) * k.c1 - a(1, 2) * k.c0) * inv;
  b(3, 1) = (a(0, 0) * k.c3 - a(0, 1) * k.c1 + a(0, 2) * k.c0) * inv;
  b(3, 2) = (-a(3, 0) * k.s3 + a(3, 1) * k.s1 - a(3, 2) * k.s0) * inv;
  b(3, 3) = (a(2, 0) * k.s3 - a(2, 1) * k.s1 + a(2, 2) * k.s0) * inv;
  return b;
}

bool is_finite(const Mat4& m) {
  return std::all_of(m.m.begin(), m.m.end(), [](double v) { return std::isfinite(v); });
}

double SymMatrix3::operator()(std::size_t r, std::size_t c) const {
  if (r > c) std::swap(r, c);
  if (r == 0) return c == 0 ? a11 : (c == 1 ? a12 : a13);
  if (r == 1) return c == 1 ? a22 : a23;
  return a33;
}

double SymMatrix3::determinant() const {
  return a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
         a13 * (a12 * a23 - a22 * a13);
}

double SymMatrix3::frobenius_norm() const {
  return std::sqrt(a11 * a11 + a22 * a22 + a33 * a33 +
                   2.0 * (a12 * a12 + a13 * a13 + a23 * a23));
}

bool SymMatrix3::is_finite() const {
  return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a13) &&
         std::isfinite(a22) && std::isfinite(a23) && std::isfinite(a33);
}

Mat3 SymMatrix3::to_mat3() const {
  return {{a11, a12, a13, a12, a22, a23, a13, a23, a33}};
}

Vec3 operator*(const SymMatrix3& s, const Vec3& v) {
  return {s.a11 * v.x + s.a12 * v.y + s.a13 * v.z,
          s.a12 * v.x + s.a22 * v.y + s.a23 * v.z,
          s.a13 * v.x + s.a23 * v.y + s.a33 * v.z};
}

EigenTriple sym_eigen3(const SymMatrix3& s) {
  if (!s.is_finite()) {
    throw Error(ErrorCode::InvalidInput, "sym_eigen3: non-finite matrix entry");
  }
  constexpr int kMaxSweeps = 64;
  const double tol = 1e-12 * s.frobenius_norm();

  Mat3 a = s.to_mat3();
  Mat3 v = Mat3::identity();

  auto off_norm = [&a] {
    return std::sqrt(2.0 * (a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2)));
  };

  constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() > tol; ++sweep) {
    for (const auto& [p, q] : kPairs) {
      const double apq = a(p, q);
      if (apq == 0.0) continue;
      const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
      double t;
      if (std::abs(theta) > 1e150) {
        t = 0.5 / theta;
      } else {
        t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      }
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double sn = t * c;

      // A <- J^T A J with J = [[c, s], [-s, c]] in the (p, q) plane.
      for (std::size_t k = 0; k < 3; ++k) {
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = c * akp - sn * akq;
        a(k, q) = sn * akp + c * akq;
      }
      for (std::size_t k = 0; k < 3; ++k) {
        const double apk = a(p, k);
        const double aqk = a(q, k);
        a(p, k) = c * apk - sn * aqk;
        a(q, k) = sn * apk + c * aqk;
      }
      a(p, q) = 0.0;
      a(q, p) = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = c * vkp - sn * vkq;
        v(k, q) = sn * vkp + c * vkq;
      }
    }
  }

  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenTriple out;
  for (std::size_t i = 0; i < 3; ++i) {
    out.values[i] = a(order[i], order[i]);
    out.vectors[i] = normalized(v.column(order[i]));
  }
  return out;
}

std::array<double, 3> char_poly_roots3(const SymMatrix3& s) {
  if (!s.is_finite()) {
    throw Error(ErrorCode::InvalidInput, "char_poly_roots3: non-finite matrix entry");
  }
  // Shift by the mean eigenvalue so the cubic is depressed:
  // det(B - tI) = -(t^3 + p t + q) with B = S - (tr/3) I.
  const double shift = s.trace() / 3.0;
  const double b11 = s.a11 - shift;
  const double b22 = s.a22 - shift;
  const double b33 = s.a33 - shift;
  const double off2 = s.a12 * s.a12 + s.a13 * s.a13 + s.a23 * s.a23;
  const double p = -0.5 * (b11 * b11 + b22 * b22 + b33 * b33) - off2;
  const double det_b = b11 * (b22 * b33 - s.a23 * s.a23) - s.a12 * (s.a12 * b33 - s.a23 * s.a13) +
                       s.a13 * (s.a12 * s.a23 - b22 * s.a13);
  const double q = -det_b;

  std::array<double, 3> roots{};
  if (p >= 0.0) {
    // p <= 0 always for symmetric B; p == 0 means B == 0.
    roots = {shift, shift, shift};
    return roots;
  }
  const double m = 2.0 * std::sqrt(-p / 3.0);
  double arg = (3.0 * q / (p * m));
  arg = std::clamp(arg, -1.0, 1.0);
  const double phi = std::acos(arg) / 3.0;
  constexpr double kTwoThirdsPi = 2.0 * std::numbers::pi / 3.0;
  std::array<double, 3> t{m * std::cos(phi), m * std::cos(phi - kTwoThirdsPi),
                          m * std::cos(phi - 2.0 * kTwoThirdsPi)};

  // One Newton step on the depressed cubic tightens each root.
  for (double& r : t) {
    const double f = (r * r + p) * r + q;
    const double df = 3.0 * r * r + p;
    if (df != 0.0) r -= f / df;
  }
  std::sort(t.begin(), t.end(), std::greater<>());
  for (std::size_t i = 0; i < 3; ++i) roots[i] = t[i] + shift;
  return roots;
}

SymMatrix3 gram(const DataMatrix& x) {
  SymMatrix3 g;
  for (const Vec3& c : x.columns) {
    g.a11 += c.x * c.x;
    g.a12 += c.x * c.y;
    g.a13 += c.x * c.z;
    g.a22 += c.y * c.y;
    g.a23 += c.y * c.z;
    g.a33 += c.z * c.z;
  }
  return g;
}

RightSingular svd_right3(const DataMatrix& x) {
  if (x.cols() < 2) {
    throw Error(ErrorCode::InsufficientData, "svd_right3: need at least 2 columns");
  }
  const EigenTriple eig = sym_eigen3(gram(x));
  RightSingular out;
  for (std::size_t i = 0; i < 3; ++i) {
    out.singular_values[i] = std::sqrt(std::max(eig.values[i], 0.0));
    out.v[i] = eig.vectors[i];
  }
  return out;
}

}  // namespace sparseloc
