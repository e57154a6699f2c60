#pragma once

// Fixed-size 3D/4D linear algebra: vectors, rigid and projective 4x4
// matrices, a Jacobi eigensolver for symmetric 3x3 matrices and the
// right-hand thin SVD of a 3xN data matrix.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace sparseloc {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const {
    return i == 0 ? x : (i == 1 ? y : z);
  }
  constexpr double& operator[](std::size_t i) {
    return i == 0 ? x : (i == 1 ? y : z);
  }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// General 3x3 matrix, row-major. Used for rotations and axis frames.
struct Mat3 {
  std::array<double, 9> m{};

  static constexpr Mat3 identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
  static constexpr Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    return {{c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z}};
  }
  /// Right-handed rotation by `angle` radians about a unit `axis`.
  static Mat3 rotation(const Vec3& axis, double angle);

  constexpr double operator()(std::size_t r, std::size_t c) const { return m[r * 3 + c]; }
  constexpr double& operator()(std::size_t r, std::size_t c) { return m[r * 3 + c]; }

  constexpr Vec3 column(std::size_t c) const { return {m[c], m[3 + c], m[6 + c]}; }
  constexpr Vec3 row(std::size_t r) const { return {m[3 * r], m[3 * r + 1], m[3 * r + 2]}; }

  Mat3 transposed() const;
  double determinant() const;
};

Vec3 operator*(const Mat3& a, const Vec3& v);
Mat3 operator*(const Mat3& a, const Mat3& b);

/// 4x4 matrix acting on column vectors, stored row-major.
struct Mat4 {
  std::array<double, 16> m{};

  static constexpr Mat4 identity() {
    return {{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1}};
  }
  static Mat4 translation(const Vec3& t);
  /// Rigid transform p -> R p + t.
  static Mat4 rigid(const Mat3& rotation, const Vec3& t);

  constexpr double operator()(std::size_t r, std::size_t c) const { return m[r * 4 + c]; }
  constexpr double& operator()(std::size_t r, std::size_t c) { return m[r * 4 + c]; }

  friend bool operator==(const Mat4&, const Mat4&) = default;
};

Mat4 mat4_mul(const Mat4& a, const Mat4& b);
inline Mat4 operator*(const Mat4& a, const Mat4& b) { return mat4_mul(a, b); }

struct Homogeneous {
  Vec3 xyz;
  double w = 1.0;
};

/// M * (p, 1). The perspective divide is left to the caller.
Homogeneous transform_point(const Mat4& m, const Vec3& p);

double determinant(const Mat4& m);
/// Throws Error(InvalidInput) when |det| <= 1e-12.
Mat4 inverse(const Mat4& m);
bool is_finite(const Mat4& m);

/// Symmetric 3x3 matrix stored as its upper triangle.
struct SymMatrix3 {
  double a11 = 0.0, a12 = 0.0, a13 = 0.0;
  double a22 = 0.0, a23 = 0.0;
  double a33 = 0.0;

  static constexpr SymMatrix3 diagonal(double d1, double d2, double d3) {
    return {d1, 0.0, 0.0, d2, 0.0, d3};
  }

  double operator()(std::size_t r, std::size_t c) const;
  double trace() const { return a11 + a22 + a33; }
  double determinant() const;
  double frobenius_norm() const;
  bool is_finite() const;
  Mat3 to_mat3() const;
};

Vec3 operator*(const SymMatrix3& s, const Vec3& v);

/// Eigenpairs sorted by descending eigenvalue; vectors[i] belongs to values[i].
struct EigenTriple {
  std::array<double, 3> values{};
  std::array<Vec3, 3> vectors{};
};

/// Cyclic Jacobi rotations until the off-diagonal norm drops to
/// 1e-12 * ||S||_F (at most 64 sweeps). Repeated eigenvalues yield an
/// arbitrary orthonormal basis of their eigenspace.
EigenTriple sym_eigen3(const SymMatrix3& s);

/// Roots of det(S - lambda I) = 0 from the closed-form trigonometric
/// solution of the cubic, sorted descending. Independent of sym_eigen3 and
/// meant as a cross-check; it loses accuracy near repeated roots.
std::array<double, 3> char_poly_roots3(const SymMatrix3& s);

/// 3xN matrix held as its columns.
struct DataMatrix {
  std::vector<Vec3> columns;

  std::size_t cols() const { return columns.size(); }
};

/// X * X^T.
SymMatrix3 gram(const DataMatrix& x);

struct RightSingular {
  std::array<double, 3> singular_values{};  // descending
  std::array<Vec3, 3> v{};                  // right singular vectors
};

/// Singular values and right singular vectors of a 3xN matrix, computed
/// through the eigendecomposition of X X^T. Requires N >= 2.
RightSingular svd_right3(const DataMatrix& x);

}  // namespace sparseloc
