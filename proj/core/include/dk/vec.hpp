#pragma once

#include <cmath>
#include <array>

namespace dk {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline Vec3 unit(const Vec3& a) { return a / norm(a); }
// safe unit vector for kernels where a vanishing z kills the term anyway
inline Vec3 unit_or_zero(const Vec3& a) {
  const double n = norm(a);
  return (n < 1e-300) ? Vec3{} : a / n;
}

struct Mat3 {
  // row-major
  std::array<double, 9> m{};

  double& operator()(int r, int c) { return m[3 * r + c]; }
  double operator()(int r, int c) const { return m[3 * r + c]; }

  static Mat3 identity() { Mat3 I; I(0,0) = I(1,1) = I(2,2) = 1.0; return I; }
  static Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 M;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) M(r, c) = a[r] * b[c];
    return M;
  }
  // matrix form of a × (cross-product matrix)
  static Mat3 crossmat(const Vec3& a) {
    Mat3 M;
    M(0,1) = -a.z; M(0,2) =  a.y;
    M(1,0) =  a.z; M(1,2) = -a.x;
    M(2,0) = -a.y; M(2,1) =  a.x;
    return M;
  }

  Mat3& operator+=(const Mat3& o) { for (int i = 0; i < 9; ++i) m[i] += o.m[i]; return *this; }
  Mat3& operator-=(const Mat3& o) { for (int i = 0; i < 9; ++i) m[i] -= o.m[i]; return *this; }
  Mat3& operator*=(double s) { for (int i = 0; i < 9; ++i) m[i] *= s; return *this; }
};

inline Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
inline Mat3 operator-(Mat3 a, const Mat3& b) { return a -= b; }
inline Mat3 operator*(Mat3 a, double s) { return a *= s; }
inline Mat3 operator*(double s, Mat3 a) { return a *= s; }

inline Vec3 operator*(const Mat3& M, const Vec3& v) {
  return {M(0,0)*v.x + M(0,1)*v.y + M(0,2)*v.z,
          M(1,0)*v.x + M(1,1)*v.y + M(1,2)*v.z,
          M(2,0)*v.x + M(2,1)*v.y + M(2,2)*v.z};
}

inline Mat3 operator*(const Mat3& A, const Mat3& B) {
  Mat3 C;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += A(r, k) * B(k, c);
      C(r, c) = s;
    }
  return C;
}

inline double trace(const Mat3& M) { return M(0,0) + M(1,1) + M(2,2); }

inline double max_abs(const Mat3& M) {
  double s = 0.0;
  for (double v : M.m) s = std::max(s, std::abs(v));
  return s;
}
inline double max_abs(const Vec3& v) {
  return std::max(std::abs(v.x), std::max(std::abs(v.y), std::abs(v.z)));
}

}  // namespace dk
