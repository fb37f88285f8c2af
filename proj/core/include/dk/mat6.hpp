#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "dk/vec.hpp"

namespace dk {

// small dense 6x6 helper for the phase-space tangent flow
struct Mat6 {
  std::array<double, 36> m{};

  double& operator()(int r, int c) { return m[6 * r + c]; }
  double operator()(int r, int c) const { return m[6 * r + c]; }

  static Mat6 identity() {
    Mat6 I;
    for (int i = 0; i < 6; ++i) I(i, i) = 1.0;
    return I;
  }

  Mat6& operator+=(const Mat6& o) {
    for (int i = 0; i < 36; ++i) m[i] += o.m[i];
    return *this;
  }
  Mat6& operator*=(double s) {
    for (int i = 0; i < 36; ++i) m[i] *= s;
    return *this;
  }
};

inline Mat6 operator+(Mat6 a, const Mat6& b) { return a += b; }
inline Mat6 operator*(Mat6 a, double s) { return a *= s; }
inline Mat6 operator*(double s, Mat6 a) { return a *= s; }

inline Mat6 operator*(const Mat6& A, const Mat6& B) {
  Mat6 C;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      double s = 0.0;
      for (int k = 0; k < 6; ++k) s += A(r, k) * B(k, c);
      C(r, c) = s;
    }
  return C;
}

struct Vec6 {
  std::array<double, 6> v{};
  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }
};

// solve A^T y = g by LU with partial pivoting (used for grad f0 pullback)
inline Vec6 solve_transposed(const Mat6& A, const Vec6& g) {
  std::array<double, 36> lu;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) lu[6 * r + c] = A(c, r);  // transpose
  std::array<int, 6> piv{};
  for (int i = 0; i < 6; ++i) piv[i] = i;
  for (int k = 0; k < 6; ++k) {
    int p = k;
    for (int r = k + 1; r < 6; ++r)
      if (std::abs(lu[6 * r + k]) > std::abs(lu[6 * p + k])) p = r;
    if (p != k) {
      for (int c = 0; c < 6; ++c) std::swap(lu[6 * k + c], lu[6 * p + c]);
      std::swap(piv[k], piv[p]);
    }
    if (lu[6 * k + k] == 0.0) throw std::runtime_error("solve_transposed: singular");
    for (int r = k + 1; r < 6; ++r) {
      const double f = lu[6 * r + k] / lu[6 * k + k];
      lu[6 * r + k] = f;
      for (int c = k + 1; c < 6; ++c) lu[6 * r + c] -= f * lu[6 * k + c];
    }
  }
  Vec6 y;
  for (int i = 0; i < 6; ++i) y[i] = g[piv[i]];
  for (int k = 1; k < 6; ++k)
    for (int c = 0; c < k; ++c) y[k] -= lu[6 * k + c] * y[c];
  for (int k = 5; k >= 0; --k) {
    for (int c = k + 1; c < 6; ++c) y[k] -= lu[6 * k + c] * y[c];
    y[k] /= lu[6 * k + k];
  }
  return y;
}

inline double det(const Mat6& A) {
  std::array<double, 36> lu = A.m;
  double d = 1.0;
  for (int k = 0; k < 6; ++k) {
    int p = k;
    for (int r = k + 1; r < 6; ++r)
      if (std::abs(lu[6 * r + k]) > std::abs(lu[6 * p + k])) p = r;
    if (p != k) {
      for (int c = 0; c < 6; ++c) std::swap(lu[6 * k + c], lu[6 * p + c]);
      d = -d;
    }
    if (lu[6 * k + k] == 0.0) return 0.0;
    d *= lu[6 * k + k];
    for (int r = k + 1; r < 6; ++r) {
      const double f = lu[6 * r + k] / lu[6 * k + k];
      for (int c = k + 1; c < 6; ++c) lu[6 * r + c] -= f * lu[6 * k + c];
    }
  }
  return d;
}

}  // namespace dk
