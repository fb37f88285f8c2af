#pragma once

#include <cmath>

#include "dk/vec.hpp"

namespace dk {

// Plummer softening: every singular kernel |z|^-p is regularized through
// s = |z|^2 + delta^2.  One global delta is shared by all solvers so that
// inter-model differences are not contaminated by differing mollifiers.
struct Softening {
  double delta = 0.1;
};

namespace soft {

inline double s_of(const Vec3& z, double delta) { return norm2(z) + delta * delta; }

// softened 1/|z|
inline double g1(const Vec3& z, double delta) {
  return 1.0 / std::sqrt(s_of(z, delta));
}

// softened |z|^-2 zbar  =  z / s^{3/2}
inline Vec3 k3(const Vec3& z, double delta) {
  const double s = s_of(z, delta);
  return z * (1.0 / (s * std::sqrt(s)));
}

// softened |z|^-2 (scalar weight)
inline double q2(const Vec3& z, double delta) {
  const double s = s_of(z, delta);
  return norm(z) / (s * std::sqrt(s));
}

// softened unit vector zbar = z / s^{1/2}
inline Vec3 zbar(const Vec3& z, double delta) {
  return z * (1.0 / std::sqrt(s_of(z, delta)));
}

// Plummer blob density: the rho whose Coulomb field is k3; integrates to 1.
inline double blob(const Vec3& z, double delta) {
  const double s = s_of(z, delta);
  return 3.0 * delta * delta / (4.0 * M_PI * s * s * std::sqrt(s));
}

// grad g1 = -k3
inline Vec3 grad_g1(const Vec3& z, double delta) { return -k3(z, delta); }

// Softened interior kernels for the retarded-integral decompositions.  The
// sharp kernels (V - 2(zh.V)zh etc.) only cancel the retardation expansion of
// the sharp Coulomb kernel; with Plummer softening the cancellation must be
// redone against k3(z) = z/s^{3/2}, which shifts the coefficients by powers of
// u = |z|^2/s.  All three reduce to the sharp forms as delta -> 0 (u -> 1).
//
// k_drift:  1/c kernel,  |z| (V.grad)k3 + (zh.V) k3 = q2 [V + (1-3u)(zh.V) zh]
inline Vec3 k_drift(const Vec3& z, double delta, const Vec3& V) {
  const double s = s_of(z, delta);
  const double u = norm2(z) / s;
  const Vec3 zh = unit_or_zero(z);
  return q2(z, delta) * (V + ((1.0 - 3.0 * u) * dot(zh, V)) * zh);
}

// k_quad:  1/c^2 velocity-quadratic kernel; together with the second-order
// retardation of k3 and the first-order retardation of k_drift it leaves
// exactly (1/2) q2 (3(zh.V)^2 - V^2) zh, the instantaneous Darwin moment term.
inline Vec3 k_quad(const Vec3& z, double delta, const Vec3& V) {
  const double s = s_of(z, delta);
  const double u = norm2(z) / s;
  const double q = q2(z, delta);
  const Vec3 zh = unit_or_zero(z);
  const double mu = dot(zh, V);
  return (-q * (1.0 - 3.0 * u) * mu) * V +
         (q * (1.5 + 3.0 * u - 7.5 * u * u) * mu * mu) * zh +
         (q * (1.5 * u - 0.5) * norm2(V)) * zh;
}

// k_force:  1/c^2 force-coupling kernel; with the acceleration content of the
// retardation expansion it leaves -(1/2) g1 (F + (zh.F) zh).
inline Vec3 k_force(const Vec3& z, double delta, const Vec3& F) {
  const double s = s_of(z, delta);
  const double u = norm2(z) / s;
  const double g = g1(z, delta);
  const Vec3 zh = unit_or_zero(z);
  return (-0.5 * g * (1.0 + u)) * F + (0.5 * g * (3.0 * u * u - 1.0) * dot(zh, F)) * zh;
}

// d/dz_b [ z_a / s^{3/2} ]  (gradient of the Coulomb kernel; rows = a, cols = b)
inline Mat3 grad_k3(const Vec3& z, double delta) {
  const double s = s_of(z, delta);
  const double s32 = 1.0 / (s * std::sqrt(s));
  const double s52 = s32 / s;
  return Mat3::identity() * s32 - Mat3::outer(z, z) * (3.0 * s52);
}

// d/dz_b [ z_a / s^{1/2} ]  (gradient of softened zbar)
inline Mat3 grad_zbar(const Vec3& z, double delta) {
  const double s = s_of(z, delta);
  const double s12 = 1.0 / std::sqrt(s);
  const double s32 = s12 / s;
  return Mat3::identity() * s12 - Mat3::outer(z, z) * s32;
}

// second derivatives d_a d_b [ z_c / s^{1/2} ], returned as the (a,b) matrix
// for fixed component c
inline Mat3 hess_zbar(const Vec3& z, double delta, int c) {
  const double s = s_of(z, delta);
  const double s32 = 1.0 / (s * std::sqrt(s));
  const double s52 = s32 / s;
  Mat3 H;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double t = 3.0 * z[a] * z[b] * z[c] * s52;
      if (a == c) t -= z[b] * s32;
      if (b == c) t -= z[a] * s32;
      if (a == b) t -= z[c] * s32;
      H(a, b) = t;
    }
  return H;
}

// second derivatives d_a d_b [ z_c / s^{3/2} ]
inline Mat3 hess_k3(const Vec3& z, double delta, int c) {
  const double s = s_of(z, delta);
  const double s52 = 1.0 / (s * s * std::sqrt(s));
  const double s72 = s52 / s;
  Mat3 H;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double t = 15.0 * z[a] * z[b] * z[c] * s72;
      if (a == c) t -= 3.0 * z[b] * s52;
      if (b == c) t -= 3.0 * z[a] * s52;
      if (a == b) t -= 3.0 * z[c] * s52;
      H(a, b) = t;
    }
  return H;
}

// Hessian of g1 (equals -grad_k3)
inline Mat3 hess_g1(const Vec3& z, double delta) {
  return grad_k3(z, delta) * (-1.0);
}

}  // namespace soft
}  // namespace dk
