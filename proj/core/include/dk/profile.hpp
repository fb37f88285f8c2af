#pragma once

#include <cmath>

#include "dk/vec.hpp"

namespace dk {

// b(s) = exp(-1/(1-s^2)) on [0,1), 0 beyond: the C-infinity bump used for
// the initial phase-space density f°(x,v) = A b(|x-cx|/rx) b(|v-cv|/rv).
inline double bump(double s) {
  const double s2 = s * s;
  if (s2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s2));
}

inline double bump_prime(double s) {
  const double s2 = s * s;
  if (s2 >= 1.0) return 0.0;
  const double d = 1.0 - s2;
  return bump(s) * (-2.0 * s / (d * d));
}

inline double bump_second(double s) {
  const double s2 = s * s;
  if (s2 >= 1.0) return 0.0;
  const double d = 1.0 - s2;
  const double d2 = d * d;
  return bump(s) * (4.0 * s2 / (d2 * d2) - 2.0 / d2 - 8.0 * s2 / (d2 * d));
}

struct InitialProfile {
  Vec3 center_x{};
  Vec3 center_v{};
  double radius_x = 1.0;
  double radius_v = 1.0;
  double amplitude = 1.0;

  double value(const Vec3& x, const Vec3& v) const {
    return amplitude * bump(norm(x - center_x) / radius_x) *
           bump(norm(v - center_v) / radius_v);
  }

  Vec3 grad_x(const Vec3& x, const Vec3& v) const {
    const Vec3 r = x - center_x;
    const double rn = norm(r);
    if (rn == 0.0) return {};
    const double s = rn / radius_x;
    return r * (amplitude * bump_prime(s) / (radius_x * rn) *
                bump(norm(v - center_v) / radius_v));
  }

  Vec3 grad_v(const Vec3& x, const Vec3& v) const {
    const Vec3 u = v - center_v;
    const double un = norm(u);
    if (un == 0.0) return {};
    const double s = un / radius_v;
    return u * (amplitude * bump_prime(s) / (radius_v * un) *
                bump(norm(x - center_x) / radius_x));
  }

  // shape integrals over the unit ball: int_0^1 b(s) s^k ds for k = 2, 4
  static double shape_i2();
  static double shape_i4();
  // cumulative int_0^min(s,1) b(u) u^2 du (radial Gauss-law charge)
  static double shape_cum2(double s);

  // velocity integral of the bump factor: int b(|u|/rv) du
  double v_mass() const {
    return 4.0 * M_PI * radius_v * radius_v * radius_v * shape_i2();
  }
  // isotropic second moment per unit v-mass: int (u_i u_j) b du = sigma_v2 * v_mass * I
  double sigma_v2() const {
    return radius_v * radius_v * shape_i4() / (3.0 * shape_i2());
  }

  // closed-form t = 0 moments of f°
  double rho0(const Vec3& y) const {
    return amplitude * bump(norm(y - center_x) / radius_x) * v_mass();
  }
  Vec3 grad_rho0(const Vec3& y) const {
    const Vec3 r = y - center_x;
    const double rn = norm(r);
    if (rn == 0.0) return {};
    return r * (amplitude * bump_prime(rn / radius_x) / (radius_x * rn) * v_mass());
  }
  Mat3 hess_rho0(const Vec3& y) const {
    const Vec3 r = y - center_x;
    const double rn = norm(r);
    const double A = amplitude * v_mass();
    if (rn < 1e-14) {
      // b''(0)/rx^2 times identity
      return Mat3::identity() * (A * bump_second(0.0) / (radius_x * radius_x));
    }
    const double s = rn / radius_x;
    const Vec3 e = r * (1.0 / rn);
    const double bpp = bump_second(s) / (radius_x * radius_x);
    const double bp_over_r = bump_prime(s) / (radius_x * rn);
    return Mat3::outer(e, e) * (A * (bpp - bp_over_r)) + Mat3::identity() * (A * bp_over_r);
  }
  Vec3 j0(const Vec3& y) const { return rho0(y) * center_v; }
  // pressure moment P_ab = int v_a v_b f° dv = rho0 (cv⊗cv + sigma_v2 I)
  Mat3 pressure(const Vec3& y) const {
    return rho0(y) * (Mat3::outer(center_v, center_v) + Mat3::identity() * sigma_v2());
  }
  Vec3 div_pressure(const Vec3& y) const {
    const Vec3 g = grad_rho0(y);
    return center_v * dot(g, center_v) + g * sigma_v2();
  }
  double grad_grad_pressure(const Vec3& y) const {  // nabla nabla : P
    const Mat3 H = hess_rho0(y);
    return dot(center_v, H * center_v) + sigma_v2() * trace(H);
  }

  double support_bound_x() const { return norm(center_x) + radius_x; }
  double support_bound_v() const { return norm(center_v) + radius_v; }
};

}  // namespace dk
