#pragma once

#include <stdexcept>
#include <vector>

#include "dk/vec.hpp"

namespace dk {

// v -> vhat = (1 + v^2/c^2)^{-1/2} v
inline Vec3 relativistic_velocity(const Vec3& v, double c) {
  return v * (1.0 / std::sqrt(1.0 + norm2(v) / (c * c)));
}

// inverse map vhat -> v = (1 - vhat^2/c^2)^{-1/2} vhat
inline Vec3 momentum_from_velocity(const Vec3& vhat, double c) {
  return vhat * (1.0 / std::sqrt(1.0 - norm2(vhat) / (c * c)));
}

// closed forms of the spherical means (5.10)-(5.12)

// int_{|w|=1} |z - r w|^{-1} dw
inline double sphere_mean_inverse(const Vec3& z, double r) {
  return 4.0 * M_PI / std::max(r, norm(z));
}

// int_{|w|=1} |z - r w|^{-3} (z - r w) dw; r = |z| tie resolved as the
// exterior branch value halved (documented convention, measure zero)
inline Vec3 sphere_mean_gradient(const Vec3& z, double r) {
  const double zn = norm(z);
  if (r > zn) return {};
  const Vec3 ext = z * (4.0 * M_PI / (zn * zn * zn));
  if (r == zn) return ext * 0.5;
  return ext;
}

// int_{|w|=1} |z - r w|^{-1} (z - r w) dw (continuous across r = |z|)
inline Vec3 sphere_mean_linear(const Vec3& z, double r) {
  const double zn = norm(z);
  if (r > zn) return z * (8.0 * M_PI / (3.0 * r));
  const Vec3 zb = z * (1.0 / zn);
  return zb * (4.0 * M_PI - 4.0 * M_PI / 3.0 * r * r / (zn * zn));
}

// int |z-v|^{-1} |v|^{-3} v dv = 2 pi zbar  (5.13)
inline Vec3 coulomb_direction_integral(const Vec3& z) {
  const double zn = norm(z);
  if (zn == 0.0) throw std::domain_error("coulomb_direction_integral: z = 0");
  return z * (2.0 * M_PI / zn);
}

// quadrature evaluator of (5.13) over |v| in [r_lo, r_hi]; used as the
// oracle in the self-test (cutoffs relative to |z| keep the truncation
// tail below the 1e-3 budget)
Vec3 coulomb_direction_quadrature(const Vec3& z, double rel_cut_lo, double rel_cut_hi,
                                  int n_radial_per_panel);

// Glassey-Strauss kernels, Appendix 5.1.2.  zbar must be unit, |vhat| < c.
struct GSKernelInputs {
  Vec3 zbar;
  Vec3 vhat;
  double c = 1.0;
};

inline Vec3 gs_k_dt(const GSKernelInputs& in) {
  const double ic = 1.0 / in.c;
  const double mu = ic * dot(in.zbar, in.vhat);
  return (1.0 / (1.0 + mu)) * (in.zbar - (ic * ic * dot(in.zbar, in.vhat)) * in.vhat);
}

inline Vec3 gs_k_t(const GSKernelInputs& in) {
  const double ic = 1.0 / in.c;
  const double mu = ic * dot(in.zbar, in.vhat);
  const double a = 1.0 + mu;
  return ((1.0 - ic * ic * norm2(in.vhat)) / (a * a)) * (in.zbar + ic * in.vhat);
}

// matrix acting on the recorded Lorentz force E + c^{-1} vhat x B;
// (1 + c^{-2} v^2)^{-1/2} = sqrt(1 - c^{-2} vhat^2)
inline Mat3 gs_k_s(const GSKernelInputs& in) {
  const double ic = 1.0 / in.c;
  const double zv = dot(in.zbar, in.vhat);
  const double a = 1.0 + ic * zv;
  const double gamma_inv = std::sqrt(1.0 - ic * ic * norm2(in.vhat));
  Mat3 M = Mat3::identity() * a;
  M += Mat3::outer((zv * in.zbar - in.vhat) * (ic * ic), in.vhat);
  M -= Mat3::outer(in.zbar + ic * in.vhat, in.zbar);
  return M * (gamma_inv / (a * a));
}

inline Vec3 gs_l_dt(const GSKernelInputs& in) {
  const double ic = 1.0 / in.c;
  const double mu = ic * dot(in.zbar, in.vhat);
  return (1.0 / (1.0 + mu)) * cross(in.zbar, ic * in.vhat);
}

inline Vec3 gs_l_t(const GSKernelInputs& in) {
  const double ic = 1.0 / in.c;
  const double mu = ic * dot(in.zbar, in.vhat);
  const double a = 1.0 + mu;
  return ((1.0 - ic * ic * norm2(in.vhat)) / (a * a)) * cross(in.zbar, in.vhat);
}

// applied to the recorded Lorentz force, like gs_k_s
inline Vec3 gs_l_s(const GSKernelInputs& in, const Vec3& F) {
  const double ic = 1.0 / in.c;
  const double zv = dot(in.zbar, in.vhat);
  const double a = 1.0 + ic * zv;
  const double gamma_inv = std::sqrt(1.0 - ic * ic * norm2(in.vhat));
  const Vec3 num = a * cross(in.zbar, F) -
                   (ic * ic * dot(in.c * in.zbar + in.vhat, F)) * cross(in.zbar, in.vhat);
  return (gamma_inv / (a * a)) * num;
}

// Gauss-Legendre nodes/weights on [-1, 1]
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n);
};

// product-Gauss quadrature of a vector integrand over the sphere |z| = r:
// GL in cos(theta), uniform trapezoid in phi (periodic -> spectral)
template <class F>
Vec3 sphere_quadrature(double r, int n_theta, int n_phi, F&& f) {
  const GaussLegendre gl(n_theta);
  Vec3 acc{};
  for (int i = 0; i < n_theta; ++i) {
    const double ct = gl.x[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    Vec3 ring{};
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * M_PI * (j + 0.5) / n_phi;
      const Vec3 omega{st * std::cos(phi), st * std::sin(phi), ct};
      ring += f(omega);
    }
    acc += ring * (gl.w[i] * (2.0 * M_PI / n_phi));
  }
  return acc * (r * r);
}

}  // namespace dk
