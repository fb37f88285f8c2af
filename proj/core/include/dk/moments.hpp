#pragma once

#include <cstddef>
#include <vector>

#include "dk/ensemble.hpp"
#include "dk/kernels.hpp"
#include "dk/softening.hpp"
#include "dk/vec.hpp"

namespace dk {

// Marker-sum discretizations of the moment-derivative integrals that appear
// in the second-order field and in the wave-data terms.  Every time
// derivative of a moment is rewritten with the Vlasov equation and
// integrated by parts, so only kernel derivatives against marker data
// remain.  The sums run over markers with |x_i - x| > r_cut (r_cut = 0
// recovers whole space); for the restricted case the matching sphere
// corrections come from sphere_terms below.
struct MomentSums {
  Vec3 zbar_dtt_rho;  // int zbar  d_t^2 rho
  Vec3 k3_dtt_rho;    // int k3    d_t^2 rho
  Vec3 g1_dtj;        // int g1    d_t j
  Vec3 k3_dt_rho;     // int k3    d_t rho
  Vec3 k3_cross_dtj;  // int k3 x  d_t j
  Vec3 k3_cross_j;    // int k3 x  j
  Vec3 k3_rho;        // int k3    rho        (no derivative, same cut)
  Vec3 k3_rho2;       // int k3    rho_2 via w2 weights, same cut
};

// E0m[i] must hold the self-consistent field at marker i (source side of the
// E0 rho terms).  exclude skips one marker index (size_t(-1) for none).
MomentSums moment_sums(const std::vector<Marker>& m, const std::vector<Vec3>& E0m,
                       const Vec3& x, double delta, double r_cut,
                       std::size_t exclude);

// local fluid moments of f at a point (used on the sphere |z| = r)
struct SphereMoments {
  double rho = 0.0;
  Vec3 j;
  Mat3 P;        // int v (x) v f dv
  Vec3 divP;
  Vec3 E0rho;    // E0(y) rho(y)
};

// all sphere integrals over |z| = r needed by the decompositions; mom(y,
// omega) supplies the local moments at y = x + r omega
struct SphereTerms {
  Vec3 zbar_dtt;      // correction for int_ext zbar d_t^2 rho
  Vec3 k3_dtt;        // correction for int_ext k3   d_t^2 rho
  Vec3 g1_dtj;        // correction for int_ext g1   d_t j
  Vec3 k3_dtrho;      // correction for int_ext k3   d_t rho
  Vec3 k3_cross_dtj;  // correction for int_ext k3 x d_t j
  Vec3 omega_rho;     // oint omega rho ds
  Vec3 omega_jomega;  // oint omega (omega . j) ds
  Vec3 omega_cross_j; // oint omega x j ds
  Vec3 P_transverse;  // oint [P omega - (omega^T P omega) omega] ds
};

template <class MomFn>
SphereTerms sphere_terms(const Vec3& x, double r, double delta, MomFn&& mom,
                         int n_theta, int n_phi) {
  const GaussLegendre gl(n_theta);
  SphereTerms acc;
  for (int i = 0; i < n_theta; ++i) {
    const double ct = gl.x[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int jj = 0; jj < n_phi; ++jj) {
      const double phi = 2.0 * M_PI * (jj + 0.5) / n_phi;
      const Vec3 omega{st * std::cos(phi), st * std::sin(phi), ct};
      const Vec3 z = r * omega;
      const SphereMoments mm = mom(x + z, omega);
      const double wq = gl.w[i] * (2.0 * M_PI / n_phi) * r * r;

      const Vec3 Pw = mm.P * omega;
      const double scal = dot(omega, mm.E0rho) - dot(mm.divP, omega);
      acc.zbar_dtt += wq * (soft::grad_zbar(z, delta) * Pw + scal * soft::zbar(z, delta));
      acc.k3_dtt += wq * (soft::grad_k3(z, delta) * Pw + scal * soft::k3(z, delta));
      acc.g1_dtj += (wq * soft::g1(z, delta)) * Pw;
      acc.k3_dtrho += (wq * dot(omega, mm.j)) * soft::k3(z, delta);
      acc.k3_cross_dtj += wq * cross(soft::k3(z, delta), Pw);
      acc.omega_rho += (wq * mm.rho) * omega;
      acc.omega_jomega += (wq * dot(omega, mm.j)) * omega;
      acc.omega_cross_j += wq * cross(omega, mm.j);
      acc.P_transverse += wq * (Pw - dot(omega, Pw) * omega);
    }
  }
  return acc;
}

}  // namespace dk
