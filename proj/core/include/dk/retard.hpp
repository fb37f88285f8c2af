#pragma once

#include <algorithm>
#include <cmath>

#include "dk/track.hpp"
#include "dk/vec.hpp"

namespace dk {

// Solve the retarded-time equation s + |x - y(s)|/c = t on a recorded track.
// phi(s) = s + |x - y(s)|/c - t is strictly increasing (phi' = 1 + zbar.ydot/c
// is in (0,2) for |ydot| < c), so a guarded Newton iteration on the bracket
// [t_begin, t] converges from any warm start.  Returns false when the
// backward cone does not reach the record, i.e. |x - y(t_begin)| > c (t - t_begin).
inline bool retarded_time(const MarkerTrack& tr, const Vec3& x, double t,
                          double c, double& s) {
  const double tb = tr.t_begin();
  if (t < tb) return false;
  const double phi0 = tb + norm(x - tr.pos(tb)) / c - t;
  if (phi0 > 0.0) return false;

  double lo = tb, hi = t;
  double cur = (s > lo && s < hi && std::isfinite(s)) ? s : 0.5 * (lo + hi);
  const double tol = 1e-13 * std::max(1.0, t);
  for (int it = 0; it < 80; ++it) {
    const Vec3 z = x - tr.pos(cur);
    const double r = norm(z);
    const double phi = cur + r / c - t;
    if (std::abs(phi) <= tol) break;
    (phi > 0.0 ? hi : lo) = cur;
    const double dphi =
        1.0 - dot(z, tr.pos_deriv(cur)) / (c * std::max(r, 1e-300));
    double next = cur - phi / dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == cur) break;
    cur = next;
  }
  s = cur;
  return true;
}

// retardation Jacobian d(phi)/ds at the root: 1 + zbar . ydot / c
inline double retard_jacobian(const MarkerTrack& tr, const Vec3& x, double s,
                              double c) {
  const Vec3 z = tr.pos(s) - x;
  const double r = std::max(norm(z), 1e-300);
  return 1.0 + dot(z, tr.pos_deriv(s)) / (c * r);
}

}  // namespace dk
