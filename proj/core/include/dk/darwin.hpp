#pragma once

#include <cstddef>
#include <vector>

#include "dk/moments.hpp"
#include "dk/vp.hpp"

namespace dk {

// Linearized (delta-f) state: the f2 samples ride the f0 characteristics.
// Each marker carries two equivalent order-c^-2 representations: the signed
// weight w2 (density form, stored on the base ensemble) and the linearized
// displacement pair (xi, eta) of the marker trajectory itself.  The base
// flow must carry the tangent flow.
struct LVPState {
  VPState base;
  std::vector<Vec3> xi, eta;  // d/d(c^-2) of position / velocity at c = inf
};

LVPState make_lvp_state(const InitialProfile& profile, int n_per_axis,
                        const Softening& softening, double dt);

// B1(x) = int |z|^-2 zbar x j0(x+z) dz as a softened marker sum
Vec3 field_b1(const VPState& s, const Vec3& x);

// coupled RK4 step of positions, velocities, tangent flow and w2 weights;
// the source is S = 1/2 v^2 (v . grad_x f0) - (E2 + v x B1) . grad_v f0
void step_lvp(LVPState& s, double dt);

// second-order field, moment form: three displayed terms
// 1/2 int |z|^-2 zbar (3 (zbar.v)^2 - v^2) f0  -  1/2 int |z|^-1 (1 + zbar(x)zbar) E0 rho0
//  -  int |z|^-2 zbar rho2
Vec3 field_e2(const LVPState& s, const Vec3& x, std::size_t exclude = no_exclude);

// second-order field, displacement form: the rho2 term of field_e2 replaced
// by the linearized source displacement sum - sum_j w_j Dk3(x - x_j) xi_j.
// Discretely consistent with the c^-2 content of the moving-marker field,
// which is what the model comparisons need; agrees with field_e2 up to the
// marker quadrature error of one integration by parts.
Vec3 field_e2_disp(const LVPState& s, const Vec3& x,
                   std::size_t exclude = no_exclude);

// second-order field, time-derivative form:
// 1/2 int zbar d_t^2 rho0 - int |z|^-1 d_t j0 - int |z|^-2 zbar rho2,
// with the moment derivatives expanded through the Vlasov equation
Vec3 field_e2_alt(const LVPState& s, const Vec3& x, std::size_t exclude = no_exclude);

// pointwise f2 by accumulating the source along the characteristic through
// (x, v) at the current time (Duhamel form)
double eval_f2(const LVPState& s, const Vec3& x, const Vec3& v);

struct DarwinTriple {
  double fD = 0.0;
  Vec3 ED, BD;
};
// (f0 + c^-2 f2, E0 + c^-2 E2, c^-1 B1)
DarwinTriple darwin_triple(const LVPState& s, const Vec3& x, const Vec3& v, double c);

// matched initial data: E° = E0(.,0) + c^-2 E2(.,0), B° = c^-1 B1(.,0)
struct DarwinFields {
  const LVPState* s = nullptr;
  double c = 1.0;
  Vec3 E(const Vec3& x, std::size_t exclude = no_exclude) const;
  Vec3 B(const Vec3& x, std::size_t exclude = no_exclude) const;
};
DarwinFields matched_initial_fields(const LVPState& s0, double c);

// exterior / interior (retarded) / boundary decomposition of E^D;
// ext + interior + bd reconstructs E^D(x, t) up to O(c^-3)
struct FieldSplit {
  Vec3 ext, interior, bd;
  Vec3 sum() const { return ext + interior + bd; }
};
FieldSplit ed_decomposition(const LVPState& s, const Vec3& x, double c);

// shared boundary term of the field decompositions: f°-moment integrals on
// the light sphere |z| = ct (zero when the sphere misses the support)
Vec3 bd_term(const InitialProfile& p, const Vec3& x, double t, double c,
             double delta);

// blob-smoothed local moments of the current ensemble at y (used on the
// sphere |z| = ct of the exterior-restriction corrections)
SphereMoments blob_moments(const VPState& s, const Vec3& y);

// closed-form moments of the initial profile at y (t = 0 spheres); the
// E0 rho factor uses the exact radial Gauss-law field of the profile
SphereMoments profile_moments(const InitialProfile& p, const Vec3& y);

// radial field of the (unsoftened) profile charge distribution
Vec3 profile_field_e0(const InitialProfile& p, const Vec3& y);

}  // namespace dk
