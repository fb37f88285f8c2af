#pragma once

#include <vector>

#include "dk/ensemble.hpp"
#include "dk/mat6.hpp"
#include "dk/track.hpp"

namespace dk {

// Vlasov-Poisson state: markers + per-marker dense trajectory record.
// The tangent flow (variational equations) is integrated alongside when
// requested; it feeds the LVP source terms with noise-free gradients.
struct VPState {
  Ensemble e;  // kind VP or LVP
  InitialProfile profile;
  double dt_log = 0.0;
  std::vector<MarkerTrack> log;
  std::vector<Vec3> x0, v0;     // initial phase-space nodes
  std::vector<double> vol;      // per-marker phase-space cell volume
  std::vector<Mat6> tangent;    // DPhi^t per marker (with_tangent only)
  bool with_tangent = false;
};

VPState make_vp_state(const InitialProfile& profile, int n_per_axis,
                      const Softening& softening, double dt, bool with_tangent);

// softened Coulomb field of the current markers (probe form: all markers)
Vec3 field_e0(const VPState& s, const Vec3& x);
Mat3 grad_field_e0(const VPState& s, const Vec3& x);

// one coupled-system RK4 step: every stage recomputes pairwise forces from
// the stage positions of all markers
void step_vp(VPState& s, double dt);

// f0(x,v,t) by backward characteristics in the recorded flow
double eval_f0(const VPState& s, const Vec3& x, const Vec3& v,
               const InitialProfile& profile);

// backward trace helper: returns the phase-space point transported to t = 0
void trace_backward_vp(const VPState& s, double t, Vec3& x, Vec3& v);

// max over probes of |(rho(t) - rho(t-dt))/dt + div j(t - dt/2)|
double continuity_residual(const VPState& s, const std::vector<Vec3>& probes);

// kinetic + pairwise softened potential energy
double vp_energy(const VPState& s);

// gradient of f0 at the current phase-space location of marker i,
// via the tangent flow: returns (grad_x f0, grad_v f0)
std::pair<Vec3, Vec3> grad_f0_at_marker(const VPState& s, std::size_t i);

// building blocks shared with the darwin / maxwell steppers -----------------

// E (and optionally grad E) at each position from all the others (j != i)
void pairwise_e0(const std::vector<Vec3>& pos, const std::vector<double>& w,
                 double delta, std::vector<Vec3>& E, std::vector<Mat3>* gradE);

// right-hand side of F' = A F with A = [[0, I], [gradE, 0]]
Mat6 tangent_rhs(const Mat3& gradE, const Mat6& F);

}  // namespace dk
