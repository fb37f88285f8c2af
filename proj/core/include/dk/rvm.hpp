#pragma once

#include <vector>

#include "dk/darwin.hpp"
#include "dk/kernels.hpp"

namespace dk {

// Per-c tabulation of the v-integrals of the K_DT / L_DT kernels against the
// velocity bump of f°.  By symmetry about the axis e = unit(center_v) the
// integrals reduce to smooth scalar functions of mu = zbar.e, sampled at
// Chebyshev nodes and evaluated barycentrically:
//   int K_DT(zbar, vhat) b(|v-cv|/rv) dv = aK(mu) zbar + bK(mu) e
//   int L_DT(zbar, vhat) b(|v-cv|/rv) dv = cL(mu) (zbar x e)
struct DTTables {
  double c = 0.0;
  Vec3 axis{0.0, 0.0, 1.0};
  std::vector<double> mu, wbary;
  std::vector<double> aK, bK, cL;

  static DTTables build(const InitialProfile& p, double c, int n_mu = 33,
                        int n_gl = 16);
  Vec3 w_k(const Vec3& omega) const;
  Vec3 w_l(const Vec3& omega) const;
};

// Relativistic Vlasov-Maxwell state.  Fields are evaluated from marker
// histories through the four-part representation E = E_D + E_DT + E_T + E_S
// (and the L-kernel analogue for B); the data part reads the frozen t = 0
// objects carried here.
struct RVMState {
  Ensemble e;  // kind RVM, carries c
  InitialProfile profile;
  double dt_log = 0.0;
  double t0 = 0.0;  // birth time of the data surface and the track record
  std::vector<MarkerTrack> track;
  std::vector<Marker> markers0;  // ensemble at t0
  std::vector<Vec3> e0m0;        // Coulomb field at the markers at t0
  DTTables tables;
  // warm-start retarded roots for the marker force passes, row-major n x n
  std::vector<double> sret;
};

// Initial state from the matched t = 0 Darwin data (IC).  preroll_ct > 0
// pushes the wave data surface back to t0 = -preroll_ct / c by extending
// every track backward along the Vlasov-Poisson flow with matched Darwin
// fields.  Over that O(1/c) window the nonrelativistic trajectory follows
// the relativistic one to O(c^-3), and once preroll_ct exceeds the largest
// probe-to-source distance the backward cone has already swept the support
// for every t >= 0: the data terms vanish identically and the field is a
// pure retarded sum, free of the light-cone sweep transient of the t = 0
// anchored representation.
RVMState make_rvm_state(const LVPState& s0, double c, double dt,
                        double preroll_ct = 0.0);

struct EBPair {
  Vec3 E, B;
};

// full four-part fields at (x, t).  self (a marker index) applies the
// self-interaction rules: own history excluded from T/S when the retarded
// separation is < 2 delta, own initial atom likewise for the data part.
// warm_row: optional n-vector of retarded-root warm starts.
EBPair fields_gs(const RVMState& s, const Vec3& x, double t,
                 std::size_t self = no_exclude, double* warm_row = nullptr);

Vec3 field_e_gs(const RVMState& s, const Vec3& x, double t);
Vec3 field_b_gs(const RVMState& s, const Vec3& x, double t);

// closed-form wave data terms of the matched initial data
Vec3 data_term_e(const RVMState& s, const Vec3& x, double t,
                 std::size_t self = no_exclude);
Vec3 data_term_b(const RVMState& s, const Vec3& x, double t,
                 std::size_t self = no_exclude);

// RK4 step against the frozen history (last-segment extrapolation covers the
// substage times beyond the newest knot); commits one new knot per marker
void step_rvm(RVMState& s, double dt);

// exterior / interior / boundary cross-check evaluator; sum() approximates
// the full field up to O(c^-3)
FieldSplit e_decomposition(const RVMState& s, const Vec3& x, double t);
Vec3 expanded_field_e(const RVMState& s, const Vec3& x, double t);

// f by backward characteristics in the recorded fields
double eval_f(const RVMState& s, const Vec3& x, const Vec3& v);

}  // namespace dk
