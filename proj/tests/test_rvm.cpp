#include <doctest.h>

#include <cmath>

#include "dk/retard.hpp"
#include "dk/rvm.hpp"

using namespace dk;

namespace {

InitialProfile standard_profile() {
  InitialProfile p;
  p.amplitude = 5.0;
  p.radius_x = 1.0;
  p.radius_v = 0.6;
  p.center_v = {0.0, 0.0, 0.4};
  return p;
}

}  // namespace

TEST_CASE("retarded root on a straight-line track") {
  const Vec3 y0{1.0, 0.5, -0.2}, V{0.3, -0.1, 0.2};
  MarkerTrack tr(0.0, 0.05);
  for (int k = 0; k <= 60; ++k) {
    const double s = 0.05 * k;
    TrackKnot kn;
    kn.x = y0 + s * V;
    kn.v = V;
    kn.xdot = V;
    tr.append(kn);
  }
  const Vec3 x{-0.4, 0.2, 0.6};
  const double c = 5.0, t = 2.0;
  double s = 0.5 * t;
  REQUIRE(retarded_time(tr, x, t, c, s));
  CHECK(std::abs(s + norm(y0 + s * V - x) / c - t) < 1e-10);
  // closed form: |y0 + sV - x| = c (t - s)
  const Vec3 b = y0 - x;
  const double A2 = norm2(V) - c * c;
  const double B2 = 2.0 * (dot(b, V) + c * c * t);
  const double C2 = norm2(b) - c * c * t * t;
  const double s_exact = (-B2 + std::sqrt(B2 * B2 - 4.0 * A2 * C2)) / (2.0 * A2);
  CHECK(std::abs(s - s_exact) < 1e-10);

  const Vec3 zh = unit_or_zero(y0 + s * V - x);
  CHECK(std::abs(retard_jacobian(tr, x, s, c) - (1.0 + dot(zh, V) / c)) < 1e-9);

  // no root when the cone has not yet reached the marker
  double s2 = 0.0;
  CHECK(!retarded_time(tr, x, 0.05, 20.0, s2));
}

TEST_CASE("dt tables reproduce the direct velocity integrals") {
  const InitialProfile p = standard_profile();
  const double c = 6.0;
  const DTTables tab = DTTables::build(p, c);
  const GaussLegendre gl(24);
  for (const Vec3 om : {Vec3{0.0, 0.0, 1.0}, Vec3{0.6, 0.0, 0.8}, Vec3{-0.3, 0.8, 0.52}}) {
    const Vec3 omega = unit_or_zero(om);
    Vec3 wk{}, wl{};
    const double rv = p.radius_v;
    for (std::size_t i = 0; i < gl.x.size(); ++i)
      for (std::size_t j = 0; j < gl.x.size(); ++j)
        for (std::size_t k = 0; k < gl.x.size(); ++k) {
          const Vec3 u{rv * gl.x[i], rv * gl.x[j], rv * gl.x[k]};
          const double un = norm(u);
          if (un >= rv) continue;
          const double wq = rv * rv * rv * gl.w[i] * gl.w[j] * gl.w[k] * bump(un / rv);
          const Vec3 v = p.center_v + u;
          const GSKernelInputs in{omega, relativistic_velocity(v, c), c};
          wk += wq * gs_k_dt(in);
          wl += wq * gs_l_dt(in);
        }
    CHECK(norm(tab.w_k(omega) - wk) < 1e-4 * (norm(wk) + 1.0));
    CHECK(norm(tab.w_l(omega) - wl) < 1e-4 * (norm(wl) + 1.0));
  }
}

TEST_CASE("t = 0 fields reproduce the matched data") {
  LVPState lvp = make_lvp_state(standard_profile(), 3, {0.2}, 1e-2);
  const double c = 8.0;
  RVMState s = make_rvm_state(lvp, c, 1e-2);
  const DarwinFields df = matched_initial_fields(lvp, c);
  double supE = 0.0, supB = 0.0, ref = 0.0;
  for (const Vec3 x : {Vec3{0.5, -0.5, 0.5}, Vec3{0.0, 0.2, 0.8}, Vec3{-1.1, 0.4, 0.0}}) {
    const EBPair eb = fields_gs(s, x, 0.0);
    supE = std::max(supE, norm(eb.E - df.E(x)));
    supB = std::max(supB, norm(eb.B - df.B(x)));
    ref = std::max(ref, norm(df.E(x)));
  }
  CHECK(supE < 1e-8 * ref);
  CHECK(supB < 1e-8 * ref);
}

TEST_CASE("stepping is deterministic") {
  LVPState lvp = make_lvp_state(standard_profile(), 3, {0.2}, 1e-2);
  RVMState a = make_rvm_state(lvp, 8.0, 1e-2);
  RVMState b = make_rvm_state(lvp, 8.0, 1e-2);
  for (int k = 0; k < 5; ++k) {
    step_rvm(a, 1e-2);
    step_rvm(b, 1e-2);
  }
  for (std::size_t i = 0; i < a.e.size(); ++i) {
    CHECK(a.e.markers[i].x.x == b.e.markers[i].x.x);
    CHECK(a.e.markers[i].v.z == b.e.markers[i].v.z);
  }
  const Vec3 x{0.4, 0.1, -0.6};
  const EBPair ea = fields_gs(a, x, a.e.t), eb = fields_gs(b, x, b.e.t);
  CHECK(ea.E.x == eb.E.x);
  CHECK(ea.B.y == eb.B.y);
}

TEST_CASE("velocities stay below c") {
  LVPState lvp = make_lvp_state(standard_profile(), 3, {0.2}, 1e-2);
  RVMState s = make_rvm_state(lvp, 4.0, 1e-2);
  for (int k = 0; k < 25; ++k) step_rvm(s, 1e-2);
  for (std::size_t i = 0; i < s.e.size(); ++i) {
    const Vec3 vh = relativistic_velocity(s.e.markers[i].v, 4.0);
    CHECK(norm(vh) < 4.0);
  }
}

TEST_CASE("f is transported along the relativistic characteristics") {
  LVPState lvp = make_lvp_state(standard_profile(), 3, {0.2}, 1e-2);
  RVMState s = make_rvm_state(lvp, 8.0, 1e-2);
  const std::vector<Marker> m0 = s.markers0;
  for (int k = 0; k < 20; ++k) step_rvm(s, 1e-2);
  for (std::size_t i = 0; i < s.e.size(); i += 9) {
    const double f = eval_f(s, s.e.markers[i].x, s.e.markers[i].v);
    const double ref = s.profile.value(m0[i].x, m0[i].v);
    CHECK(std::abs(f - ref) < 1e-4 * (std::abs(ref) + 1.0));
  }
}
