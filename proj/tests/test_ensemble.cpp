#include <doctest.h>

#include <cmath>

#include "dk/ensemble.hpp"

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

TEST_CASE("bump shape integrals") {
  // trapezoid reference for int_0^1 b(s) s^2 ds (integrand vanishes to all
  // orders at both ends, so the rule is spectrally accurate)
  const int n = 2000;
  double i2 = 0.0, i4 = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = (double)i / n;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    i2 += w * bump(s) * s * s / n;
    i4 += w * bump(s) * s * s * s * s / n;
  }
  CHECK(std::abs(InitialProfile::shape_i2() - i2) < 1e-12);
  CHECK(std::abs(InitialProfile::shape_i4() - i4) < 1e-12);
  CHECK(std::abs(InitialProfile::shape_cum2(1.0) - i2) < 1e-12);
  CHECK(std::abs(InitialProfile::shape_cum2(2.0) - i2) < 1e-15);
  CHECK(InitialProfile::shape_cum2(0.3) < i2);
}

TEST_CASE("profile moments are consistent") {
  const InitialProfile p = standard_profile();
  const Vec3 y{0.3, -0.2, 0.4};
  CHECK(std::abs(p.rho0(y) - p.amplitude * bump(norm(y) / p.radius_x) * p.v_mass()) <
        1e-15);
  CHECK(norm(p.j0(y) - p.rho0(y) * p.center_v) < 1e-15);

  // grad and hessian of rho0 by finite differences
  const double h = 1e-6;
  for (int a = 0; a < 3; ++a) {
    Vec3 e{};
    e[a] = 1.0;
    const double fd = (p.rho0(y + h * e) - p.rho0(y - h * e)) / (2.0 * h);
    CHECK(std::abs(p.grad_rho0(y)[a] - fd) < 1e-6);
    for (int b = 0; b < 3; ++b) {
      Vec3 eb{};
      eb[b] = 1.0;
      const double fd2 =
          (p.grad_rho0(y + h * eb)[a] - p.grad_rho0(y - h * eb)[a]) / (2.0 * h);
      CHECK(std::abs(p.hess_rho0(y)(a, b) - fd2) < 1e-5);
    }
  }
  // div P by finite differences of the pressure tensor
  Vec3 divP{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Vec3 eb{};
      eb[b] = 1.0;
      divP[a] += (p.pressure(y + h * eb)(a, b) - p.pressure(y - h * eb)(a, b)) / (2.0 * h);
    }
  CHECK(norm(p.div_pressure(y) - divP) < 1e-6);
}

TEST_CASE("midpoint sampling reproduces the profile charge") {
  const InitialProfile p = standard_profile();
  const double rx = p.radius_x;
  const double exact =
      p.amplitude * p.v_mass() * 4.0 * M_PI * rx * rx * rx * InitialProfile::shape_i2();
  const double q4 = total_charge(sample_initial(p, 4, {0.2}));
  const double q6 = total_charge(sample_initial(p, 6, {0.2}));
  CHECK(std::abs(q4 - exact) < 0.15 * exact);
  CHECK(std::abs(q6 - exact) < std::abs(q4 - exact));
  CHECK(std::abs(q6 - exact) < 0.02 * exact);
}

TEST_CASE("sampling is deterministic and w2-free") {
  const InitialProfile p = standard_profile();
  const Ensemble a = sample_initial(p, 3, {0.2});
  const Ensemble b = sample_initial(p, 3, {0.2});
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() > 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.markers[i].x.x == b.markers[i].x.x);
    CHECK(a.markers[i].v.z == b.markers[i].v.z);
    CHECK(a.markers[i].w == b.markers[i].w);
    CHECK(a.markers[i].w2 == 0.0);
    CHECK(a.markers[i].w > 0.0);
  }
  const SupportRadius sr = support_radius(a);
  CHECK(sr.R_x <= p.support_bound_x());
  CHECK(sr.R_v <= p.support_bound_v());
}

TEST_CASE("current density conventions agree at low velocity") {
  const InitialProfile p = standard_profile();
  Ensemble e = sample_initial(p, 3, {0.2});
  e.c = 1e8;
  const Vec3 x{0.2, 0.1, -0.3};
  const Vec3 jn = current_density(e, x, CurrentConvention::newtonian);
  const Vec3 jd = current_density(e, x, CurrentConvention::darwin);
  const Vec3 jr = current_density(e, x, CurrentConvention::relativistic);
  CHECK(norm(jn - jd) < 1e-12 * norm(jn));
  CHECK(norm(jn - jr) < 1e-12 * norm(jn));
  CHECK(norm(jn - charge_density(e, x) * p.center_v) < 0.2 * norm(jn));
}
