#include <doctest.h>

#include <cmath>

#include "dk/dvm.hpp"
#include "dk/vp.hpp"

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

TEST_CASE("fixed point at huge c collapses to the coulomb field") {
  DVMState s = make_dvm_state(standard_profile(), 3, {0.2}, 1e6, 1e-2);
  VPState vp = make_vp_state(standard_profile(), 3, {0.2}, 1e-2, false);
  REQUIRE(s.e.size() == vp.e.size());
  std::vector<Vec3> pos, E0;
  std::vector<double> w;
  for (const Marker& m : vp.e.markers) {
    pos.push_back(m.x);
    w.push_back(m.w);
  }
  pairwise_e0(pos, w, 0.2, E0, nullptr);
  double sup = 0.0;
  for (std::size_t i = 0; i < s.e.size(); ++i)
    sup = std::max(sup, norm(s.Estar[i] - E0[i]));
  CHECK(sup < 1e-9);
}

TEST_CASE("fixed point converges quickly and warm start agrees with cold") {
  DVMState s = make_dvm_state(standard_profile(), 3, {0.2}, 4.0, 1e-2);
  CHECK(s.stats.iterations <= 12);
  CHECK(s.stats.residual <= 1e-12);

  std::vector<Vec3> Ec(s.e.size(), Vec3{}), Bc(s.e.size(), Vec3{});
  const FixedPointStats cold = solve_fields_fixed_point(s.e, 1e-12, 64, Ec, Bc);
  CHECK(cold.iterations >= s.stats.iterations);  // cold start works harder
  double sup = 0.0;
  for (std::size_t i = 0; i < s.e.size(); ++i)
    sup = std::max(sup, norm(Ec[i] - s.Estar[i]));
  CHECK(sup < 1e-10);

  // contraction guard
  std::vector<Vec3> E2 = Ec, B2 = Bc;
  CHECK_THROWS(solve_fields_fixed_point(s.e, 1e-12, 64, E2, B2, 8.0));
}

TEST_CASE("magnetic energy: pairwise + self matches the shell quadrature") {
  // two well separated markers; the blob overlap at r/delta = 7.5 is small
  DVMState s = make_dvm_state(standard_profile(), 3, {0.2}, 4.0, 1e-2);
  s.e.markers.resize(2);
  s.e.markers[0] = {{-0.75, 0.0, 0.0}, {0.0, 0.3, 0.4}, 1.5, 0.0};
  s.e.markers[1] = {{0.75, 0.0, 0.0}, {0.2, -0.1, 0.5}, 2.0, 0.0};
  const DVMEnergy en = dvm_energy(s);
  double pairwise = pairwise_magnetic_energy(s.e);
  double self = 0.0;
  for (const Marker& m : s.e.markers) {
    const double v2 = norm2(m.v);
    const double vt2 = v2 * std::pow(1.0 - 0.5 * v2 / 16.0, 2.0);
    self += bstar_self_energy(m.w, vt2, 0.2, 4.0);
  }
  CHECK(std::abs(en.mag - (pairwise + self)) < 1e-2 * en.mag);
}

TEST_CASE("single marker magnetic energy matches the closed form") {
  DVMState s = make_dvm_state(standard_profile(), 3, {0.2}, 4.0, 1e-2);
  s.e.markers.resize(1);
  s.e.markers[0].x = {0.0, 0.0, 0.0};
  s.e.markers[0].v = {0.0, 0.0, 0.5};
  s.e.markers[0].w = 2.0;
  const DVMEnergy en = dvm_energy(s);
  const double v2 = 0.25;
  const double vt2 = v2 * std::pow(1.0 - 0.5 * v2 / 16.0, 2.0);
  CHECK(std::abs(en.mag - bstar_self_energy(2.0, vt2, 0.2, 4.0)) < 1e-3 * en.mag);
}

TEST_CASE("short-run energy drift is tiny") {
  DVMState s = make_dvm_state(standard_profile(), 3, {0.2}, 4.0, 1e-2);
  auto H = [&] {
    const DVMEnergy en = dvm_energy(s);
    return en.total;
  };
  const double H0 = H();
  for (int k = 0; k < 25; ++k) step_dvm(s, 1e-2);
  CHECK(std::abs(H() - H0) < 2e-4 * std::abs(H0));
}

TEST_CASE("fstar rides the characteristics") {
  DVMState s = make_dvm_state(standard_profile(), 3, {0.2}, 4.0, 1e-2);
  const std::vector<Marker> m0 = s.e.markers;
  for (int k = 0; k < 20; ++k) step_dvm(s, 1e-2);
  for (std::size_t i = 0; i < s.e.size(); i += 9) {
    const double f = eval_fstar(s, s.e.markers[i].x, s.e.markers[i].v);
    const double ref = s.profile.value(m0[i].x, m0[i].v);
    CHECK(std::abs(f - ref) < 1e-4 * (std::abs(ref) + 1.0));
  }
}
