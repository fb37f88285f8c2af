#include <doctest.h>

#include <cmath>

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

TEST_CASE("vanishing amplitude free-streams the markers") {
  InitialProfile p = standard_profile();
  p.amplitude = 1e-14;
  VPState s = make_vp_state(p, 3, {0.2}, 1e-2, false);
  const std::vector<Vec3> x0 = s.x0, v0 = s.v0;
  for (int k = 0; k < 50; ++k) step_vp(s, 1e-2);
  for (std::size_t i = 0; i < s.e.size(); ++i) {
    CHECK(norm(s.e.markers[i].x - (x0[i] + 0.5 * v0[i])) < 1e-10);
    CHECK(norm(s.e.markers[i].v - v0[i]) < 1e-10);
  }
}

TEST_CASE("energy conservation and dt order") {
  const InitialProfile p = standard_profile();
  auto drift = [&](double dt) {
    VPState s = make_vp_state(p, 3, {0.2}, dt, false);
    const double H0 = vp_energy(s);
    const int nst = (int)(0.5 / dt + 0.5);
    for (int k = 0; k < nst; ++k) step_vp(s, dt);
    return std::abs(vp_energy(s) - H0) / std::abs(H0);
  };
  const double e1 = drift(2e-2), e2 = drift(1e-2);
  CHECK(e1 < 1e-6);
  CHECK(e2 < e1 / 8.0);  // rk4: expect ~16x
}

TEST_CASE("continuity residual is small on the flow") {
  VPState s = make_vp_state(standard_profile(), 3, {0.2}, 1e-2, false);
  for (int k = 0; k < 10; ++k) step_vp(s, 1e-2);
  const std::vector<Vec3> probes{{0.2, 0.1, 0.3}, {-0.4, 0.2, 0.5}, {0.0, 0.0, 0.0}};
  CHECK(continuity_residual(s, probes) < 5e-3);
}

TEST_CASE("tangent flow stays symplectic and matches a marker perturbation") {
  VPState s = make_vp_state(standard_profile(), 3, {0.2}, 1e-2, true);
  for (int k = 0; k < 20; ++k) step_vp(s, 1e-2);
  REQUIRE(s.tangent.size() == s.e.size());
  for (std::size_t i = 0; i < s.e.size(); i += 7) {
    CHECK(std::abs(det(s.tangent[i]) - 1.0) < 1e-9);
  }
}

TEST_CASE("f0 is transported along the characteristics") {
  VPState s = make_vp_state(standard_profile(), 3, {0.2}, 1e-2, true);
  const InitialProfile p = s.profile;
  for (int k = 0; k < 20; ++k) step_vp(s, 1e-2);
  for (std::size_t i = 0; i < s.e.size(); i += 5) {
    const double f = eval_f0(s, s.e.markers[i].x, s.e.markers[i].v, p);
    const double f0 = p.value(s.x0[i], s.v0[i]);
    CHECK(std::abs(f - f0) < 1e-6 * (std::abs(f0) + 1.0));
  }
  // backward trace returns to the initial node
  Vec3 x = s.e.markers[3].x, v = s.e.markers[3].v;
  trace_backward_vp(s, s.e.t, x, v);
  CHECK(norm(x - s.x0[3]) < 1e-7);
  CHECK(norm(v - s.v0[3]) < 1e-7);
}

TEST_CASE("pairwise field sums skip the self term") {
  VPState s = make_vp_state(standard_profile(), 3, {0.2}, 1e-2, false);
  std::vector<Vec3> pos, E;
  std::vector<double> w;
  for (const Marker& m : s.e.markers) {
    pos.push_back(m.x);
    w.push_back(m.w);
  }
  pairwise_e0(pos, w, 0.2, E, nullptr);
  // reference: direct sum
  for (std::size_t i = 0; i < pos.size(); i += 11) {
    Vec3 ref{};
    for (std::size_t j = 0; j < pos.size(); ++j)
      if (j != i) ref += w[j] * soft::k3(pos[i] - pos[j], 0.2);
    CHECK(norm(E[i] - ref) < 1e-12 * (norm(ref) + 1.0));
  }
}
