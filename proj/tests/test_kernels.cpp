#include <doctest.h>

#include <cmath>
#include <random>

#include "dk/harness.hpp"
#include "dk/kernels.hpp"

using namespace dk;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1") {
  GaussLegendre gl(8);
  for (int k = 0; k <= 15; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) acc += gl.w[i] * std::pow(gl.x[i], k);
    const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    CHECK(std::abs(acc - exact) < 1e-13);
  }
}

TEST_CASE("closed-form sphere means match direct quadrature") {
  const double r = 1.3;
  for (const Vec3 z : {Vec3{0.4, -0.2, 0.1}, Vec3{1.8, 0.6, -0.3}, Vec3{0.0, 0.0, 2.9}}) {
    const Vec3 inv = sphere_quadrature(
        r, 96, 192, [&](const Vec3& o) { return Vec3{1.0, 0.0, 0.0} * (1.0 / norm(z - r * o)); });
    CHECK(std::abs(inv.x - r * r * sphere_mean_inverse(z, r)) < 1e-8 * inv.x);

    const Vec3 grad = sphere_quadrature(r, 96, 192, [&](const Vec3& o) {
      const Vec3 d = z - r * o;
      const double dn = norm(d);
      return d * (1.0 / (dn * dn * dn));
    });
    const Vec3 gref = r * r * sphere_mean_gradient(z, r);
    CHECK(norm(grad - gref) < 1e-8 * (norm(gref) + 1.0));

    const Vec3 lin = sphere_quadrature(
        r, 96, 192, [&](const Vec3& o) { const Vec3 d = z - r * o; return d * (1.0 / norm(d)); });
    const Vec3 lref = r * r * sphere_mean_linear(z, r);
    CHECK(norm(lin - lref) < 1e-8 * norm(lref));
  }
}

TEST_CASE("coulomb direction integral matches cut-off quadrature") {
  for (const Vec3 z : {Vec3{0.7, 0.1, -0.4}, Vec3{-1.1, 2.0, 0.3}}) {
    const Vec3 ref = coulomb_direction_quadrature(z, 1e-4, 1e4, 48);
    const Vec3 val = coulomb_direction_integral(z);
    CHECK(norm(val - ref) < 1e-3 * (norm(z) + 1.0));
  }
}

TEST_CASE("relativistic velocity and momentum are inverse maps") {
  const double c = 3.7;
  const Vec3 v{1.2, -0.8, 2.4};
  const Vec3 vh = relativistic_velocity(v, c);
  CHECK(norm(vh) < c);
  CHECK(norm(momentum_from_velocity(vh, c) - v) < 1e-13 * norm(v));
  CHECK(norm(relativistic_velocity(v, 1e12) - v) < 1e-12);
}

TEST_CASE("kernels at v = 0 reduce to the static forms") {
  const GSKernelInputs in{{0.0, 0.6, 0.8}, {}, 7.0};
  CHECK(norm(gs_k_dt(in) - in.zbar) < 1e-15);
  CHECK(norm(gs_k_t(in) - in.zbar) < 1e-15);
  CHECK(norm(gs_l_dt(in)) < 1e-15);
  CHECK(norm(gs_l_t(in)) < 1e-15);
  const Vec3 F{0.3, -0.5, 0.2};
  const Vec3 ks = gs_k_s(in) * F;
  CHECK(norm(ks - (F - dot(in.zbar, F) * in.zbar)) < 1e-14);
  CHECK(norm(gs_l_s(in, F) - cross(in.zbar, F)) < 1e-14);
}

namespace {

// displayed c^-2 truncations, in the momentum variable v
Vec3 kdt_trunc(const Vec3& z, const Vec3& v, double c) {
  const double ic = 1.0 / c, zv = dot(z, v);
  return z - (ic * zv) * z + (ic * ic * zv * zv) * z - (ic * ic * zv) * v;
}
Vec3 kt_trunc(const Vec3& z, const Vec3& v, double c) {
  const double ic = 1.0 / c, zv = dot(z, v);
  return z + ic * (v - 2.0 * zv * z) +
         (ic * ic) * ((3.0 * zv * zv - norm2(v)) * z - 2.0 * zv * v);
}
Vec3 ks_trunc(const Vec3& z, const Vec3&, double, const Vec3& F) {
  return F - dot(z, F) * z;
}
Vec3 ldt_trunc(const Vec3& z, const Vec3& v, double c) {
  const double ic = 1.0 / c;
  return (ic - ic * ic * dot(z, v)) * cross(z, v);
}
Vec3 lt_trunc(const Vec3& z, const Vec3& v, double c) {
  const double ic = 1.0 / c;
  return (ic - 2.0 * ic * ic * dot(z, v)) * cross(z, v);
}
Vec3 ls_trunc(const Vec3& z, const Vec3&, double, const Vec3& F) {
  return cross(z, F);
}

}  // namespace

TEST_CASE("displayed kernel truncations have order-3 remainders") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // momenta drawn at the support scale of the standard profile (|v| <= 1)
  std::uniform_real_distribution<double> uv(-0.6, 0.6);
  const std::vector<double> cs{4.0, 8.0, 16.0, 32.0};
  for (int trial = 0; trial < 10; ++trial) {
    Vec3 z{u(rng), u(rng), u(rng)};
    z = unit_or_zero(z);
    const Vec3 v{uv(rng), uv(rng), uv(rng)};
    const Vec3 F{u(rng), u(rng), u(rng)};
    std::vector<std::pair<double, double>> rem[6];
    for (double c : cs) {
      const GSKernelInputs in{z, relativistic_velocity(v, c), c};
      const double ic2 = 1.0 / (c * c);
      rem[0].push_back({c, norm(gs_k_dt(in) - kdt_trunc(z, v, c))});
      rem[1].push_back({c, norm(gs_k_t(in) - kt_trunc(z, v, c))});
      rem[2].push_back({c, ic2 * norm(gs_k_s(in) * F - ks_trunc(z, v, c, F))});
      rem[3].push_back({c, norm(gs_l_dt(in) - ldt_trunc(z, v, c))});
      rem[4].push_back({c, norm((1.0 / c) * gs_l_t(in) - lt_trunc(z, v, c))});
      rem[5].push_back({c, ic2 * norm(gs_l_s(in, F) - ls_trunc(z, v, c, F))});
    }
    for (int k = 0; k < 6; ++k) {
      const SlopeFit fit = fit_slope(rem[k]);
      CHECK(fit.order >= 2.7);
    }
  }
}
