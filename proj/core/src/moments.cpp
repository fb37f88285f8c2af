#include "dk/moments.hpp"

#include "dk/reduce.hpp"

namespace dk {

MomentSums moment_sums(const std::vector<Marker>& m, const std::vector<Vec3>& E0m,
                       const Vec3& x, double delta, double r_cut,
                       std::size_t exclude) {
  MomentSums out;
  const double r2 = r_cut * r_cut;
  const std::size_t n = m.size();

  // single chunked pass accumulating all components in fixed order
  struct Acc {
    Vec3 a, b, c, d, e, f, g, h;
    Acc operator+(const Acc& o) const {
      return {a + o.a, b + o.b, c + o.c, d + o.d,
              e + o.e, f + o.f, g + o.g, h + o.h};
    }
    Acc& operator+=(const Acc& o) { return *this = *this + o; }
  };
  const Acc acc = chunked_sum<Acc>(n, [&](std::size_t i) -> Acc {
    if (i == exclude) return {};
    const Vec3 z = m[i].x - x;
    if (norm2(z) <= r2) return {};
    const double w = m[i].w;
    const Vec3& v = m[i].v;
    const Vec3& E = E0m[i];

    Acc t;
    // int zbar d_t^2 rho = sum w [v^T Hess(zbar_c) v + (grad zbar . E0)_c]
    for (int cc = 0; cc < 3; ++cc) {
      t.a[cc] = w * dot(v, soft::hess_zbar(z, delta, cc) * v);
      t.b[cc] = w * dot(v, soft::hess_k3(z, delta, cc) * v);
    }
    t.a += w * (soft::grad_zbar(z, delta) * E);
    t.b += w * (soft::grad_k3(z, delta) * E);
    // int g1 d_t j = sum w [(grad g1 . v) v + g1 E0]
    t.c = w * (dot(soft::grad_g1(z, delta), v) * v + soft::g1(z, delta) * E);
    // int k3 d_t rho = sum w (grad k3 . v)
    t.d = w * (soft::grad_k3(z, delta) * v);
    // int k3 x d_t j = sum w [(grad k3 v) x v + k3 x E0]
    const Vec3 k3z = soft::k3(z, delta);
    t.e = w * (cross(soft::grad_k3(z, delta) * v, v) + cross(k3z, E));
    t.f = w * cross(k3z, v);
    t.g = w * k3z;
    t.h = m[i].w2 * k3z;
    return t;
  });

  out.zbar_dtt_rho = acc.a;
  out.k3_dtt_rho = acc.b;
  out.g1_dtj = acc.c;
  out.k3_dt_rho = acc.d;
  out.k3_cross_dtj = acc.e;
  out.k3_cross_j = acc.f;
  out.k3_rho = acc.g;
  out.k3_rho2 = acc.h;
  return out;
}

}  // namespace dk
