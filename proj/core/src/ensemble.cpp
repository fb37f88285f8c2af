#include "dk/ensemble.hpp"

#include <cstdio>
#include <stdexcept>

#include "dk/reduce.hpp"

namespace dk {

Ensemble sample_initial(const InitialProfile& profile, int n_per_axis,
                        const Softening& softening) {
  if (n_per_axis < 2) throw std::invalid_argument("sample_initial: n_per_axis < 2");
  Ensemble e;
  e.softening = softening;
  if (profile.amplitude == 0.0) return e;

  const int n = n_per_axis;
  const double hx = 2.0 * profile.radius_x / n;
  const double hv = 2.0 * profile.radius_v / n;
  const double cell = hx * hx * hx * hv * hv * hv;

  std::vector<Vec3> xnodes, vnodes;
  std::vector<double> bx, bv;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 ox{-profile.radius_x + (i + 0.5) * hx,
                      -profile.radius_x + (j + 0.5) * hx,
                      -profile.radius_x + (k + 0.5) * hx};
        const double b = bump(norm(ox) / profile.radius_x);
        if (b > 0.0) {
          xnodes.push_back(profile.center_x + ox);
          bx.push_back(b);
        }
        const Vec3 ov{-profile.radius_v + (i + 0.5) * hv,
                      -profile.radius_v + (j + 0.5) * hv,
                      -profile.radius_v + (k + 0.5) * hv};
        const double bb = bump(norm(ov) / profile.radius_v);
        if (bb > 0.0) {
          vnodes.push_back(profile.center_v + ov);
          bv.push_back(bb);
        }
      }

  double bx_max = 0.0, bv_max = 0.0;
  for (double b : bx) bx_max = std::max(bx_max, b);
  for (double b : bv) bv_max = std::max(bv_max, b);
  const double w_cut = 1e-16 * profile.amplitude * bx_max * bv_max * cell;

  for (std::size_t i = 0; i < xnodes.size(); ++i)
    for (std::size_t j = 0; j < vnodes.size(); ++j) {
      const double w = profile.amplitude * bx[i] * bv[j] * cell;
      if (w < w_cut) continue;
      e.markers.push_back({xnodes[i], vnodes[j], w, 0.0});
    }
  return e;
}

double total_charge(const Ensemble& e) {
  return chunked_sum<double>(e.size(), [&](std::size_t i) { return e.markers[i].w; });
}

double charge_density(const Ensemble& e, const Vec3& x) {
  const double d = e.softening.delta;
  return chunked_sum<double>(e.size(), [&](std::size_t i) {
    return e.markers[i].w * soft::blob(x - e.markers[i].x, d);
  });
}

Vec3 current_density(const Ensemble& e, const Vec3& x, CurrentConvention conv) {
  const double d = e.softening.delta;
  if (conv != CurrentConvention::newtonian && e.c <= 0.0)
    throw std::invalid_argument("current_density: convention needs c on the ensemble");
  const double c2 = e.c * e.c;
  return chunked_sum<Vec3>(e.size(), [&](std::size_t i) {
    const Marker& m = e.markers[i];
    Vec3 u = m.v;
    if (conv == CurrentConvention::darwin)
      u = (1.0 - 0.5 * norm2(m.v) / c2) * m.v;
    else if (conv == CurrentConvention::relativistic)
      u = m.v * (1.0 / std::sqrt(1.0 + norm2(m.v) / c2));
    return (m.w * soft::blob(x - m.x, d)) * u;
  });
}

double div_current_density(const Ensemble& e, const Vec3& x) {
  const double d = e.softening.delta;
  return chunked_sum<double>(e.size(), [&](std::size_t i) {
    const Marker& m = e.markers[i];
    const Vec3 z = x - m.x;
    const double s = soft::s_of(z, d);
    // grad blob = -15 delta^2/(4 pi) z s^{-7/2}
    const double gb = -15.0 * d * d / (4.0 * M_PI * s * s * s * std::sqrt(s));
    return m.w * gb * dot(z, m.v);
  });
}

SupportRadius support_radius(const Ensemble& e) {
  SupportRadius r;
  for (const Marker& m : e.markers) {
    r.R_x = std::max(r.R_x, norm(m.x));
    r.R_v = std::max(r.R_v, norm(m.v));
  }
  return r;
}

void write_ensemble_csv(const std::string& path, const Ensemble& e) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f, "t,x1,x2,x3,v1,v2,v3,w,w2\n");
  for (const Marker& m : e.markers)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 e.t, m.x.x, m.x.y, m.x.z, m.v.x, m.v.y, m.v.z, m.w, m.w2);
  std::fclose(f);
}

}  // namespace dk
