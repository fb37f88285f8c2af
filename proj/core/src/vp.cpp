#include "dk/vp.hpp"

#include <cmath>
#include <stdexcept>

#include "dk/reduce.hpp"

namespace dk {

void pairwise_e0(const std::vector<Vec3>& pos, const std::vector<double>& w,
                 double delta, std::vector<Vec3>& E, std::vector<Mat3>* gradE) {
  const std::size_t n = pos.size();
  E.resize(n);
  if (gradE) gradE->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    E[i] = chunked_sum<Vec3>(n, [&](std::size_t j) {
      if (j == i) return Vec3{};
      return w[j] * soft::k3(pos[i] - pos[j], delta);
    });
    if (gradE)
      (*gradE)[i] = chunked_sum<Mat3>(n, [&](std::size_t j) {
        if (j == i) return Mat3{};
        return soft::grad_k3(pos[i] - pos[j], delta) * w[j];
      });
  }
}

Mat6 tangent_rhs(const Mat3& G, const Mat6& F) {
  Mat6 R;
  for (int c = 0; c < 6; ++c) {
    for (int r = 0; r < 3; ++r) R(r, c) = F(r + 3, c);
    for (int r = 0; r < 3; ++r) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += G(r, k) * F(k, c);
      R(r + 3, c) = s;
    }
  }
  return R;
}

VPState make_vp_state(const InitialProfile& profile, int n_per_axis,
                      const Softening& softening, double dt, bool with_tangent) {
  VPState s;
  s.profile = profile;
  s.e = sample_initial(profile, n_per_axis, softening);
  s.dt_log = dt;
  s.with_tangent = with_tangent;

  const std::size_t n = s.e.size();
  s.x0.resize(n);
  s.v0.resize(n);
  s.vol.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Marker& m = s.e.markers[i];
    s.x0[i] = m.x;
    s.v0[i] = m.v;
    s.vol[i] = m.w / profile.value(m.x, m.v);
  }
  if (with_tangent) s.tangent.assign(n, Mat6::identity());

  std::vector<Vec3> pos(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = s.e.markers[i].x;
    w[i] = s.e.markers[i].w;
  }
  std::vector<Vec3> E;
  pairwise_e0(pos, w, softening.delta, E, nullptr);

  s.log.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.log.emplace_back(0.0, dt);
    TrackKnot k;
    k.x = s.e.markers[i].x;
    k.v = s.e.markers[i].v;
    k.xdot = k.v;
    k.vdot = E[i];
    k.E = E[i];
    s.log[i].append(k);
  }
  return s;
}

Vec3 field_e0(const VPState& s, const Vec3& x) {
  const double d = s.e.softening.delta;
  return chunked_sum<Vec3>(s.e.size(), [&](std::size_t i) {
    return s.e.markers[i].w * soft::k3(x - s.e.markers[i].x, d);
  });
}

Mat3 grad_field_e0(const VPState& s, const Vec3& x) {
  const double d = s.e.softening.delta;
  return chunked_sum<Mat3>(s.e.size(), [&](std::size_t i) {
    return soft::grad_k3(x - s.e.markers[i].x, d) * s.e.markers[i].w;
  });
}

void step_vp(VPState& s, double dt) {
  const std::size_t n = s.e.size();
  const double d = s.e.softening.delta;
  const bool tg = s.with_tangent;

  std::vector<double> w(n);
  std::vector<Vec3> x(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = s.e.markers[i].w;
    x[i] = s.e.markers[i].x;
    v[i] = s.e.markers[i].v;
  }

  // classic RK4 on the full coupled marker system
  std::vector<Vec3> kx[4], kv[4];
  std::vector<Mat6> kF[4];
  std::vector<Vec3> X(n), E;
  std::vector<Mat3> G;
  std::vector<Mat6> Fst;
  if (tg) Fst.resize(n);

  for (int st = 0; st < 4; ++st) {
    const double a = (st == 0) ? 0.0 : (st == 3) ? 1.0 : 0.5;
    kx[st].resize(n);
    kv[st].resize(n);
    if (tg) kF[st].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      X[i] = (st == 0) ? x[i] : x[i] + (a * dt) * kx[st - 1][i];
      kx[st][i] = (st == 0) ? v[i] : v[i] + (a * dt) * kv[st - 1][i];
      if (tg)
        Fst[i] = (st == 0) ? s.tangent[i] : s.tangent[i] + (a * dt) * kF[st - 1][i];
    }
    pairwise_e0(X, w, d, E, tg ? &G : nullptr);
    for (std::size_t i = 0; i < n; ++i) {
      kv[st][i] = E[i];
      if (tg) kF[st][i] = tangent_rhs(G[i], Fst[i]);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    s.e.markers[i].x =
        x[i] + (dt / 6.0) * (kx[0][i] + 2.0 * kx[1][i] + 2.0 * kx[2][i] + kx[3][i]);
    s.e.markers[i].v =
        v[i] + (dt / 6.0) * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
    if (tg)
      s.tangent[i] = s.tangent[i] + (dt / 6.0) * (kF[0][i] + 2.0 * kF[1][i] +
                                                  2.0 * kF[2][i] + kF[3][i]);
  }
  s.e.t += dt;

  // record pass at the committed positions
  for (std::size_t i = 0; i < n; ++i) X[i] = s.e.markers[i].x;
  pairwise_e0(X, w, d, E, nullptr);
  for (std::size_t i = 0; i < n; ++i) {
    TrackKnot k;
    k.x = s.e.markers[i].x;
    k.v = s.e.markers[i].v;
    k.xdot = k.v;
    k.vdot = E[i];
    k.E = E[i];
    k.w2 = s.e.markers[i].w2;
    s.log[i].append(k);
  }
}

namespace {

Vec3 recorded_field(const VPState& s, const Vec3& y, double t) {
  const double d = s.e.softening.delta;
  return chunked_sum<Vec3>(s.log.size(), [&](std::size_t j) {
    return s.e.markers[j].w * soft::k3(y - s.log[j].pos(t), d);
  });
}

}  // namespace

void trace_backward_vp(const VPState& s, double t, Vec3& x, Vec3& v) {
  if (t <= 0.0) return;
  const int nst = std::max(1, (int)std::lround(t / s.dt_log));
  const double h = -t / nst;
  for (int step = 0; step < nst; ++step) {
    const double tc = t + step * h;
    const Vec3 k1x = v, k1v = recorded_field(s, x, tc);
    const Vec3 k2x = v + 0.5 * h * k1v,
               k2v = recorded_field(s, x + 0.5 * h * k1x, tc + 0.5 * h);
    const Vec3 k3x = v + 0.5 * h * k2v,
               k3v = recorded_field(s, x + 0.5 * h * k2x, tc + 0.5 * h);
    const Vec3 k4x = v + h * k3v, k4v = recorded_field(s, x + h * k3x, tc + h);
    x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
}

double eval_f0(const VPState& s, const Vec3& x, const Vec3& v,
               const InitialProfile& profile) {
  Vec3 y = x, u = v;
  trace_backward_vp(s, s.e.t, y, u);
  return profile.value(y, u);
}

double continuity_residual(const VPState& s, const std::vector<Vec3>& probes) {
  if (s.log.empty() || s.log[0].size() < 2)
    throw std::runtime_error("continuity_residual: need at least two knots");
  const double t1 = s.e.t, dt = s.dt_log, t0 = t1 - dt, tm = t1 - 0.5 * dt;
  const double d = s.e.softening.delta;

  double worst = 0.0;
  for (const Vec3& p : probes) {
    const double rho1 = charge_density(s.e, p);
    const double rho0 = chunked_sum<double>(s.log.size(), [&](std::size_t j) {
      return s.e.markers[j].w * soft::blob(p - s.log[j].pos(t0), d);
    });
    const double divj = chunked_sum<double>(s.log.size(), [&](std::size_t j) {
      const Vec3 z = p - s.log[j].pos(tm);
      const double sv = soft::s_of(z, d);
      const double gb = -15.0 * d * d / (4.0 * M_PI * sv * sv * sv * std::sqrt(sv));
      return s.e.markers[j].w * gb * dot(z, s.log[j].vel(tm));
    });
    worst = std::max(worst, std::abs((rho1 - rho0) / dt + divj));
  }
  return worst;
}

double vp_energy(const VPState& s) {
  const std::size_t n = s.e.size();
  const double d = s.e.softening.delta;
  const double kin = chunked_sum<double>(
      n, [&](std::size_t i) { return 0.5 * s.e.markers[i].w * norm2(s.e.markers[i].v); });
  const double pot = chunked_sum<double>(n, [&](std::size_t i) {
    return 0.5 * s.e.markers[i].w *
           chunked_sum<double>(n, [&](std::size_t j) {
             if (j == i) return 0.0;
             return s.e.markers[j].w *
                    soft::g1(s.e.markers[i].x - s.e.markers[j].x, d);
           });
  });
  return kin + pot;
}

std::pair<Vec3, Vec3> grad_f0_at_marker(const VPState& s, std::size_t i) {
  if (!s.with_tangent)
    throw std::runtime_error("grad_f0_at_marker: tangent flow not enabled");
  const Vec3 gx = s.profile.grad_x(s.x0[i], s.v0[i]);
  const Vec3 gv = s.profile.grad_v(s.x0[i], s.v0[i]);
  Vec6 g;
  for (int k = 0; k < 3; ++k) {
    g[k] = gx[k];
    g[k + 3] = gv[k];
  }
  // grad f0(z) = DPhi^{-T} grad f°(z0), i.e. solve F^T y = g with z0 = Phi^{-1} z
  const Vec6 y = solve_transposed(s.tangent[i], g);
  return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
}

}  // namespace dk
