#include "dk/dvm.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dk/kernels.hpp"
#include "dk/reduce.hpp"
#include "dk/softening.hpp"

namespace dk {

namespace {

inline Vec3 vtilde(const Vec3& v, double c) {
  return (1.0 - 0.5 * norm2(v) / (c * c)) * v;
}

// kernel of the c^-4 term: g1(z) v^2 (v + (zbar.v) zbar)
inline Vec3 c4_kernel(const Vec3& z, const Vec3& v, double delta) {
  const Vec3 zh = unit_or_zero(z);
  return (soft::g1(z, delta) * norm2(v)) * (v + dot(zh, v) * zh);
}

struct FPInput {
  const std::vector<Vec3>* pos;
  const std::vector<Vec3>* vel;
  const std::vector<double>* w;
  double delta;
  double c;
  const std::vector<Vec3>* ppos = nullptr;  // previous step (c^-4 term only)
  const std::vector<Vec3>* pvel = nullptr;
  double pdt = 0.0;
};

void bstar_at_markers(const FPInput& in, std::vector<Vec3>& B) {
  const std::size_t n = in.pos->size();
  B.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    B[i] = chunked_sum<Vec3>(n, [&](std::size_t j) {
      if (j == i) return Vec3{};
      return ((*in.w)[j] / in.c) *
             cross(soft::k3((*in.pos)[j] - (*in.pos)[i], in.delta),
                   vtilde((*in.vel)[j], in.c));
    });
}

// field-independent part of the representation at marker/probe x
Vec3 estar_static(const FPInput& in, const Vec3& x, std::size_t exclude) {
  const double ic2 = 1.0 / (in.c * in.c);
  Vec3 out = chunked_sum<Vec3>(in.pos->size(), [&](std::size_t j) {
    if (j == exclude) return Vec3{};
    const Vec3 z = (*in.pos)[j] - x;
    const Vec3 zh = unit_or_zero(z);
    const Vec3& v = (*in.vel)[j];
    const double zv = dot(zh, v);
    const double coef =
        0.5 * ic2 * (3.0 * zv * zv - norm2(v)) * (1.0 - 0.5 * ic2 * norm2(v));
    return (*in.w)[j] * (soft::k3(-z, in.delta) + coef * soft::k3(z, in.delta));
  });
  if (in.ppos && in.pdt > 0.0)
    out += (0.25 * ic2 * ic2 / in.pdt) *
           chunked_sum<Vec3>(in.pos->size(), [&](std::size_t j) {
             if (j == exclude) return Vec3{};
             return (*in.w)[j] * (c4_kernel((*in.pos)[j] - x, (*in.vel)[j], in.delta) -
                                  c4_kernel((*in.ppos)[j] - x, (*in.pvel)[j], in.delta));
           });
  return out;
}

// field-dependent part from the current iterate F_j = E*_j + c^-1 v_j x B*_j
Vec3 estar_coupling(const FPInput& in, const std::vector<Vec3>& F, const Vec3& x,
                    std::size_t exclude) {
  const double ic2 = 1.0 / (in.c * in.c);
  return chunked_sum<Vec3>(in.pos->size(), [&](std::size_t j) {
    if (j == exclude) return Vec3{};
    const Vec3 z = (*in.pos)[j] - x;
    const Vec3 zh = unit_or_zero(z);
    return (-0.5 * ic2 * (*in.w)[j] * soft::g1(z, in.delta)) *
           (F[j] + dot(zh, F[j]) * zh);
  });
}

FixedPointStats fp_solve(const FPInput& in, std::vector<Vec3>& Estar,
                         std::vector<Vec3>& Bstar, double tol, int max_iter,
                         double c_star) {
  if (in.c < c_star)
    throw std::invalid_argument("solve_fields_fixed_point: c below c_star");
  const std::size_t n = in.pos->size();
  bstar_at_markers(in, Bstar);

  std::vector<Vec3> base(n);
  for (std::size_t i = 0; i < n; ++i)
    base[i] = estar_static(in, (*in.pos)[i], i);
  if (Estar.size() != n) Estar = base;  // cold start from the Coulomb part

  FixedPointStats st;
  std::vector<Vec3> F(n), Enew(n);
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t j = 0; j < n; ++j)
      F[j] = Estar[j] + (1.0 / in.c) * cross((*in.vel)[j], Bstar[j]);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Enew[i] = base[i] + estar_coupling(in, F, (*in.pos)[i], i);
      res = std::max(res, max_abs(Enew[i] - Estar[i]));
    }
    Estar.swap(Enew);
    st.iterations = it + 1;
    st.residual = res;
    st.residual_history.push_back(res);
    if (res <= tol) return st;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "solve_fields_fixed_point: no convergence in %d sweeps, residual %.3e",
                max_iter, st.residual);
  throw std::runtime_error(buf);
}

FPInput input_of(const Ensemble& e, std::vector<Vec3>& pos, std::vector<Vec3>& vel,
                 std::vector<double>& w) {
  const std::size_t n = e.size();
  pos.resize(n); vel.resize(n); w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = e.markers[i].x;
    vel[i] = e.markers[i].v;
    w[i] = e.markers[i].w;
  }
  return {&pos, &vel, &w, e.softening.delta, e.c};
}

}  // namespace

Vec3 field_bstar(const Ensemble& e, const Vec3& x) {
  if (e.c <= 0.0) throw std::invalid_argument("field_bstar: ensemble carries no c");
  const double d = e.softening.delta;
  return chunked_sum<Vec3>(e.size(), [&](std::size_t j) {
    const Marker& m = e.markers[j];
    return (m.w / e.c) * cross(soft::k3(m.x - x, d), vtilde(m.v, e.c));
  });
}

FixedPointStats solve_fields_fixed_point(const Ensemble& e, double tol,
                                         int max_iter, std::vector<Vec3>& Estar,
                                         std::vector<Vec3>& Bstar, double c_star) {
  std::vector<Vec3> pos, vel;
  std::vector<double> w;
  const FPInput in = input_of(e, pos, vel, w);
  return fp_solve(in, Estar, Bstar, tol, max_iter, c_star);
}

DVMState make_dvm_state(const InitialProfile& profile, int n_per_axis,
                        const Softening& softening, double c, double dt,
                        bool record) {
  DVMState s;
  s.profile = profile;
  s.e = sample_initial(profile, n_per_axis, softening);
  s.e.kind = EnsembleKind::DVM;
  s.e.c = c;
  s.dt_log = dt;
  s.record = record;
  s.stats = solve_fields_fixed_point(s.e, s.fp_tol, s.max_iter, s.Estar, s.Bstar,
                                     s.c_star);
  if (record) {
    s.track.reserve(s.e.size());
    for (std::size_t i = 0; i < s.e.size(); ++i) {
      s.track.emplace_back(0.0, dt);
      TrackKnot k;
      k.x = s.e.markers[i].x;
      k.v = s.e.markers[i].v;
      k.xdot = vtilde(k.v, c);
      k.E = s.Estar[i];
      k.B = s.Bstar[i];
      k.vdot = k.E + (1.0 / c) * cross(k.v, k.B);
      s.track[i].append(k);
    }
  }
  return s;
}

Vec3 field_estar(const DVMState& s, const Vec3& x) {
  std::vector<Vec3> pos, vel;
  std::vector<double> w;
  FPInput in = input_of(s.e, pos, vel, w);
  if (s.with_c4_term && !s.prev_pos.empty()) {
    in.ppos = &s.prev_pos;
    in.pvel = &s.prev_vel;
    in.pdt = s.prev_dt;
  }
  const std::size_t n = s.e.size();
  std::vector<Vec3> F(n);
  for (std::size_t j = 0; j < n; ++j)
    F[j] = s.Estar[j] + (1.0 / s.e.c) * cross(s.e.markers[j].v, s.Bstar[j]);
  return estar_static(in, x, no_exclude) + estar_coupling(in, F, x, no_exclude);
}

void step_dvm(DVMState& s, double dt) {
  const std::size_t n = s.e.size();
  const double c = s.e.c;

  std::vector<Vec3> x(n), v(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = s.e.markers[i].x;
    v[i] = s.e.markers[i].v;
    w[i] = s.e.markers[i].w;
  }
  std::vector<Vec3> kx[4], kv[4];
  std::vector<Vec3> X(n), V(n);
  std::vector<Vec3> Ew = s.Estar, Bw;  // warm start carried across stages

  for (int st = 0; st < 4; ++st) {
    const double a = (st == 0) ? 0.0 : (st == 3) ? 1.0 : 0.5;
    kx[st].resize(n);
    kv[st].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      X[i] = (st == 0) ? x[i] : x[i] + (a * dt) * kx[st - 1][i];
      V[i] = (st == 0) ? v[i] : v[i] + (a * dt) * kv[st - 1][i];
    }
    FPInput in{&X, &V, &w, s.e.softening.delta, c};
    if (s.with_c4_term && !s.prev_pos.empty()) {
      in.ppos = &s.prev_pos;
      in.pvel = &s.prev_vel;
      in.pdt = s.prev_dt;
    }
    const FixedPointStats fst = fp_solve(in, Ew, Bw, s.fp_tol, s.max_iter, s.c_star);
    (void)fst;
    for (std::size_t i = 0; i < n; ++i) {
      kx[st][i] = vtilde(V[i], c);
      kv[st][i] = Ew[i] + (1.0 / c) * cross(V[i], Bw[i]);
    }
  }

  s.prev_pos = x;
  s.prev_vel = v;
  s.prev_dt = dt;
  for (std::size_t i = 0; i < n; ++i) {
    s.e.markers[i].x =
        x[i] + (dt / 6.0) * (kx[0][i] + 2.0 * kx[1][i] + 2.0 * kx[2][i] + kx[3][i]);
    s.e.markers[i].v =
        v[i] + (dt / 6.0) * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
  }
  s.e.t += dt;

  s.Estar = Ew;  // warm start the committed solve from the last stage
  s.stats = solve_fields_fixed_point(s.e, s.fp_tol, s.max_iter, s.Estar, s.Bstar,
                                     s.c_star);
  if (s.record)
    for (std::size_t i = 0; i < n; ++i) {
      TrackKnot k;
      k.x = s.e.markers[i].x;
      k.v = s.e.markers[i].v;
      k.xdot = vtilde(k.v, c);
      k.E = s.Estar[i];
      k.B = s.Bstar[i];
      k.vdot = k.E + (1.0 / c) * cross(k.v, k.B);
      s.track[i].append(k);
    }
}

double bstar_self_energy(double w, double vtilde2, double delta, double c) {
  return w * w * vtilde2 * M_PI / (16.0 * c * c * delta);
}

double pairwise_magnetic_energy(const Ensemble& e) {
  const std::size_t n = e.size();
  const double d = e.softening.delta, c = e.c;
  return chunked_sum<double>(n, [&](std::size_t i) {
    const Vec3 vi = vtilde(e.markers[i].v, c);
    return 0.25 / (c * c) * e.markers[i].w *
           chunked_sum<double>(n, [&](std::size_t j) {
             if (j == i) return 0.0;
             const Vec3 r = e.markers[i].x - e.markers[j].x;
             const Vec3 nh = unit_or_zero(r);
             const Vec3 vj = vtilde(e.markers[j].v, c);
             return e.markers[j].w * soft::g1(r, d) *
                    (dot(vi, vj) + dot(nh, vi) * dot(nh, vj));
           });
  });
}

DVMEnergy dvm_energy(const DVMState& s, int box_cells) {
  const std::size_t n = s.e.size();
  const double c = s.e.c, d = s.e.softening.delta;
  DVMEnergy out;

  out.kin = chunked_sum<double>(n, [&](std::size_t i) {
    const double v2 = norm2(s.e.markers[i].v);
    return s.e.markers[i].w * (0.5 * v2 - 0.125 * v2 * v2 / (c * c));
  });
  out.es = chunked_sum<double>(n, [&](std::size_t i) {
    return 0.5 * s.e.markers[i].w *
           chunked_sum<double>(n, [&](std::size_t j) {
             if (j == i) return 0.0;
             return s.e.markers[j].w *
                    soft::g1(s.e.markers[i].x - s.e.markers[j].x, d);
           });
  });

  // whole-space magnetic integral: radial shells around the charge centroid,
  // one linear panel through the origin then geometric panels out to where
  // the r^-4 far-field tail is negligible
  Vec3 centroid{};
  double W = 0.0;
  for (const Marker& m : s.e.markers) {
    centroid += m.w * m.x;
    W += m.w;
  }
  if (W > 0.0) centroid = centroid / W;

  const GaussLegendre glr(8), glt(16);
  const int n_phi = 32;
  const double r_lo = std::max(2.0 * d, 0.1), r_hi = 500.0;
  const int n_panel = 24;
  const double ratio = std::pow(r_hi / r_lo, 1.0 / n_panel);

  auto shell = [&](double ra, double rb, const GaussLegendre& gl) {
    double acc = 0.0;
    for (std::size_t ir = 0; ir < gl.x.size(); ++ir) {
      const double r = 0.5 * (rb - ra) * gl.x[ir] + 0.5 * (ra + rb);
      const double wr = 0.5 * (rb - ra) * gl.w[ir] * r * r;
      for (int it = 0; it < (int)glt.x.size(); ++it) {
        const double ct = glt.x[it];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int ip = 0; ip < n_phi; ++ip) {
          const double phi = 2.0 * M_PI * (ip + 0.5) / n_phi;
          const Vec3 y = centroid + r * Vec3{st * std::cos(phi), st * std::sin(phi), ct};
          acc += wr * glt.w[it] * (2.0 * M_PI / n_phi) * norm2(field_bstar(s.e, y));
        }
      }
    }
    return acc;
  };

  double mag_int = shell(0.0, r_lo, GaussLegendre(12));
  double ra = r_lo;
  for (int p = 0; p < n_panel; ++p) {
    const double rb = ra * ratio;
    mag_int += shell(ra, rb, glr);
    ra = rb;
  }
  out.mag = mag_int / (8.0 * M_PI);

  if (box_cells > 0) {
    Vec3 lo = s.e.markers.empty() ? Vec3{} : s.e.markers[0].x, hi = lo;
    for (const Marker& m : s.e.markers)
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], m.x[k]);
        hi[k] = std::max(hi[k], m.x[k]);
      }
    const SupportRadius sr = support_radius(s.e);
    const double pad = 20.0 * d + 2.0 * sr.R_x;
    double half = 0.0;
    const Vec3 mid = 0.5 * (lo + hi);
    for (int k = 0; k < 3; ++k) half = std::max(half, 0.5 * (hi[k] - lo[k]) + pad);
    const double h = 2.0 * half / box_cells;
    double total = 0.0, edge = 0.0;
    for (int i = 0; i < box_cells; ++i)
      for (int j = 0; j < box_cells; ++j)
        for (int k = 0; k < box_cells; ++k) {
          const Vec3 y = mid + Vec3{-half + (i + 0.5) * h, -half + (j + 0.5) * h,
                                    -half + (k + 0.5) * h};
          const double val = norm2(field_bstar(s.e, y)) * h * h * h;
          total += val;
          const bool boundary = i == 0 || j == 0 || k == 0 ||
                                i == box_cells - 1 || j == box_cells - 1 ||
                                k == box_cells - 1;
          if (boundary) edge += val;
        }
    out.mag_box = total / (8.0 * M_PI);
    out.flux_warning = edge > 1e-6 * total;
  }

  out.total = out.kin + out.es + out.mag;
  return out;
}

double eval_fstar(const DVMState& s, const Vec3& x, const Vec3& v) {
  if (!s.record || s.track.empty())
    throw std::runtime_error("eval_fstar: trajectory recording disabled");
  const double t = s.e.t, c = s.e.c, d = s.e.softening.delta;
  if (t <= 0.0) return s.profile.value(x, v);
  const std::size_t n = s.e.size();
  const double ic2 = 1.0 / (c * c);

  std::vector<Vec3> pos(n), vel(n), F(n);
  auto load = [&](double ts) {
    for (std::size_t j = 0; j < n; ++j) {
      const MarkerTrack& tr = s.track[j];
      pos[j] = tr.pos(ts);
      vel[j] = tr.vel(ts);
      F[j] = tr.field_e(ts) + (1.0 / c) * cross(vel[j], tr.field_b(ts));
    }
  };
  auto fields = [&](const Vec3& y, Vec3& E, Vec3& B) {
    E = chunked_sum<Vec3>(n, [&](std::size_t j) {
      const double wj = s.e.markers[j].w;
      const Vec3 z = pos[j] - y;
      const Vec3 zh = unit_or_zero(z);
      const double zv = dot(zh, vel[j]);
      const double v2 = norm2(vel[j]);
      const double coef = 0.5 * ic2 * (3.0 * zv * zv - v2) * (1.0 - 0.5 * ic2 * v2);
      Vec3 term = wj * (soft::k3(-z, d) + coef * soft::k3(z, d));
      term -= (0.5 * ic2 * wj * soft::g1(z, d)) * (F[j] + dot(zh, F[j]) * zh);
      return term;
    });
    B = chunked_sum<Vec3>(n, [&](std::size_t j) {
      return (s.e.markers[j].w / c) *
             cross(soft::k3(pos[j] - y, d), vtilde(vel[j], c));
    });
  };

  const int nst = std::max(1, (int)std::lround(t / s.dt_log));
  const double h = -t / nst;
  Vec3 Y = x, U = v;
  for (int step = 0; step < nst; ++step) {
    const double tc = t + step * h;
    Vec3 E, B, dY[4], dU[4];
    load(tc);
    fields(Y, E, B);
    dY[0] = vtilde(U, c);
    dU[0] = E + (1.0 / c) * cross(U, B);
    load(tc + 0.5 * h);
    fields(Y + 0.5 * h * dY[0], E, B);
    dY[1] = vtilde(U + 0.5 * h * dU[0], c);
    dU[1] = E + (1.0 / c) * cross(U + 0.5 * h * dU[0], B);
    fields(Y + 0.5 * h * dY[1], E, B);
    dY[2] = vtilde(U + 0.5 * h * dU[1], c);
    dU[2] = E + (1.0 / c) * cross(U + 0.5 * h * dU[1], B);
    load(tc + h);
    fields(Y + h * dY[2], E, B);
    dY[3] = vtilde(U + h * dU[2], c);
    dU[3] = E + (1.0 / c) * cross(U + h * dU[2], B);
    Y = Y + (h / 6.0) * (dY[0] + 2.0 * dY[1] + 2.0 * dY[2] + dY[3]);
    U = U + (h / 6.0) * (dU[0] + 2.0 * dU[1] + 2.0 * dU[2] + dU[3]);
  }
  return s.profile.value(Y, U);
}

}  // namespace dk
