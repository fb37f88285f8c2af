#include "dk/rvm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dk/reduce.hpp"
#include "dk/retard.hpp"

namespace dk {

namespace {

constexpr double self_cut = 2.0;  // own-history exclusion radius, in deltas

Vec3 any_perp(const Vec3& a) {
  const Vec3 trial = (std::abs(a.z) < 0.9) ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
  return unit(cross(a, trial));
}

double bary_eval(const std::vector<double>& mu, const std::vector<double>& wb,
                 const std::vector<double>& f, double m) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double d = m - mu[k];
    if (std::abs(d) < 1e-13) return f[k];
    const double q = wb[k] / d;
    num += q * f[k];
    den += q;
  }
  return num / den;
}

}  // namespace

DTTables DTTables::build(const InitialProfile& p, double c, int n_mu, int n_gl) {
  DTTables t;
  t.c = c;
  t.axis = (norm(p.center_v) > 1e-12) ? unit(p.center_v) : Vec3{0.0, 0.0, 1.0};
  t.mu.resize(n_mu);
  t.wbary.resize(n_mu);
  t.aK.resize(n_mu);
  t.bK.resize(n_mu);
  t.cL.resize(n_mu);

  const GaussLegendre gl(n_gl);
  const double rv = p.radius_v;
  const Vec3 perp = any_perp(t.axis);

  for (int k = 0; k < n_mu; ++k) {
    const double th = (2 * k + 1) * M_PI / (2 * n_mu);
    const double m = std::cos(th);
    t.mu[k] = m;
    t.wbary[k] = (k % 2 == 0 ? 1.0 : -1.0) * std::sin(th);

    const Vec3 zb = m * t.axis + std::sqrt(std::max(0.0, 1.0 - m * m)) * perp;
    Vec3 WK{}, WL{};
    for (int i = 0; i < n_gl; ++i)
      for (int j = 0; j < n_gl; ++j)
        for (int l = 0; l < n_gl; ++l) {
          const Vec3 u{rv * gl.x[i], rv * gl.x[j], rv * gl.x[l]};
          const double b = bump(norm(u) / rv);
          if (b == 0.0) continue;
          const double wq = b * gl.w[i] * gl.w[j] * gl.w[l] * rv * rv * rv;
          const GSKernelInputs in{zb, relativistic_velocity(p.center_v + u, c), c};
          WK += wq * gs_k_dt(in);
          WL += wq * gs_l_dt(in);
        }
    const double om = 1.0 - m * m;
    const double Wz = dot(WK, zb), We = dot(WK, t.axis);
    t.aK[k] = (Wz - m * We) / om;
    t.bK[k] = (We - m * Wz) / om;
    t.cL[k] = dot(WL, cross(zb, t.axis)) / om;
  }
  return t;
}

Vec3 DTTables::w_k(const Vec3& omega) const {
  const double m = std::clamp(dot(omega, axis), -1.0, 1.0);
  return bary_eval(mu, wbary, aK, m) * omega + bary_eval(mu, wbary, bK, m) * axis;
}

Vec3 DTTables::w_l(const Vec3& omega) const {
  const double m = std::clamp(dot(omega, axis), -1.0, 1.0);
  return bary_eval(mu, wbary, cL, m) * cross(omega, axis);
}

namespace {

// one sphere pass on |z| = ct: profile-moment corrections for the data part
// plus the DT kernel integrals (f° in closed form, per design)
struct GSSphere {
  SphereTerms st;
  Vec3 e_dt, b_dt;  // raw surface integrals, (ct)^-1 applied by the caller
  bool active = false;
};

GSSphere gs_sphere(const RVMState& s, const Vec3& x, double ct, int n_theta,
                   int n_phi) {
  GSSphere out;
  const InitialProfile& p = s.profile;
  if (ct <= 0.0 || std::abs(norm(x - p.center_x) - ct) >= p.radius_x) return out;
  out.active = true;
  const double delta = s.e.softening.delta;

  const GaussLegendre gl(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    const double cth = gl.x[i];
    const double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
    for (int jj = 0; jj < n_phi; ++jj) {
      const double phi = 2.0 * M_PI * (jj + 0.5) / n_phi;
      const Vec3 omega{sth * std::cos(phi), sth * std::sin(phi), cth};
      const Vec3 z = ct * omega;
      const Vec3 y = x + z;
      const double bx = bump(norm(y - p.center_x) / p.radius_x);
      const double wq = gl.w[i] * (2.0 * M_PI / n_phi) * ct * ct;
      if (bx > 0.0) {
        const double amp = wq * p.amplitude * bx;
        out.e_dt += amp * s.tables.w_k(omega);
        out.b_dt += amp * s.tables.w_l(omega);
      }
      const SphereMoments mm = profile_moments(p, y);
      if (mm.rho == 0.0) continue;
      const Vec3 Pw = mm.P * omega;
      const double scal = dot(omega, mm.E0rho) - dot(mm.divP, omega);
      SphereTerms& a = out.st;
      a.zbar_dtt += wq * (soft::grad_zbar(z, delta) * Pw + scal * soft::zbar(z, delta));
      a.k3_dtt += wq * (soft::grad_k3(z, delta) * Pw + scal * soft::k3(z, delta));
      a.g1_dtj += (wq * soft::g1(z, delta)) * Pw;
      a.k3_dtrho += (wq * dot(omega, mm.j)) * soft::k3(z, delta);
      a.k3_cross_dtj += wq * cross(soft::k3(z, delta), Pw);
      a.omega_rho += (wq * mm.rho) * omega;
      a.omega_cross_j += wq * cross(omega, mm.j);
    }
  }
  return out;
}

std::size_t data_exclude(const RVMState& s, const Vec3& x, std::size_t self) {
  if (self == no_exclude) return no_exclude;
  return (norm(x - s.markers0[self].x) <
          self_cut * s.e.softening.delta)
             ? self
             : no_exclude;
}

Vec3 assemble_data_e(const RVMState& s, const MomentSums& ms, const SphereTerms& st,
                     double t, double ct) {
  const double c = s.e.c, ic2 = 1.0 / (c * c);
  Vec3 out = -ms.k3_rho;
  if (ct > 0.0) out += (1.0 / ct) * st.omega_rho;
  out += (0.5 * ic2) * (ms.zbar_dtt_rho + st.zbar_dtt);
  out -= (0.5 * t * t) * (ms.k3_dtt_rho + st.k3_dtt);
  out -= ic2 * (ms.g1_dtj + st.g1_dtj);
  out -= t * (ms.k3_dt_rho + st.k3_dtrho);
  return out;
}

Vec3 assemble_data_b(const RVMState& s, const MomentSums& ms, const SphereTerms& st,
                     double t, double ct) {
  const double c = s.e.c, ic = 1.0 / c;
  Vec3 out = ic * ms.k3_cross_j + (ic * t) * (ms.k3_cross_dtj + st.k3_cross_dtj);
  if (ct > 0.0) out -= (1.0 / (c * ct)) * st.omega_cross_j;
  return out;
}

}  // namespace

Vec3 data_term_e(const RVMState& s, const Vec3& x, double t, std::size_t self) {
  const double td = t - s.t0;
  const double ct = s.e.c * td;
  const MomentSums ms = moment_sums(s.markers0, s.e0m0, x, s.e.softening.delta,
                                    ct, data_exclude(s, x, self));
  const GSSphere sp = gs_sphere(s, x, ct, 32, 64);
  return assemble_data_e(s, ms, sp.st, td, ct);
}

Vec3 data_term_b(const RVMState& s, const Vec3& x, double t, std::size_t self) {
  const double td = t - s.t0;
  const double ct = s.e.c * td;
  const MomentSums ms = moment_sums(s.markers0, s.e0m0, x, s.e.softening.delta,
                                    ct, data_exclude(s, x, self));
  const GSSphere sp = gs_sphere(s, x, ct, 32, 64);
  return assemble_data_b(s, ms, sp.st, td, ct);
}

EBPair fields_gs(const RVMState& s, const Vec3& x, double t, std::size_t self,
                 double* warm_row) {
  const double c = s.e.c, delta = s.e.softening.delta;
  const double ic = 1.0 / c, ic2 = ic * ic;
  const double td = t - s.t0;
  const double ct = c * td;
  const std::size_t n = s.e.size();
  const bool probe = (self == no_exclude);

  // data + DT parts
  const MomentSums ms = moment_sums(s.markers0, s.e0m0, x, delta, ct,
                                    data_exclude(s, x, self));
  const GSSphere sp = gs_sphere(s, x, ct, probe ? 32 : 24, probe ? 64 : 48);

  EBPair out;
  out.E = assemble_data_e(s, ms, sp.st, td, ct);
  out.B = assemble_data_b(s, ms, sp.st, td, ct);
  if (sp.active) {
    out.E -= (1.0 / ct) * sp.e_dt;
    out.B += (1.0 / ct) * sp.b_dt;
  }

  // retarded T and S sums
  if (ct > 0.0) {
    double warm_local = s.t0 + 0.5 * td;
    struct EB {
      Vec3 E, B;
      EB operator+(const EB& o) const { return {E + o.E, B + o.B}; }
      EB& operator+=(const EB& o) { return *this = *this + o; }
    };
    const EB ts = chunked_sum<EB>(n, [&](std::size_t j) -> EB {
      const MarkerTrack& tr = s.track[j];
      double& warm = warm_row ? warm_row[j] : warm_local;
      if (!retarded_time(tr, x, t, c, warm)) return {};
      const double sr = warm;
      const Vec3 z = tr.pos(sr) - x;
      const double r = norm(z);
      if (j == self && r < self_cut * delta) return {};
      const Vec3 zh = unit_or_zero(z);
      const Vec3 vh = relativistic_velocity(tr.vel(sr), c);
      const double J = 1.0 + dot(zh, tr.pos_deriv(sr)) * ic;
      const double w = s.e.markers[j].w;
      const double q2 = soft::q2(z, delta), g1 = soft::g1(z, delta);
      const GSKernelInputs in{zh, vh, c};
      const Vec3 F = tr.field_e(sr) + ic * cross(vh, tr.field_b(sr));
      EB term;
      term.E = (-w * q2 / J) * gs_k_t(in) - (ic2 * w * g1 / J) * (gs_k_s(in) * F);
      term.B = (ic * w * q2 / J) * gs_l_t(in) + (ic2 * w * g1 / J) * gs_l_s(in, F);
      // O(delta^2) counterterms: the sharp kernels above expand against the
      // sharp Coulomb field, but all instantaneous comparisons use the
      // softened Darwin forms; the mismatch shifts the 1/c and 1/c^2 contents
      // by multiples of eps = delta^2 / s.
      const double eps = 1.0 - norm2(z) / soft::s_of(z, delta);
      const double mu = dot(zh, vh);
      term.E += (w / J) *
                ((-3.0 * ic * q2 * eps * mu) * zh +
                 ic2 * (soft::k_quad(z, delta, vh) -
                        q2 * (2.0 * mu * vh + (norm2(vh) - 3.0 * mu * mu) * zh) +
                        soft::k_force(z, delta, F) -
                        g1 * (dot(zh, F) * zh - F)));
      term.B += (w * ic2 / J) *
                (3.0 * q2 * eps * mu * cross(zh, vh) - g1 * eps * cross(zh, F));
      return term;
    });
    out.E += ts.E;
    out.B += ts.B;
  }
  return out;
}

Vec3 field_e_gs(const RVMState& s, const Vec3& x, double t) {
  return fields_gs(s, x, t).E;
}

Vec3 field_b_gs(const RVMState& s, const Vec3& x, double t) {
  return fields_gs(s, x, t).B;
}

RVMState make_rvm_state(const LVPState& s0, double c, double dt,
                        double preroll_ct) {
  if (std::abs(s0.base.e.t) > 1e-15)
    throw std::invalid_argument("make_rvm_state: source state not at t = 0");
  RVMState s;
  s.profile = s0.base.profile;
  s.e = s0.base.e;
  s.e.kind = EnsembleKind::RVM;
  s.e.c = c;
  for (Marker& m : s.e.markers) m.w2 = 0.0;
  s.dt_log = dt;
  s.markers0 = s.e.markers;
  const std::size_t n = s.e.size();
  s.e0m0.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.e0m0[i] = s0.base.log[i].back().E;
  s.tables = DTTables::build(s.profile, c);
  s.sret.assign(n * n, 0.0);

  // synthetic history for the pre-roll window (oldest first; empty without
  // pre-roll).  The linearized LVP flow run backward supplies positions,
  // velocities, and matched Darwin fields along each track.
  const int n_pre = (preroll_ct > 0.0)
                        ? static_cast<int>(std::ceil(preroll_ct / (c * dt)))
                        : 0;
  s.t0 = -n_pre * dt;
  std::vector<std::vector<TrackKnot>> pre(n_pre);
  if (n_pre > 0) {
    const double ic = 1.0 / c, ic2 = ic * ic;
    LVPState b = s0;
    for (int k = 0; k < n_pre; ++k) {
      step_lvp(b, -dt);
      std::vector<TrackKnot>& row = pre[k];
      row.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Marker& m = b.base.e.markers[i];
        TrackKnot kn;
        kn.x = m.x;
        kn.v = m.v;
        kn.E = field_e0(b.base, m.x) + ic2 * field_e2_disp(b, m.x, i);
        kn.B = ic * field_b1(b.base, m.x);
        kn.xdot = m.v;
        kn.vdot = kn.E + ic * cross(kn.xdot, kn.B);
        kn.xi = b.xi[i];
        row[i] = kn;
      }
    }
    // the data surface moves with the history: freeze the oldest state
    for (std::size_t i = 0; i < n; ++i) {
      s.markers0[i] = b.base.e.markers[i];
      s.e0m0[i] = b.base.log[i].back().E;
    }
  }

  const DarwinFields ic_fields = matched_initial_fields(s0, c);
  s.track.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.track.emplace_back(s.t0, dt);
    for (int k = n_pre - 1; k >= 0; --k) s.track[i].append(pre[k][i]);
    const Marker& m = s.e.markers[i];
    TrackKnot k;
    k.x = m.x;
    k.v = m.v;
    k.E = ic_fields.E(m.x, i);
    k.B = ic_fields.B(m.x, i);
    k.xdot = relativistic_velocity(m.v, c);
    k.vdot = k.E + (1.0 / c) * cross(k.xdot, k.B);
    s.track[i].append(k);
  }
  return s;
}

void step_rvm(RVMState& s, double dt) {
  const std::size_t n = s.e.size();
  const double c = s.e.c, t0 = s.e.t;

  std::vector<Vec3> x(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = s.e.markers[i].x;
    v[i] = s.e.markers[i].v;
  }

  std::vector<Vec3> kx[4], kv[4];
  for (int st = 0; st < 4; ++st) {
    const double a = (st == 0) ? 0.0 : (st == 3) ? 1.0 : 0.5;
    kx[st].resize(n);
    kv[st].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 X = (st == 0) ? x[i] : x[i] + (a * dt) * kx[st - 1][i];
      const Vec3 V = (st == 0) ? v[i] : v[i] + (a * dt) * kv[st - 1][i];
      const Vec3 vh = relativistic_velocity(V, c);
      kx[st][i] = vh;
      if (st == 0) {
        // the committed knot already holds the fields at (x_i, t0)
        const TrackKnot& k0 = s.track[i].back();
        kv[st][i] = k0.E + (1.0 / c) * cross(vh, k0.B);
      } else {
        const EBPair f = fields_gs(s, X, t0 + a * dt, i, &s.sret[i * n]);
        kv[st][i] = f.E + (1.0 / c) * cross(vh, f.B);
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    s.e.markers[i].x =
        x[i] + (dt / 6.0) * (kx[0][i] + 2.0 * kx[1][i] + 2.0 * kx[2][i] + kx[3][i]);
    s.e.markers[i].v =
        v[i] + (dt / 6.0) * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
  }
  s.e.t = t0 + dt;

  // record the new knot (fields still read the frozen history, one-segment
  // extrapolation past the newest knot)
  std::vector<TrackKnot> knots(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Marker& m = s.e.markers[i];
    const EBPair f = fields_gs(s, m.x, s.e.t, i, &s.sret[i * n]);
    TrackKnot k;
    k.x = m.x;
    k.v = m.v;
    k.E = f.E;
    k.B = f.B;
    k.xdot = relativistic_velocity(m.v, c);
    k.vdot = f.E + (1.0 / c) * cross(k.xdot, f.B);
    knots[i] = k;
  }
  for (std::size_t i = 0; i < n; ++i) s.track[i].append(knots[i]);
}

FieldSplit e_decomposition(const RVMState& s, const Vec3& x, double t) {
  const double c = s.e.c, delta = s.e.softening.delta;
  const double ic = 1.0 / c, ic2 = ic * ic;
  const double td = t - s.t0;
  const double ct = c * td;
  const std::size_t n = s.e.size();

  FieldSplit out;
  const MomentSums ms = moment_sums(s.markers0, s.e0m0, x, delta, ct, no_exclude);
  SphereTerms st;
  if (ct > 0.0 && std::abs(norm(x - s.profile.center_x) - ct) < s.profile.radius_x)
    st = sphere_terms(
        x, ct, delta,
        [&](const Vec3& y, const Vec3&) { return profile_moments(s.profile, y); },
        32, 64);
  out.ext = -(ms.k3_rho + td * (ms.k3_dt_rho + st.k3_dtrho) +
              0.5 * td * td * (ms.k3_dtt_rho + st.k3_dtt)) +
            (0.5 * ic2) * (ms.zbar_dtt_rho + st.zbar_dtt) -
            ic2 * (ms.g1_dtj + st.g1_dtj);

  if (ct > 0.0) {
    double warm = s.t0 + 0.5 * td;
    out.interior = chunked_sum<Vec3>(n, [&](std::size_t j) {
      const MarkerTrack& tr = s.track[j];
      if (!retarded_time(tr, x, t, c, warm)) return Vec3{};
      const double sr = warm;
      const Vec3 z = tr.pos(sr) - x;
      const Vec3 zh = unit_or_zero(z);
      const Vec3 vs = tr.vel(sr);
      const double J = 1.0 + dot(zh, tr.pos_deriv(sr)) * ic;
      const double w = s.e.markers[j].w / J;
      Vec3 term = -w * soft::k3(z, delta);
      term -= (ic * w) * soft::k_drift(z, delta, vs);
      term += (ic2 * w) * soft::k_quad(z, delta, vs);
      term += (ic2 * w) * soft::k_force(z, delta, tr.field_e(sr));
      return term;
    });
  }

  out.bd = bd_term(s.profile, x, t, c, delta);
  return out;
}

Vec3 expanded_field_e(const RVMState& s, const Vec3& x, double t) {
  return e_decomposition(s, x, t).sum();
}

double eval_f(const RVMState& s, const Vec3& x, const Vec3& v) {
  const double t = s.e.t, c = s.e.c;
  if (t <= 0.0) return s.profile.value(x, v);
  const int nst = std::max(1, (int)std::lround(t / s.dt_log));
  const double h = -t / nst;

  Vec3 Y = x, U = v;
  for (int step = 0; step < nst; ++step) {
    const double tc = t + step * h;
    Vec3 dY[4], dU[4];
    auto eval = [&](const Vec3& Yc, const Vec3& Uc, double ts, Vec3& dy, Vec3& du) {
      const EBPair f = fields_gs(s, Yc, ts);
      const Vec3 vh = relativistic_velocity(Uc, c);
      dy = vh;
      du = f.E + (1.0 / c) * cross(vh, f.B);
    };
    eval(Y, U, tc, dY[0], dU[0]);
    eval(Y + 0.5 * h * dY[0], U + 0.5 * h * dU[0], tc + 0.5 * h, dY[1], dU[1]);
    eval(Y + 0.5 * h * dY[1], U + 0.5 * h * dU[1], tc + 0.5 * h, dY[2], dU[2]);
    eval(Y + h * dY[2], U + h * dU[2], tc + h, dY[3], dU[3]);
    Y = Y + (h / 6.0) * (dY[0] + 2.0 * dY[1] + 2.0 * dY[2] + dY[3]);
    U = U + (h / 6.0) * (dU[0] + 2.0 * dU[1] + 2.0 * dU[2] + dU[3]);
  }
  return s.profile.value(Y, U);
}

}  // namespace dk
