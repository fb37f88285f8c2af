// Acceptance harness: one line per criterion, exit 0 iff all pass.
// Criteria marked with the tolerances pinned below; every check prints the
// measured quantity so a failure is diagnosable from the log alone.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dk/harness.hpp"

using namespace dk;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int n_pass = 0, n_fail = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %d (%s): %s  [%s]\n", id, name, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  (pass ? n_pass : n_fail)++;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

RunConfig standard_config() {
  RunConfig cfg;  // defaults are the standard bump configuration
  cfg.profile.amplitude = 5.0;
  cfg.profile.radius_x = 1.0;
  cfg.profile.radius_v = 0.6;
  cfg.profile.center_v = {0.0, 0.0, 0.4};
  cfg.out_dir = (fs::temp_directory_path() / "dk-acceptance").string();
  return cfg;
}

// ---------------------------------------------------------------- criterion 1
void criterion_appendix_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0, worst_cd = 0.0;
  for (const Vec3 z : {Vec3{0.4, -0.2, 0.1}, Vec3{1.8, 0.6, -0.3}, Vec3{0.0, 0.0, 2.9},
                       Vec3{0.97, 0.0, 0.0}}) {
    const double r = 1.0;
    const Vec3 inv = sphere_quadrature(r, 96, 192, [&](const Vec3& o) {
      return Vec3{1.0, 0.0, 0.0} * (1.0 / norm(z - r * o));
    });
    worst = std::max(worst, std::abs(inv.x - r * r * sphere_mean_inverse(z, r)) /
                                std::abs(inv.x));
    const Vec3 grad = sphere_quadrature(r, 96, 192, [&](const Vec3& o) {
      const Vec3 d = z - r * o;
      const double dn = norm(d);
      return d * (1.0 / (dn * dn * dn));
    });
    const Vec3 gref = r * r * sphere_mean_gradient(z, r);
    worst = std::max(worst, norm(grad - gref) / (norm(gref) + 1.0));
    const Vec3 lin = sphere_quadrature(r, 96, 192, [&](const Vec3& o) {
      const Vec3 d = z - r * o;
      return d * (1.0 / norm(d));
    });
    worst = std::max(worst, norm(lin - r * r * sphere_mean_linear(z, r)) /
                                norm(r * r * sphere_mean_linear(z, r)));
  }
  for (const Vec3 z : {Vec3{0.7, 0.1, -0.4}, Vec3{-1.1, 2.0, 0.3}, Vec3{0.2, 0.2, 0.2}}) {
    const Vec3 ref = coulomb_direction_quadrature(z, 1e-4, 1e4, 48);
    worst_cd = std::max(worst_cd,
                        norm(coulomb_direction_integral(z) - ref) / (norm(z) + 1.0));
  }
  const double sec = seconds_since(t0);
  report(1, "appendix oracle suite",
         worst <= 1e-6 && worst_cd <= 1e-3 && sec < 60.0,
         fmt("sphere rel err %.2e <= 1e-6, direction rel err %.2e <= 1e-3, %.1f s",
             worst, worst_cd, sec));
}

// ---------------------------------------------------------------- criterion 2
Vec3 kdt_trunc(const Vec3& z, const Vec3& v, double c) {
  const double ic = 1.0 / c, zv = dot(z, v);
  return z - (ic * zv) * z + (ic * ic * zv * zv) * z - (ic * ic * zv) * v;
}
Vec3 kt_trunc(const Vec3& z, const Vec3& v, double c) {
  const double ic = 1.0 / c, zv = dot(z, v);
  return z + ic * (v - 2.0 * zv * z) +
         (ic * ic) * ((3.0 * zv * zv - norm2(v)) * z - 2.0 * zv * v);
}
Vec3 ldt_trunc(const Vec3& z, const Vec3& v, double c) {
  const double ic = 1.0 / c;
  return (ic - ic * ic * dot(z, v)) * cross(z, v);
}
Vec3 lt_trunc(const Vec3& z, const Vec3& v, double c) {
  const double ic = 1.0 / c;
  return (ic - 2.0 * ic * ic * dot(z, v)) * cross(z, v);
}

void criterion_kernel_expansions() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // momenta at the support scale of the standard profile (|v| <= 1)
  std::uniform_real_distribution<double> uv(-0.6, 0.6);
  double min_order = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    Vec3 z{u(rng), u(rng), u(rng)};
    if (norm(z) < 1e-3) z = {1.0, 0.0, 0.0};
    z = unit_or_zero(z);
    const Vec3 v{uv(rng), uv(rng), uv(rng)};
    const Vec3 F{u(rng), u(rng), u(rng)};
    std::vector<std::pair<double, double>> rem[6];
    for (double c : {4.0, 8.0, 16.0, 32.0}) {
      const GSKernelInputs in{z, relativistic_velocity(v, c), c};
      const double ic2 = 1.0 / (c * c);
      rem[0].push_back({c, norm(gs_k_dt(in) - kdt_trunc(z, v, c))});
      rem[1].push_back({c, norm(gs_k_t(in) - kt_trunc(z, v, c))});
      rem[2].push_back({c, ic2 * norm(gs_k_s(in) * F - (F - dot(z, F) * z))});
      rem[3].push_back({c, norm(gs_l_dt(in) - ldt_trunc(z, v, c))});
      rem[4].push_back({c, norm((1.0 / c) * gs_l_t(in) - lt_trunc(z, v, c))});
      rem[5].push_back({c, ic2 * norm(gs_l_s(in, F) - cross(z, F))});
    }
    for (auto& r : rem) {
      const SlopeFit fit = fit_slope(r);
      if (!fit.below_floor) min_order = std::min(min_order, fit.order);
    }
  }
  const double sec = seconds_since(t0);
  report(2, "kernel expansion suite", min_order >= 2.7 && sec < 60.0,
         fmt("min remainder order %.3f >= 2.7 over 100 inputs x 6 kernels, %.1f s",
             min_order, sec));
}

// ----------------------------------------------------------- criteria 3, 4, 5
bool in_range(const SlopeFit& f, double lo, double hi) {
  return !f.below_floor && f.order >= lo && f.order <= hi;
}

void criteria_orders(const RunConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  const ConvergenceReport base = convergence_study(cfg);
  const double sec_base = seconds_since(t0);

  report(3, "newtonian-limit order", in_range(base.e0, 0.8, 1.4),
         fmt("sup(|E-E0|+|B|) order %.3f in [0.8,1.4], %.0f s", base.e0.order,
             sec_base));

  // time-resolution doubling guard on the same ladder
  t0 = std::chrono::steady_clock::now();
  RunConfig fine = cfg;
  fine.dt = 0.5 * cfg.dt;
  const ConvergenceReport ref = convergence_study(fine);
  const double sec_fine = seconds_since(t0);
  const double dE_shift = std::abs(base.dE.order - ref.dE.order);
  const double dB_shift = std::abs(base.dB.order - ref.dB.order);
  const double df_shift = std::abs(base.df.order - ref.df.order);
  const bool guard_ok = dE_shift < 0.2 && dB_shift < 0.2 && df_shift < 0.2;

  report(4, "darwin order",
         in_range(base.dE, 2.5, 3.5) && in_range(base.dB, 2.5, 3.5) &&
             in_range(base.df, 2.5, 3.5) && guard_ok,
         fmt("orders E %.3f B %.3f f %.3f in [2.5,3.5]; dt/2 shifts %.3f/%.3f/%.3f "
             "< 0.2, %.0f+%.0f s",
             base.dE.order, base.dB.order, base.df.order, dE_shift, dB_shift,
             df_shift, sec_base, sec_fine));

  report(5, "dvm proximity",
         in_range(base.dvm_dE, 2.5, 3.5) && in_range(base.dvm_dB, 2.5, 3.5) &&
             in_range(base.dvm_df, 2.5, 3.5),
         fmt("orders E* %.3f B* %.3f f* %.3f in [2.5,3.5] (same ladder)",
             base.dvm_dE.order, base.dvm_dB.order, base.dvm_df.order));
}

// ---------------------------------------------------------------- criterion 6
double dvm_drift(const RunConfig& cfg, double dt, double* seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  DVMState s =
      make_dvm_state(cfg.profile, cfg.n_per_axis, cfg.softening, 4.0, dt, false);
  // kinetic + electrostatic + the pairwise/self split of the magnetic energy:
  // a consistent discrete invariant that is cheap enough to sample often
  auto H = [&] {
    const DVMEnergy en = dvm_energy(s);
    double self = 0.0;
    for (const Marker& m : s.e.markers) {
      const double v2 = norm2(m.v);
      const double f = 1.0 - 0.5 * v2 / (s.e.c * s.e.c);
      self += bstar_self_energy(m.w, v2 * f * f, s.e.softening.delta, s.e.c);
    }
    return en.kin + en.es + pairwise_magnetic_energy(s.e) + self;
  };
  const double H0 = H();
  const int nst = (int)(cfg.t_end / dt + 0.5);
  double worst = 0.0;
  for (int k = 0; k < nst; ++k) {
    step_dvm(s, dt);
    if ((k + 1) % 50 == 0 || k + 1 == nst)
      worst = std::max(worst, std::abs(H() - H0) / std::abs(H0));
  }
  *seconds = seconds_since(t0);
  return worst;
}

void criterion_dvm_energy(const RunConfig& cfg) {
  double s1 = 0.0, s2 = 0.0;
  const double d1 = dvm_drift(cfg, 1e-3, &s1);
  const double d2 = dvm_drift(cfg, 5e-4, &s2);
  const bool order_ok = d2 <= d1 / 3.0 || d1 <= 1e-10;
  report(6, "dvm energy conservation", d1 <= 1e-3 && order_ok,
         fmt("rel drift %.2e <= 1e-3 at dt=1e-3, halved-dt drift %.2e (order >= 2%s), "
             "%.0f+%.0f s",
             d1, d2, d1 <= 1e-10 ? "; at rounding floor" : "", s1, s2));
}

// ---------------------------------------------------------------- criterion 7
void criterion_rescaling(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (double eps : cfg.eps_list) {
    const RescaleReport r = rescale_equivalence_check(cfg, eps);
    const double tol =
        (eps == 1.0) ? 1e-12 : std::max(10.0 * r.err_estimate, 1e-9);
    const double res = std::max(std::max(r.sup_x, r.sup_v), std::max(r.sup_e, r.sup_b1));
    ok = ok && res <= tol;
    detail += fmt("eps=%g res %.2e tol %.2e; ", eps, res, tol);
  }
  // exact group property on the marker transform
  Ensemble e = sample_initial(cfg.profile, cfg.n_per_axis, cfg.softening);
  const Ensemble ab = rescale_ensemble(rescale_ensemble(e, 0.5), 0.5);
  const Ensemble once = rescale_ensemble(e, 0.25);
  double sup = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    sup = std::max(sup, norm(ab.markers[i].x - once.markers[i].x) /
                            (norm(once.markers[i].x) + 1.0));
    sup = std::max(sup, norm(ab.markers[i].v - once.markers[i].v));
  }
  ok = ok && sup <= 1e-12;
  report(7, "eps-rescaling equivalence", ok,
         detail + fmt("group residual %.2e <= 1e-12, %.0f s", sup,
                      seconds_since(t0)));
}

// ---------------------------------------------------------------- criterion 8
void criterion_structural(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Vec3> probes = spatial_probes(cfg);

  // t = 0 field reproduction at the smallest (hardest) c
  LVPState lvp0 = make_lvp_state(cfg.profile, cfg.n_per_axis, cfg.softening, cfg.dt);
  const double c0 = cfg.c_list.front();
  RVMState rvm0 = make_rvm_state(lvp0, c0, cfg.dt);
  const DarwinFields df = matched_initial_fields(lvp0, c0);
  double rep = 0.0, ref = 0.0;
  for (const Vec3& x : probes) {
    const EBPair eb = fields_gs(rvm0, x, 0.0);
    rep = std::max(rep, norm(eb.E - df.E(x)) + norm(eb.B - df.B(x)));
    ref = std::max(ref, norm(df.E(x)));
  }
  const bool rep_ok = rep <= 1e-8 * ref;

  // E2 two-form equivalence and w2 zero sum on a stepped state
  LVPState lvp = lvp0;
  const int nst = (int)(cfg.t_end / cfg.dt + 0.5);
  double w2_worst = 0.0;
  for (int k = 0; k < nst; ++k) {
    step_lvp(lvp, cfg.dt);
    if ((k + 1) % 50 == 0 || k + 1 == nst) {
      double ws = 0.0, wa = 0.0;
      for (const Marker& m : lvp.base.e.markers) {
        ws += m.w2;
        wa += std::abs(m.w2);
      }
      w2_worst = std::max(w2_worst, std::abs(ws) / std::max(wa, 1e-300));
    }
  }
  // two-form equivalence at t = 0: the kernel form and the moment form are
  // independent marker quadratures of the same field, compared in absolute
  // terms (the derivative-kernel quadrature is rough at interior probes; the
  // continuum equivalence itself is pinned by the unit-level delta^2 check)
  double e2d = 0.0;
  for (const Vec3& x : probes)
    e2d = std::max(e2d, norm(field_e2(lvp0, x) - field_e2_alt(lvp0, x)));
  const bool e2_ok = e2d <= 5e-3;
  const bool w2_ok = w2_worst <= 1e-10;

  // decomposition reconstruction slopes: darwin form on the stepped LVP
  std::vector<std::pair<double, double>> ed;
  for (double c : cfg.c_list) {
    double sup = 0.0;
    for (const Vec3& x : probes) {
      const FieldSplit fsp = ed_decomposition(lvp, x, c);
      sup = std::max(sup, norm(fsp.sum() - (field_e0(lvp.base, x) +
                                            (1.0 / (c * c)) * field_e2(lvp, x))));
    }
    ed.push_back({c, sup});
  }
  const SlopeFit ed_fit = fit_slope(ed);

  // and the maxwell form on short RVM histories (coarse marker grid)
  RunConfig small = cfg;
  small.n_per_axis = 3;
  small.dt = 1e-2;
  LVPState lvp_s = make_lvp_state(small.profile, 3, small.softening, small.dt);
  std::vector<std::pair<double, double>> eg;
  for (double c : small.c_list) {
    RVMState r = make_rvm_state(lvp_s, c, small.dt);
    for (int k = 0; k < 100; ++k) step_rvm(r, small.dt);
    double sup = 0.0;
    for (const Vec3& x : probes) {
      sup = std::max(sup, norm(e_decomposition(r, x, r.e.t).sum() -
                               field_e_gs(r, x, r.e.t)));
    }
    eg.push_back({c, sup});
  }
  const SlopeFit eg_fit = fit_slope(eg);
  const bool dec_ok = ed_fit.order >= 2.5 && eg_fit.order >= 2.5;

  report(8, "structural identities", rep_ok && e2_ok && w2_ok && dec_ok,
         fmt("t=0 reproduction %.2e <= 1e-8 rel, E2 forms %.2e <= 5e-3, "
             "|sum w2| %.2e <= 1e-10 rel, decomposition orders %.2f / %.2f >= 2.5, "
             "%.0f s",
             rep / std::max(ref, 1e-300), e2d, w2_worst,
             ed_fit.order, eg_fit.order, seconds_since(t0)));
}

// ---------------------------------------------------------------- criterion 9
std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void criterion_determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path base = fs::temp_directory_path() / "dk-acceptance-det";
  fs::remove_all(base);
  const std::string common =
      "[numerics]\nn_per_axis = 3\ndt = 1e-2\nt_end = 0.2\n"
      "[profile]\namplitude = 5.0\nradius_x = 1.0\nradius_v = 0.6\n"
      "center_v = 0 0 0.4\n[ladder]\nc_list = 4 8\n[output]\ndir = ";
  bool ok = true;
  std::string detail;
  for (const char* sub : {"run-vp", "integrals-selftest", "run-dvm"}) {
    std::vector<fs::path> dirs;
    for (const char* tag : {"a", "b"}) {
      const std::string dir = (base / tag).string();
      const RunConfig cfg = parse_config_text(common + dir + "\n");
      int (*cmd)(const RunConfig&) =
          std::string(sub) == "run-vp"
              ? cmd_run_vp
              : (std::string(sub) == "run-dvm" ? cmd_run_dvm : cmd_integrals_selftest);
      cmd(cfg);
      dirs.push_back(fs::path(cfg.run_dir()));
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const std::string name = entry.path().filename().string();
      if (name == "timings.log") continue;
      if (slurp(entry.path()) != slurp(dirs[1] / name)) {
        ok = false;
        detail += fmt("%s/%s differs; ", sub, name.c_str());
      }
    }
  }
  report(9, "determinism", ok,
         (ok ? std::string("all CSVs bitwise identical across repeated runs")
             : detail) +
             fmt(", %.0f s", seconds_since(t0)));
}

}  // namespace

int main() {
  const RunConfig cfg = standard_config();
  std::printf("standard configuration: n_per_axis=%d dt=%g t_end=%g delta=%g "
              "c={4,8,16,32}\n",
              cfg.n_per_axis, cfg.dt, cfg.t_end, cfg.softening.delta);

  criterion_appendix_oracles();
  criterion_kernel_expansions();
  criterion_determinism();
  criterion_rescaling(cfg);
  criterion_dvm_energy(cfg);
  criterion_structural(cfg);
  criteria_orders(cfg);

  std::printf("%d passed, %d failed\n", n_pass, n_fail);
  return n_fail == 0 ? 0 : 1;
}
