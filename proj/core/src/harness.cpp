#include "dk/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dk {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const std::string& path, const std::string& text) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write " + path);
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

void write_timings(const std::string& dir, const std::vector<std::pair<std::string, double>>& phases) {
  std::FILE* f = std::fopen((dir + "/timings.log").c_str(), "w");
  if (!f) return;
  for (const auto& [name, sec] : phases) std::fprintf(f, "%s %.3f s\n", name.c_str(), sec);
  std::fclose(f);
}

int steps_of(const RunConfig& cfg) {
  return std::max(1, (int)std::lround(cfg.t_end / cfg.dt));
}

}  // namespace

std::vector<Vec3> spatial_probes(const RunConfig& cfg) {
  std::vector<Vec3> out;
  const int n = std::max(1, cfg.box_n);
  out.reserve((std::size_t)n * n * n);
  const Vec3 d = (cfg.box_hi - cfg.box_lo) / double(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out.push_back(cfg.box_lo + Vec3{(i + 0.5) * d.x, (j + 0.5) * d.y, (k + 0.5) * d.z});
  return out;
}

std::vector<PhaseProbe> phase_probes(const VPState& s, int n) {
  std::vector<PhaseProbe> out;
  const std::size_t N = s.e.size();
  if (N == 0 || n <= 0) return out;
  const std::size_t stride = std::max<std::size_t>(1, N / (std::size_t)n);
  for (std::size_t i = 0; i < N && out.size() < (std::size_t)n; i += stride)
    out.push_back({s.e.markers[i].x, s.e.markers[i].v});
  return out;
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& c_sup) {
  SlopeFit fit;
  std::vector<std::pair<double, double>> pts;
  for (const auto& [c, sup] : c_sup)
    if (sup > 1e-300) pts.push_back({std::log(c), std::log(sup)});
  if (pts.size() < 2) {
    fit.below_floor = true;
    return fit;
  }
  fit.two_point = (pts.size() == 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = (double)pts.size();
  const double den = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.order = -fit.slope;
  double ss = 0;
  for (const auto& [x, y] : pts) {
    const double r = y - (fit.slope * x + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

CompareResult compare_models(const RunConfig& cfg, double c) {
  const auto t0 = std::chrono::steady_clock::now();
  CompareResult res;
  res.c = c;

  const int nst = steps_of(cfg);
  LVPState lvp0 = make_lvp_state(cfg.profile, cfg.n_per_axis, cfg.softening, cfg.dt);
  RVMState rvm = make_rvm_state(lvp0, c, cfg.dt, cfg.preroll_ct);
  DVMState dvm;
  if (cfg.compare_dvm) {
    dvm = make_dvm_state(cfg.profile, cfg.n_per_axis, cfg.softening, c, cfg.dt);
    dvm.fp_tol = cfg.fp_tol;
    dvm.with_c4_term = cfg.dvm_c4_term;
  }
  LVPState lvp = lvp0;
  for (int k = 0; k < nst; ++k) {
    step_lvp(lvp, cfg.dt);
    step_rvm(rvm, cfg.dt);
    if (cfg.compare_dvm) step_dvm(dvm, cfg.dt);
  }
  const double T = rvm.e.t;

  for (const Vec3& x : spatial_probes(cfg)) {
    const Vec3 E = field_e_gs(rvm, x, T);
    const Vec3 B = field_b_gs(rvm, x, T);
    const Vec3 E0 = field_e0(lvp.base, x);
    const Vec3 ED = E0 + (1.0 / (c * c)) * field_e2_disp(lvp, x);
    const Vec3 BD = (1.0 / c) * field_b1(lvp.base, x);
    // the Newtonian-limit deficit carries its 1/c content in B; |E - E0|
    // alone starts at 1/c^2 (the Darwin correction), so the tracked quantity
    // is |E - E0| + |B|
    res.sup_e0 = std::max(res.sup_e0, norm(E - E0) + norm(B));
    res.darwin.E = std::max(res.darwin.E, norm(E - ED));
    res.darwin.B = std::max(res.darwin.B, norm(B - BD));
    if (cfg.compare_dvm) {
      res.dvm.E = std::max(res.dvm.E, norm(E - field_estar(dvm, x)));
      res.dvm.B = std::max(res.dvm.B, norm(B - field_bstar(dvm.e, x)));
    }
  }

  for (const PhaseProbe& p : phase_probes(lvp.base, cfg.n_phase_probes)) {
    const double f = eval_f(rvm, p.x, p.v);
    const DarwinTriple d = darwin_triple(lvp, p.x, p.v, c);
    res.darwin.f = std::max(res.darwin.f, std::abs(f - d.fD));
    if (cfg.compare_dvm)
      res.dvm.f = std::max(res.dvm.f, std::abs(f - eval_fstar(dvm, p.x, p.v)));
  }

  res.seconds = seconds_since(t0);
  return res;
}

ConvergenceReport convergence_study(const RunConfig& cfg) {
  if (cfg.c_list.size() < 2)
    throw std::invalid_argument("convergence_study: need at least two c values");
  ConvergenceReport rep;
  for (double c : cfg.c_list) rep.rungs.push_back(compare_models(cfg, c));

  auto pairs = [&](auto proj) {
    std::vector<std::pair<double, double>> out;
    for (const CompareResult& r : rep.rungs) out.push_back({r.c, proj(r)});
    return out;
  };
  rep.e0 = fit_slope(pairs([](const CompareResult& r) { return r.sup_e0; }));
  rep.dE = fit_slope(pairs([](const CompareResult& r) { return r.darwin.E; }));
  rep.dB = fit_slope(pairs([](const CompareResult& r) { return r.darwin.B; }));
  rep.df = fit_slope(pairs([](const CompareResult& r) { return r.darwin.f; }));
  if (cfg.compare_dvm) {
    rep.dvm_dE = fit_slope(pairs([](const CompareResult& r) { return r.dvm.E; }));
    rep.dvm_dB = fit_slope(pairs([](const CompareResult& r) { return r.dvm.B; }));
    rep.dvm_df = fit_slope(pairs([](const CompareResult& r) { return r.dvm.f; }));
  }
  return rep;
}

Ensemble rescale_ensemble(const Ensemble& e, double eps) {
  if (eps <= 0.0 || eps > 1.0)
    throw std::invalid_argument("rescale_ensemble: eps must lie in (0, 1]");
  Ensemble out = e;
  const double se = std::sqrt(eps);
  for (Marker& m : out.markers) {
    m.x = m.x * (1.0 / eps);
    m.v = m.v * se;
    m.w2 *= eps;
  }
  out.t = e.t * std::pow(eps, -1.5);
  out.softening.delta = e.softening.delta / eps;
  if (out.c > 0.0) out.c *= se;
  return out;
}

RescaleReport rescale_equivalence_check(const RunConfig& cfg, double eps) {
  RescaleReport rep;
  rep.eps = eps;
  const int nst = steps_of(cfg);

  VPState base = make_vp_state(cfg.profile, cfg.n_per_axis, cfg.softening, cfg.dt, false);
  for (int k = 0; k < nst; ++k) step_vp(base, cfg.dt);

  // dt-refinement integrator error scale of the base run
  {
    VPState half = make_vp_state(cfg.profile, cfg.n_per_axis, cfg.softening, 0.5 * cfg.dt, false);
    for (int k = 0; k < 2 * nst; ++k) step_vp(half, 0.5 * cfg.dt);
    for (std::size_t i = 0; i < base.e.size(); ++i) {
      rep.err_estimate = std::max(rep.err_estimate, norm(base.e.markers[i].x - half.e.markers[i].x));
      rep.err_estimate = std::max(rep.err_estimate, norm(base.e.markers[i].v - half.e.markers[i].v));
    }
  }

  const Ensemble rescaled = rescale_ensemble(base.e, eps);

  // the rescaled initial data is again a bump profile, so the grid sampler
  // reproduces the transformed markers exactly
  const double se = std::sqrt(eps);
  InitialProfile p2 = cfg.profile;
  p2.amplitude *= eps * se;
  p2.center_x = cfg.profile.center_x * (1.0 / eps);
  p2.radius_x = cfg.profile.radius_x / eps;
  p2.center_v = cfg.profile.center_v * se;
  p2.radius_v = cfg.profile.radius_v * se;
  const Softening soft2{cfg.softening.delta / eps};
  const double dt2 = cfg.dt * std::pow(eps, -1.5);

  VPState direct = make_vp_state(p2, cfg.n_per_axis, soft2, dt2, false);
  if (direct.e.size() != rescaled.markers.size())
    throw std::runtime_error("rescale_equivalence_check: marker count mismatch");
  for (int k = 0; k < nst; ++k) step_vp(direct, dt2);

  for (std::size_t i = 0; i < rescaled.markers.size(); ++i) {
    rep.sup_x = std::max(rep.sup_x, norm(direct.e.markers[i].x - rescaled.markers[i].x));
    rep.sup_v = std::max(rep.sup_v, norm(direct.e.markers[i].v - rescaled.markers[i].v));
  }

  // field relations: E'(x/eps) = eps^2 E(x), B1'(x/eps) = eps^{5/2} B1(x)
  for (const Vec3& x : spatial_probes(cfg)) {
    const Vec3 dE = field_e0(direct, x * (1.0 / eps)) - (eps * eps) * field_e0(base, x);
    const Vec3 dB = field_b1(direct, x * (1.0 / eps)) - (eps * eps * se) * field_b1(base, x);
    rep.sup_e = std::max(rep.sup_e, norm(dE));
    rep.sup_b1 = std::max(rep.sup_b1, norm(dB));
  }
  return rep;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);
  std::fprintf(f, "%s\n", header.c_str());
  for (const std::vector<double>& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      std::fprintf(f, "%s%.17g", i ? "," : "", row[i]);
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

// ---------------------------------------------------------------------------
// CLI drivers

int cmd_run_vp(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = cfg.run_dir();
  write_text(dir + "/config.txt", cfg.raw);

  VPState s = make_vp_state(cfg.profile, cfg.n_per_axis, cfg.softening, cfg.dt, false);
  write_ensemble_csv(dir + "/ensemble_t0.csv", s.e);

  const int nst = steps_of(cfg);
  const int every = std::max(1, nst / 10);
  const std::vector<Vec3> probes = spatial_probes(cfg);
  std::vector<std::vector<double>> rows;
  auto snapshot = [&]() {
    for (const Vec3& x : probes) {
      const Vec3 E = field_e0(s, x);
      rows.push_back({s.e.t, x.x, x.y, x.z, E.x, E.y, E.z});
    }
  };
  snapshot();
  for (int k = 0; k < nst; ++k) {
    step_vp(s, cfg.dt);
    if ((k + 1) % every == 0 || k + 1 == nst) snapshot();
  }
  write_csv(dir + "/probes.csv", "t,x1,x2,x3,E1,E2,E3", rows);
  write_ensemble_csv(dir + "/ensemble_final.csv", s.e);

  // free-streaming envelope: supp f(t) stays inside supp_x + t supp_v
  const SupportRadius sr = support_radius(s.e);
  const double bound = cfg.profile.support_bound_x() +
                       s.e.t * (sr.R_v + 1e-9) + cfg.softening.delta;
  write_timings(dir, {{"run-vp", seconds_since(t0)}});
  return (sr.R_x <= bound * 1.01) ? 0 : 1;
}

int cmd_run_darwin(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = cfg.run_dir();
  write_text(dir + "/config.txt", cfg.raw);

  LVPState s = make_lvp_state(cfg.profile, cfg.n_per_axis, cfg.softening, cfg.dt);
  write_ensemble_csv(dir + "/ensemble_t0.csv", s.base.e);

  const int nst = steps_of(cfg);
  const int every = std::max(1, nst / 10);
  const std::vector<Vec3> probes = spatial_probes(cfg);
  std::vector<std::vector<double>> rows;
  auto snapshot = [&]() {
    for (const Vec3& x : probes) {
      const Vec3 E = field_e0(s.base, x);
      rows.push_back({s.base.e.t, x.x, x.y, x.z, E.x, E.y, E.z});
    }
  };
  snapshot();
  for (int k = 0; k < nst; ++k) {
    step_lvp(s, cfg.dt);
    if ((k + 1) % every == 0 || k + 1 == nst) snapshot();
  }
  write_csv(dir + "/probes.csv", "t,x1,x2,x3,E1,E2,E3", rows);
  write_ensemble_csv(dir + "/ensemble_final.csv", s.base.e);

  // exterior/interior/boundary decomposition of E^D at the final time,
  // one block per c
  int bad = 0;
  std::vector<std::vector<double>> dec;
  for (double c : cfg.c_list) {
    double sup_err = 0.0, sup_full = 0.0;
    for (const Vec3& x : probes) {
      const FieldSplit fs = ed_decomposition(s, x, c);
      const Vec3 full = field_e0(s.base, x) + (1.0 / (c * c)) * field_e2(s, x);
      dec.push_back({c, s.base.e.t, x.x, x.y, x.z,
                     fs.ext.x, fs.ext.y, fs.ext.z,
                     fs.interior.x, fs.interior.y, fs.interior.z,
                     fs.bd.x, fs.bd.y, fs.bd.z,
                     full.x, full.y, full.z});
      sup_err = std::max(sup_err, norm(fs.sum() - full));
      sup_full = std::max(sup_full, norm(full));
    }
    if (sup_err > cfg.ibp_tol * std::max(sup_full, 1e-300)) ++bad;
  }
  write_csv(dir + "/decomposition.csv",
            "c,t,x1,x2,x3,ext1,ext2,ext3,int1,int2,int3,bd1,bd2,bd3,full1,full2,full3",
            dec);

  // delta-f weights must stay a zero-sum perturbation
  double w2_sum = 0.0, w2_abs = 0.0;
  for (const Marker& m : s.base.e.markers) {
    w2_sum += m.w2;
    w2_abs += std::abs(m.w2);
  }
  const bool w2_ok = std::abs(w2_sum) <= 1e-10 * std::max(w2_abs, 1e-300);

  write_timings(dir, {{"run-darwin", seconds_since(t0)}});
  return (bad == 0 && w2_ok) ? 0 : 1;
}

int cmd_run_dvm(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = cfg.run_dir();
  write_text(dir + "/config.txt", cfg.raw);

  DVMState s = make_dvm_state(cfg.profile, cfg.n_per_axis, cfg.softening,
                              cfg.c_list.front(), cfg.dt);
  s.fp_tol = cfg.fp_tol;
  s.with_c4_term = cfg.dvm_c4_term;
  const double c = s.e.c;

  const int nst = steps_of(cfg);
  std::vector<std::vector<double>> rows;
  double H0 = 0.0, drift = 0.0;
  // per-step energy logging uses the pairwise + closed-form-self magnetic
  // energy (whole space, O(n^2)); the quadrature evaluator is the
  // cross-check path, far too slow per step
  auto log_row = [&]() {
    double kin = 0.0, es = 0.0, mag = 0.0;
    const double ic2 = 1.0 / (c * c);
    for (const Marker& m : s.e.markers) {
      const double v2 = norm2(m.v);
      kin += m.w * (0.5 * v2 - 0.125 * ic2 * v2 * v2);
      const double vt2 = v2 * (1.0 - 0.5 * ic2 * v2) * (1.0 - 0.5 * ic2 * v2);
      mag += bstar_self_energy(m.w, vt2, s.e.softening.delta, c);
    }
    for (std::size_t i = 0; i < s.e.size(); ++i)
      for (std::size_t j = i + 1; j < s.e.size(); ++j)
        es += s.e.markers[i].w * s.e.markers[j].w *
              soft::g1(s.e.markers[i].x - s.e.markers[j].x, s.e.softening.delta);
    mag += pairwise_magnetic_energy(s.e);
    const double H = kin + es + mag;
    if (rows.empty()) H0 = H;
    drift = std::max(drift, std::abs(H - H0) / std::abs(H0));
    rows.push_back({s.e.t, H, kin, es, mag,
                    s.stats.residual, (double)s.stats.iterations});
  };
  log_row();
  for (int k = 0; k < nst; ++k) {
    step_dvm(s, cfg.dt);
    log_row();
  }
  write_csv(dir + "/energy.csv", "t,H_total,H_kin,H_es,H_mag,residual,iters", rows);
  write_ensemble_csv(dir + "/ensemble_final.csv", s.e);
  write_timings(dir, {{"run-dvm", seconds_since(t0)}});
  return (drift <= 1e-3) ? 0 : 1;
}

int cmd_run_rvm(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = cfg.run_dir();
  write_text(dir + "/config.txt", cfg.raw);

  LVPState ic = make_lvp_state(cfg.profile, cfg.n_per_axis, cfg.softening, cfg.dt);
  RVMState s = make_rvm_state(ic, cfg.c_list.front(), cfg.dt, cfg.preroll_ct);
  write_ensemble_csv(dir + "/ensemble_t0.csv", s.e);

  const int nst = steps_of(cfg);
  const int every = std::max(1, nst / 10);
  const std::vector<Vec3> probes = spatial_probes(cfg);
  std::vector<std::vector<double>> rows;
  auto snapshot = [&]() {
    for (const Vec3& x : probes) {
      const EBPair f = fields_gs(s, x, s.e.t);
      rows.push_back({s.e.t, x.x, x.y, x.z, f.E.x, f.E.y, f.E.z, f.B.x, f.B.y, f.B.z});
    }
  };
  snapshot();
  for (int k = 0; k < nst; ++k) {
    step_rvm(s, cfg.dt);
    if ((k + 1) % every == 0 || k + 1 == nst) snapshot();
  }
  write_csv(dir + "/probes.csv", "t,x1,x2,x3,E1,E2,E3,B1,B2,B3", rows);
  write_ensemble_csv(dir + "/ensemble_final.csv", s.e);

  // momenta must stay well inside the light cone
  double vmax = 0.0;
  for (const Marker& m : s.e.markers)
    vmax = std::max(vmax, norm(relativistic_velocity(m.v, s.e.c)));
  write_timings(dir, {{"run-rvm", seconds_since(t0)}});
  return (vmax < 0.999 * s.e.c) ? 0 : 1;
}

int cmd_converge(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = cfg.run_dir();
  write_text(dir + "/config.txt", cfg.raw);

  const ConvergenceReport rep = convergence_study(cfg);

  std::vector<std::vector<double>> rows;
  for (const CompareResult& r : rep.rungs)
    rows.push_back({r.c, r.sup_e0, r.darwin.E, r.darwin.B, r.darwin.f,
                    r.dvm.E, r.dvm.B, r.dvm.f, r.seconds});
  write_csv(dir + "/convergence.csv",
            "c,sup_e0,sup_dE,sup_dB,sup_df,sup_dE_star,sup_dB_star,sup_df_star,seconds",
            rows);

  std::FILE* f = std::fopen((dir + "/slopes.csv").c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + dir + "/slopes.csv");
  std::fprintf(f, "which,order,slope,intercept,residual,two_point,below_floor\n");
  auto put = [&](const char* name, const SlopeFit& s) {
    std::fprintf(f, "%s,%.17g,%.17g,%.17g,%.17g,%d,%d\n", name, s.order, s.slope,
                 s.intercept, s.residual, (int)s.two_point, (int)s.below_floor);
  };
  put("e0", rep.e0);
  put("darwin_E", rep.dE);
  put("darwin_B", rep.dB);
  put("darwin_f", rep.df);
  if (cfg.compare_dvm) {
    put("dvm_E", rep.dvm_dE);
    put("dvm_B", rep.dvm_dB);
    put("dvm_f", rep.dvm_df);
  }
  std::fclose(f);

  auto in_range = [](const SlopeFit& s, double lo, double hi) {
    return !s.below_floor && s.order >= lo && s.order <= hi;
  };
  bool ok = in_range(rep.e0, 0.8, 1.4) && in_range(rep.dE, 2.5, 3.5) &&
            in_range(rep.dB, 2.5, 3.5) && in_range(rep.df, 2.5, 3.5);
  if (cfg.compare_dvm)
    ok = ok && in_range(rep.dvm_dE, 2.5, 3.5) && in_range(rep.dvm_dB, 2.5, 3.5) &&
         in_range(rep.dvm_df, 2.5, 3.5);
  write_timings(dir, {{"converge", seconds_since(t0)}});
  return ok ? 0 : 1;
}

int cmd_rescale_check(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = cfg.run_dir();
  write_text(dir + "/config.txt", cfg.raw);

  bool ok = true;
  std::vector<std::vector<double>> rows;
  for (double eps : cfg.eps_list) {
    const RescaleReport r = rescale_equivalence_check(cfg, eps);
    rows.push_back({r.eps, r.sup_x, r.sup_v, r.sup_e, r.sup_b1, r.err_estimate});
    const double tol = std::max(10.0 * r.err_estimate, 1e-9);
    if (r.sup_x > tol || r.sup_v > tol || r.sup_e > tol || r.sup_b1 > tol) ok = false;
    if (eps == 1.0 &&
        (r.sup_x > 1e-12 || r.sup_v > 1e-12 || r.sup_e > 1e-12 || r.sup_b1 > 1e-12))
      ok = false;
  }
  write_csv(dir + "/rescale.csv", "eps,sup_x,sup_v,sup_E,sup_B1,err_estimate", rows);

  // group property of the transform family
  {
    Ensemble e = sample_initial(cfg.profile, cfg.n_per_axis, cfg.softening);
    const Ensemble two = rescale_ensemble(rescale_ensemble(e, 0.5), 0.5);
    const Ensemble one = rescale_ensemble(e, 0.25);
    double sup = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      sup = std::max(sup, norm(two.markers[i].x - one.markers[i].x));
      sup = std::max(sup, norm(two.markers[i].v - one.markers[i].v));
    }
    if (sup > 1e-12) ok = false;
  }
  write_timings(dir, {{"rescale-check", seconds_since(t0)}});
  return ok ? 0 : 1;
}

int cmd_integrals_selftest(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = cfg.run_dir();
  write_text(dir + "/config.txt", cfg.raw);

  std::FILE* f = std::fopen((dir + "/selftest.csv").c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + dir + "/selftest.csv");
  std::fprintf(f, "case,value,reference,rel_err,tol,pass\n");
  bool ok = true;
  auto check = [&](const std::string& name, double val, double ref, double scale,
                   double tol) {
    const double rel = std::abs(val - ref) / std::max(std::abs(scale), 1e-300);
    const bool pass = rel <= tol;
    ok = ok && pass;
    std::fprintf(f, "%s,%.17g,%.17g,%.3g,%.3g,%d\n", name.c_str(), val, ref, rel,
                 tol, (int)pass);
  };

  const std::vector<std::pair<Vec3, double>> cases = {
      {{0.3, 0.0, 0.0}, 1.0}, {{1.0, 0.2, -0.4}, 0.5}, {{2.0, 1.0, 0.5}, 1.2},
      {{0.0, 0.0, 1.5}, 0.7}, {{0.4, -0.3, 0.2}, 2.0}};
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& [z, r] = cases[k];
    const std::string id = std::to_string(k);
    // scalar mean via the x-slot of the vector quadrature
    const Vec3 qi = sphere_quadrature(1.0, 96, 192, [&](const Vec3& w) {
      return Vec3{1.0 / norm(z - r * w), 0.0, 0.0};
    });
    check("mean_inverse_" + id, sphere_mean_inverse(z, r), qi.x, qi.x, 1e-6);

    const Vec3 qg = sphere_quadrature(1.0, 96, 192, [&](const Vec3& w) {
      const Vec3 y = z - r * w;
      const double n = norm(y);
      return y * (1.0 / (n * n * n));
    });
    const Vec3 vg = sphere_mean_gradient(z, r);
    const double gscale = 4.0 * M_PI / std::max(norm2(z), r * r);
    check("mean_gradient_" + id, 0.0, norm(vg - qg), gscale, 1e-6);

    const Vec3 ql = sphere_quadrature(1.0, 96, 192, [&](const Vec3& w) {
      const Vec3 y = z - r * w;
      return y * (1.0 / norm(y));
    });
    const Vec3 vl = sphere_mean_linear(z, r);
    check("mean_linear_" + id, 0.0, norm(vl - ql), std::max(norm(ql), 1.0), 1e-6);

    if (norm(z) > 0.0) {
      const Vec3 qc = coulomb_direction_quadrature(z, 1e-3, 1e3, 32);
      const Vec3 vc = coulomb_direction_integral(z);
      check("coulomb_dir_" + id, 0.0, norm(vc - qc), norm(vc), 1e-3);
    }
  }
  std::fclose(f);
  write_timings(dir, {{"integrals-selftest", seconds_since(t0)}});
  return ok ? 0 : 1;
}

}  // namespace dk
