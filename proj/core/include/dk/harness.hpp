#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dk/config.hpp"
#include "dk/darwin.hpp"
#include "dk/dvm.hpp"
#include "dk/rvm.hpp"

namespace dk {

// midpoints of a box_n^3 grid over [box_lo, box_hi]
std::vector<Vec3> spatial_probes(const RunConfig& cfg);

struct PhaseProbe {
  Vec3 x, v;
};
// phase-space probe list riding the reference flow: stride-selected marker
// images of the (already stepped) state, guaranteed inside the transported
// support
std::vector<PhaseProbe> phase_probes(const VPState& s, int n);

struct SlopeFit {
  double slope = 0.0;  // d log(sup) / d log(c), negative for decay
  double order = 0.0;  // -slope
  double intercept = 0.0;
  double residual = 0.0;  // rms log-residual of the fit
  bool two_point = false;
  bool below_floor = false;  // all sups at / below the floor, no fit
};
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& c_sup);

struct SupNorms {
  double f = 0.0, E = 0.0, B = 0.0;
};

struct CompareResult {
  double c = 0.0;
  double sup_e0 = 0.0;  // sup |E - E0| over the box (Newtonian limit)
  SupNorms darwin;      // RVM vs the Darwin triple
  SupNorms dvm;         // RVM vs DVM (zero when the DVM leg is disabled)
  double seconds = 0.0;
};

// matched-discretization comparison at one c: identical f°, marker grid,
// delta and dt on every model
CompareResult compare_models(const RunConfig& cfg, double c);

struct ConvergenceReport {
  std::vector<CompareResult> rungs;
  SlopeFit e0, dE, dB, df;
  SlopeFit dvm_dE, dvm_dB, dvm_df;
};
ConvergenceReport convergence_study(const RunConfig& cfg);

// marker-level eps-scaling transform: x -> x/eps, v -> sqrt(eps) v,
// w2 -> eps w2, t -> eps^{-3/2} t, delta -> delta/eps, c -> sqrt(eps) c
Ensemble rescale_ensemble(const Ensemble& e, double eps);

struct RescaleReport {
  double eps = 0.0;
  double sup_x = 0.0, sup_v = 0.0;  // marker mismatch between the two runs
  double sup_e = 0.0, sup_b1 = 0.0; // probe residuals of the field relations
  double err_estimate = 0.0;        // dt-refinement integrator error scale
};
// runs the base config, rescales, and independently runs the rescaled
// initial data; the transform is an exact symmetry of the softened system,
// so the residual isolates rounding
RescaleReport rescale_equivalence_check(const RunConfig& cfg, double eps);

// CSV at 17 significant digits; header row verbatim
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

// CLI drivers.  Return 0 (checks passed) or 1 (tolerance failure); solver
// errors propagate as exceptions, mapped to exit code 2 by the binary.
int cmd_run_vp(const RunConfig& cfg);
int cmd_run_darwin(const RunConfig& cfg);
int cmd_run_dvm(const RunConfig& cfg);
int cmd_run_rvm(const RunConfig& cfg);
int cmd_converge(const RunConfig& cfg);
int cmd_rescale_check(const RunConfig& cfg);
int cmd_integrals_selftest(const RunConfig& cfg);

}  // namespace dk
