#pragma once

#include <string>
#include <vector>

#include "dk/profile.hpp"
#include "dk/softening.hpp"
#include "dk/vec.hpp"

namespace dk {

// sentinel for field sums that skip no source marker
inline constexpr std::size_t no_exclude = static_cast<std::size_t>(-1);

struct Marker {
  Vec3 x;
  Vec3 v;
  double w = 0.0;   // charge weight (>= 0)
  double w2 = 0.0;  // delta-f weight, LVP only
};

enum class EnsembleKind { VP, LVP, DVM, RVM };

struct Ensemble {
  std::vector<Marker> markers;
  Softening softening;
  double t = 0.0;
  double c = 0.0;  // 0 = no speed of light attached (VP/LVP)
  EnsembleKind kind = EnsembleKind::VP;

  std::size_t size() const { return markers.size(); }
};

enum class CurrentConvention { newtonian, darwin, relativistic };

// deterministic midpoint-grid sampling of f° on the 6-d support box;
// markers below 1e-16 * max weight are culled at initialization only
Ensemble sample_initial(const InitialProfile& profile, int n_per_axis,
                        const Softening& softening);

double total_charge(const Ensemble& e);
double charge_density(const Ensemble& e, const Vec3& x);
Vec3 current_density(const Ensemble& e, const Vec3& x, CurrentConvention conv);
// analytic divergence of the mollified newtonian current
double div_current_density(const Ensemble& e, const Vec3& x);

struct SupportRadius {
  double R_x = 0.0;
  double R_v = 0.0;
};
SupportRadius support_radius(const Ensemble& e);

// CSV snapshot: header t,x1,x2,x3,v1,v2,v3,w,w2 at 17 significant digits
void write_ensemble_csv(const std::string& path, const Ensemble& e);

}  // namespace dk
