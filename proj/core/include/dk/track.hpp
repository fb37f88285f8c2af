#pragma once

#include <stdexcept>
#include <vector>

#include "dk/vec.hpp"

namespace dk {

// Dense-output trajectory record for one marker: uniform-dt knots carrying
// state, state derivatives (for C1 Hermite interpolation), and the fields
// seen by the marker.  Appending is the only mutation; evaluation at
// s in (t_end, t_end + dt] extrapolates the last segment so that RK4
// substages just beyond the frozen history remain well defined.
struct TrackKnot {
  Vec3 x, v;
  Vec3 xdot, vdot;  // dx/dt (v or vhat), dv/dt (the force)
  Vec3 E, B;
  double w2 = 0.0;
  Vec3 xi;  // linearized order-c^-2 position displacement (delta-f states)
};

class MarkerTrack {
 public:
  MarkerTrack() = default;
  MarkerTrack(double t0, double dt) : t0_(t0), dt_(dt) {}

  void append(const TrackKnot& k) { knots_.push_back(k); }

  std::size_t size() const { return knots_.size(); }
  double t_begin() const { return t0_; }
  double t_end() const { return t0_ + dt_ * (knots_.size() - 1); }
  double dt() const { return dt_; }
  const TrackKnot& knot(std::size_t i) const { return knots_[i]; }
  const TrackKnot& back() const { return knots_.back(); }

  Vec3 pos(double s) const { return hermite(s, false); }
  Vec3 pos_deriv(double s) const { return hermite_deriv(s); }
  Vec3 vel(double s) const { return hermite(s, true); }

  // field values: cubic with finite-difference knot slopes (Catmull-Rom),
  // clamped beyond the recorded range
  Vec3 field_e(double s) const { return field(s, &TrackKnot::E); }
  Vec3 field_b(double s) const { return field(s, &TrackKnot::B); }
  double w2_at(double s) const {
    if (knots_.size() == 1) return knots_[0].w2;
    auto [k, u] = locate(s, true);
    return knots_[k].w2 * (1.0 - u) + knots_[k + 1].w2 * u;
  }
  Vec3 xi_at(double s) const {
    if (knots_.size() == 1) return knots_[0].xi;
    auto [k, u] = locate(s, true);
    return (1.0 - u) * knots_[k].xi + u * knots_[k + 1].xi;
  }

 private:
  std::pair<std::size_t, double> locate(double s, bool clamp) const {
    if (knots_.empty()) throw std::out_of_range("MarkerTrack: empty");
    const double rel = (s - t0_) / dt_;
    const double lo = -1e-9, hi = knots_.size() - 1 + (clamp ? 1e-9 : 1.0 + 1e-9);
    if (rel < lo || rel > hi) throw std::out_of_range("MarkerTrack: time outside record");
    std::size_t k = (rel <= 0.0) ? 0 : static_cast<std::size_t>(rel);
    if (k >= knots_.size() - 1) k = knots_.size() - 2;
    return {k, rel - k};
  }

  Vec3 hermite(double s, bool velocity) const {
    if (knots_.size() == 1) {
      const TrackKnot& k = knots_[0];
      const double h = s - t0_;
      return velocity ? k.v + h * k.vdot : k.x + h * k.xdot;
    }
    auto [k, u] = locate(s, false);
    const TrackKnot &a = knots_[k], &b = knots_[k + 1];
    const Vec3 &p0 = velocity ? a.v : a.x, &p1 = velocity ? b.v : b.x;
    const Vec3 &m0 = velocity ? a.vdot : a.xdot, &m1 = velocity ? b.vdot : b.xdot;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * dt_ * m0 +
           (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * dt_ * m1;
  }

  Vec3 hermite_deriv(double s) const {
    if (knots_.size() == 1) return knots_[0].xdot;
    auto [k, u] = locate(s, false);
    const TrackKnot &a = knots_[k], &b = knots_[k + 1];
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * a.x + (3 * u2 - 4 * u + 1) * dt_ * a.xdot +
            (-6 * u2 + 6 * u) * b.x + (3 * u2 - 2 * u) * dt_ * b.xdot) *
           (1.0 / dt_);
  }

  Vec3 field(double s, Vec3 TrackKnot::* f) const {
    if (knots_.size() == 1) return knots_[0].*f;
    const double rel = (s - t0_) / dt_;
    if (rel <= 0.0) return knots_[0].*f;
    if (rel >= double(knots_.size() - 1)) return knots_.back().*f;
    const std::size_t k = static_cast<std::size_t>(rel);
    const double u = rel - k;
    const Vec3 &p0 = knots_[k].*f, &p1 = knots_[k + 1].*f;
    const Vec3 m0 = (k == 0) ? p1 - p0 : 0.5 * (p1 - knots_[k - 1].*f);
    const Vec3 m1 =
        (k + 2 >= knots_.size()) ? p1 - p0 : 0.5 * (knots_[k + 2].*f - p0);
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 +
           (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * m1;
  }

  double t0_ = 0.0;
  double dt_ = 1.0;
  std::vector<TrackKnot> knots_;
};

}  // namespace dk
