#include "dk/profile.hpp"

#include <algorithm>
#include <vector>

#include "dk/kernels.hpp"

namespace dk {

namespace {

double shape_moment(int k) {
  const GaussLegendre gl(128);
  double s = 0.0;
  for (int i = 0; i < 128; ++i) {
    const double u = 0.5 * (gl.x[i] + 1.0);
    s += 0.5 * gl.w[i] * bump(u) * std::pow(u, k);
  }
  return s;
}

}  // namespace

double InitialProfile::shape_i2() {
  static const double v = shape_moment(2);
  return v;
}

double InitialProfile::shape_i4() {
  static const double v = shape_moment(4);
  return v;
}

double InitialProfile::shape_cum2(double s) {
  // panelwise 16-point GL cumulative table on [0,1], spline-free: the
  // integrand is smooth, 512 panels leave ~1e-14 residual
  constexpr int np = 512;
  static const std::vector<double> table = [] {
    const GaussLegendre gl(16);
    std::vector<double> t(np + 1, 0.0);
    for (int p = 0; p < np; ++p) {
      const double a = double(p) / np, b = double(p + 1) / np;
      double acc = 0.0;
      for (int i = 0; i < 16; ++i) {
        const double u = 0.5 * (b - a) * gl.x[i] + 0.5 * (a + b);
        acc += 0.5 * (b - a) * gl.w[i] * bump(u) * u * u;
      }
      t[p + 1] = t[p] + acc;
    }
    return t;
  }();
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return table[np];
  const double r = s * np;
  const int p = std::min(int(r), np - 1);
  // sub-panel correction by 4-point GL keeps the table lookup exact enough
  const double a = double(p) / np;
  const GaussLegendre gl4(4);
  double acc = table[p];
  for (int i = 0; i < 4; ++i) {
    const double u = 0.5 * (s - a) * gl4.x[i] + 0.5 * (a + s);
    acc += 0.5 * (s - a) * gl4.w[i] * bump(u) * u * u;
  }
  return acc;
}

}  // namespace dk
