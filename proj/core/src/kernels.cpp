#include "dk/kernels.hpp"

#include <cmath>

namespace dk {

GaussLegendre::GaussLegendre(int n) : x(n), w(n) {
  // Newton iteration on Legendre polynomials
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      const double dx = p1 / pp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    x[i] = -xi;
    x[n - 1 - i] = xi;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * pp * pp);
  }
}

namespace {

// closed-form angular integral 2 pi int_{-1}^{1} mu (a^2+r^2-2 a r mu)^{-1/2} dmu
double angular_moment(double a, double r) {
  const double apr = a + r;
  const double amr = std::abs(a - r);
  auto F = [&](double srt) {
    return 2.0 * (a * a + r * r) * srt - (2.0 / 3.0) * srt * srt * srt;
  };
  return (M_PI / (2.0 * a * a * r * r)) * (F(apr) - F(amr));
}

}  // namespace

Vec3 coulomb_direction_quadrature(const Vec3& z, double rel_cut_lo, double rel_cut_hi,
                                  int n_radial_per_panel) {
  const double a = norm(z);
  if (a == 0.0) throw std::domain_error("coulomb_direction_quadrature: z = 0");
  const GaussLegendre gl(n_radial_per_panel);
  // panels in log r, split at the kink r = a
  const double t_lo = std::log(rel_cut_lo);
  const double t_hi = std::log(rel_cut_hi);
  double I = 0.0;
  for (int panel = 0; panel < 2; ++panel) {
    const double ta = (panel == 0) ? t_lo : 0.0;
    const double tb = (panel == 0) ? 0.0 : t_hi;
    for (int i = 0; i < n_radial_per_panel; ++i) {
      const double t = 0.5 * (ta + tb) + 0.5 * (tb - ta) * gl.x[i];
      const double r = a * std::exp(t);
      I += 0.5 * (tb - ta) * gl.w[i] * angular_moment(a, r) * r;
    }
  }
  return z * (I / a);
}

}  // namespace dk
