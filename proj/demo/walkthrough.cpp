// Walks through the main computations for n = 3, sigma = 1/2: the constants of
// the fractional Laplacian, the extension of the bubble, the Pohozaev limit,
// the cylindrical integral equation and the Kelvin transform.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "qcv/extension.hpp"
#include "qcv/fraclap.hpp"
#include "qcv/inteq/cylinder.hpp"
#include "qcv/inteq/kelvin.hpp"
#include "qcv/inteq/kernel.hpp"
#include "qcv/pohozaev.hpp"

int main() {
  using namespace qcv;
  const auto p = ConformalParams::make(3, 0.5);
  std::printf("n = %d, sigma = %g, tau = %g\n\n", p.n(), p.sigma(), p.tau());

  std::printf("(-Delta)^sigma |x|^{-s} = lambda(s) |x|^{-s-2sigma}\n");
  for (double s : {0.25, 0.5, 1.0, 1.5, 2.0}) std::printf("  lambda(%4.2f) = %.15g\n", s, frac_power_constant(p, s));
  std::printf("  C2 = lambda((n-2sigma)/2) = %.15g (2/pi = %.15g)\n\n", c2_constant(p), 2.0 / std::numbers::pi);

  std::printf("extension of the bubble, closed form against quadrature\n");
  for (double t : {0.1, 1.0, 5.0}) {
    const double c = bubble_extension_closed(p, 1.0, 1.0, t), q = bubble_extension_quadrature(p, 1.0, 1.0, t);
    std::printf("  U0(|x| = 1, t = %3.1f) = %.15g   quadrature %.15g\n", t, c, q);
  }
  const auto tr = neumann_trace(p, 1.0, 1.0);
  std::printf("  Neumann trace at |x| = 1: %.10g (closed %.10g)\n\n", tr.value, neumann_trace_closed(p, 1.0, 1.0));

  std::printf("Pohozaev limit: negative for every K at infinity\n");
  for (double k : {0.5, 1.0, 2.0}) {
    const auto rep = pohozaev_limit_fractional(p, k);
    std::printf("  K = %3.1f  M0 = %.10g  limit = %.12g  (two paths differ by %.1e)  sign factor %.15g\n", k, rep.m0,
                rep.closed_value, rep.rel_error, rep.sign_factor);
  }
  std::printf("\n");

  const double C = kernel_mass(p);
  std::printf("kernel mass C = %.15g, pi^3 = %.15g\n", C, std::pow(std::numbers::pi, 3));
  const double A = singular_amplitude(p, 1.0, C);
  FixedPointOptions opt;
  opt.tol = 1e-8;
  const auto res = solve_fixed_point(p, 1.0, constant_cyl_profile(1.1 * A), opt);
  std::printf("fixed point from 1.1 A: %s after %zu iterations, V(0) = %.12g, A = %.12g\n\n", to_string(res.status),
              res.log.residuals.size(), res.profile.values[res.profile.size() / 2], A);

  std::printf("Kelvin transform of the bubble on a log grid\n");
  const auto u = bubble_profile(p, log_radii(12.0, 0.05));
  for (double lambda : {0.5, 1.0, 2.0})
    std::printf("  lambda = %3.1f  moving-sphere deficit %+.6e\n", lambda, moving_sphere_deficit(u, p, lambda));
  return 0;
}
