#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "qcv/core/params.hpp"
#include "qcv/errors.hpp"
#include "qcv/specfun/gamma.hpp"

namespace qcv {

/// A radial power profile amplitude * |x|^{-s}.
struct PowerProfile {
  double s = 0.0;
  double amplitude = 1.0;
};

/// F(s, m) = prod_{i=1}^{m} (s + 2i - 2)(n - 2i - s), so that
/// (-Delta)^m |x|^{-s} = F(s, m) |x|^{-s-2m}. The empty product (m = 0) is 1.
inline double poly_power_product(int n, double s, int m) {
  double f = 1.0;
  for (int i = 1; i <= m; ++i) f *= (s + 2.0 * i - 2.0) * (n - 2.0 * i - s);
  return f;
}

/// F(s, m) for integer order sigma = m.
inline double poly_power_constant(const ConformalParams& p, double s) {
  const int m = require_integer_order(p, "poly_power_constant");
  if (!(s > 0.0)) throw domain_error("poly_power_constant: s must be positive, got " + detail::num(s));
  return poly_power_product(p.n(), s, m);
}

/// Coefficient of |x|^{-(s+2m-1)} in the radial derivative of (-Delta)^{m-1} |x|^{-s}:
/// -(s + 2m - 2) F(s, m - 1).
inline double neumann_poly_coefficient(const ConformalParams& p, double s) {
  const int m = require_integer_order(p, "neumann_poly_coefficient");
  return -(s + 2.0 * m - 2.0) * poly_power_product(p.n(), s, m - 1);
}

/// lambda(s) with (-Delta)^sigma |x|^{-s} = lambda(s) |x|^{-s-2sigma}:
///   4^sigma G((s+2sigma)/2) G((n-s)/2) / (G(s/2) G((n-2sigma-s)/2)).
/// Accepts 0 < s <= n - 2sigma; the right end is the Riesz kernel exponent
/// where lambda vanishes.
inline double frac_power_constant(const ConformalParams& p, double s) {
  const double n = p.n(), sg = p.sigma();
  if (!(s > 0.0) || !(s <= n - 2.0 * sg))
    throw domain_error("frac_power_constant: s = " + detail::num(s) + " outside (0, n - 2 sigma] = (0, " +
                       detail::num(n - 2.0 * sg) + "]");
  return std::pow(4.0, sg) * gamma(0.5 * (s + 2.0 * sg)) * gamma(0.5 * (n - s)) * rgamma(0.5 * s) *
         rgamma(0.5 * (n - 2.0 * sg - s));
}

/// C2(n, sigma) = lambda((n - 2sigma)/2) = 4^sigma G^2((n+2sigma)/4) / G^2((n-2sigma)/4).
inline double c2_constant(const ConformalParams& p) {
  return frac_power_constant(p, p.slow_exponent());
}

/// Normalization of the Riesz potential, (-Delta)^{-sigma} f = c_{n,sigma} |x|^{2sigma-n} * f:
///   c_{n,sigma} = G((n-2sigma)/2) / (4^sigma pi^{n/2} G(sigma)).
inline double riesz_constant(const ConformalParams& p) {
  const double n = p.n(), sg = p.sigma();
  return gamma(0.5 * (n - 2.0 * sg)) /
         (std::pow(4.0, sg) * std::pow(std::numbers::pi, 0.5 * n) * gamma(sg));
}

}  // namespace qcv
