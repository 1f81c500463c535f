#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "qcv/core/quadrature.hpp"
#include "qcv/errors.hpp"
#include "qcv/specfun/gamma.hpp"

namespace qcv {

/// Surface area |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2) of the unit sphere in R^n.
inline double sphere_area(int n) {
  if (n < 1) throw domain_error("sphere_area: n must be >= 1, got " + std::to_string(n));
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / gamma(0.5 * n);
}

/// Integral over S^{n-1} of a zonal function g(xi_1), n >= 2.
/// For n >= 3 this is |S^{n-2}| int_{-1}^{1} (1-w^2)^{(n-3)/2} g(w) dw;
/// for n = 2 it is the full angular integral int_0^{2pi} g(cos theta) d theta.
/// g is called as g(w, 1 + w, 1 - w) so that both ends can be resolved.
template <class G>
double zonal_sphere_integral(int n, G&& g, const QuadratureSpec& spec = {}) {
  if (n < 2) throw domain_error("zonal_sphere_integral: n must be >= 2");
  if (n == 2) {
    // theta in (0, pi), doubled; 1 - cos = 2 sin^2(theta/2), 1 + cos = 2 cos^2(theta/2)
    auto f = [&](double th, double d0, double dpi) {
      const double s0 = std::sin(0.5 * d0), spi = std::sin(0.5 * dpi);
      return g(std::cos(th), 2.0 * spi * spi, 2.0 * s0 * s0);
    };
    return 2.0 * integrate(f, 0.0, std::numbers::pi, spec).value;
  }
  const double p = 0.5 * (n - 3);
  auto f = [&](double w, double da, double db) {
    const double weight = p == 0.0 ? 1.0 : std::pow(da * db, p);
    return weight * g(w, da, db);
  };
  return sphere_area(n - 1) * integrate(f, -1.0, 1.0, spec).value;
}

}  // namespace qcv
