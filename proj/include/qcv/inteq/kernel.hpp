#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <numbers>

#include "qcv/core/params.hpp"
#include "qcv/core/quadrature.hpp"
#include "qcv/core/sphere.hpp"
#include "qcv/errors.hpp"
#include "qcv/fraclap.hpp"

namespace qcv {

namespace detail {

inline QuadratureSpec tighter(const QuadratureSpec& spec) {
  return spec.with_rel_tol(std::max(1e-14, 0.01 * spec.rel_tol));
}

inline double log_add(double la, double lb) {
  if (la < lb) std::swap(la, lb);
  if (lb == -infinity) return la;
  return la + std::log1p(std::exp(lb - la));
}

// int_{-inf}^{hi} f(v, hi - v) dv for f peaked near v0 and decaying
// exponentially to the left; the split at v0 keeps the peak resolved however
// deep it sits.
template <class F>
double peaked_log_integral(F&& f, double v0, double hi, const QuadratureSpec& spec) {
  auto whole = [&](double v, double, double d) { return f(v, d); };
  if (!(v0 < hi)) return integrate(whole, -infinity, hi, spec).value;
  const double gap = hi - v0;
  auto left = [&](double v, double, double d) { return f(v, gap + d); };
  return integrate(left, -infinity, v0, spec).value + integrate(whole, v0, hi, spec).value;
}

}  // namespace detail

/// J(t) = int_{S^{n-1}} (e^t + e^{-t} - 2 xi_1)^{-(n-2sigma)/2} d xi.
/// With g = 4 sinh^2(t/2) and x = 1 - xi_1 the base is g + 2x; the zonal
/// integral runs over v = ln x, split where x is comparable to g, so the
/// near-singular peak at small t is resolved.
inline double kernel_J(const ConformalParams& p, double t, const QuadratureSpec& spec = {}) {
  if (!std::isfinite(t)) throw domain_error("kernel_J: t must be finite");
  if (t == 0.0 && p.sigma() <= 0.5)
    throw divergence_error("kernel_J: J(0) diverges for sigma <= 1/2, got sigma = " + detail::num(p.sigma()));
  const double e = p.slow_exponent();
  const double lgap = t == 0.0 ? -infinity : 2.0 * std::log(2.0 * std::sinh(0.5 * std::fabs(t)));
  if (p.n() == 2) {
    // 2 int_0^pi (g + 4 sin^2(theta/2))^{-e} d theta with theta = e^v
    auto f = [&](double v, double) {
      const double th = std::exp(v);
      return std::exp(v - e * detail::log_add(lgap, 2.0 * std::log(2.0 * std::sin(0.5 * th))));
    };
    return 2.0 * detail::peaked_log_integral(f, 0.5 * lgap, std::log(std::numbers::pi), spec);
  }
  // |S^{n-2}| int_0^2 (x(2-x))^{(n-3)/2} (g + 2x)^{-e} dx with x = e^v
  const double pw = 0.5 * (p.n() - 3);
  const double top = std::log(2.0);
  auto f = [&](double v, double dtop) {
    const double two_minus_x = -2.0 * std::expm1(-dtop);
    const double lw = pw == 0.0 ? 0.0 : pw * std::log(two_minus_x);
    return std::exp((pw + 1.0) * v + lw - e * detail::log_add(lgap, top + v));
  };
  return sphere_area(p.n() - 1) * detail::peaked_log_integral(f, lgap - top, top, spec);
}

/// pi ln((cosh t + 1)/(cosh t - 1)) = 2 pi ln coth(|t|/2), the n = 3, sigma = 1/2 kernel.
inline double kernel_J_n3_half(double t) {
  if (t == 0.0) throw divergence_error("kernel_J_n3_half: J(0) diverges");
  const double u = std::fabs(t);
  return 2.0 * std::numbers::pi * std::log1p(2.0 / std::expm1(u));
}

/// C(n, sigma) = int_R J(t) dt = 2 int_0^inf J(t) dt, by nested quadrature.
inline double kernel_mass(const ConformalParams& p, const QuadratureSpec& spec = {}) {
  const QuadratureSpec inner = detail::tighter(spec);
  auto f = [&](double t) { return kernel_J(p, t, inner); };
  return 2.0 * integrate(f, 0.0, infinity, spec).value;
}

/// The same mass with the order of integration swapped: the sphere integral
/// of I(x) = int_R (4 sinh^2(t/2) + 2x)^{-(n-2sigma)/2} dt, x = 1 - xi_1.
inline double kernel_mass_swapped(const ConformalParams& p, const QuadratureSpec& spec = {}) {
  const QuadratureSpec inner = detail::tighter(spec);
  const double e = p.slow_exponent();
  // log I(x); the t-integral runs over t = e^v split where 4 sinh^2(t/2) ~ 2x
  auto log_I = [&](double lc) {
    auto h = [&](double v, double) {
      const double t = std::exp(v);
      return std::exp(v - e * (detail::log_add(2.0 * std::log(2.0 * std::sinh(0.5 * t)), lc) - lc));
    };
    return std::log(2.0 * detail::peaked_log_integral(h, 0.5 * lc, infinity, inner)) - e * lc;
  };
  if (p.n() == 2) {
    auto g = [&](double, double d0, double) { return std::exp(log_I(2.0 * std::log(2.0 * std::sin(0.5 * d0)))); };
    return 2.0 * integrate(g, 0.0, std::numbers::pi, spec).value;
  }
  const double pw = 0.5 * (p.n() - 3);
  auto f = [&](double, double x, double two_minus_x) {
    return std::exp(pw * (std::log(x) + std::log(two_minus_x)) + log_I(std::log(2.0 * x)));
  };
  return sphere_area(p.n() - 1) * integrate(f, 0.0, 2.0, spec).value;
}

/// C(3, 1/2) = 8 pi int_0^inf ln coth u du (= pi^3).
inline double kernel_mass_logcoth(const QuadratureSpec& spec = {}) {
  auto f = [](double u) { return std::log1p(2.0 / std::expm1(2.0 * u)); };
  return 8.0 * std::numbers::pi * integrate(f, 0.0, infinity, spec).value;
}

/// C(n, sigma) from Riesz inversion: the convolution of |x|^{-(n-2sigma)} with
/// |x|^{-(n+2sigma)/2} is C |x|^{-(n-2sigma)/2}, and (-Delta)^sigma of the
/// latter is C2 |x|^{-(n+2sigma)/2}, so C = 1 / (c_{n,sigma} C2).
inline double kernel_mass_closed(const ConformalParams& p) {
  return 1.0 / (riesz_constant(p) * c2_constant(p));
}

/// A = (K(inf) C(n, sigma))^{-1/(tau-1)}, the constant solution V = A of the cylindrical equation.
inline double singular_amplitude(const ConformalParams& p, double k_infinity, double mass) {
  if (!(k_infinity > 0.0) || !(mass > 0.0))
    throw domain_error("singular_amplitude: need k_infinity > 0 and a positive kernel mass");
  return std::pow(k_infinity * mass, -1.0 / (p.tau() - 1.0));
}

inline double singular_amplitude(const ConformalParams& p, double k_infinity) {
  return singular_amplitude(p, k_infinity, kernel_mass_closed(p));
}

}  // namespace qcv
