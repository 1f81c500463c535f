#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "qcv/core/params.hpp"
#include "qcv/core/quadrature.hpp"
#include "qcv/core/sphere.hpp"
#include "qcv/errors.hpp"
#include "qcv/extension.hpp"
#include "qcv/fraclap.hpp"
#include "qcv/inteq/profile.hpp"
#include "qcv/specfun/gamma.hpp"
#include "qcv/specfun/hyp2f1.hpp"

namespace qcv {

using rational = boost::multiprecision::cpp_rational;

enum class PohozaevMode { integer, fractional };

inline const char* to_string(PohozaevMode m) { return m == PohozaevMode::integer ? "integer" : "fractional"; }

struct PohozaevReport {
  PohozaevMode mode = PohozaevMode::integer;
  ConformalParams params = ConformalParams::make(3, 1);
  double k_infinity = 1.0;
  double m0 = 0.0;
  double closed_value = 0.0;
  double oracle_value = 0.0;
  double rel_error = 0.0;
  /// Measured from the oracle assembly: oracle_value divided by the common
  /// positive normalizer. Theory says (n - 2 sigma)/n - 1 = -2 sigma/n.
  double sign_factor = 0.0;
};

namespace detail {

inline void require_subcritical(int n, int m, const char* where) {
  if (m < 1 || 2 * m >= n)
    throw domain_error(std::string(where) + ": need 1 <= m and 2m < n, got n = " + std::to_string(n) +
                       ", m = " + std::to_string(m));
}

inline double rel_err(double closed, double oracle) {
  return std::fabs(closed - oracle) / std::max(std::fabs(closed), std::numeric_limits<double>::min());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Integer order: boundary integrals g_m of |x|^{-(n-2m)/2}, as exact
// coefficients of |S^{n-1}| M0^2.

/// prod_{i=0}^{m-1} ((n - 2m + 4i)/2)^2.
inline rational gm_coefficient_product(int n, int m) {
  detail::require_subcritical(n, m, "gm_coefficient_product");
  rational c = 1;
  for (int i = 0; i < m; ++i) {
    const rational f(n - 2 * m + 4 * i, 2);
    c *= f * f;
  }
  return c;
}

/// The same coefficient by the two-step recursion in m, from the bases
/// g1 = ((n-2)/2)^2 and g2 = (n/2)^2 ((n-4)/2)^2.
inline rational gm_coefficient_recursive(int n, int m) {
  detail::require_subcritical(n, m, "gm_coefficient_recursive");
  rational c = (m % 2 == 1) ? rational(n - 2, 2) * rational(n - 2, 2)
                            : rational(n, 2) * rational(n, 2) * rational(n - 4, 2) * rational(n - 4, 2);
  for (int k = (m % 2 == 1) ? 3 : 4; k <= m; k += 2) c *= rational(n - 2 * k, 2) * rational(n - 2 * k, 2) *
                                                       rational(n + 2 * (k - 2), 2) * rational(n + 2 * (k - 2), 2);
  return c;
}

inline double gm_product(const ConformalParams& p, double M0) {
  const int m = require_integer_order(p, "gm_product");
  return sphere_area(p.n()) * M0 * M0 * static_cast<double>(gm_coefficient_product(p.n(), m));
}

inline double gm_recursive(const ConformalParams& p, double M0) {
  const int m = require_integer_order(p, "gm_recursive");
  return sphere_area(p.n()) * M0 * M0 * static_cast<double>(gm_coefficient_recursive(p.n(), m));
}

/// Boundary integral over the sphere of radius r for the power |x|^{-s}, by
/// the general-exponent recursion
///   G_m(s) = 2(m-1)(n-2m-2s) F(s, m-1) |S| r^{n-2m-2s} + s^2 (s+2-n)^2 G_{m-2}(s+2)
/// with G_1(s) = s(n-2-s)|S| r^{n-2-2s} and
/// G_2(s) = F(s,1) [F(s,1) - 2s - (n-2)s + (n-4)(s+2)] |S| r^{n-4-2s}.
/// Depends on r except at s = (n-2m)/2, where it reduces to gm_product.
inline double gm_general(int n, int m, double s, double r) {
  if (m < 1 || n < 2) throw domain_error("gm_general: need m >= 1 and n >= 2");
  if (!(r > 0.0)) throw domain_error("gm_general: radius must be positive");
  const double area = sphere_area(n);
  if (m == 1) return s * (n - 2.0 - s) * area * std::pow(r, n - 2.0 - 2.0 * s);
  if (m == 2) {
    const double f1 = s * (n - 2.0 - s);
    return f1 * (f1 - 2.0 * s - (n - 2.0) * s + (n - 4.0) * (s + 2.0)) * area * std::pow(r, n - 4.0 - 2.0 * s);
  }
  const double head = 2.0 * (m - 1.0) * (n - 2.0 * m - 2.0 * s) * poly_power_product(n, s, m - 1) * area *
                      std::pow(r, n - 2.0 * m - 2.0 * s);
  const double q = s * (s + 2.0 - n);
  return head + q * q * gm_general(n, m - 2, s + 2.0, r);
}

/// M0 = (prod / K(inf))^{(n-2m)/(4m)}.
inline double m0_integer(const ConformalParams& p, double k_infinity) {
  const int m = require_integer_order(p, "m0_integer");
  detail::require_subcritical(p.n(), m, "m0_integer");
  if (!(k_infinity > 0.0) || !std::isfinite(k_infinity))
    throw domain_error("m0_integer: k_infinity must be positive, got " + detail::num(k_infinity));
  const double prod = static_cast<double>(gm_coefficient_product(p.n(), m));
  return std::pow(prod / k_infinity, (p.n() - 2.0 * m) / (4.0 * m));
}

inline PohozaevReport pohozaev_limit_integer(const ConformalParams& p, double k_infinity) {
  const int m = require_integer_order(p, "pohozaev_limit_integer");
  const double n = p.n();
  PohozaevReport rep;
  rep.mode = PohozaevMode::integer;
  rep.params = p;
  rep.k_infinity = k_infinity;
  rep.m0 = m0_integer(p, k_infinity);
  const double area = sphere_area(p.n());
  const double normalizer = gm_product(p, rep.m0);
  rep.closed_value = normalizer * ((n - 2.0 * m) / n - 1.0);
  const double first = (n - 2.0 * m) / n * std::pow(rep.m0, p.energy_power()) * area * k_infinity;
  rep.oracle_value = first - gm_recursive(p, rep.m0);
  rep.rel_error = detail::rel_err(rep.closed_value, rep.oracle_value);
  rep.sign_factor = rep.oracle_value / normalizer;
  return rep;
}

// ---------------------------------------------------------------------------
// Fractional order sigma in (0, 1).

namespace detail {

struct BubbleTrace {
  double a;      // (n - 2 sigma)/4
  double ap;     // (n + 2 sigma)/4
  double c;      // n/2
  double sigma;

  explicit BubbleTrace(const ConformalParams& p)
      : a(0.25 * p.fast_exponent()), ap(0.25 * (p.n() + 2.0 * p.sigma())), c(0.5 * p.n()), sigma(p.sigma()) {}

  double F(double s, double w, const QuadratureSpec& spec) const { return hyp2f1({a, a, c, s, w}, spec); }
  /// H with F'(s) = (a^2/c) (1-s)^{sigma-1} H(s).
  double H(double s, double w, const QuadratureSpec& spec) const { return hyp2f1({ap, ap, c + 1.0, s, w}, spec); }
};

// Inner hypergeometric evaluations run a little tighter than the outer integral.
inline QuadratureSpec inner_spec(const QuadratureSpec& spec) {
  return spec.with_rel_tol(std::max(1e-14, 0.1 * spec.rel_tol));
}

}  // namespace detail

/// Gamma^2(n/2) Gamma(sigma) Gamma(1-sigma) / (Gamma^2((n-2sigma)/4) Gamma^2((n+2sigma)/4)),
/// the limit of s^{n/2} (1-s)^{1-sigma} F F' as s -> 1.
inline double bracket_closed(const ConformalParams& p) {
  require_unit_order(p, "bracket_closed");
  const double n = p.n(), sg = p.sigma();
  const double r = gamma(0.5 * n) * rgamma(0.25 * (n - 2.0 * sg)) * rgamma(0.25 * (n + 2.0 * sg));
  return r * r * gamma(sg) * gamma(1.0 - sg);
}

/// s^{n/2} (1-s)^{1-sigma} F(s) F'(s) at 0 <= s < 1.
inline double bracket_boundary(const ConformalParams& p, double s, const QuadratureSpec& spec = {}) {
  require_unit_order(p, "bracket_boundary");
  if (!(s >= 0.0) || !(s < 1.0)) throw domain_error("bracket_boundary: s must lie in [0, 1)");
  const detail::BubbleTrace bt(p);
  const double w = 1.0 - s;
  return std::pow(s, bt.c) * bt.F(s, w, spec) * (bt.a * bt.a / bt.c) * bt.H(s, w, spec);
}

/// int_0^1 s^{n/2-1} (1-s)^{-sigma} [s(1-s) F'^2 + ((n-2sigma)/4)^2 F^2] ds.
inline double bracket_integral(const ConformalParams& p, const QuadratureSpec& spec = {}) {
  require_unit_order(p, "bracket_integral");
  const detail::BubbleTrace bt(p);
  const QuadratureSpec inner = detail::inner_spec(spec);
  const double k = bt.a * bt.a / bt.c;
  auto f = [&](double s, double, double w) {
    const double F = bt.F(s, w, inner), H = bt.H(s, w, inner);
    // s(1-s)(1-s)^{-sigma} F'^2 = k^2 s (1-s)^{sigma-1} H^2
    return std::pow(s, bt.c - 1.0) *
           (k * k * s * std::pow(w, bt.sigma - 1.0) * H * H + bt.a * bt.a * std::pow(w, -bt.sigma) * F * F);
  };
  return integrate(f, 0.0, 1.0, spec).value;
}

inline std::pair<double, double> bracket_identity_check(const ConformalParams& p, const QuadratureSpec& spec = {}) {
  return {bracket_closed(p), bracket_integral(p, spec)};
}

/// Q0 = -C0^2 M0^2 |S^{n-1}| Gamma^2(n/2) Gamma(sigma) Gamma(1-sigma) / (Gamma^2((n+2sigma)/4) Gamma^2((n-2sigma)/4)).
inline double q0_closed(const ConformalParams& p, double M0) {
  require_unit_order(p, "q0_closed");
  const double c0 = c0_constant(p);
  return -c0 * c0 * M0 * M0 * sphere_area(p.n()) * bracket_closed(p);
}

/// -(C0^2 M0^2 / 4) |S^{n-1}| int_0^1 s^{(n-2)/2} (1-s)^{-sigma} [((n-2sigma)/2)^2 F^2 + 4s(1-s) F'^2] ds.
inline double q0_quadrature(const ConformalParams& p, double M0, const QuadratureSpec& spec = {}) {
  require_unit_order(p, "q0_quadrature");
  const detail::BubbleTrace bt(p);
  const QuadratureSpec inner = detail::inner_spec(spec);
  const double A = p.slow_exponent(), k = bt.a * bt.a / bt.c;
  auto f = [&](double s, double, double w) {
    const double F = bt.F(s, w, inner), H = bt.H(s, w, inner);
    return std::pow(s, bt.c - 1.0) *
           (A * A * std::pow(w, -bt.sigma) * F * F + 4.0 * k * k * s * std::pow(w, bt.sigma - 1.0) * H * H);
  };
  const double c0 = c0_constant(p);
  return -0.25 * c0 * c0 * M0 * M0 * sphere_area(p.n()) * integrate(f, 0.0, 1.0, spec).value;
}

/// M0 = (C2 / K(inf))^{(n-2sigma)/(4sigma)}.
inline double m0_fractional(const ConformalParams& p, double k_infinity) {
  require_unit_order(p, "m0_fractional");
  if (!(k_infinity > 0.0) || !std::isfinite(k_infinity))
    throw domain_error("m0_fractional: k_infinity must be positive, got " + detail::num(k_infinity));
  return std::pow(c2_constant(p) / k_infinity, p.fast_exponent() / (4.0 * p.sigma()));
}

inline PohozaevReport pohozaev_limit_fractional(const ConformalParams& p, double k_infinity,
                                                const QuadratureSpec& spec = {}) {
  require_unit_order(p, "pohozaev_limit_fractional");
  const double n = p.n(), sg = p.sigma();
  PohozaevReport rep;
  rep.mode = PohozaevMode::fractional;
  rep.params = p;
  rep.k_infinity = k_infinity;
  rep.m0 = m0_fractional(p, k_infinity);
  const double area = sphere_area(p.n());
  const double g = rgamma(0.25 * p.fast_exponent());
  const double normalizer = rep.m0 * rep.m0 * c0_constant(p) * area * gamma(1.0 - sg) * gamma(0.5 * n) * g * g;
  rep.closed_value = normalizer * ((n - 2.0 * sg) / n - 1.0);
  const double first = neumann_constant(p) * (n - 2.0 * sg) / (2.0 * n) * area *
                       std::pow(rep.m0, p.energy_power()) * k_infinity;
  rep.oracle_value = first + q0_quadrature(p, rep.m0, spec);
  rep.rel_error = detail::rel_err(rep.closed_value, rep.oracle_value);
  rep.sign_factor = rep.oracle_value / normalizer;
  return rep;
}

/// Both sides of A^{-mu} B^{-nu} = G(mu+nu)/(G(mu)G(nu)) int_0^1 s^{mu-1}(1-s)^{nu-1}(sA+(1-s)B)^{-(mu+nu)} ds.
inline std::pair<double, double> feynman_check(double A, double B, double mu, double nu,
                                               const QuadratureSpec& spec = {}) {
  if (!(A > 0.0) || !(B > 0.0) || !(mu > 0.0) || !(nu > 0.0))
    throw domain_error("feynman_check: A, B, mu, nu must all be positive");
  const double lhs = std::pow(A, -mu) * std::pow(B, -nu);
  auto f = [&](double s, double ds, double dw) {
    return std::exp((mu - 1.0) * std::log(ds) + (nu - 1.0) * std::log(dw) - (mu + nu) * std::log(s * A + dw * B));
  };
  const double rhs = integrate(f, 0.0, 1.0, spec).value / beta(mu, nu);
  return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// Kazdan-Warner integral.

/// A radial coefficient K(r). `tail_power` is the exponent k with
/// r K'(r) ~ c r^k at infinity; the tail of the integral is evaluated with it.
struct RadialCoefficient {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double tail_power = 0.0;

  static RadialCoefficient constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }, 0.0};
  }
  /// K(r) = c0 + c1 r.
  static RadialCoefficient linear(double c0, double c1) {
    return {[c0, c1](double r) { return c0 + c1 * r; }, [c1](double) { return c1; }, 1.0};
  }
};

/// |S^{n-1}| int_0^inf r K'(r) u^{2n/(n-2sigma)} r^{n-1} dr.
/// On the grid the integrand is summed by the trapezoid rule in ln r; inside
/// the first radius u is held at its first value, beyond the last radius u
/// follows its tail metadata and the tail integral is done in closed form.
inline double kazdan_warner(const RadialProfile& u, const RadialCoefficient& K, const ConformalParams& p) {
  u.validate();
  const double n = p.n(), pw = p.energy_power();
  if (!(u.tail_exponent > p.slow_exponent()))
    throw divergence_error("kazdan_warner: tail exponent " + detail::num(u.tail_exponent) +
                           " <= (n-2sigma)/2; the integral diverges for slowly decaying profiles");
  const double excess = pw * u.tail_exponent - n - K.tail_power;
  auto g = [&](std::size_t i) {
    const double r = u.radii[i];
    return r * K.derivative(r) * std::pow(u.values[i], pw) * std::pow(r, n);
  };
  const std::size_t N = u.size();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < N; ++i)
    sum += 0.5 * (g(i) + g(i + 1)) * (std::log(u.radii[i + 1]) - std::log(u.radii[i]));

  // head: u ~ u(r0), r K'(r) ~ r0 K'(r0) (r/r0)
  const double r0 = u.radii.front();
  sum += r0 * K.derivative(r0) * std::pow(u.values.front(), pw) * std::pow(r0, n) / (n + 1.0);

  const double R = u.radii.back();
  const double slope = R * K.derivative(R);
  if (slope != 0.0) {
    if (!(excess > 0.0))
      throw divergence_error("kazdan_warner: tail integrand r^" + detail::num(-excess - 1.0) + " is not integrable");
    sum += slope * std::pow(u.tail_amplitude, pw) * std::pow(R, n - pw * u.tail_exponent) / excess;
  }
  return sphere_area(p.n()) * sum;
}

}  // namespace qcv
