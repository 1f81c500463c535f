#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "qcv/core/quadrature.hpp"
#include "qcv/errors.hpp"
#include "qcv/specfun/gamma.hpp"

namespace qcv {

/// Arguments of 2F1(a, b; c; z). `one_minus_z` may carry 1 - z computed
/// without cancellation when z is close to 1; it must agree with z.
struct Hyp2F1Args {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  double z = 0.0;
  std::optional<double> one_minus_z{};

  double w() const { return one_minus_z ? *one_minus_z : 1.0 - z; }
};

/// Lower end of the accepted argument range. Negative arguments down to -9
/// arise from the Pfaff transformation at z = 0.9.
inline constexpr double hyp2f1_z_min = -9.0;

namespace detail {

inline void hyp2f1_validate(const Hyp2F1Args& p, const char* where) {
  if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c) || !std::isfinite(p.z))
    throw domain_error(std::string(where) + ": non-finite parameter");
  if (is_nonpositive_integer(p.c))
    throw domain_error(std::string(where) + ": c = " + num(p.c) +
                       " is zero or a negative integer");
  // a few ulps of slack so that z/(z-1) at z = 0.9 is accepted
  if (p.z < hyp2f1_z_min * (1.0 + 1e-12) || p.z > 1.0)
    throw domain_error(std::string(where) + ": z = " + num(p.z) + " outside [-9, 1]");
  if (p.one_minus_z && (*p.one_minus_z < 0.0 || std::fabs(*p.one_minus_z - (1.0 - p.z)) > 1e-12))
    throw domain_error(std::string(where) + ": one_minus_z inconsistent with z");
}

inline bool terminates(const Hyp2F1Args& p) {
  return is_nonpositive_integer(p.a) || is_nonpositive_integer(p.b);
}

}  // namespace detail

/// Gauss summation 2F1(a, b; c; 1) = G(c)G(c-a-b)/(G(c-a)G(c-b)); requires c - a - b > 0.
inline double hyp2f1_gauss_at_one(double a, double b, double c) {
  if (detail::is_nonpositive_integer(c))
    throw domain_error("hyp2f1 at z = 1: c = " + detail::num(c) + " is zero or a negative integer");
  const double s = c - a - b;
  if (!(s > 0.0))
    throw divergence_error("hyp2f1 at z = 1 diverges: c - a - b = " + detail::num(s) +
                           " is not positive");
  return gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b);
}

/// Gauss power series. Stops once three consecutive terms fall below machine
/// epsilon relative to the partial sum; at most 10000 terms. Requires |z| < 1
/// unless the series terminates.
inline double hyp2f1_series(const Hyp2F1Args& p) {
  detail::hyp2f1_validate(p, "hyp2f1_series");
  const bool finite_sum = detail::terminates(p);
  if (!finite_sum && !(std::fabs(p.z) < 1.0))
    throw domain_error("hyp2f1_series: the Gauss series needs |z| < 1, got z = " +
                       detail::num(p.z));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int cap = 10000;
  double sum = 1.0, term = 1.0;
  int small = 0;
  for (int k = 0; k < cap; ++k) {
    term *= (p.a + k) * (p.b + k) / ((p.c + k) * (k + 1.0)) * p.z;
    sum += term;
    if (term == 0.0 && finite_sum) return sum;
    if (std::fabs(term) <= eps * std::fabs(sum)) {
      if (++small == 3) return sum;
    } else {
      small = 0;
    }
  }
  throw convergence_error("hyp2f1_series: no convergence within 10000 terms at z = " +
                              detail::num(p.z),
                          sum, std::fabs(term));
}

/// Euler integral
///   2F1 = G(c)/(G(b)G(c-b)) int_0^1 t^{b-1} (1-t)^{c-b-1} (1-zt)^{-a} dt,
/// valid for c > b > 0 (a and b are swapped when only a qualifies). At z = 1
/// it also requires c - a - b > 0.
inline double hyp2f1_euler_integral(const Hyp2F1Args& args, const QuadratureSpec& spec = {}) {
  detail::hyp2f1_validate(args, "hyp2f1_euler_integral");
  Hyp2F1Args p = args;
  if (!(p.c > p.b && p.b > 0.0)) std::swap(p.a, p.b);
  if (!(p.c > p.b && p.b > 0.0))
    throw domain_error("hyp2f1_euler_integral: needs c > b > 0 (or c > a > 0), got a = " +
                       detail::num(args.a) + ", b = " + detail::num(args.b) +
                       ", c = " + detail::num(args.c));
  const double w = p.w();
  if (w == 0.0 && !(p.c - p.a - p.b > 0.0))
    throw divergence_error("hyp2f1_euler_integral at z = 1 diverges: c - a - b = " +
                           detail::num(p.c - p.a - p.b));
  const double a = p.a, b = p.b, c = p.c, z = p.z;
  auto f = [&](double t, double dt0, double dt1) {
    // 1 - z t, written to stay accurate when z t is close to 1
    const double base = z > 0.0 ? w + z * dt1 : 1.0 - z * t;
    double lg = (b - 1.0) * std::log(dt0) + (c - b - 1.0) * std::log(dt1);
    if (a != 0.0) lg -= a * std::log(base);
    return std::exp(lg);
  };
  return integrate(f, 0.0, 1.0, spec).value / beta(b, c - b);
}

/// 2F1(a, b; c; z) for z in [-9, 1]. Uses the Gauss series for |z| <= 1/2,
/// the Euler integral elsewhere (after the Euler transformation when
/// c - a - b < 0) and the Gauss summation at z = 1.
inline double hyp2f1(const Hyp2F1Args& p, const QuadratureSpec& spec = {}) {
  detail::hyp2f1_validate(p, "hyp2f1");
  if (p.z == 0.0) return 1.0;
  if (detail::terminates(p)) return hyp2f1_series(p);
  const double w = p.w();
  if (w == 0.0) return hyp2f1_gauss_at_one(p.a, p.b, p.c);
  if (std::fabs(p.z) <= 0.5) return hyp2f1_series(p);

  auto euler_ok = [](double a, double b, double c) {
    return (c > b && b > 0.0) || (c > a && a > 0.0);
  };
  const double s = p.c - p.a - p.b;
  if (p.z > 0.5 && s < 0.0) {
    // 2F1(a,b;c;z) = (1-z)^{c-a-b} 2F1(c-a, c-b; c; z)
    Hyp2F1Args q{p.c - p.a, p.c - p.b, p.c, p.z, w};
    if (euler_ok(q.a, q.b, q.c)) return std::pow(w, s) * hyp2f1_euler_integral(q, spec);
  }
  if (euler_ok(p.a, p.b, p.c)) return hyp2f1_euler_integral(p, spec);
  if (p.z < 0.0) {
    // Pfaff: (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)) with z/(z-1) in (1/3, 0.9]
    Hyp2F1Args q{p.a, p.c - p.b, p.c, p.z / (p.z - 1.0), 1.0 / w};
    return std::pow(w, -p.a) * hyp2f1_series(q);
  }
  return hyp2f1_series(p);
}

/// d/dz 2F1 = (ab/c) 2F1(a+1, b+1; c+1; z); z must be below 1 unless c - a - b > 1.
inline double hyp2f1_deriv(const Hyp2F1Args& p, const QuadratureSpec& spec = {}) {
  detail::hyp2f1_validate(p, "hyp2f1_deriv");
  if (p.a == 0.0 || p.b == 0.0) return 0.0;
  return p.a * p.b / p.c * hyp2f1({p.a + 1.0, p.b + 1.0, p.c + 1.0, p.z, p.one_minus_z}, spec);
}

/// Second derivative, from two applications of the derivative formula.
inline double hyp2f1_deriv2(const Hyp2F1Args& p, const QuadratureSpec& spec = {}) {
  detail::hyp2f1_validate(p, "hyp2f1_deriv2");
  if (p.a == 0.0 || p.b == 0.0) return 0.0;
  return p.a * p.b / p.c * hyp2f1_deriv({p.a + 1.0, p.b + 1.0, p.c + 1.0, p.z, p.one_minus_z}, spec);
}

/// The hypergeometric differential operator
///   z(1-z) F'' + (c - (a+b+1) z) F' - ab F
/// applied to supplied values F, F', F''.
inline double hyp2f1_ode_operator(const Hyp2F1Args& p, double F, double dF, double d2F) {
  return p.z * p.w() * d2F + (p.c - (p.a + p.b + 1.0) * p.z) * dF - p.a * p.b * F;
}

/// The operator applied to 2F1 itself; vanishes up to rounding for z in (0, 1).
inline double hyp2f1_ode_residual(const Hyp2F1Args& p, const QuadratureSpec& spec = {}) {
  if (!(p.z > 0.0 && p.z < 1.0))
    throw domain_error("hyp2f1_ode_residual: z must lie in (0, 1), got " + detail::num(p.z));
  return hyp2f1_ode_operator(p, hyp2f1(p, spec), hyp2f1_deriv(p, spec), hyp2f1_deriv2(p, spec));
}

}  // namespace qcv
