#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qcv/core/params.hpp"
#include "qcv/core/quadrature.hpp"
#include "qcv/core/sphere.hpp"
#include "qcv/errors.hpp"
#include "qcv/fraclap.hpp"
#include "qcv/specfun/gamma.hpp"
#include "qcv/specfun/hyp2f1.hpp"

namespace qcv {

/// A point (|x|, t) of the upper half-space with its similarity variable
/// z = |x|^2 / r^2, r^2 = |x|^2 + t^2, and the extension value there.
struct ExtensionSample {
  double x_norm = 0.0;
  double t = 0.0;
  double r = 0.0;
  double z = 0.0;
  double one_minus_z = 1.0;
  double value = 0.0;
};

/// beta(n, sigma) = 2 G(n/2 + sigma) / (|S^{n-1}| G(n/2) G(sigma)), the
/// normalization of the weighted Poisson kernel beta t^{2sigma} (|x|^2+t^2)^{-(n+2sigma)/2}.
inline double beta_constant(const ConformalParams& p) {
  require_unit_order(p, "beta_constant");
  const double n = p.n(), s = p.sigma();
  return 2.0 * gamma(0.5 * n + s) / (sphere_area(p.n()) * gamma(0.5 * n) * gamma(s));
}

/// beta |S^{n-1}| int_0^inf (rho^2 + 1)^{-(n+2sigma)/2} rho^{n-1} d rho, which must equal 1.
inline double beta_normalization_integral(const ConformalParams& p, const QuadratureSpec& spec = {}) {
  const double n = p.n(), e = 0.5 * (n + 2.0 * p.sigma());
  auto f = [&](double rho) { return std::exp((n - 1.0) * std::log(rho) - e * std::log1p(rho * rho)); };
  return beta_constant(p) * sphere_area(p.n()) * integrate(f, 0.0, infinity, spec).value;
}

/// C0 = G^2((n+2sigma)/4) / (G(n/2) G(sigma)).
inline double c0_constant(const ConformalParams& p) {
  require_unit_order(p, "c0_constant");
  const double n = p.n(), s = p.sigma();
  const double g = gamma(0.25 * (n + 2.0 * s));
  return g * g / (gamma(0.5 * n) * gamma(s));
}

namespace detail {

inline void check_point(double x_norm, double t, const char* where) {
  if (!(x_norm >= 0.0) || !(t >= 0.0) || !std::isfinite(x_norm) || !std::isfinite(t))
    throw domain_error(std::string(where) + ": need finite x_norm >= 0 and t >= 0");
  if (x_norm == 0.0 && t == 0.0) throw domain_error(std::string(where) + ": (x, t) = (0, 0) is singular");
}

// a = b = (n - 2sigma)/4, c = n/2
inline Hyp2F1Args bubble_args(const ConformalParams& p, const ExtensionSample& s) {
  const double a = 0.25 * (p.n() - 2.0 * p.sigma());
  return {a, a, 0.5 * p.n(), s.z, s.one_minus_z};
}

}  // namespace detail

/// Geometry of the point (|x|, t); `value` is left at 0.
inline ExtensionSample extension_point(double x_norm, double t) {
  detail::check_point(x_norm, t, "extension_point");
  ExtensionSample s;
  s.x_norm = x_norm;
  s.t = t;
  const double r2 = x_norm * x_norm + t * t;
  s.r = std::sqrt(r2);
  s.z = x_norm * x_norm / r2;
  s.one_minus_z = t * t / r2;
  return s;
}

/// Closed form of the extension of u0 = M0 |x|^{-(n-2sigma)/2}:
///   U0 = C0 M0 r^{-(n-2sigma)/2} 2F1((n-2sigma)/4, (n-2sigma)/4; n/2; z).
inline ExtensionSample bubble_extension_sample(const ConformalParams& p, double M0, double x_norm,
                                               double t, const QuadratureSpec& spec = {}) {
  require_unit_order(p, "bubble_extension_closed");
  ExtensionSample s = extension_point(x_norm, t);
  s.value = c0_constant(p) * M0 * std::pow(s.r, -p.slow_exponent()) * hyp2f1(detail::bubble_args(p, s), spec);
  return s;
}

inline double bubble_extension_closed(const ConformalParams& p, double M0, double x_norm, double t,
                                      const QuadratureSpec& spec = {}) {
  return bubble_extension_sample(p, M0, x_norm, t, spec).value;
}

/// Extension of u0 by quadrature, using the Feynman parametrization with
/// A = |x-y|^2 + t^2, B = |y|^2 and the radial Beta integral over y:
///   U0 = beta M0 t^{2sigma} pi^{n/2} G((n+2sigma)/4) / (G((n+2sigma)/2) G((n-2sigma)/4))
///        * int_0^1 s^{(n+2sigma)/4-1} (1-s)^{(n-2sigma)/4-1} ((1-s)|x|^2 + t^2)^{-(n+2sigma)/4} ds.
inline double bubble_extension_quadrature(const ConformalParams& p, double M0, double x_norm, double t,
                                          const QuadratureSpec& spec = {}) {
  require_unit_order(p, "bubble_extension_quadrature");
  detail::check_point(x_norm, t, "bubble_extension_quadrature");
  if (!(t > 0.0)) throw domain_error("bubble_extension_quadrature: needs t > 0");
  const double n = p.n(), sg = p.sigma();
  const double e1 = 0.25 * (n + 2.0 * sg), e2 = 0.25 * (n - 2.0 * sg);
  const double x2 = x_norm * x_norm, t2 = t * t;
  auto f = [&](double, double s, double one_minus_s) {
    return std::exp((e1 - 1.0) * std::log(s) + (e2 - 1.0) * std::log(one_minus_s) -
                    e1 * std::log(one_minus_s * x2 + t2));
  };
  const double integral = integrate(f, 0.0, 1.0, spec).value;
  const double pref = beta_constant(p) * M0 * std::pow(t, 2.0 * sg) * std::pow(std::numbers::pi, 0.5 * n) *
                      gamma(e1) / (gamma(0.5 * n + sg) * gamma(e2));
  return pref * integral;
}

/// Extension of u0 by direct convolution in polar coordinates around the
/// origin: a radial integral over |y| (split at |y| = |x|) of a zonal sphere integral.
inline double bubble_extension_polar(const ConformalParams& p, double M0, double x_norm, double t,
                                     const QuadratureSpec& spec = {}) {
  require_unit_order(p, "bubble_extension_polar");
  detail::check_point(x_norm, t, "bubble_extension_polar");
  if (!(t > 0.0)) throw domain_error("bubble_extension_polar: needs t > 0");
  const int n = p.n();
  const double sg = p.sigma(), kexp = 0.5 * (n + 2.0 * sg);
  const double t2 = t * t;
  auto radial = [&](double rho) {
    const double d = x_norm - rho;
    auto g = [&](double, double, double one_minus_w) {
      return std::pow(d * d + 2.0 * x_norm * rho * one_minus_w + t2, -kexp);
    };
    const double sphere = zonal_sphere_integral(n, g, spec);
    if (sphere == 0.0) return 0.0;
    return std::exp((n - 1.0 - p.slow_exponent()) * std::log(rho) + std::log(sphere));
  };
  double total = 0.0;
  if (x_norm > 0.0) total += integrate(radial, 0.0, x_norm, spec).value;
  total += integrate(radial, x_norm, infinity, spec).value;
  return beta_constant(p) * M0 * std::pow(t, 2.0 * sg) * total;
}

/// Central-difference Delta_b U = U_rr + (n-1)/r U_r + U_tt + (b/t) U_t of a
/// field U(|x|, t) that is radial in x.
template <class Field>
double weighted_laplacian(Field&& U, int n, double b, double x_norm, double t, double h) {
  if (!(h > 0.0) || !(t > 2.0 * h) || !(x_norm > 2.0 * h))
    throw domain_error("weighted_laplacian: need h > 0, t > 2h and |x| > 2h; got h = " + detail::num(h) +
                       ", t = " + detail::num(t) + ", |x| = " + detail::num(x_norm));
  const double u0 = U(x_norm, t);
  const double uxp = U(x_norm + h, t), uxm = U(x_norm - h, t);
  const double utp = U(x_norm, t + h), utm = U(x_norm, t - h);
  const double h2 = h * h;
  const double urr = (uxp - 2.0 * u0 + uxm) / h2, ur = (uxp - uxm) / (2.0 * h);
  const double utt = (utp - 2.0 * u0 + utm) / h2, ut = (utp - utm) / (2.0 * h);
  return urr + (n - 1.0) / x_norm * ur + utt + b / t * ut;
}

/// Delta_b applied to the closed-form extension U0; vanishes up to O(h^2).
inline double weighted_laplacian_residual(const ConformalParams& p, double M0, double x_norm, double t,
                                          double h, const QuadratureSpec& spec = {}) {
  require_unit_order(p, "weighted_laplacian_residual");
  auto U = [&](double x, double tt) { return bubble_extension_closed(p, M0, x, tt, spec); };
  return weighted_laplacian(U, p.n(), p.b(), x_norm, t, h);
}

/// -t^{1-2sigma} dU0/dt at (|x|, t), evaluated from
///   dU0/dt = -C0 M0 t r^{-(n-2sigma)/2-2} ((n-2sigma)/2 F(z) + 2 z F'(z)),
/// with F' = (2a^2/n) (1-z)^{sigma-1} 2F1((n+2sigma)/4, (n+2sigma)/4; n/2+1; z)
/// so that the (1-z)^{sigma-1} blow-up cancels against t^{2-2sigma} analytically.
inline double neumann_sample(const ConformalParams& p, double M0, double x_norm, double t,
                             const QuadratureSpec& spec = {}) {
  require_unit_order(p, "neumann_sample");
  if (!(x_norm > 0.0) || !(t > 0.0)) throw domain_error("neumann_sample: needs |x| > 0 and t > 0");
  const ExtensionSample s = extension_point(x_norm, t);
  const double n = p.n(), sg = p.sigma(), a = 0.25 * (n - 2.0 * sg), q = 0.25 * (n + 2.0 * sg);
  const double F = hyp2f1(detail::bubble_args(p, s), spec);
  const double H = hyp2f1({q, q, 0.5 * n + 1.0, s.z, s.one_minus_z}, spec);
  // t^{2-2sigma} (1-z)^{sigma-1} = r^{2-2sigma}
  const double term_f = p.slow_exponent() * std::pow(t, 2.0 - 2.0 * sg) * F;
  const double term_h = 2.0 * s.z * (2.0 * a * a / n) * std::pow(s.r, 2.0 - 2.0 * sg) * H;
  return c0_constant(p) * M0 * std::pow(s.r, -p.slow_exponent() - 2.0) * (term_f + term_h);
}

/// The closed-form limit 2 C0 M0 G(n/2) G(1-sigma) / G^2((n-2sigma)/4) |x|^{-(n+2sigma)/2}.
inline double neumann_trace_closed(const ConformalParams& p, double M0, double x_norm) {
  require_unit_order(p, "neumann_trace_closed");
  const double n = p.n(), sg = p.sigma();
  const double ga = gamma(0.25 * (n - 2.0 * sg));
  return 2.0 * c0_constant(p) * M0 * gamma(0.5 * n) * gamma(1.0 - sg) / (ga * ga) *
         std::pow(x_norm, -0.5 * (n + 2.0 * sg));
}

/// Default Richardson ladder t_k = 0.05 |x| 2^{-k}, k = 0..5.
inline std::vector<double> default_t_sequence(double x_norm) {
  std::vector<double> ts;
  for (int k = 0; k <= 5; ++k) ts.push_back(0.05 * x_norm * std::ldexp(1.0, -k));
  return ts;
}

struct NeumannTrace {
  double value = 0.0;
  std::vector<double> samples;
  std::vector<double> estimates;  // one per consecutive triple
};

/// Limit of -t^{1-2sigma} dU0/dt as t -> 0, by three-term Richardson
/// extrapolation over consecutive triples of `t_sequence`, eliminating the
/// t^{2-2sigma} and t^2 corrections. Throws convergence_error when the last
/// two estimates differ by more than 1e-3 relative.
inline NeumannTrace neumann_trace(const ConformalParams& p, double M0, double x_norm,
                                  const std::vector<double>& t_sequence, const QuadratureSpec& spec = {}) {
  require_unit_order(p, "neumann_trace");
  if (t_sequence.size() < 4) throw domain_error("neumann_trace: need at least 4 values of t");
  for (std::size_t i = 0; i < t_sequence.size(); ++i) {
    if (!(t_sequence[i] > 0.0)) throw domain_error("neumann_trace: t values must be positive");
    if (i > 0 && !(t_sequence[i] < t_sequence[i - 1]))
      throw domain_error("neumann_trace: t values must be strictly decreasing");
  }
  const double e1 = 2.0 - 2.0 * p.sigma(), e2 = 2.0;
  NeumannTrace out;
  for (double t : t_sequence) out.samples.push_back(neumann_sample(p, M0, x_norm, t, spec));
  for (std::size_t i = 0; i + 2 < t_sequence.size(); ++i) {
    // solve L + A t^e1 + B t^e2 = S at three points (Cramer's rule)
    std::array<std::array<double, 3>, 3> m{};
    std::array<double, 3> rhs{};
    for (int j = 0; j < 3; ++j) {
      const double t = t_sequence[i + j];
      m[j] = {1.0, std::pow(t, e1), std::pow(t, e2)};
      rhs[j] = out.samples[i + j];
    }
    auto det = [](const std::array<std::array<double, 3>, 3>& a) {
      return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
             a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    auto m0 = m;
    for (int j = 0; j < 3; ++j) m0[j][0] = rhs[j];
    out.estimates.push_back(det(m0) / det(m));
  }
  const double last = out.estimates.back(), prev = out.estimates[out.estimates.size() - 2];
  if (!(std::fabs(last - prev) <= 1e-3 * std::fabs(last)))
    throw convergence_error("neumann_trace: Richardson estimates did not settle", last, std::fabs(last - prev));
  out.value = last;
  return out;
}

inline NeumannTrace neumann_trace(const ConformalParams& p, double M0, double x_norm,
                                  const QuadratureSpec& spec = {}) {
  return neumann_trace(p, M0, x_norm, default_t_sequence(x_norm), spec);
}

/// N_{n,sigma} = 2 (C0 / C2) G(n/2) G(1-sigma) / G^2((n-2sigma)/4), which
/// simplifies to 2^{1-2sigma} G(1-sigma) / G(sigma).
inline double neumann_constant(const ConformalParams& p) {
  return neumann_trace_closed(p, 1.0, 1.0) / c2_constant(p);
}

/// The same expression with G(sigma) in place of G(1-sigma); kept only so
/// that verification reports can show which variant the numerics support.
inline double neumann_constant_gamma_sigma_variant(const ConformalParams& p) {
  return neumann_constant(p) * gamma(p.sigma()) / gamma(1.0 - p.sigma());
}

}  // namespace qcv
