#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "qcv/core/params.hpp"
#include "qcv/errors.hpp"
#include "qcv/inteq/profile.hpp"

namespace qcv {

/// u_lambda(r) = (lambda/r)^{n-2sigma} u(lambda^2/r) on the radii of `u`.
/// Inside the grid u is interpolated (monotone cubic in ln u against ln r);
/// beyond the last radius the tail metadata is used. Below the first radius
/// the first two points are extended as a power law and the result is
/// flagged as extrapolated, as is anything beyond the last radius when the
/// profile has no tail metadata.
inline RadialProfile kelvin_transform(const RadialProfile& u, const ConformalParams& p, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw domain_error("kelvin_transform: lambda must be positive, got " + detail::num(lambda));
  const LogLogInterpolant Y(u);
  const double e = p.fast_exponent();
  const double ll = std::log(lambda);
  const bool has_tail = u.tail_amplitude > 0.0;
  const double tail_slope = -u.tail_exponent;
  const double last_slope = (std::log(u.values.back()) - std::log(u.values[u.size() - 2])) /
                            (std::log(u.radii.back()) - std::log(u.radii[u.size() - 2]));

  RadialProfile out;
  out.radii = u.radii;
  out.values.resize(u.size());
  out.extrapolated.assign(u.size(), false);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = std::log(u.radii[i]);
    const double q = 2.0 * ll - x;
    double lu;
    if (q < Y.x_min()) {
      lu = Y.head_log_value() + Y.head_slope() * (q - Y.x_min());
      out.extrapolated[i] = true;
    } else if (q > Y.x_max()) {
      if (has_tail) {
        lu = std::log(u.tail_amplitude) + tail_slope * q;
      } else {
        lu = std::log(u.values.back()) + last_slope * (q - Y.x_max());
        out.extrapolated[i] = true;
      }
    } else {
      lu = Y(q);
    }
    out.values[i] = std::exp(e * (ll - x) + lu);
  }
  // u ~ c_h rho^{s_h} at the origin turns into c_h lambda^{e + 2 s_h} r^{-(e + s_h)} at infinity
  const double sh = Y.head_slope();
  out.tail_exponent = e + sh;
  out.tail_amplitude = std::exp(Y.head_log_value() - sh * Y.x_min() + (e + 2.0 * sh) * ll);
  return out;
}

/// min over grid radii r < lambda of u_lambda(r) - u(r).
inline double moving_sphere_deficit(const RadialProfile& u, const ConformalParams& p, double lambda) {
  const RadialProfile ul = kelvin_transform(u, p, lambda);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size() && u.radii[i] < lambda; ++i) best = std::min(best, ul.values[i] - u.values[i]);
  if (!std::isfinite(best)) throw domain_error("moving_sphere_deficit: no grid radius inside the sphere of radius lambda");
  return best;
}

/// W(r) = r^{(n-2sigma)/2} u(r) on the grid.
inline std::vector<double> w_values(const RadialProfile& u, const ConformalParams& p) {
  u.validate();
  std::vector<double> w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = std::pow(u.radii[i], p.slow_exponent()) * u.values[i];
  return w;
}

/// min over consecutive grid pairs of W(r_{i+1}) - W(r_i).
inline double ray_monotonicity_W(const RadialProfile& u, const ConformalParams& p) {
  const auto w = w_values(u, p);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < w.size(); ++i) best = std::min(best, w[i + 1] - w[i]);
  return best;
}

/// (tau^q - 1)/(tau - 1) = 1 + tau + ... + tau^{q-1}, by Horner's rule, so
/// that f(q + 1) = tau f(q) + 1 holds exactly in floating point. Very long
/// chains use expm1(q ln tau)/(tau - 1) instead.
inline double bootstrap_exponent(double tau, long q) {
  if (!(tau > 1.0) || !std::isfinite(tau)) throw domain_error("bootstrap_exponent: tau must exceed 1");
  if (q < 1) throw domain_error("bootstrap_exponent: q must be >= 1");
  if (q > 1000000) {
    const double f = std::expm1(static_cast<double>(q) * std::log(tau)) / (tau - 1.0);
    if (!std::isfinite(f))
      throw overflow_error("bootstrap_exponent: overflow at q = " + std::to_string(q) + " for tau = " + detail::num(tau));
    return f;
  }
  double f = 1.0;
  for (long k = 1; k < q; ++k) {
    f = tau * f + 1.0;
    if (!std::isfinite(f))
      throw overflow_error("bootstrap_exponent: overflow at q = " + std::to_string(k + 1) + " for tau = " +
                           detail::num(tau));
  }
  return f;
}

}  // namespace qcv
