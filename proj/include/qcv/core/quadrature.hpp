#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qcv/errors.hpp"

namespace qcv {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class QuadScheme { double_exponential, adaptive_subdivision };

struct QuadratureSpec {
  QuadScheme scheme = QuadScheme::double_exponential;
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_levels = 12;
  int max_subdivisions = 400;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_levels < 1 || max_subdivisions < 1)
      throw domain_error("quadrature spec requires rel_tol > 0, abs_tol > 0, max_levels >= 1, "
                         "max_subdivisions >= 1");
  }

  QuadratureSpec with_rel_tol(double r) const {
    QuadratureSpec s = *this;
    s.rel_tol = r;
    return s;
  }
};

struct QuadResult {
  double value = 0.0;
  double err_estimate = 0.0;
  int levels = 0;
  long evaluations = 0;
};

namespace detail {

// Uniform calling convention: integrands may take x alone, or x together with
// its distances to the two interval ends. The distance form lets callers
// evaluate factors like (1-x)^p without cancellation next to an endpoint.
template <class F>
struct Integrand {
  F& f;
  static constexpr bool distance_aware = std::is_invocable_v<F&, double, double, double>;

  double operator()(double x, double da, double db) const {
    double v;
    if constexpr (distance_aware)
      v = static_cast<double>(f(x, da, db));
    else
      v = static_cast<double>(f(x));
    if (!std::isfinite(v))
      throw domain_error("integrand returned a non-finite value at x = " + num(x));
    return v;
  }
};

inline bool converged(double cur, double prev, const QuadratureSpec& s) {
  return std::fabs(cur - prev) <= std::max(s.abs_tol, s.rel_tol * std::fabs(cur));
}

// Shared level driver for the double-exponential rules. `node(t, h)` returns
// the weighted contribution w(t)·f(x(t)) of one abscissa, or 0 when the
// abscissa is unusable (underflowed weight or endpoint rounding).
template <class Node>
QuadResult de_levels(Node&& node, double t_cap, const QuadratureSpec& spec, const char* name) {
  constexpr double h0 = 0.5;
  constexpr int min_level = 3;
  const int kmax = static_cast<int>(std::floor(t_cap / h0));

  // Level 0 decides how far out the later levels need to go.
  std::vector<double> terms(2 * kmax + 1);
  double big = 0.0;
  long evals = 0;
  for (int k = -kmax; k <= kmax; ++k) {
    terms[k + kmax] = node(k * h0);
    ++evals;
    big = std::max(big, std::fabs(terms[k + kmax]));
  }
  const double negligible = 1e-20 * big;
  int lo = -kmax, hi = kmax;
  while (lo < 0 && std::fabs(terms[lo + kmax]) <= negligible) ++lo;
  while (hi > 0 && std::fabs(terms[hi + kmax]) <= negligible) --hi;
  const double t_lo = std::max(-t_cap, (lo - 1) * h0);
  const double t_hi = std::min(t_cap, (hi + 1) * h0);

  double sum = 0.0;
  for (int k = -kmax; k <= kmax; ++k) sum += terms[k + kmax];
  double h = h0;
  double prev = h * sum;
  double err = std::fabs(prev);
  for (int level = 1; level <= spec.max_levels; ++level) {
    h *= 0.5;
    double add = 0.0;
    // odd multiples of h inside [t_lo, t_hi], visited in increasing t
    const long first = static_cast<long>(std::ceil(t_lo / h));
    const long last = static_cast<long>(std::floor(t_hi / h));
    for (long j = first; j <= last; ++j) {
      if ((j & 1L) == 0) continue;
      add += node(static_cast<double>(j) * h);
      ++evals;
    }
    sum += add;
    const double cur = h * sum;
    err = std::fabs(cur - prev);
    if (level >= min_level && converged(cur, prev, spec)) return {cur, err, level, evals};
    prev = cur;
  }
  throw convergence_error(std::string(name) + ": no convergence after " +
                              std::to_string(spec.max_levels) + " levels",
                          prev, err);
}

// tanh-sinh on a finite interval
template <class G>
QuadResult tanh_sinh(const G& g, double a, double b, const QuadratureSpec& spec) {
  const double half = 0.5 * (b - a);
  auto node = [&](double t) -> double {
    const double u = 0.5 * std::numbers::pi * std::sinh(t);
    const double e = std::exp(-2.0 * std::fabs(u));
    const double w = half * 0.5 * std::numbers::pi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
    if (w == 0.0) return 0.0;
    const double c = half * 2.0 * e / (1.0 + e);  // distance to the nearer end
    if (c == 0.0) return 0.0;
    double x, da, db;
    if (t < 0.0) {
      x = a + c;
      da = c;
      db = (b - a) - c;
    } else {
      x = b - c;
      db = c;
      da = (b - a) - c;
    }
    if (!G::distance_aware && (x <= a || x >= b)) return 0.0;
    return w * g(x, da, db);
  };
  return de_levels(node, 6.0, spec, "tanh-sinh quadrature");
}

// exp-sinh on [a, inf)
template <class G>
QuadResult exp_sinh(const G& g, double a, const QuadratureSpec& spec) {
  auto node = [&](double t) -> double {
    const double u = 0.5 * std::numbers::pi * std::sinh(t);
    if (u > 700.0) return 0.0;
    const double d = std::exp(u);
    const double w = d * 0.5 * std::numbers::pi * std::cosh(t);
    if (w == 0.0 || d == 0.0) return 0.0;
    const double x = a + d;
    if (!G::distance_aware && x <= a) return 0.0;
    if (!std::isfinite(x)) return 0.0;
    return w * g(x, d, infinity);
  };
  return de_levels(node, 6.5, spec, "exp-sinh quadrature");
}

// Gauss-Kronrod 7/15 nodes and weights (abscissae in decreasing order, last is 0).
inline constexpr std::array<double, 8> gk15_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> gk15_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk15_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GKPiece {
  double lo, hi, value, err;
};

// One G7K15 panel of a function of the (possibly mapped) variable u.
template <class H>
GKPiece gk15(const H& h, double lo, double hi) {
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  double fc = h(c);
  double kron = fc * gk15_wk[7];
  double gauss = fc * gk15_wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = r * gk15_x[j];
    const double s = h(c - dx) + h(c + dx);
    kron += gk15_wk[j] * s;
    if (j % 2 == 1) gauss += gk15_wg[j / 2] * s;
  }
  return {lo, hi, kron * r, std::fabs((kron - gauss) * r)};
}

template <class H>
QuadResult adaptive_gk(const H& h, double lo, double hi, const QuadratureSpec& spec) {
  std::vector<GKPiece> pieces{gk15(h, lo, hi)};
  long evals = 15;
  auto totals = [&] {
    double v = 0.0, e = 0.0;
    for (const auto& p : pieces) {
      v += p.value;
      e += p.err;
    }
    return std::pair{v, e};
  };
  for (int it = 0;; ++it) {
    auto [v, e] = totals();
    if (e <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(v)))
      return {v, e, static_cast<int>(pieces.size()), evals};
    if (it >= spec.max_subdivisions)
      throw convergence_error("adaptive Gauss-Kronrod quadrature: subdivision limit of " +
                                  std::to_string(spec.max_subdivisions) + " reached",
                              v, e);
    std::size_t worst = 0;
    for (std::size_t i = 1; i < pieces.size(); ++i)
      if (pieces[i].err > pieces[worst].err) worst = i;
    const GKPiece p = pieces[worst];
    const double mid = 0.5 * (p.lo + p.hi);
    pieces[worst] = gk15(h, p.lo, mid);
    pieces.insert(pieces.begin() + static_cast<std::ptrdiff_t>(worst) + 1, gk15(h, mid, p.hi));
    evals += 30;
  }
}

template <class G>
QuadResult adaptive_finite(const G& g, double a, double b, const QuadratureSpec& spec) {
  auto h = [&](double x) { return g(x, x - a, b - x); };
  return adaptive_gk(h, a, b, spec);
}

template <class G>
QuadResult adaptive_half_line(const G& g, double a, const QuadratureSpec& spec) {
  auto h = [&](double u) {
    const double one_minus = 1.0 - u;
    const double d = u / one_minus;
    return g(a + d, d, infinity) / (one_minus * one_minus);
  };
  return adaptive_gk(h, 0.0, 1.0, spec);
}

template <class G>
QuadResult half_line(const G& g, double a, const QuadratureSpec& spec) {
  return spec.scheme == QuadScheme::double_exponential ? exp_sinh(g, a, spec)
                                                       : adaptive_half_line(g, a, spec);
}

// a < b here
template <class F>
QuadResult integrate_ordered(F& f, double a, double b, const QuadratureSpec& spec) {
  Integrand<F> g{f};
  const bool a_inf = std::isinf(a), b_inf = std::isinf(b);
  if (!a_inf && !b_inf) {
    return spec.scheme == QuadScheme::double_exponential ? tanh_sinh(g, a, b, spec)
                                                         : adaptive_finite(g, a, b, spec);
  }
  if (!a_inf) return half_line(g, a, spec);
  if (!b_inf) {
    auto mirrored = [&](double x, double d, double) { return g(-x, infinity, d); };
    Integrand<decltype(mirrored)> gm{mirrored};
    return half_line(gm, -b, spec);
  }
  // whole line: fold onto [0, inf)
  auto folded = [&](double x, double, double) {
    return g(x, infinity, infinity) + g(-x, infinity, infinity);
  };
  Integrand<decltype(folded)> gf{folded};
  return half_line(gf, 0.0, spec);
}

}  // namespace detail

/// Integrates f over [a, b]; either end may be infinite. f may be callable as
/// f(x) or as f(x, x - a, b - x), the latter receiving endpoint distances
/// computed without cancellation. Throws convergence_error when the tolerance
/// is not met and domain_error on a non-finite sample.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (std::isnan(a) || std::isnan(b)) throw domain_error("integrate: NaN interval endpoint");
  if (a == b) return {};
  using FR = std::remove_reference_t<F>;
  if (a < b) return detail::integrate_ordered(f, a, b, spec);
  // reversed orientation; the distances swap roles
  auto g = [&](double x, double da, double db) {
    if constexpr (std::is_invocable_v<FR&, double, double, double>)
      return static_cast<double>(f(x, db, da));
    else
      return static_cast<double>(f(x));
  };
  QuadResult r = detail::integrate_ordered(g, b, a, spec);
  r.value = -r.value;
  return r;
}

}  // namespace qcv
