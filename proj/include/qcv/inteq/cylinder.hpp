#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

#include "qcv/core/params.hpp"
#include "qcv/core/quadrature.hpp"
#include "qcv/errors.hpp"
#include "qcv/inteq/kernel.hpp"
#include "qcv/inteq/profile.hpp"

namespace qcv {

/// Discretization of V -> K(inf) int J(s) V^tau(t - s) ds on a uniform grid of
/// spacing h. V^tau is taken piecewise linear between grid points and constant
/// beyond the ends, so the operator reduces to the hat weights
/// W_k = int J(s) phi(s/h - k) ds and their tail sums.
class CylOperator {
 public:
  CylOperator(const ConformalParams& p, double h, std::size_t points, const QuadratureSpec& spec = {})
      : p_(p), h_(h) {
    if (!(h > 0.0) || points < 2) throw domain_error("CylOperator: need h > 0 and at least 2 grid points");
    const QuadratureSpec inner = detail::tighter(spec);
    auto J = [&](double s) { return kernel_J(p, s, inner); };
    // cell j = [jh, (j+1)h]: rise_[j] = int J (s - jh)/h, fall_[j] = int J ((j+1)h - s)/h
    rise_.resize(points);
    fall_.resize(points);
    for (std::size_t j = 0; j < points; ++j) {
      const double a = static_cast<double>(j) * h, b = a + h;
      rise_[j] = integrate([&](double s, double da, double) { return J(s) * da / h; }, a, b, spec).value;
      fall_[j] = integrate([&](double s, double, double db) { return J(s) * db / h; }, a, b, spec).value;
    }
    const double far = integrate(J, static_cast<double>(points) * h, infinity, spec).value;

    weights_.assign(points, 0.0);
    weights_[0] = 2.0 * fall_[0];
    for (std::size_t k = 1; k < points; ++k) weights_[k] = rise_[k - 1] + fall_[k];
    // tails_[i] = sum_{k > i} W_k, accumulated from the far end
    tails_.assign(points, 0.0);
    double beyond = far;  // int_{(i+1)h}^inf J
    for (std::size_t i = points; i-- > 0;) {
      tails_[i] = rise_[i] + beyond;
      beyond += rise_[i] + fall_[i];
    }
    mass_ = 2.0 * beyond;
  }

  const ConformalParams& params() const { return p_; }
  double spacing() const { return h_; }
  std::size_t points() const { return weights_.size(); }
  /// Row sum of the operator, an approximation of C(n, sigma).
  double mass() const { return mass_; }
  double weight(std::size_t k) const { return weights_.at(k); }

  CylProfile apply(const CylProfile& V, double k_infinity) const {
    V.validate();
    if (V.size() != points() || std::fabs(V.h - h_) > 1e-12 * h_)
      throw domain_error("CylOperator::apply: profile grid does not match the operator");
    if (!(k_infinity > 0.0)) throw domain_error("CylOperator::apply: k_infinity must be positive");
    const std::size_t N = V.size();
    const double tau = p_.tau();
    std::vector<double> vt(N);
    for (std::size_t j = 0; j < N; ++j) vt[j] = std::pow(V.values[j], tau);
    CylProfile out = V;
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < N; ++j) s += weights_[i > j ? i - j : j - i] * vt[j];
      s += vt.front() * tails_[i] + vt.back() * tails_[N - 1 - i];
      out.values[i] = k_infinity * s;
    }
    return out;
  }

 private:
  ConformalParams p_;
  double h_;
  std::vector<double> rise_, fall_, weights_, tails_;
  double mass_ = 0.0;
};

inline CylProfile cyl_apply(const ConformalParams& p, const CylProfile& V, double k_infinity,
                            const QuadratureSpec& spec = {}) {
  return CylOperator(p, V.h, V.size(), spec).apply(V, k_infinity);
}

/// Sup-norm residual per iteration.
struct ConvergenceLog {
  std::vector<double> residuals;

  /// First iteration (1-based) whose residual is below `tol`, or 0.
  std::size_t first_below(double tol) const {
    for (std::size_t i = 0; i < residuals.size(); ++i)
      if (residuals[i] < tol) return i + 1;
    return 0;
  }
};

inline void write_csv(std::ostream& out, const ConvergenceLog& log) {
  out << "iter,residual\n";
  for (std::size_t i = 0; i < log.residuals.size(); ++i) out << i + 1 << ',' << detail::fmt17(log.residuals[i]) << '\n';
}

/// plain: V <- (1-theta) V + theta T[V].
/// normalized: T[V] is first rescaled by (<V,V>/<V,T[V]>)^{tau/(tau-1)}, which
/// removes the amplitude instability of the plain scheme (around the constant
/// solution a uniform perturbation is multiplied by 1 - theta + theta tau > 1).
enum class FixedPointScheme { normalized, plain };

enum class FixedPointStatus { converged, max_iterations, diverged };

inline const char* to_string(FixedPointStatus s) {
  switch (s) {
    case FixedPointStatus::converged: return "converged";
    case FixedPointStatus::max_iterations: return "max_iterations";
    default: return "diverged";
  }
}

struct FixedPointResult {
  CylProfile profile;
  ConvergenceLog log;
  FixedPointStatus status = FixedPointStatus::max_iterations;

  bool converged() const { return status == FixedPointStatus::converged; }
};

struct FixedPointOptions {
  double damping = 0.5;
  int max_iters = 500;
  /// Stop once sup|T[V] - V| / sup|V| falls below this.
  double tol = 1e-8;
  FixedPointScheme scheme = FixedPointScheme::normalized;
  /// Consecutive residual increases that count as divergence.
  int growth_window = 50;
};

inline FixedPointResult solve_fixed_point(const CylOperator& T, double k_infinity, const CylProfile& initial,
                                          const FixedPointOptions& opt = {}) {
  if (!(opt.damping > 0.0) || !(opt.damping <= 1.0)) throw domain_error("solve_fixed_point: damping must lie in (0, 1]");
  if (opt.max_iters < 1 || !(opt.tol > 0.0)) throw domain_error("solve_fixed_point: need max_iters >= 1 and tol > 0");
  initial.validate();
  const double gamma = T.params().tau() / (T.params().tau() - 1.0);
  FixedPointResult res;
  res.profile = initial;
  CylProfile& V = res.profile;
  int growth = 0;
  for (int it = 1; it <= opt.max_iters; ++it) {
    const CylProfile TV = T.apply(V, k_infinity);
    double diff = 0.0, vmax = 0.0, vv = 0.0, vt = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) {
      diff = std::max(diff, std::fabs(TV.values[i] - V.values[i]));
      vmax = std::max(vmax, std::fabs(V.values[i]));
      vv += V.values[i] * V.values[i];
      vt += V.values[i] * TV.values[i];
    }
    const double r = diff / vmax;
    if (!std::isfinite(r)) {
      res.status = FixedPointStatus::diverged;
      return res;
    }
    if (!res.log.residuals.empty() && r > res.log.residuals.back())
      ++growth;
    else
      growth = 0;
    res.log.residuals.push_back(r);
    if (r < opt.tol) {
      res.status = FixedPointStatus::converged;
      return res;
    }
    if (growth >= opt.growth_window) {
      res.status = FixedPointStatus::diverged;
      return res;
    }
    const double scale = opt.scheme == FixedPointScheme::normalized ? std::pow(vv / vt, gamma) : 1.0;
    for (std::size_t i = 0; i < V.size(); ++i)
      V.values[i] = (1.0 - opt.damping) * V.values[i] + opt.damping * scale * TV.values[i];
  }
  res.status = FixedPointStatus::max_iterations;
  return res;
}

inline FixedPointResult solve_fixed_point(const ConformalParams& p, double k_infinity, const CylProfile& initial,
                                          const FixedPointOptions& opt = {}, const QuadratureSpec& spec = {}) {
  return solve_fixed_point(CylOperator(p, initial.h, initial.size(), spec), k_infinity, initial, opt);
}

}  // namespace qcv
