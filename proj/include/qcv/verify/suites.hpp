#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qcv/extension.hpp"
#include "qcv/fraclap.hpp"
#include "qcv/inteq/cylinder.hpp"
#include "qcv/inteq/kelvin.hpp"
#include "qcv/inteq/kernel.hpp"
#include "qcv/inteq/profile.hpp"
#include "qcv/pohozaev.hpp"
#include "qcv/specfun/hyp2f1.hpp"
#include "qcv/verify/report.hpp"

namespace qcv {

namespace verify_detail {

inline std::string ns(int n, double sigma) { return "n=" + std::to_string(n) + " sigma=" + shortest(sigma); }

struct NS {
  int n;
  double sigma;
};

// the (n, sigma) family shared by the hypergeometric, Q0 and bracket checks
inline const std::vector<NS>& family() {
  static const std::vector<NS> f = {{3, 0.5}, {4, 0.3}, {5, 0.75}, {7, 0.9}};
  return f;
}

// worst relative deviation of `got` from `want`, as (want_i, got_i, error)
inline std::tuple<double, double, double> worst_rel(const std::vector<double>& want, const std::vector<double>& got) {
  std::tuple<double, double, double> w{0.0, 0.0, -1.0};
  for (std::size_t i = 0; i < want.size(); ++i) {
    const double e = relative_error(got[i], want[i]);
    if (!(e <= std::get<2>(w))) w = {want[i], got[i], e};
  }
  return w;
}

}  // namespace verify_detail

/// Exact identity of the two g_m recipes over m = 1..6, n = 2m+1..2m+20.
inline VerificationReport suite_gm() {
  VerificationReport r{"gm", {}, {}};
  for (int m = 1; m <= 6; ++m)
    for (int n = 2 * m + 1; n <= 2 * m + 20; ++n) {
      const std::string id = "AC1.gm.n" + std::to_string(n) + ".m" + std::to_string(m);
      const std::string ps = "n=" + std::to_string(n) + " m=" + std::to_string(m);
      r.cases.push_back(timed_case("gm", id, ps, [&] {
        const rational prod = gm_coefficient_product(n, m), rec = gm_coefficient_recursive(n, m);
        const double dp = static_cast<double>(prod), dr = static_cast<double>(rec);
        CaseRecord c = compare_case("gm", id, ps, dr, dp, 0.0);
        c.rel_error = prod == rec ? 0.0 : static_cast<double>(abs(prod - rec) / abs(prod));
        c.pass = prod == rec;
        c.note = "exact rational comparison";
        return c;
      }));
    }
  return r;
}

/// Gauss value at z = 1 and the Pfaff and Euler transformations on the family.
inline VerificationReport suite_hyp2f1() {
  using namespace verify_detail;
  VerificationReport r{"hyp2f1", {}, {}};
  for (const auto& f : family()) {
    const double a = 0.25 * (f.n - 2.0 * f.sigma), c = 0.5 * f.n;
    const std::string base = ns(f.n, f.sigma);
    const std::string id = "AC2.hyp2f1.gauss_at_one." + base;
    r.cases.push_back(timed_case("hyp2f1", id, base, [&] {
      return compare_case("hyp2f1", id, base, hyp2f1_gauss_at_one(a, a, c), hyp2f1_euler_integral({a, a, c, 1.0, 0.0}),
                          1e-8);
    }));
  }
  for (const char* kind : {"pfaff", "euler"}) {
    const bool pfaff = std::string(kind) == "pfaff";
    for (const auto& f : family())
      for (int k = 1; k <= 9; ++k) {
        const double a = 0.25 * (f.n - 2.0 * f.sigma), c = 0.5 * f.n, z = 0.1 * k;
        const std::string ps = ns(f.n, f.sigma) + " z=" + shortest(z);
        const std::string id = std::string("AC2.hyp2f1.") + kind + "." + ps;
        r.cases.push_back(timed_case("hyp2f1", id, ps, [&] {
          const double lhs = hyp2f1({a, a, c, z});
          const double rhs = pfaff ? std::pow(1.0 - z, -a) * hyp2f1({a, c - a, c, z / (z - 1.0)})
                                   : std::pow(1.0 - z, c - 2.0 * a) * hyp2f1({c - a, c - a, c, z});
          return compare_case("hyp2f1", id, ps, lhs, rhs, 1e-9);
        }));
      }
  }
  return r;
}

/// Q0 by quadrature against its closed form, plus the value -4 at n = 3, sigma = 1/2.
inline VerificationReport suite_q0() {
  using namespace verify_detail;
  VerificationReport r{"q0", {}, {}};
  for (const auto& f : family()) {
    const std::string ps = ns(f.n, f.sigma) + " M0=1";
    const std::string id = "AC3.q0." + ns(f.n, f.sigma);
    r.cases.push_back(timed_case("q0", id, ps, [&] {
      const auto p = ConformalParams::make(f.n, f.sigma);
      return compare_case("q0", id, ps, q0_closed(p, 1.0), q0_quadrature(p, 1.0), 1e-6);
    }));
  }
  const std::string id = "AC3.q0.minus_four", ps = "n=3 sigma=0.5 M0=1";
  r.cases.push_back(timed_case("q0", id, ps, [&] {
    CaseRecord c = compare_case("q0", id, ps, -4.0, q0_quadrature(ConformalParams::make(3, 0.5), 1.0), 1e-6);
    c.note = "closed_value is the derived constant -4";
    return c;
  }));
  return r;
}

/// Bracket identity: closed lhs against the quadrature rhs.
inline VerificationReport suite_bracket() {
  using namespace verify_detail;
  VerificationReport r{"bracket", {}, {}};
  for (const auto& f : family()) {
    const std::string ps = ns(f.n, f.sigma), id = "AC4.bracket." + ps;
    r.cases.push_back(timed_case("bracket", id, ps, [&] {
      const auto [lhs, rhs] = bracket_identity_check(ConformalParams::make(f.n, f.sigma));
      return compare_case("bracket", id, ps, lhs, rhs, 1e-6);
    }));
  }
  return r;
}

/// Extension: closed form against Feynman quadrature, Delta_b residual,
/// Neumann trace and the verdict on the Neumann constant.
inline VerificationReport suite_extension() {
  using namespace verify_detail;
  VerificationReport r{"extension", {}, {}};
  struct Pt {
    int n;
    double sigma, x, t;
  };
  const std::vector<Pt> pts = {{2, 0.25, 1.0, 1.0}, {2, 0.5, 0.3, 2.0},  {2, 0.75, 2.0, 0.1}, {3, 0.25, 0.5, 0.5},
                               {3, 0.5, 1.0, 1.0},  {3, 0.5, 2.0, 1.0},  {3, 0.75, 1.5, 0.2}, {5, 0.25, 3.0, 0.7},
                               {5, 0.75, 1.0, 3.0}, {5, 0.5, 0.2, 0.05}, {7, 0.25, 1.0, 0.5}, {7, 0.75, 4.0, 1.0}};
  for (const auto& q : pts) {
    const std::string ps = ns(q.n, q.sigma) + " x=" + shortest(q.x) + " t=" + shortest(q.t);
    const std::string id = "AC5.extension.feynman." + ps;
    r.cases.push_back(timed_case("extension", id, ps, [&] {
      const auto p = ConformalParams::make(q.n, q.sigma);
      return compare_case("extension", id, ps, bubble_extension_closed(p, 1.0, q.x, q.t),
                          bubble_extension_quadrature(p, 1.0, q.x, q.t), 1e-7);
    }));
  }
  for (const Pt& q : {Pt{3, 0.5, 1.0, 1.0}, Pt{4, 0.3, 2.0, 0.5}, Pt{2, 0.75, 0.5, 0.8}, Pt{7, 0.25, 1.0, 0.3}}) {
    const std::string ps = ns(q.n, q.sigma) + " x=" + shortest(q.x) + " t=" + shortest(q.t);
    const std::string id = "AC5.extension.harmonic." + ps;
    r.cases.push_back(timed_case("extension", id, ps, [&] {
      const auto p = ConformalParams::make(q.n, q.sigma);
      const double mn = std::min(q.x, q.t);
      const double res = weighted_laplacian_residual(p, 1.0, q.x, q.t, 1e-3 * mn);
      const double scaled = std::fabs(res) * mn * mn / std::fabs(bubble_extension_closed(p, 1.0, q.x, q.t));
      CaseRecord c = compare_case("extension", id, ps, scaled, 0.0, 1e-5);
      c.note = "residual scaled by min(x,t)^2/|U0|, h = 1e-3 min(x,t)";
      return c;
    }));
  }
  for (int n : {2, 3, 5, 7})
    for (double sg : {0.25, 0.5, 0.75}) {
      const std::string ps = ns(n, sg) + " x=1 M0=1", id = "AC5.extension.neumann." + ns(n, sg);
      r.cases.push_back(timed_case("extension", id, ps, [&] {
        const auto p = ConformalParams::make(n, sg);
        return compare_case("extension", id, ps, neumann_trace_closed(p, 1.0, 1.0), neumann_trace(p, 1.0, 1.0).value,
                            1e-4);
      }));
    }
  // verdict: the measured N against both candidate forms, away from sigma = 1/2 where they coincide
  for (double sg : {0.25, 0.75}) {
    const std::string ps = ns(3, sg), id = "AC5.extension.neumann_verdict." + ps;
    double measured = 0.0, variant = 0.0;
    r.cases.push_back(timed_case("extension", id, ps, [&] {
      const auto p = ConformalParams::make(3, sg);
      measured = neumann_trace(p, 1.0, 1.0).value / c2_constant(p);
      variant = neumann_constant_gamma_sigma_variant(p);
      CaseRecord c = compare_case("extension", id, ps, neumann_constant(p), measured, 1e-4);
      c.note = "Gamma(1-sigma) form; Gamma(sigma) variant is off by " + shortest(relative_error(variant, measured));
      c.pass = c.pass && relative_error(variant, measured) > 1e-2;
      return c;
    }));
    r.notes.push_back("Neumann constant verdict at " + ps + ": measured " + shortest(measured) +
                      " supports 2^{1-2sigma} Gamma(1-sigma)/Gamma(sigma); the Gamma(sigma) variant gives " +
                      shortest(variant));
  }
  return r;
}

/// Sign law of the Pohozaev limit for integer and fractional order.
inline VerificationReport suite_sign() {
  using namespace verify_detail;
  VerificationReport r{"sign", {}, {}};
  for (int m = 1; m <= 6; ++m)
    for (int n = 2 * m + 1; n <= 2 * m + 20; ++n)
      for (double k : {0.25, 1.0, 7.5}) {
        const std::string ps = "n=" + std::to_string(n) + " m=" + std::to_string(m) + " kinf=" + shortest(k);
        const std::string id = "AC6.sign.integer." + ps;
        r.cases.push_back(timed_case("sign", id, ps, [&] {
          const auto rep = pohozaev_limit_integer(ConformalParams::make(n, m), k);
          CaseRecord c = compare_case("sign", id, ps, rep.sign_factor, -2.0 * m / n, 1e-12);
          c.pass = c.pass && rep.closed_value < 0.0;
          c.note = "closed value " + shortest(rep.closed_value);
          return c;
        }));
      }
  for (const auto& f : family())
    for (double k : {0.5, 1.0, 2.0}) {
      const std::string ps = ns(f.n, f.sigma) + " kinf=" + shortest(k);
      const std::string id = "AC6.sign.fractional." + ps;
      r.cases.push_back(timed_case("sign", id, ps, [&] {
        const auto rep = pohozaev_limit_fractional(ConformalParams::make(f.n, f.sigma), k);
        CaseRecord c = compare_case("sign", id, ps, rep.sign_factor, -2.0 * f.sigma / f.n, 1e-12);
        c.pass = c.pass && rep.closed_value < 0.0;
        c.note = "closed value " + shortest(rep.closed_value);
        return c;
      }));
    }
  return r;
}

/// Kernel mass: C(3, 1/2) = pi^3 by two routes, and positive finite masses elsewhere.
inline VerificationReport suite_kernel() {
  using namespace verify_detail;
  VerificationReport r{"kernel", {}, {}};
  const double c3 = std::pow(std::numbers::pi, 3);
  const std::string ps = ns(3, 0.5);
  r.cases.push_back(timed_case("kernel", "AC7.kernel.direct.n=3 sigma=0.5", ps, [&] {
    return compare_case("kernel", "AC7.kernel.direct.n=3 sigma=0.5", ps, c3, kernel_mass(ConformalParams::make(3, 0.5)),
                        1e-6);
  }));
  r.cases.push_back(timed_case("kernel", "AC7.kernel.logcoth.n=3 sigma=0.5", ps, [&] {
    return compare_case("kernel", "AC7.kernel.logcoth.n=3 sigma=0.5", ps, c3, kernel_mass_logcoth(), 1e-6);
  }));
  for (const NS& f : {NS{3, 0.25}, NS{4, 0.5}, NS{5, 1.5}, NS{7, 2.5}, NS{2, 0.3}}) {
    const std::string q = ns(f.n, f.sigma), id = "AC7.kernel.mass." + q;
    r.cases.push_back(timed_case("kernel", id, q, [&] {
      const auto p = ConformalParams::make(f.n, f.sigma);
      const double direct = kernel_mass(p);
      CaseRecord c = compare_case("kernel", id, q, kernel_mass_closed(p), direct, 1e-6);
      c.pass = c.pass && std::isfinite(direct) && direct > 0.0;
      c.note = "closed value from Riesz inversion";
      return c;
    }));
  }
  return r;
}

/// Cylindrical fixed point at n = 3, sigma = 1/2, K = 1 from 1.1 A.
inline VerificationReport suite_fixedpoint() {
  VerificationReport r{"fixedpoint", {}, {}};
  const auto p = ConformalParams::make(3, 0.5);
  const double A = singular_amplitude(p, 1.0);
  const std::string ps = "n=3 sigma=0.5 kinf=1 damping=0.5 h=0.05 t=[-12,12]";
  FixedPointOptions opt;
  opt.damping = 0.5;
  opt.max_iters = 500;
  opt.tol = 1e-6;
  FixedPointResult res;
  r.cases.push_back(timed_case("fixedpoint", "AC8.fixedpoint.residual", ps, [&] {
    res = solve_fixed_point(p, 1.0, constant_cyl_profile(1.1 * A), opt);
    const std::size_t first = res.log.first_below(1e-4);
    CaseRecord c = compare_case("fixedpoint", "AC8.fixedpoint.residual", ps,
                                first ? res.log.residuals[first - 1] : res.log.residuals.back(), 0.0, 1e-4);
    c.pass = first >= 1 && first <= 500;
    c.note = first ? "below 1e-4 at iteration " + std::to_string(first) : "never below 1e-4";
    return c;
  }));
  r.cases.push_back(timed_case("fixedpoint", "AC8.fixedpoint.limit", ps, [&] {
    if (res.profile.values.empty()) throw convergence_error("fixed point did not run", 0.0, 0.0);
    const auto [want, got, err] = verify_detail::worst_rel(std::vector<double>(res.profile.size(), A), res.profile.values);
    CaseRecord c = compare_case("fixedpoint", "AC8.fixedpoint.limit", ps, want, got, 1e-4);
    c.note = std::string("status ") + to_string(res.status) + ", worst grid point";
    return c;
  }));
  return r;
}

/// Kelvin transform invariances.
inline VerificationReport suite_kelvin() {
  using namespace verify_detail;
  VerificationReport r{"kelvin", {}, {}};
  for (const NS& f : {NS{3, 0.5}, NS{4, 0.3}, NS{6, 2.0}}) {
    const std::string ps = ns(f.n, f.sigma) + " lambda=1", id = "AC9.kelvin.bubble_unit." + ns(f.n, f.sigma);
    r.cases.push_back(timed_case("kelvin", id, ps, [&] {
      const auto p = ConformalParams::make(f.n, f.sigma);
      const auto u = bubble_profile(p, log_radii(12.0, 0.05));
      const auto [want, got, err] = worst_rel(u.values, kelvin_transform(u, p, 1.0).values);
      return compare_case("kelvin", id, ps, want, got, 1e-12);
    }));
  }
  const auto p3 = ConformalParams::make(3, 0.5);
  for (const char* kind : {"bubble", "power"})
    for (double lambda : {0.5, 2.0}) {
      const std::string ps = std::string(kind) + " n=3 sigma=0.5 lambda=" + shortest(lambda);
      const std::string id = std::string("AC9.kelvin.involution.") + kind + ".lambda=" + shortest(lambda);
      r.cases.push_back(timed_case("kelvin", id, ps, [&] {
        const auto radii = log_radii(12.0, 0.01);
        const auto u = std::string(kind) == "bubble" ? bubble_profile(p3, radii) : power_profile(1.7, 0.8, radii);
        const auto back = kelvin_transform(kelvin_transform(u, p3, lambda), p3, lambda);
        const double lo = lambda * lambda / u.radii.back(), hi = lambda * lambda / u.radii.front();
        std::size_t worst = 0;
        double dev = -1.0;
        for (std::size_t i = 0; i < u.size(); ++i)
          if (u.radii[i] >= lo && u.radii[i] <= hi && std::fabs(back.values[i] - u.values[i]) > dev) {
            dev = std::fabs(back.values[i] - u.values[i]);
            worst = i;
          }
        CaseRecord c = compare_case("kelvin", id, ps, u.values[worst], back.values[worst], 1e-8);
        c.rel_error = dev;
        c.pass = dev <= 1e-8;
        c.note = "absolute sup deviation over radii whose image stays on the grid";
        return c;
      }));
    }
  const auto p5 = ConformalParams::make(5, 0.75);
  for (double lambda : {0.1, 0.5, 1.0, 3.0, 40.0}) {
    const std::string ps = "n=5 sigma=0.75 lambda=" + shortest(lambda);
    const std::string id = "AC9.kelvin.power_invariance.lambda=" + shortest(lambda);
    r.cases.push_back(timed_case("kelvin", id, ps, [&] {
      const auto u = power_profile(3.0, p5.slow_exponent(), log_radii(8.0, 0.05));
      const auto [want, got, err] = worst_rel(u.values, kelvin_transform(u, p5, lambda).values);
      return compare_case("kelvin", id, ps, want, got, 1e-12);
    }));
  }
  return r;
}

/// Kazdan-Warner term: zero for constant K, positive and grid-stable for K = r.
inline VerificationReport suite_kazdan_warner() {
  using namespace verify_detail;
  VerificationReport r{"kazdan_warner", {}, {}};
  {
    const std::string ps = "n=3 sigma=0.5 K=2", id = "AC10.kw.constant";
    r.cases.push_back(timed_case("kazdan_warner", id, ps, [&] {
      const auto p = ConformalParams::make(3, 0.5);
      const double v = kazdan_warner(bubble_profile(p, log_radii(12.0, 0.05)), RadialCoefficient::constant(2.0), p);
      CaseRecord c = compare_case("kazdan_warner", id, ps, v, 0.0, 0.0);
      c.pass = v == 0.0;
      c.note = "must be exactly zero";
      return c;
    }));
  }
  for (const NS& f : {NS{3, 0.5}, NS{4, 0.3}, NS{5, 1.5}}) {
    const std::string ps = ns(f.n, f.sigma) + " K=r";
    double fine = 0.0;
    const std::string id = "AC10.kw.refinement." + ns(f.n, f.sigma);
    r.cases.push_back(timed_case("kazdan_warner", id, ps, [&] {
      const auto p = ConformalParams::make(f.n, f.sigma);
      const auto K = RadialCoefficient::linear(0.0, 1.0);
      const double coarse = kazdan_warner(bubble_profile(p, log_radii(12.0, 0.05)), K, p);
      fine = kazdan_warner(bubble_profile(p, log_radii(12.0, 0.025)), K, p);
      CaseRecord c = compare_case("kazdan_warner", id, ps, fine, coarse, 1e-6);
      c.pass = c.pass && fine > 0.0;
      c.note = "h = 0.025 against h = 0.05; must be positive";
      return c;
    }));
    const std::string id2 = "AC10.kw.exact." + ns(f.n, f.sigma);
    r.cases.push_back(timed_case("kazdan_warner", id2, ps, [&] {
      const double n = f.n;
      const double exact = sphere_area(f.n) * 0.5 * beta(0.5 * (n + 1.0), 0.5 * (n - 1.0));
      CaseRecord c = compare_case("kazdan_warner", id2, ps, exact, fine, 1e-6);
      c.note = "closed value |S| B((n+1)/2, (n-1)/2)/2";
      return c;
    }));
  }
  return r;
}

/// Constants: lambda at integer order, the zero of lambda, and the Poisson kernel normalization.
inline VerificationReport suite_constants() {
  using namespace verify_detail;
  VerificationReport r{"constants", {}, {}};
  for (int m = 1; m <= 3; ++m)
    for (int n = 2 * m + 1; n <= 2 * m + 6; ++n) {
      const std::string ps = "n=" + std::to_string(n) + " m=" + std::to_string(m);
      const std::string id = "AC11.constants.integer_order." + ps;
      r.cases.push_back(timed_case("constants", id, ps, [&] {
        const auto p = ConformalParams::make(n, m);
        double worst = -1.0, wf = 0.0, wp = 0.0;
        for (int k = 1; k <= 20; ++k) {
          const double s = (n - 2.0 * m) * k / 21.0;
          const double poly = poly_power_constant(p, s), frac = frac_power_constant(p, s);
          const double e = std::fabs(frac - poly) / std::max(1.0, std::fabs(poly));
          if (e > worst) worst = e, wf = frac, wp = poly;
        }
        CaseRecord c = compare_case("constants", id, ps, wf, wp, 1e-12);
        c.rel_error = worst;
        c.pass = worst <= 1e-12;
        c.note = "worst of 20 exponents, error relative to max(1, |poly|)";
        return c;
      }));
    }
  for (int n = 2; n <= 9; ++n)
    for (double sg : {0.1, 0.5, 0.9, 1.0, 1.3}) {
      if (!(2.0 * sg < n)) continue;
      const std::string ps = ns(n, sg), id = "AC11.constants.riesz_zero." + ps;
      r.cases.push_back(timed_case("constants", id, ps, [&] {
        const auto p = ConformalParams::make(n, sg);
        return compare_case("constants", id, ps, frac_power_constant(p, n - 2.0 * sg), 0.0, 1e-12);
      }));
    }
  for (int n : {2, 3, 5, 7})
    for (double sg : {0.25, 0.5, 0.75}) {
      const std::string ps = ns(n, sg), id = "AC11.constants.beta_normalization." + ps;
      r.cases.push_back(timed_case("constants", id, ps, [&] {
        return compare_case("constants", id, ps, beta_normalization_integral(ConformalParams::make(n, sg)), 1.0, 1e-9);
      }));
    }
  return r;
}

struct Criterion {
  int id;
  const char* suite;
  const char* title;
  VerificationReport (*run)();
};

inline const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> c = {
      {1, "gm", "g_m recursion equals product exactly", suite_gm},
      {2, "hyp2f1", "hypergeometric value at one and transformations", suite_hyp2f1},
      {3, "q0", "fractional Q0 quadrature against closed form", suite_q0},
      {4, "bracket", "bracket identity", suite_bracket},
      {5, "extension", "extension closed form, harmonicity, Neumann trace", suite_extension},
      {6, "sign", "Pohozaev sign law", suite_sign},
      {7, "kernel", "kernel mass", suite_kernel},
      {8, "fixedpoint", "cylindrical fixed point", suite_fixedpoint},
      {9, "kelvin", "Kelvin transform invariances", suite_kelvin},
      {10, "kazdan_warner", "Kazdan-Warner term", suite_kazdan_warner},
      {11, "constants", "consistency of constants", suite_constants},
  };
  return c;
}

inline std::vector<std::string> suite_names() {
  std::vector<std::string> names{"all"};
  for (const auto& c : acceptance_criteria()) names.push_back(c.suite);
  return names;
}

/// Runs one suite by name, or every suite for "all". Suites of "all" run
/// concurrently; the report keeps criterion order.
inline VerificationReport run_suite(const std::string& name) {
  const auto& all = acceptance_criteria();
  if (name != "all") {
    for (const auto& c : all)
      if (name == c.suite) return c.run();
    throw domain_error("unknown suite '" + name + "'");
  }
  std::vector<std::future<VerificationReport>> jobs;
  for (const auto& c : all) jobs.push_back(std::async(std::launch::async, c.run));
  VerificationReport out{"all", {}, {}};
  for (auto& j : jobs) out.append(j.get());
  return out;
}

}  // namespace qcv
