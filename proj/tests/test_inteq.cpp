#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "qcv/inteq/cylinder.hpp"
#include "qcv/inteq/kelvin.hpp"
#include "qcv/inteq/kernel.hpp"
#include "qcv/inteq/profile.hpp"

using namespace qcv;

namespace {

constexpr double pi = std::numbers::pi;

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

double sup_rel_dev(const CylProfile& v, double a) {
  double d = 0.0;
  for (double x : v.values) d = std::max(d, std::fabs(x / a - 1.0));
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// profiles

TEST(Profile, CsvRoundTrip) {
  const auto p = ConformalParams::make(3, 0.5);
  const auto u = bubble_profile(p, log_radii(2.0, 0.1));
  std::stringstream ss;
  write_csv(ss, u);
  const auto back = read_radial_csv(ss);
  ASSERT_EQ(back.size(), u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    EXPECT_EQ(back.radii[i], u.radii[i]);
    EXPECT_EQ(back.values[i], u.values[i]);
  }
  const auto v = to_cylinder(u, p);
  std::stringstream cs;
  write_csv(cs, v);
  const auto vb = read_cyl_csv(cs);
  EXPECT_EQ(vb.values, v.values);
  EXPECT_NEAR(vb.h, v.h, 1e-15);
}

TEST(Profile, CsvRejectsMalformedInput) {
  std::stringstream a("x,y\n1,2\n");
  EXPECT_THROW(read_radial_csv(a), domain_error);
  std::stringstream b("r,u\n1,abc\n2,1\n");
  EXPECT_THROW(read_radial_csv(b), domain_error);
  std::stringstream c("r,u\n2,1\n1,1\n");
  EXPECT_THROW(read_radial_csv(c), domain_error);
  std::stringstream d("t,V\n0,1\n0.1,1\n0.3,1\n");
  EXPECT_THROW(read_cyl_csv(d), domain_error);
}

TEST(Profile, CylinderRoundTrip) {
  const auto p = ConformalParams::make(5, 0.75);
  const auto u = bubble_profile(p, log_radii(4.0, 0.05));
  const auto back = from_cylinder(to_cylinder(u, p), p);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_LT(rel(back.values[i], u.values[i]), 1e-13);
  EXPECT_TRUE(u.standard_tail(p));
  EXPECT_TRUE(back.standard_tail(p));
  EXPECT_FALSE(power_profile(1.0, 0.3, u.radii).standard_tail(p));
}

TEST(Profile, InterpolantAccuracy) {
  const auto p = ConformalParams::make(3, 0.5);
  const auto u = bubble_profile(p, log_radii(6.0, 0.05));
  const LogLogInterpolant Y(u);
  for (double x = -5.9; x < 5.9; x += 0.0137) {
    const double r = std::exp(x);
    EXPECT_NEAR(Y(x), -std::log1p(r * r), 5e-8) << x;
  }
  // log-log linear data are reproduced to rounding
  const LogLogInterpolant P(power_profile(2.0, 1.5, log_radii(3.0, 0.1)));
  EXPECT_NEAR(P(0.123), std::log(2.0) - 1.5 * 0.123, 1e-13);
  EXPECT_THROW(P(3.5), domain_error);
}

// ---------------------------------------------------------------------------
// kernel

TEST(Kernel, ClosedFormAtThreeHalf) {
  const auto p = ConformalParams::make(3, 0.5);
  // 2 pi ln coth(t/2), written without the cancellation in cosh t - 1
  for (double t : {1e-6, 0.1, 1.0, 4.0})
    EXPECT_LT(rel(kernel_J(p, t), 2.0 * pi * std::log1p(2.0 / std::expm1(t))), 1e-11) << t;
  EXPECT_LT(rel(kernel_J_n3_half(1.0), pi * std::log((std::cosh(1.0) + 1.0) / (std::cosh(1.0) - 1.0))), 1e-14);
}

TEST(Kernel, Symmetry) {
  for (int n : {2, 3, 4, 7})
    for (double sg : {0.25, 0.5, 0.9}) {
      const auto p = ConformalParams::make(n, sg);
      for (double t : {0.01, 0.7, 3.0}) EXPECT_LT(rel(kernel_J(p, -t), kernel_J(p, t)), 1e-12);
    }
}

TEST(Kernel, LargeTAsymptotics) {
  for (int n : {2, 3, 5})
    for (double sg : {0.25, 0.75}) {
      const auto p = ConformalParams::make(n, sg);
      EXPECT_LT(rel(kernel_J(p, 20.0) * std::exp(20.0 * p.slow_exponent()), sphere_area(n)), 1e-8);
    }
}

TEST(Kernel, SmallTBehaviour) {
  // sigma < 1/2: J ~ (|S^{n-2}|/2) B((n-1)/2, 1/2 - sigma) t^{2sigma-1}
  const auto p = ConformalParams::make(4, 0.25);
  const double c = 0.5 * sphere_area(3) * beta(1.5, 0.25);
  EXPECT_LT(rel(kernel_J(p, 1e-40), c * std::pow(1e-40, -0.5)), 1e-12);
  EXPECT_THROW(kernel_J(p, 0.0), divergence_error);
  // sigma > 1/2: J(0) is finite and J is continuous there
  const auto q = ConformalParams::make(3, 0.75);
  EXPECT_LT(rel(kernel_J(q, 1e-12), kernel_J(q, 0.0)), 1e-5);
}

TEST(Kernel, MassAtThreeHalf) {
  const double c3 = pi * pi * pi;
  const auto p = ConformalParams::make(3, 0.5);
  EXPECT_LT(rel(kernel_mass(p), c3), 1e-9);
  EXPECT_LT(rel(kernel_mass_logcoth(), c3), 1e-12);
  EXPECT_LT(rel(kernel_mass_closed(p), c3), 1e-14);
  EXPECT_LT(rel(singular_amplitude(p, 1.0), 1.0 / c3), 1e-14);
}

TEST(Kernel, MassRoutesAgree) {
  for (const auto& [n, sg] : std::vector<std::pair<int, double>>{{3, 0.25}, {4, 0.5}, {5, 1.5}, {7, 2.5}, {2, 0.3}, {2, 0.75}}) {
    const auto p = ConformalParams::make(n, sg);
    const double closed = kernel_mass_closed(p);
    const double direct = kernel_mass(p);
    EXPECT_GT(direct, 0.0);
    EXPECT_TRUE(std::isfinite(direct));
    EXPECT_LT(rel(direct, closed), 1e-9) << n << " " << sg;
    EXPECT_LT(rel(kernel_mass_swapped(p), closed), 1e-9) << n << " " << sg;
    EXPECT_LT(rel(kernel_mass(p, QuadratureSpec{}.with_rel_tol(5e-11)), direct), 1e-8);
  }
}

// ---------------------------------------------------------------------------
// cylindrical operator and solver

class Cylinder : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    p3_ = new ConformalParams(ConformalParams::make(3, 0.5));
    grid_ = new CylProfile(constant_cyl_profile(1.0));
    op3_ = new CylOperator(*p3_, grid_->h, grid_->size());
  }
  static void TearDownTestSuite() {
    delete op3_;
    delete grid_;
    delete p3_;
  }
  static ConformalParams* p3_;
  static CylProfile* grid_;
  static CylOperator* op3_;
};
ConformalParams* Cylinder::p3_ = nullptr;
CylProfile* Cylinder::grid_ = nullptr;
CylOperator* Cylinder::op3_ = nullptr;

TEST_F(Cylinder, OperatorMassMatchesKernelMass) {
  EXPECT_LT(rel(op3_->mass(), pi * pi * pi), 1e-9);
  EXPECT_GT(op3_->weight(0), op3_->weight(1));
}

TEST_F(Cylinder, ConstantFixedPoint) {
  for (double k : {0.5, 1.0, 2.0}) {
    const double A = singular_amplitude(*p3_, k);
    EXPECT_LT(sup_rel_dev(op3_->apply(constant_cyl_profile(A), k), A), 1e-6) << k;
  }
}

TEST_F(Cylinder, SmallConstantMapsBelowItself) {
  const double eps = 1e-3 * singular_amplitude(*p3_, 1.0);
  const auto T = op3_->apply(constant_cyl_profile(eps), 1.0);
  for (double v : T.values) {
    EXPECT_LT(v, eps);
    EXPECT_LT(rel(v, pi * pi * pi * eps * eps), 1e-9);
  }
}

TEST_F(Cylinder, TranslationEquivariance) {
  // a bump well inside the grid, so the constant extensions agree after a shift
  CylProfile v = *grid_, w = *grid_;
  const int shift = 7;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = v.t(i);
    v.values[i] = 0.02 + 0.01 * std::exp(-t * t);
    const double ts = t - shift * v.h;
    w.values[i] = 0.02 + 0.01 * std::exp(-ts * ts);
  }
  const auto Tv = op3_->apply(v, 1.0), Tw = op3_->apply(w, 1.0);
  for (std::size_t i = 100; i + 100 < v.size(); ++i) EXPECT_NEAR(Tw.values[i], Tv.values[i - shift], 1e-14);
}

TEST_F(Cylinder, SolverConvergesToSingularAmplitude) {
  const double A = singular_amplitude(*p3_, 1.0);
  EXPECT_LT(rel(A, std::pow(pi, -3.0)), 1e-14);
  FixedPointOptions opt;
  opt.damping = 0.5;
  opt.max_iters = 500;
  opt.tol = 1e-6;
  const auto res = solve_fixed_point(*op3_, 1.0, constant_cyl_profile(1.1 * A), opt);
  EXPECT_TRUE(res.converged());
  const std::size_t first = res.log.first_below(1e-4);
  EXPECT_GT(first, 0u);
  EXPECT_LE(first, 500u);
  EXPECT_LT(sup_rel_dev(res.profile, A), 1e-4);
}

TEST_F(Cylinder, SolverStartingAtFixedPoint) {
  const double A = singular_amplitude(*p3_, 1.0);
  FixedPointOptions opt;
  opt.tol = 1e-6;
  const auto res = solve_fixed_point(*op3_, 1.0, constant_cyl_profile(A), opt);
  ASSERT_EQ(res.log.residuals.size(), 1u);
  EXPECT_LT(res.log.residuals[0], 1e-6);
}

TEST_F(Cylinder, SolverScalingInK) {
  FixedPointOptions opt;
  opt.tol = 1e-9;
  const double A1 = singular_amplitude(*p3_, 1.0), A2 = singular_amplitude(*p3_, 2.0);
  const auto r1 = solve_fixed_point(*op3_, 1.0, constant_cyl_profile(1.1 * A1), opt);
  const auto r2 = solve_fixed_point(*op3_, 2.0, constant_cyl_profile(1.1 * A2), opt);
  ASSERT_TRUE(r1.converged() && r2.converged());
  const double f = std::pow(2.0, -1.0 / (p3_->tau() - 1.0));
  for (std::size_t i = 0; i < r1.profile.size(); ++i) EXPECT_LT(rel(r2.profile.values[i], f * r1.profile.values[i]), 1e-8);
}

TEST_F(Cylinder, PlainSchemeDivergesAtSupercriticalGrowth) {
  const double A = singular_amplitude(*p3_, 1.0);
  FixedPointOptions opt;
  opt.scheme = FixedPointScheme::plain;
  const auto res = solve_fixed_point(*op3_, 1.0, constant_cyl_profile(1.1 * A), opt);
  EXPECT_EQ(res.status, FixedPointStatus::diverged);
  EXPECT_FALSE(res.log.residuals.empty());
}

TEST_F(Cylinder, LogCsv) {
  ConvergenceLog log{{0.5, 0.25}};
  std::stringstream ss;
  write_csv(ss, log);
  EXPECT_EQ(ss.str(), "iter,residual\n1,0.5\n2,0.25\n");
}

TEST(CylinderOther, ConstantFixedPointOtherParams) {
  for (const auto& [n, sg] : std::vector<std::pair<int, double>>{{4, 0.5}, {5, 1.5}}) {
    const auto p = ConformalParams::make(n, sg);
    const auto grid = constant_cyl_profile(1.0);
    const CylOperator T(p, grid.h, grid.size());
    for (double k : {0.5, 1.0, 2.0}) {
      const double A = singular_amplitude(p, k);
      EXPECT_LT(sup_rel_dev(T.apply(constant_cyl_profile(A), k), A), 1e-6) << n << " " << sg << " " << k;
    }
  }
}

// ---------------------------------------------------------------------------
// Kelvin transform and diagnostics

TEST(Kelvin, BubbleInvariantAtUnitRadius) {
  for (const auto& [n, sg] : std::vector<std::pair<int, double>>{{3, 0.5}, {4, 0.3}, {6, 2.0}}) {
    const auto p = ConformalParams::make(n, sg);
    const auto u = bubble_profile(p, log_radii(12.0, 0.05));
    const auto k = kelvin_transform(u, p, 1.0);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_LT(rel(k.values[i], u.values[i]), 1e-12) << i;
  }
}

TEST(Kelvin, Involution) {
  const auto p = ConformalParams::make(3, 0.5);
  const auto radii = log_radii(12.0, 0.01);
  for (const RadialProfile& u : {bubble_profile(p, radii), power_profile(1.7, 0.8, radii)}) {
    for (double lambda : {0.5, 2.0}) {
      const auto back = kelvin_transform(kelvin_transform(u, p, lambda), p, lambda);
      const double lo = lambda * lambda / u.radii.back(), hi = lambda * lambda / u.radii.front();
      double dev = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i)
        if (u.radii[i] >= lo && u.radii[i] <= hi) dev = std::max(dev, std::fabs(back.values[i] - u.values[i]));
      EXPECT_LE(dev, 1e-8) << lambda;
    }
  }
}

TEST(Kelvin, PowerProfileFixedForEveryLambda) {
  const auto p = ConformalParams::make(5, 0.75);
  const auto u = power_profile(3.0, p.slow_exponent(), log_radii(8.0, 0.05));
  for (double lambda : {0.1, 0.5, 1.0, 3.0, 40.0}) {
    const auto k = kelvin_transform(u, p, lambda);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_LT(rel(k.values[i], u.values[i]), 1e-12) << lambda;
    EXPECT_NEAR(moving_sphere_deficit(u, p, lambda < 1.0 ? 1.0 : lambda), 0.0, 1e-12 * u.values.front());
  }
}

TEST(Kelvin, TailMetadataAndFlags) {
  const auto p = ConformalParams::make(3, 0.5);
  auto u = bubble_profile(p, log_radii(3.0, 0.05));
  // bubble head slope ~ 0, so the new tail is lambda^{n-2sigma} r^{-(n-2sigma)}
  const auto k = kelvin_transform(u, p, 2.0);
  EXPECT_NEAR(k.tail_exponent, p.fast_exponent(), 1e-2);
  // the head power law is fitted at r0 = e^{-3}, good to O(r0^2)
  EXPECT_LT(rel(k.tail_amplitude, std::pow(2.0, p.fast_exponent())), 5e-2);
  // lambda > 1 reaches past the last radius, which the tail covers
  EXPECT_FALSE(k.any_extrapolated());
  // lambda < 1 reaches inside the first radius
  const auto small = kelvin_transform(u, p, 0.5);
  EXPECT_TRUE(small.extrapolated.back());
  EXPECT_FALSE(small.extrapolated.front());
  u.tail_amplitude = 0.0;
  EXPECT_TRUE(kelvin_transform(u, p, 2.0).extrapolated.front());
  EXPECT_THROW(kelvin_transform(u, p, 0.0), domain_error);
}

TEST(Kelvin, MovingSphereDeficit) {
  const auto p = ConformalParams::make(3, 0.5);
  const auto u = bubble_profile(p, log_radii(12.0, 0.05));
  EXPECT_NEAR(moving_sphere_deficit(u, p, 1.0), 0.0, 1e-12);
  EXPECT_GE(moving_sphere_deficit(u, p, 0.5), 0.0);
  EXPECT_LT(moving_sphere_deficit(u, p, 2.0), 0.0);
  EXPECT_THROW(moving_sphere_deficit(u, p, 1e-9), domain_error);
}

TEST(Kelvin, RayMonotonicity) {
  const auto p = ConformalParams::make(3, 0.5);
  const double s = p.slow_exponent();
  const auto radii = log_radii(3.0, 0.05);
  EXPECT_NEAR(ray_monotonicity_W(power_profile(2.0, s, radii), p), 0.0, 1e-14);

  RadialProfile slow;
  slow.radii = radii;
  for (double r : radii) slow.values.push_back(0.3 * std::pow(r, -s) * (1.0 + std::exp(-1.0 / r)));
  slow.tail_exponent = s;
  slow.tail_amplitude = 0.6;
  EXPECT_GT(ray_monotonicity_W(slow, p), 0.0);

  // bubble: W = (r/(1+r^2))^s rises up to r = 1 and falls after; the most
  // negative step is int W' over that step, with W' = s W (1 - r^2)/(r (1 + r^2))
  const auto b = bubble_profile(p, radii);
  auto W = [&](double r) { return std::pow(r / (1.0 + r * r), s); };
  auto dW = [&](double r) { return s * W(r) * (1.0 - r * r) / (r * (1.0 + r * r)); };
  double oracle = infinity;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    oracle = std::min(oracle, integrate(dW, radii[i], radii[i + 1]).value);
  const double got = ray_monotonicity_W(b, p);
  EXPECT_LT(got, 0.0);
  EXPECT_LT(rel(got, oracle), 1e-9);
}

TEST(Bootstrap, Values) {
  EXPECT_EQ(bootstrap_exponent(2.0, 1), 1.0);
  EXPECT_EQ(bootstrap_exponent(2.0, 5), 31.0);
  EXPECT_EQ(bootstrap_exponent(ConformalParams::make(3, 0.5).tau(), 10), 1023.0);
  EXPECT_THROW(bootstrap_exponent(1.0, 3), domain_error);
  EXPECT_THROW(bootstrap_exponent(2.0, 0), domain_error);
  EXPECT_THROW(bootstrap_exponent(2.0, 5000), overflow_error);
  EXPECT_THROW(bootstrap_exponent(1.5, 100000000), overflow_error);
}

TEST(Bootstrap, RecurrenceIsExactAndIncreasing) {
  for (double tau : {1.1, 1.5, 7.0 / 3.0, 2.0, 5.0})
    for (long q = 1; q <= 30; ++q) {
      const double f = bootstrap_exponent(tau, q), g = bootstrap_exponent(tau, q + 1);
      EXPECT_EQ(g, tau * f + 1.0);
      EXPECT_GT(g, f);
    }
}
