#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "qcv/errors.hpp"

namespace qcv {
namespace detail {

// Lanczos approximation, 13 terms, g = 6.0246800407767295837, tuned for
// 53-bit doubles. Rational form L(z) = P(z)/Q(z) with Q having the integer
// coefficients of z(z+1)...(z+11).
inline constexpr double lanczos_g = 6.024680040776729583740234375;

inline constexpr std::array<double, 13> lanczos_num = {
    23531376880.41075968857200767445163675473, 42919803642.64909876895789904700198885093,
    35711959237.35566804944018545154716670596, 17921034426.03720969991975575445893111267,
    6039542586.35202800506429164430729792107,  1439720407.311721673663223072794912393972,
    248874557.8620541565114603864132294232163, 31426415.58540019438061423162831820536287,
    2876370.628935372441225409051620849613599, 186056.2653952234950402949897160456992822,
    8071.672002365816210638002902272250613822, 210.8242777515793458725097339207133627117,
    2.506628274631000270164908177133837338626};

inline constexpr std::array<double, 13> lanczos_den = {
    0.0, 39916800.0, 120543840.0, 150917976.0, 105258076.0, 45995730.0, 13339535.0,
    2637558.0, 357423.0, 32670.0, 1925.0, 66.0, 1.0};

inline double lanczos_sum(double z) {
  double num = 0.0, den = 0.0;
  if (z <= 1.0) {
    for (int i = 12; i >= 0; --i) {
      num = num * z + lanczos_num[i];
      den = den * z + lanczos_den[i];
    }
  } else {
    // same ratio evaluated in 1/z to keep the polynomials bounded
    const double zi = 1.0 / z;
    for (int i = 0; i <= 12; ++i) {
      num = num * zi + lanczos_num[i];
      den = den * zi + lanczos_den[i];
    }
  }
  return num / den;
}

/// sin(pi x) with exact zeros at integers.
inline double sin_pi(double x) {
  if (x < 0.0) return -sin_pi(-x);
  double r = std::fmod(x, 2.0);
  if (r == 0.0 || r == 1.0) return 0.0;
  double sign = 1.0;
  if (r > 1.0) {
    r -= 1.0;
    sign = -1.0;
  }
  if (r > 0.5) r = 1.0 - r;
  return sign * std::sin(std::numbers::pi * r);
}

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// Gamma for x >= 0.5 (no reflection).
inline double gamma_positive(double z) {
  if (z > 171.62)
    throw overflow_error("gamma: argument " + num(z) + " overflows double precision");
  if (z == std::floor(z) && z <= 25.0) {
    double f = 1.0;
    for (int k = 2; k < static_cast<int>(z); ++k) f *= k;
    return f;
  }
  const double zgh = z + lanczos_g - 0.5;
  double result = lanczos_sum(z);
  if (z * std::log(zgh) > 709.0) {
    const double hp = std::pow(zgh, z / 2.0 - 0.25);
    result *= hp / std::exp(zgh);
    result *= hp;
  } else {
    result *= std::pow(zgh, z - 0.5) / std::exp(zgh);
  }
  return result;
}

inline double log_gamma_positive(double z) {
  if (z < 12.0) return std::log(gamma_positive(z));
  const double zgh = z + lanczos_g - 0.5;
  return std::log(lanczos_sum(z)) + (z - 0.5) * (std::log(zgh) - 1.0) - lanczos_g;
}

}  // namespace detail

/// Gamma function. Throws domain_error at poles, overflow_error above 171.62.
inline double gamma(double x) {
  if (std::isnan(x)) throw domain_error("gamma: NaN argument");
  if (detail::is_nonpositive_integer(x))
    throw domain_error("gamma: pole at nonpositive integer " + detail::num(x));
  if (x >= 0.5) return detail::gamma_positive(x);
  // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
  const double s = detail::sin_pi(x);
  if (1.0 - x > 171.0)
    return (s < 0.0 ? -1.0 : 1.0) *
           std::exp(std::log(std::numbers::pi / std::fabs(s)) - detail::log_gamma_positive(1.0 - x));
  return std::numbers::pi / (s * detail::gamma_positive(1.0 - x));
}

/// ln|Gamma(x)|, finite for large arguments where gamma overflows.
inline double log_gamma(double x) {
  if (std::isnan(x)) throw domain_error("log_gamma: NaN argument");
  if (detail::is_nonpositive_integer(x))
    throw domain_error("log_gamma: pole at nonpositive integer " + detail::num(x));
  if (x >= 0.5) return detail::log_gamma_positive(x);
  const double s = std::fabs(detail::sin_pi(x));
  return std::log(std::numbers::pi / s) - detail::log_gamma_positive(1.0 - x);
}

/// Sign of Gamma(x) (+1 or -1).
inline double gamma_sign(double x) {
  if (x > 0.0) return 1.0;
  if (detail::is_nonpositive_integer(x))
    throw domain_error("gamma_sign: pole at nonpositive integer " + detail::num(x));
  return static_cast<long long>(std::floor(x)) % 2 == 0 ? 1.0 : -1.0;
}

/// 1/Gamma(x), entire: returns 0 at the poles.
inline double rgamma(double x) {
  if (detail::is_nonpositive_integer(x)) return 0.0;
  if (x > 171.0) return gamma_sign(x) * std::exp(-log_gamma(x));
  return 1.0 / gamma(x);
}

/// Beta function B(a, b); a and b must not be poles of Gamma.
inline double beta(double a, double b) {
  const double s = a + b;
  if (a > 0.0 && b > 0.0 && s < 171.0) return gamma(a) * gamma(b) / gamma(s);
  if (detail::is_nonpositive_integer(s)) return 0.0;
  return gamma_sign(a) * gamma_sign(b) * gamma_sign(s) *
         std::exp(log_gamma(a) + log_gamma(b) - log_gamma(s));
}

}  // namespace qcv
