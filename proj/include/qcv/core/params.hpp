#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "qcv/errors.hpp"

namespace qcv {

/// Dimension n and order sigma of the critical equation
/// (-Delta)^sigma u = K u^tau, together with the quantities derived from them.
class ConformalParams {
 public:
  /// Throws domain_error unless n >= 2 and 0 < sigma < n/2.
  static ConformalParams make(int n, double sigma) {
    if (n < 2) throw domain_error("dimension n must be >= 2, got " + std::to_string(n));
    if (!(sigma > 0.0) || !(2.0 * sigma < n))
      throw domain_error("order sigma must lie in (0, n/2), got sigma = " + detail::num(sigma) +
                         " with n = " + std::to_string(n));
    return ConformalParams(n, sigma);
  }

  int n() const noexcept { return n_; }
  double sigma() const noexcept { return sigma_; }
  /// Critical exponent (n + 2 sigma) / (n - 2 sigma).
  double tau() const noexcept { return (n_ + 2.0 * sigma_) / (n_ - 2.0 * sigma_); }
  /// Extension weight 1 - 2 sigma; meaningful for sigma in (0, 1).
  double b() const noexcept { return 1.0 - 2.0 * sigma_; }
  /// Set when sigma is an integer.
  std::optional<int> m() const noexcept { return m_; }

  /// (n - 2 sigma) / 2, the decay exponent of the slow tail |x|^{-(n-2sigma)/2}.
  double slow_exponent() const noexcept { return 0.5 * (n_ - 2.0 * sigma_); }
  /// n - 2 sigma, the decay exponent of the Riesz kernel and of fast tails.
  double fast_exponent() const noexcept { return n_ - 2.0 * sigma_; }
  /// 2n / (n - 2 sigma), the power appearing in the Pohozaev terms.
  double energy_power() const noexcept { return 2.0 * n_ / (n_ - 2.0 * sigma_); }

  bool unit_order() const noexcept { return sigma_ > 0.0 && sigma_ < 1.0; }

 private:
  ConformalParams(int n, double sigma) : n_(n), sigma_(sigma) {
    if (sigma == std::floor(sigma)) m_ = static_cast<int>(sigma);
  }

  int n_;
  double sigma_;
  std::optional<int> m_;
};

inline void require_unit_order(const ConformalParams& p, const char* where) {
  if (!p.unit_order())
    throw domain_error(std::string(where) + ": requires sigma in (0, 1), got sigma = " +
                       detail::num(p.sigma()));
}

inline int require_integer_order(const ConformalParams& p, const char* where) {
  if (!p.m())
    throw domain_error(std::string(where) + ": requires an integer order sigma = m, got sigma = " +
                       detail::num(p.sigma()));
  return *p.m();
}

}  // namespace qcv
