#pragma once

#include <stdexcept>
#include <string>

namespace qcv {

/// A caller-supplied argument violates a documented precondition.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested quantity does not exist (divergent series, integral or
/// Gauss value) for otherwise well-formed arguments.
class divergence_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class overflow_error : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// An iterative procedure stopped before meeting its tolerance. Carries the
/// last estimate so callers can still report it.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double best_estimate,
                    double error_estimate)
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

namespace detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail
}  // namespace qcv
