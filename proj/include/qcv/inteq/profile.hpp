#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qcv/core/params.hpp"
#include "qcv/errors.hpp"

namespace qcv {

/// A radial function u(r) sampled on strictly increasing positive radii, with
/// the power-law tail u ~ tail_amplitude * r^{-tail_exponent} assumed beyond
/// the last radius. `extrapolated[i]` marks values that were not backed by
/// grid data or tail metadata (empty means none).
struct RadialProfile {
  std::vector<double> radii;
  std::vector<double> values;
  double tail_exponent = 0.0;
  double tail_amplitude = 0.0;
  std::vector<bool> extrapolated;

  std::size_t size() const { return radii.size(); }

  void validate() const {
    if (radii.size() < 2 || radii.size() != values.size())
      throw domain_error("RadialProfile: need at least 2 radii and as many values");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!(radii[i] > 0.0) || !std::isfinite(radii[i]))
        throw domain_error("RadialProfile: radii must be positive and finite");
      if (i > 0 && !(radii[i] > radii[i - 1]))
        throw domain_error("RadialProfile: radii must be strictly increasing");
      if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
        throw domain_error("RadialProfile: values must be finite and nonnegative");
    }
    if (!extrapolated.empty() && extrapolated.size() != radii.size())
      throw domain_error("RadialProfile: extrapolation flags do not match the grid");
  }

  bool any_extrapolated() const { return std::find(extrapolated.begin(), extrapolated.end(), true) != extrapolated.end(); }

  /// True when the tail exponent is one of the two decay rates the theory
  /// singles out, (n-2sigma)/2 and n-2sigma.
  bool standard_tail(const ConformalParams& p) const {
    auto near = [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); };
    return near(tail_exponent, p.slow_exponent()) || near(tail_exponent, p.fast_exponent());
  }
};

/// Emden-Fowler variable V(t) = r^{(n-2sigma)/2} u(r), t = ln r, on the
/// uniform grid t_i = t0 + i h.
struct CylProfile {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double t(std::size_t i) const { return t0 + static_cast<double>(i) * h; }

  void validate() const {
    if (values.size() < 2 || !(h > 0.0) || !std::isfinite(t0))
      throw domain_error("CylProfile: need at least 2 points and a positive spacing");
    for (double v : values)
      if (!(v > 0.0) || !std::isfinite(v)) throw domain_error("CylProfile: values must be positive and finite");
  }
};

/// Symmetric uniform grid in ln r: ln r_i = (i - k) h, i = 0..2k, with k = round(half_width / h).
/// The symmetry is exact, so r -> 1/r maps grid points onto grid points.
inline std::vector<double> log_radii(double half_width, double h) {
  if (!(h > 0.0) || !(half_width > 0.0)) throw domain_error("log_radii: need positive width and spacing");
  const long k = std::lround(half_width / h);
  std::vector<double> r;
  r.reserve(static_cast<std::size_t>(2 * k + 1));
  for (long i = -k; i <= k; ++i) r.push_back(std::exp(static_cast<double>(i) * h));
  return r;
}

/// u(r) = (1 + r^2)^{-(n-2sigma)/2}, whose tail is r^{-(n-2sigma)}.
inline RadialProfile bubble_profile(const ConformalParams& p, const std::vector<double>& radii) {
  RadialProfile u;
  u.radii = radii;
  for (double r : radii) u.values.push_back(std::pow(1.0 + r * r, -p.slow_exponent()));
  u.tail_exponent = p.fast_exponent();
  u.tail_amplitude = 1.0;
  return u;
}

/// u(r) = c r^{-e}.
inline RadialProfile power_profile(double c, double e, const std::vector<double>& radii) {
  RadialProfile u;
  u.radii = radii;
  for (double r : radii) u.values.push_back(c * std::pow(r, -e));
  u.tail_exponent = e;
  u.tail_amplitude = c;
  return u;
}

inline CylProfile constant_cyl_profile(double value, double t_lo = -12.0, double t_hi = 12.0, double h = 0.05) {
  const long n = std::lround((t_hi - t_lo) / h);
  CylProfile v;
  v.t0 = t_lo;
  v.h = h;
  v.values.assign(static_cast<std::size_t>(n + 1), value);
  return v;
}

/// V(t) = r^{(n-2sigma)/2} u(r) at the profile radii; requires a uniform log grid.
inline CylProfile to_cylinder(const RadialProfile& u, const ConformalParams& p) {
  u.validate();
  CylProfile v;
  v.t0 = std::log(u.radii.front());
  v.h = (std::log(u.radii.back()) - v.t0) / static_cast<double>(u.size() - 1);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::fabs(std::log(u.radii[i]) - v.t(i)) > 1e-9 * std::max(1.0, v.h))
      throw domain_error("to_cylinder: radii are not uniformly spaced in ln r");
    v.values.push_back(std::pow(u.radii[i], p.slow_exponent()) * u.values[i]);
  }
  return v;
}

inline RadialProfile from_cylinder(const CylProfile& v, const ConformalParams& p) {
  RadialProfile u;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = std::exp(v.t(i));
    u.radii.push_back(r);
    u.values.push_back(std::pow(r, -p.slow_exponent()) * v.values[i]);
  }
  // constant V continues as the slow tail
  u.tail_exponent = p.slow_exponent();
  u.tail_amplitude = v.values.back();
  return u;
}

// ---------------------------------------------------------------------------
// CSV serialization: full precision, 17 significant digits.

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::vector<std::vector<double>> read_numeric_csv(std::istream& in, const std::string& header,
                                                         std::size_t columns) {
  std::string line;
  if (!std::getline(in, line)) throw domain_error("csv: empty input, expected header '" + header + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw domain_error("csv: expected header '" + header + "', got '" + line + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw domain_error("csv: cannot parse '" + cell + "' as a number");
      row.push_back(v);
    }
    if (row.size() != columns) throw domain_error("csv: expected " + std::to_string(columns) + " columns in '" + line + "'");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline void write_csv(std::ostream& out, const RadialProfile& u) {
  out << "r,u\n";
  for (std::size_t i = 0; i < u.size(); ++i) out << detail::fmt17(u.radii[i]) << ',' << detail::fmt17(u.values[i]) << '\n';
}

inline void write_csv(std::ostream& out, const CylProfile& v) {
  out << "t,V\n";
  for (std::size_t i = 0; i < v.size(); ++i) out << detail::fmt17(v.t(i)) << ',' << detail::fmt17(v.values[i]) << '\n';
}

/// Reads an `r,u` table. Tail metadata is not part of the format and must be set by the caller.
inline RadialProfile read_radial_csv(std::istream& in) {
  RadialProfile u;
  for (const auto& row : detail::read_numeric_csv(in, "r,u", 2)) {
    u.radii.push_back(row[0]);
    u.values.push_back(row[1]);
  }
  u.validate();
  return u;
}

inline CylProfile read_cyl_csv(std::istream& in) {
  const auto rows = detail::read_numeric_csv(in, "t,V", 2);
  if (rows.size() < 2) throw domain_error("csv: a t,V table needs at least 2 rows");
  CylProfile v;
  v.t0 = rows.front()[0];
  v.h = (rows.back()[0] - v.t0) / static_cast<double>(rows.size() - 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::fabs(rows[i][0] - v.t(i)) > 1e-9 * std::max(1.0, std::fabs(rows[i][0])))
      throw domain_error("csv: t column is not uniformly spaced");
    v.values.push_back(rows[i][1]);
  }
  v.validate();
  return v;
}

// ---------------------------------------------------------------------------
// Monotone cubic Hermite interpolation of ln u against ln r.

class LogLogInterpolant {
 public:
  explicit LogLogInterpolant(const RadialProfile& u) {
    u.validate();
    const std::size_t n = u.size();
    x_.resize(n);
    y_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(u.values[i] > 0.0)) throw domain_error("LogLogInterpolant: values must be positive");
      x_[i] = std::log(u.radii[i]);
      y_[i] = std::log(u.values[i]);
    }
    slopes();
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

  /// ln u at ln r = x, for x inside the grid.
  double operator()(double x) const {
    if (x < x_.front() || x > x_.back()) throw domain_error("LogLogInterpolant: point outside the grid");
    std::size_t k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
    if (k == 0) k = 1;
    if (k >= x_.size()) k = x_.size() - 1;
    const std::size_t i = k - 1;
    const double h = x_[k] - x_[i];
    const double s = (x - x_[i]) / h;
    if (s == 0.0) return y_[i];
    if (s == 1.0) return y_[k];
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[k] + h11 * h * d_[k];
  }

  /// Log-log slope between the first two grid points (the head model).
  double head_slope() const { return (y_[1] - y_[0]) / (x_[1] - x_[0]); }
  double head_log_value() const { return y_[0]; }

 private:
  void slopes() {
    const std::size_t n = x_.size();
    d_.assign(n, 0.0);
    std::vector<double> sec(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) sec[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    if (n == 2) {
      d_[0] = d_[1] = sec[0];
      return;
    }
    const double h0 = x_[1] - x_[0];
    bool uniform = true;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (std::fabs((x_[i + 1] - x_[i]) - h0) > 1e-9 * h0) uniform = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (uniform && i >= 2 && i + 2 < n) {
        d_[i] = (-y_[i + 2] + 8.0 * y_[i + 1] - 8.0 * y_[i - 1] + y_[i - 2]) / (12.0 * h0);
      } else if (i == 0) {
        const double ha = x_[1] - x_[0], hb = x_[2] - x_[1];
        d_[0] = ((2 * ha + hb) * sec[0] - ha * sec[1]) / (ha + hb);
      } else if (i == n - 1) {
        const double ha = x_[n - 2] - x_[n - 3], hb = x_[n - 1] - x_[n - 2];
        d_[i] = ((2 * hb + ha) * sec[n - 2] - hb * sec[n - 3]) / (ha + hb);
      } else {
        const double ha = x_[i] - x_[i - 1], hb = x_[i + 1] - x_[i];
        d_[i] = (hb * sec[i - 1] + ha * sec[i]) / (ha + hb);
      }
    }
    // Hyman filter: keep the interpolant monotone wherever the data are
    for (std::size_t i = 0; i < n; ++i) {
      const double sl = i > 0 ? sec[i - 1] : sec[0];
      const double sr = i + 1 < n ? sec[i] : sec[n - 2];
      if (sl * sr <= 0.0) {
        if (i > 0 && i + 1 < n) d_[i] = 0.0;
        continue;
      }
      const double bound = 3.0 * std::min(std::fabs(sl), std::fabs(sr));
      if (d_[i] * sl <= 0.0)
        d_[i] = 0.0;
      else if (std::fabs(d_[i]) > bound)
        d_[i] = std::copysign(bound, sl);
    }
  }

  std::vector<double> x_, y_, d_;
};

}  // namespace qcv
