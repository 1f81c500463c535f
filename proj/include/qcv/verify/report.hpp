#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace qcv {

/// One verified case. `rel_error` is |closed - oracle| / |oracle|, or the
/// absolute difference when the oracle is zero; `note` says when a case is
/// judged differently.
struct CaseRecord {
  std::string case_id;
  std::string suite;
  std::string params;
  double closed_value = 0.0;
  double oracle_value = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
  double seconds = 0.0;
};

struct VerificationReport {
  std::string suite_name;
  std::vector<CaseRecord> cases;
  std::vector<std::string> notes;

  bool overall_pass() const {
    for (const auto& c : cases)
      if (!c.pass) return false;
    return true;
  }

  std::size_t failures() const {
    std::size_t k = 0;
    for (const auto& c : cases) k += c.pass ? 0 : 1;
    return k;
  }

  void append(const VerificationReport& other) {
    cases.insert(cases.end(), other.cases.begin(), other.cases.end());
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
  }
};

inline double relative_error(double closed, double oracle) {
  const double d = std::fabs(closed - oracle);
  return oracle == 0.0 ? d : d / std::fabs(oracle);
}

/// Standard record: passes when rel_error <= tolerance.
inline CaseRecord compare_case(std::string suite, std::string case_id, std::string params, double closed,
                               double oracle, double tolerance) {
  CaseRecord c;
  c.suite = std::move(suite);
  c.case_id = std::move(case_id);
  c.params = std::move(params);
  c.closed_value = closed;
  c.oracle_value = oracle;
  c.rel_error = relative_error(closed, oracle);
  c.tolerance = tolerance;
  c.pass = c.rel_error <= tolerance;
  return c;
}

/// Runs `f` (returning a CaseRecord) and stores its wall time; exceptions
/// become a failed case carrying the message.
template <class F>
CaseRecord timed_case(const std::string& suite, const std::string& case_id, const std::string& params, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  CaseRecord c;
  try {
    c = f();
  } catch (const std::exception& e) {
    c = CaseRecord{};
    c.suite = suite;
    c.case_id = case_id;
    c.params = params;
    c.closed_value = c.oracle_value = c.rel_error = std::nan("");
    c.pass = false;
    c.note = std::string("exception: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

/// JSON numbers are written in shortest round-trip form; non-finite values become null.
inline nlohmann::json to_json(const CaseRecord& c) {
  nlohmann::json j;
  j["case_id"] = c.case_id;
  j["suite"] = c.suite;
  j["params"] = c.params;
  j["closed_value"] = c.closed_value;
  j["oracle_value"] = c.oracle_value;
  j["rel_error"] = c.rel_error;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  j["note"] = c.note;
  return j;
}

/// Timing sits in its own object so that the rest of the document is
/// reproducible byte for byte; pass `with_timing = false` to drop it.
inline nlohmann::json to_json(const VerificationReport& r, bool with_timing = true) {
  nlohmann::json j;
  j["suite_name"] = r.suite_name;
  j["overall_pass"] = r.overall_pass();
  j["cases"] = nlohmann::json::array();
  for (const auto& c : r.cases) j["cases"].push_back(to_json(c));
  j["notes"] = r.notes;
  if (with_timing) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& c : r.cases) t[c.case_id] = c.seconds;
    j["timing"] = t;
  }
  return j;
}

/// Shortest decimal that reads back to the same double.
inline std::string shortest(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// Plain-text table, one line per case; no timing so the output is deterministic.
inline void print_table(std::ostream& out, const VerificationReport& r) {
  for (const auto& c : r.cases) {
    out << (c.pass ? "PASS " : "FAIL ") << c.case_id << "  [" << c.params << "]  closed=" << shortest(c.closed_value)
        << " oracle=" << shortest(c.oracle_value) << " err=" << shortest(c.rel_error)
        << " tol=" << shortest(c.tolerance);
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << '\n';
  }
  for (const auto& n : r.notes) out << "note: " << n << '\n';
  out << r.suite_name << ": " << (r.cases.size() - r.failures()) << "/" << r.cases.size() << " cases pass, overall "
      << (r.overall_pass() ? "PASS" : "FAIL") << '\n';
}

}  // namespace qcv
