#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcv/extension.hpp"
#include "qcv/fraclap.hpp"
#include "qcv/inteq/cylinder.hpp"
#include "qcv/inteq/kelvin.hpp"
#include "qcv/inteq/kernel.hpp"
#include "qcv/inteq/profile.hpp"
#include "qcv/pohozaev.hpp"
#include "qcv/specfun/hyp2f1.hpp"
#include "qcv/verify/report.hpp"
#include "qcv/verify/suites.hpp"

namespace qcv::cli {

enum ExitCode : int { ok = 0, verification_failure = 1, invalid_input = 2 };

/// Raised for bad input that CLI11 cannot see (config file, CSV, option combinations).
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// What a subcommand produced: labelled values for the table, optional checks.
struct Result {
  std::vector<std::pair<std::string, std::string>> rows;
  VerificationReport report;

  void add(const std::string& key, double v) { rows.emplace_back(key, shortest(v)); }
  void add(const std::string& key, const std::string& v) { rows.emplace_back(key, v); }
};

struct Options {
  std::string config, json, csv, log;

  int n = 3;
  double sigma = 0.5;
  int m = 0;
  double a = 0, b = 0, c = 1, z = 0;
  double s = 0;
  double x = 1, t = 1, m0 = 1;
  double kinf = 1;
  bool trace = false;

  std::string op = "kernel";
  double lambda = 1;
  double damping = 0.5, tol = 1e-8, h = 0.05, tmax = 12, start = 1.1;
  int iters = 500;
  std::string scheme = "normalized";
  std::string profile;
  double tail_exponent = 0, tail_amplitude = 0;
  double k0 = 0, k1 = 1;
  double tau = 3;
  long q = 1;

  std::string suite = "all";
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// `key = value` lines, `#` starts a comment.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw usage_error("config " + path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw usage_error("config " + path + ":" + std::to_string(lineno) + ": empty key");
    kv.emplace_back(key, value);
  }
  return kv;
}

inline ConformalParams params(const Options& o, bool allow_integer_m) {
  if (allow_integer_m && o.m > 0) return ConformalParams::make(o.n, o.m);
  return ConformalParams::make(o.n, o.sigma);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot write '" + path + "'");
  f << text;
}

inline std::string params_label(const ConformalParams& p) {
  return "n=" + std::to_string(p.n()) + " sigma=" + shortest(p.sigma());
}

}  // namespace detail

inline Result cmd_hyp2f1(const Options& o) {
  Result r;
  r.report.suite_name = "hyp2f1";
  const Hyp2F1Args args{o.a, o.b, o.c, o.z};
  const double v = hyp2f1(args);
  r.add("value", v);
  if (o.z < 1.0 || o.c - o.a - o.b > 1.0) r.add("derivative", hyp2f1_deriv(args));
  // independent route where one exists: the Euler integral, or the series for |z| <= 1/2
  const bool euler_ok = ((o.c > o.b && o.b > 0.0) || (o.c > o.a && o.a > 0.0)) && (o.z < 1.0 || o.c - o.a - o.b > 0.0);
  const std::string ps = "a=" + shortest(o.a) + " b=" + shortest(o.b) + " c=" + shortest(o.c) + " z=" + shortest(o.z);
  if (euler_ok)
    r.report.cases.push_back(compare_case("hyp2f1", "hyp2f1.euler_integral", ps, v, hyp2f1_euler_integral(args), 1e-9));
  else if (std::fabs(o.z) <= 0.5)
    r.report.cases.push_back(compare_case("hyp2f1", "hyp2f1.series", ps, v, hyp2f1_series(args), 1e-12));
  return r;
}

inline Result cmd_fraclap(const Options& o) {
  Result r;
  r.report.suite_name = "fraclap";
  const auto p = detail::params(o, true);
  const double s = o.s > 0.0 ? o.s : p.slow_exponent();
  const double lam = frac_power_constant(p, s);
  r.add("s", s);
  r.add("lambda", lam);
  r.add("C2", c2_constant(p));
  r.add("riesz_constant", riesz_constant(p));
  r.add("kernel_mass", kernel_mass_closed(p));
  if (p.m()) {
    const double poly = poly_power_constant(p, s);
    r.add("poly_power_constant", poly);
    auto c = compare_case("fraclap", "fraclap.integer_order", detail::params_label(p) + " s=" + shortest(s), lam, poly,
                          1e-12);
    c.rel_error = std::fabs(lam - poly) / std::max(1.0, std::fabs(poly));
    c.pass = c.rel_error <= 1e-12;
    r.report.cases.push_back(c);
  }
  return r;
}

inline Result cmd_extension(const Options& o) {
  Result r;
  r.report.suite_name = "extension";
  const auto p = detail::params(o, false);
  require_unit_order(p, "extension");
  const std::string ps = detail::params_label(p) + " x=" + shortest(o.x) + " t=" + shortest(o.t);
  const double closed = bubble_extension_closed(p, o.m0, o.x, o.t);
  r.add("U0", closed);
  r.add("beta", beta_constant(p));
  r.add("C0", c0_constant(p));
  r.add("neumann_constant", neumann_constant(p));
  r.report.cases.push_back(
      compare_case("extension", "extension.feynman", ps, closed, bubble_extension_quadrature(p, o.m0, o.x, o.t), 1e-7));
  if (o.trace) {
    const auto tr = neumann_trace(p, o.m0, o.x);
    const double lim = neumann_trace_closed(p, o.m0, o.x);
    r.add("neumann_trace", tr.value);
    r.add("neumann_trace_closed", lim);
    r.report.cases.push_back(compare_case("extension", "extension.neumann_trace", ps, lim, tr.value, 1e-4));
    if (!o.csv.empty()) {
      std::ostringstream csv;
      csv << "t,sample\n";
      const auto ts = default_t_sequence(o.x);
      for (std::size_t i = 0; i < ts.size(); ++i)
        csv << qcv::detail::fmt17(ts[i]) << ',' << qcv::detail::fmt17(tr.samples[i]) << '\n';
      detail::write_text(o.csv, csv.str());
    }
  } else if (!o.csv.empty()) {
    throw usage_error("extension: --csv writes the Neumann trace samples and needs --trace");
  }
  return r;
}

inline Result cmd_pohozaev(const Options& o) {
  Result r;
  r.report.suite_name = "pohozaev";
  const auto p = detail::params(o, true);
  const bool integer = p.m().has_value();
  const PohozaevReport rep = integer ? pohozaev_limit_integer(p, o.kinf) : pohozaev_limit_fractional(p, o.kinf);
  r.add("mode", to_string(rep.mode));
  r.add("M0", rep.m0);
  r.add("closed_value", rep.closed_value);
  r.add("oracle_value", rep.oracle_value);
  r.add("rel_error", rep.rel_error);
  r.add("sign_factor", rep.sign_factor);
  const std::string ps = detail::params_label(p) + " kinf=" + shortest(o.kinf);
  r.report.cases.push_back(
      compare_case("pohozaev", "pohozaev.limit", ps, rep.closed_value, rep.oracle_value, integer ? 1e-12 : 1e-5));
  const double expected = -2.0 * p.sigma() / p.n();
  auto sign = compare_case("pohozaev", "pohozaev.sign_factor", ps, rep.sign_factor, expected, 1e-12);
  sign.pass = sign.pass && rep.closed_value < 0.0;
  r.report.cases.push_back(sign);
  return r;
}

inline RadialProfile load_profile(const Options& o, const ConformalParams& p) {
  if (o.profile.empty()) return bubble_profile(p, log_radii(12.0, 0.05));
  std::ifstream in(o.profile);
  if (!in) throw usage_error("cannot open profile '" + o.profile + "'");
  RadialProfile u = read_radial_csv(in);
  u.tail_exponent = o.tail_exponent;
  u.tail_amplitude = o.tail_amplitude;
  return u;
}

inline Result cmd_inteq(const Options& o) {
  Result r;
  r.report.suite_name = "inteq";
  r.add("op", o.op);
  if (o.op == "bootstrap") {
    r.add("exponent", bootstrap_exponent(o.tau, o.q));
    return r;
  }
  const auto p = detail::params(o, true);
  const std::string ps = detail::params_label(p);
  if (o.op == "kernel") {
    const double J = kernel_J(p, o.t);
    r.add("J", J);
    if (p.n() == 3 && p.sigma() == 0.5)
      r.report.cases.push_back(compare_case("inteq", "inteq.kernel", ps + " t=" + shortest(o.t), J, kernel_J_n3_half(o.t), 1e-10));
  } else if (o.op == "mass") {
    const double direct = kernel_mass(p), closed = kernel_mass_closed(p);
    r.add("mass", direct);
    r.add("mass_closed", closed);
    r.add("singular_amplitude", singular_amplitude(p, o.kinf, closed));
    r.report.cases.push_back(compare_case("inteq", "inteq.mass", ps, closed, direct, 1e-6));
  } else if (o.op == "solve") {
    const double A = singular_amplitude(p, o.kinf);
    FixedPointOptions opt;
    opt.damping = o.damping;
    opt.max_iters = o.iters;
    opt.tol = o.tol;
    opt.scheme = o.scheme == "plain" ? FixedPointScheme::plain : FixedPointScheme::normalized;
    CylProfile init;
    if (o.profile.empty()) {
      init = constant_cyl_profile(o.start * A, -o.tmax, o.tmax, o.h);
    } else {
      std::ifstream in(o.profile);
      if (!in) throw usage_error("cannot open profile '" + o.profile + "'");
      init = read_cyl_csv(in);
    }
    const auto res = solve_fixed_point(p, o.kinf, init, opt);
    double dev = 0.0;
    for (double v : res.profile.values) dev = std::max(dev, std::fabs(v - A) / A);
    r.add("status", to_string(res.status));
    r.add("iterations", std::to_string(res.log.residuals.size()));
    r.add("final_residual", res.log.residuals.back());
    r.add("amplitude_A", A);
    r.add("max_rel_deviation_from_A", dev);
    auto c = compare_case("inteq", "inteq.solve", ps + " kinf=" + shortest(o.kinf), res.profile.values[res.profile.size() / 2],
                          A, 1e-4);
    c.rel_error = dev;
    c.pass = res.converged() && dev <= 1e-4;
    c.note = "sup relative deviation from A";
    r.report.cases.push_back(c);
    if (!o.csv.empty()) {
      std::ostringstream s;
      write_csv(s, res.profile);
      detail::write_text(o.csv, s.str());
    }
    if (!o.log.empty()) {
      std::ostringstream s;
      write_csv(s, res.log);
      detail::write_text(o.log, s.str());
    }
  } else if (o.op == "kelvin") {
    const RadialProfile u = load_profile(o, p);
    const RadialProfile k = kelvin_transform(u, p, o.lambda);
    std::size_t flagged = 0;
    for (bool f : k.extrapolated) flagged += f ? 1 : 0;
    r.add("lambda", o.lambda);
    r.add("extrapolated_points", std::to_string(flagged));
    r.add("tail_exponent", k.tail_exponent);
    r.add("tail_amplitude", k.tail_amplitude);
    if (u.radii.front() < o.lambda) r.add("moving_sphere_deficit", moving_sphere_deficit(u, p, o.lambda));
    r.add("ray_monotonicity_W", ray_monotonicity_W(u, p));
    if (!o.csv.empty()) {
      std::ostringstream s;
      write_csv(s, k);
      detail::write_text(o.csv, s.str());
    }
  } else if (o.op == "kw") {
    const RadialProfile u = load_profile(o, p);
    r.add("kazdan_warner", kazdan_warner(u, RadialCoefficient::linear(o.k0, o.k1), p));
  } else {
    throw usage_error("inteq: unknown --op '" + o.op + "'");
  }
  return r;
}

inline void print_result(std::ostream& out, const Result& r) {
  std::size_t w = 0;
  for (const auto& [k, v] : r.rows) w = std::max(w, k.size());
  for (const auto& [k, v] : r.rows) out << std::left << std::setw(static_cast<int>(w) + 2) << k << v << '\n';
  for (const auto& c : r.report.cases)
    out << "check " << c.case_id << ": " << (c.pass ? "PASS" : "FAIL") << " (err " << shortest(c.rel_error) << ", tol "
        << shortest(c.tolerance) << ")\n";
}

/// Entry point shared by the executable and the tests. `args` excludes the program name.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Numerical checks for conformally invariant fractional equations", "qcv"};
  app.require_subcommand(1, 1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", o.config, "File of 'key = value' lines; command-line flags override it");
  app.add_option("--json", o.json, "Write the verification report as JSON");
  app.add_option("--csv", o.csv, "Write the profile or trace as CSV");

  auto add_ns = [&](CLI::App* sc, bool with_m) {
    sc->add_option("--n", o.n, "Dimension")->capture_default_str();
    auto* sg = sc->add_option("--sigma", o.sigma, "Order sigma")->capture_default_str();
    if (with_m) sc->add_option("--m", o.m, "Integer order m (instead of --sigma)")->excludes(sg);
  };

  auto* h = app.add_subcommand("hyp2f1", "Gauss hypergeometric function 2F1(a, b; c; z)");
  h->add_option("--a", o.a)->required();
  h->add_option("--b", o.b)->required();
  h->add_option("--c", o.c)->required();
  h->add_option("--z", o.z)->required();

  auto* f = app.add_subcommand("fraclap", "Fractional Laplacian constants of |x|^{-s}");
  add_ns(f, true);
  f->add_option("--s", o.s, "Power (default (n - 2 sigma)/2)");

  auto* e = app.add_subcommand("extension", "Extension of the bubble and its Neumann trace");
  add_ns(e, false);
  e->add_option("--x", o.x, "|x|")->capture_default_str();
  e->add_option("--t", o.t, "Extension variable t")->capture_default_str();
  e->add_option("--m0", o.m0, "Bubble amplitude")->capture_default_str();
  e->add_flag("--trace", o.trace, "Also extrapolate the Neumann trace at |x|");

  auto* ph = app.add_subcommand("pohozaev", "Limit of the Pohozaev boundary term");
  add_ns(ph, true);
  ph->add_option("--kinf", o.kinf, "K at infinity")->required();

  auto* ie = app.add_subcommand("inteq", "Integral equation on the cylinder and radial diagnostics");
  add_ns(ie, true);
  ie->add_option("--op", o.op, "kernel | mass | solve | kelvin | kw | bootstrap")
      ->check(CLI::IsMember({"kernel", "mass", "solve", "kelvin", "kw", "bootstrap"}))
      ->capture_default_str();
  ie->add_option("--t", o.t, "Cylinder variable for --op kernel")->capture_default_str();
  ie->add_option("--kinf", o.kinf, "K at infinity")->capture_default_str();
  ie->add_option("--damping", o.damping)->capture_default_str();
  ie->add_option("--iters", o.iters)->capture_default_str();
  ie->add_option("--tol", o.tol)->capture_default_str();
  ie->add_option("--scheme", o.scheme)->check(CLI::IsMember({"normalized", "plain"}))->capture_default_str();
  ie->add_option("--spacing", o.h, "Grid spacing in t")->capture_default_str();
  ie->add_option("--tmax", o.tmax, "Grid covers [-tmax, tmax]")->capture_default_str();
  ie->add_option("--start", o.start, "Initial profile as a multiple of A")->capture_default_str();
  ie->add_option("--log", o.log, "Write the residual log as CSV");
  ie->add_option("--profile", o.profile, "Input CSV: r,u for kelvin/kw, t,V for solve");
  ie->add_option("--tail-exponent", o.tail_exponent);
  ie->add_option("--tail-amplitude", o.tail_amplitude);
  ie->add_option("--lambda", o.lambda)->capture_default_str();
  ie->add_option("--k0", o.k0, "K(r) = k0 + k1 r for --op kw")->capture_default_str();
  ie->add_option("--k1", o.k1)->capture_default_str();
  ie->add_option("--tau", o.tau)->capture_default_str();
  ie->add_option("--q", o.q)->capture_default_str();

  auto* v = app.add_subcommand("verify", "Run the verification suites");
  std::string suites;
  for (const auto& s : suite_names()) suites += (suites.empty() ? "" : ", ") + s;
  v->add_option("--suite", o.suite, suites)->check(CLI::IsMember(suite_names()))->capture_default_str();

  for (auto* sc : app.get_subcommands({})) sc->fallthrough();

  try {
    // config values go first so that flags given on the command line win
    std::vector<std::string> argv = args;
    if (!argv.empty() && argv[0].rfind("-", 0) != 0) {
      bool known = false;
      for (auto* cand : app.get_subcommands({})) known = known || cand->get_name() == argv[0];
      if (!known) throw usage_error("unknown subcommand '" + argv[0] + "'");
    }
    std::string config;
    for (std::size_t i = 0; i < argv.size(); ++i) {
      if (argv[i] == "--config" && i + 1 < argv.size()) config = argv[i + 1];
      else if (argv[i].rfind("--config=", 0) == 0) config = argv[i].substr(9);
    }
    if (!config.empty() && !argv.empty()) {
      CLI::App* sc = nullptr;
      for (auto* cand : app.get_subcommands({}))
        if (cand->get_name() == argv[0]) sc = cand;
      if (sc == nullptr) throw usage_error("the first argument must be a subcommand when --config is used");
      std::vector<std::string> injected;
      for (const auto& [key, value] : detail::read_config(config)) {
        const std::string flag = "--" + key;
        const CLI::Option* opt = sc->get_option_no_throw(flag);
        if (opt == nullptr) opt = app.get_option_no_throw(flag);
        if (opt == nullptr || key == "config") throw usage_error("config " + config + ": unknown key '" + key + "'");
        if (opt->get_expected_min() == 0) {
          if (value == "true" || value == "1") injected.push_back(flag);
          else if (value != "false" && value != "0")
            throw usage_error("config " + config + ": '" + key + "' expects true or false");
        } else {
          injected.push_back(flag);
          injected.push_back(value);
        }
      }
      argv.insert(argv.begin() + 1, injected.begin(), injected.end());
    }
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& ex) {
    err << "qcv: invalid input: " << ex.what() << '\n';
    return invalid_input;
  } catch (const std::exception& ex) {
    err << "qcv: invalid input: " << ex.what() << '\n';
    return invalid_input;
  }

  try {
    Result r;
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "verify") {
      if (!o.csv.empty()) throw usage_error("verify does not write CSV");
      r.report = run_suite(o.suite);
      print_table(out, r.report);
    } else {
      if (cmd == "hyp2f1") r = cmd_hyp2f1(o);
      else if (cmd == "fraclap") r = cmd_fraclap(o);
      else if (cmd == "extension") r = cmd_extension(o);
      else if (cmd == "pohozaev") r = cmd_pohozaev(o);
      else r = cmd_inteq(o);
      print_result(out, r);
    }
    if (!o.json.empty()) detail::write_text(o.json, to_json(r.report).dump(2) + "\n");
    return r.report.overall_pass() ? ok : verification_failure;
  } catch (const usage_error& ex) {
    err << "qcv: invalid input: " << ex.what() << '\n';
    return invalid_input;
  } catch (const qcv::domain_error& ex) {
    err << "qcv: invalid input: " << ex.what() << '\n';
    return invalid_input;
  } catch (const std::exception& ex) {
    err << "qcv: computation failed: " << ex.what() << '\n';
    return verification_failure;
  }
}

inline int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_command(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace qcv::cli
