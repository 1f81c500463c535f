#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcv_cli.hpp"

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = qcv::cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("qcv_test_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, Hyp2F1Example) {
  const Outcome r = run({"hyp2f1", "--a", "1", "--b", "1", "--c", "2", "--z", "0.5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("value       1.38629436111989"), std::string::npos) << r.out;
}

TEST(Cli, PohozaevIntegerExample) {
  const Outcome r = run({"pohozaev", "--n", "3", "--m", "1", "--kinf", "0.25"});
  EXPECT_EQ(r.code, 0);
  // -2 pi / 3 and -2/3 in shortest round-trip form
  EXPECT_NE(r.out.find("closed_value  -2.0943951023931957"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("sign_factor   -0.6666666666666667"), std::string::npos) << r.out;
}

TEST(Cli, OutputIsDeterministic) {
  const std::vector<std::string> args{"pohozaev", "--n", "5", "--sigma", "0.75", "--kinf", "2"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Cli, InvalidInputExitsWithTwo) {
  for (const std::vector<std::string>& args : std::vector<std::vector<std::string>>{
           {},
           {"bogus"},
           {"hyp2f1", "--a", "1", "--b", "1", "--c", "2"},
           {"hyp2f1", "--a", "one", "--b", "1", "--c", "2", "--z", "0.5"},
           {"hyp2f1", "--a", "1", "--b", "1", "--c", "2", "--z", "0.5", "--unknown", "3"},
           {"pohozaev", "--n", "3", "--m", "2", "--kinf", "1"},
           {"pohozaev", "--n", "3", "--m", "1", "--kinf", "-1"},
           {"pohozaev", "--n", "3", "--m", "1", "--sigma", "0.5", "--kinf", "1"},
           {"extension", "--n", "3", "--sigma", "1.2"},
           {"verify", "--suite", "nope"}}) {
    const Outcome r = run(args);
    EXPECT_EQ(r.code, 2) << (args.empty() ? "" : args[0]);
    EXPECT_TRUE(r.out.empty());
    // a single diagnostic line
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
  }
}

TEST(Cli, HelpExitsWithZero) {
  const Outcome r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verify"), std::string::npos);
}

TEST(Cli, ConfigFileWithOverride) {
  const std::string cfg = temp_path("config.txt");
  std::ofstream(cfg) << "# integer order\nn = 3\nm = 1   # trailing comment\n\nkinf = 0.25\n";
  const Outcome a = run({"pohozaev", "--config", cfg});
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("-2.0943951023931957"), std::string::npos);
  // the flag wins over the file
  const Outcome b = run({"pohozaev", "--config", cfg, "--kinf", "2"});
  EXPECT_EQ(b.code, 0);
  EXPECT_EQ(b.out.find("-2.0943951023931957"), std::string::npos);
  EXPECT_NE(b.out.find("sign_factor   -0.6666666666666667"), std::string::npos);

  std::ofstream(cfg) << "colour = blue\n";
  EXPECT_EQ(run({"pohozaev", "--config", cfg, "--n", "3", "--m", "1", "--kinf", "1"}).code, 2);
  std::ofstream(cfg) << "just a line\n";
  EXPECT_EQ(run({"pohozaev", "--config", cfg}).code, 2);
  EXPECT_EQ(run({"pohozaev", "--config", temp_path("missing.txt")}).code, 2);
  std::filesystem::remove(cfg);
}

TEST(Cli, VerifySuiteWritesReport) {
  const std::string path = temp_path("kelvin.json");
  const Outcome r = run({"verify", "--suite", "kelvin", "--json", path});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(j["suite_name"], "kelvin");
  EXPECT_TRUE(j["overall_pass"].get<bool>());
  ASSERT_FALSE(j["cases"].empty());
  for (const auto& c : j["cases"]) {
    for (const char* key : {"case_id", "params", "closed_value", "oracle_value", "rel_error", "tolerance", "pass"})
      EXPECT_TRUE(c.contains(key)) << key;
    EXPECT_TRUE(j["timing"].contains(c["case_id"].get<std::string>()));
  }
  std::filesystem::remove(path);
}

TEST(Cli, VerifyReportIsReproducibleApartFromTiming) {
  const std::string p1 = temp_path("a.json"), p2 = temp_path("b.json");
  const Outcome a = run({"verify", "--suite", "constants", "--json", p1});
  const Outcome b = run({"verify", "--suite", "constants", "--json", p2});
  EXPECT_EQ(a.out, b.out);
  auto ja = nlohmann::json::parse(slurp(p1)), jb = nlohmann::json::parse(slurp(p2));
  ja.erase("timing");
  jb.erase("timing");
  EXPECT_EQ(ja.dump(), jb.dump());
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST(Cli, SolveWritesProfileAndLog) {
  const std::string csv = temp_path("v.csv"), log = temp_path("log.csv");
  const Outcome r = run({"inteq", "--op", "solve", "--kinf", "1", "--tol", "1e-6", "--tmax", "6", "--csv", csv, "--log", log});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  std::ifstream in(csv);
  const auto v = qcv::read_cyl_csv(in);
  EXPECT_EQ(v.size(), 241u);
  EXPECT_EQ(slurp(log).rfind("iter,residual\n", 0), 0u);
  // the written profile restarts the solver at its own fixed point
  const Outcome again = run({"inteq", "--op", "solve", "--kinf", "1", "--tol", "1e-6", "--profile", csv});
  EXPECT_EQ(again.code, 0);
  EXPECT_NE(again.out.find("iterations                1\n"), std::string::npos) << again.out;
  std::filesystem::remove(csv);
  std::filesystem::remove(log);
}

TEST(Cli, SolveFailureExitsWithOne) {
  // the plain scheme is unstable at the constant solution
  const Outcome r = run({"inteq", "--op", "solve", "--scheme", "plain", "--tmax", "4", "--iters", "200"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("check inteq.solve: FAIL"), std::string::npos) << r.out;
}

TEST(Cli, KelvinRoundTripThroughCsv) {
  const std::string in = temp_path("u.csv"), out = temp_path("k.csv");
  const auto p = qcv::ConformalParams::make(3, 0.5);
  {
    std::ofstream f(in);
    qcv::write_csv(f, qcv::power_profile(2.0, p.slow_exponent(), qcv::log_radii(4.0, 0.1)));
  }
  const Outcome r = run({"inteq", "--op", "kelvin", "--lambda", "1.5", "--profile", in, "--tail-exponent", "1",
                     "--tail-amplitude", "2", "--csv", out});
  EXPECT_EQ(r.code, 0) << r.err;
  std::ifstream f(out);
  const auto k = qcv::read_radial_csv(f);
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_NEAR(k.values[i], 2.0 / k.radii[i], 1e-12 * k.values[i]);
  std::filesystem::remove(in);
  std::filesystem::remove(out);
}

TEST(Cli, ExtensionTraceCsv) {
  const std::string csv = temp_path("trace.csv");
  EXPECT_EQ(run({"extension", "--n", "3", "--sigma", "0.25", "--csv", csv}).code, 2);
  const Outcome r = run({"extension", "--n", "3", "--sigma", "0.25", "--trace", "--csv", csv});
  EXPECT_EQ(r.code, 0);
  const std::string text = slurp(csv);
  EXPECT_EQ(text.rfind("t,sample\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  std::filesystem::remove(csv);
}

TEST(Report, OverallPassIsConjunction) {
  qcv::VerificationReport r{"unit", {}, {}};
  EXPECT_TRUE(r.overall_pass());
  r.cases.push_back(qcv::compare_case("unit", "a", "", 1.0, 1.0 + 1e-10, 1e-9));
  r.cases.push_back(qcv::compare_case("unit", "b", "", 0.5, 0.0, 1.0));
  EXPECT_TRUE(r.overall_pass());
  r.cases.push_back(qcv::compare_case("unit", "c", "", 2.0, 1.0, 0.5));
  EXPECT_FALSE(r.overall_pass());
  EXPECT_EQ(r.failures(), 1u);
  const auto j = qcv::to_json(r, false);
  EXPECT_FALSE(j["overall_pass"].get<bool>());
  EXPECT_FALSE(j.contains("timing"));
  EXPECT_DOUBLE_EQ(j["cases"][1]["rel_error"].get<double>(), 0.5);
}

TEST(Report, ExceptionsBecomeFailedCases) {
  const auto c = qcv::timed_case("unit", "boom", "x=1", []() -> qcv::CaseRecord { throw qcv::domain_error("bad x"); });
  EXPECT_FALSE(c.pass);
  EXPECT_NE(c.note.find("bad x"), std::string::npos);
  EXPECT_EQ(qcv::shortest(0.1), "0.1");
  EXPECT_EQ(qcv::shortest(-2.0 / 3.0), "-0.6666666666666666");
}
