#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "logfe/cli.hpp"

using namespace logfe;
using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  CliResult r;
  r.code = run_cli(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

// the JSON result is the last nonempty stdout line
json last_json_line(const std::string& text) {
  std::istringstream in(text);
  std::string line, keep;
  while (std::getline(in, line))
    if (!line.empty() && line.front() == '{') keep = line;
  REQUIRE(!keep.empty());
  return json::parse(keep);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("cli_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("range syntax") {
  auto r = parse_range("2:20:2");
  REQUIRE(r.size() == 10);
  CHECK(r.front() == 2.0);
  CHECK(r.back() == 20.0);

  r = parse_range("-1:3:0.05");
  REQUIRE(r.size() == 81);
  CHECK(r.front() == -1.0);
  CHECK(r.back() == doctest::Approx(3.0).epsilon(1e-12));

  r = parse_range("8:1:-1");
  REQUIRE(r.size() == 8);
  CHECK(r.front() == 8.0);
  CHECK(r.back() == 1.0);

  r = parse_range("0.5");
  REQUIRE(r.size() == 1);
  CHECK(r[0] == 0.5);

  CHECK_THROWS_AS(parse_range("1:2:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_range("3:1:0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_range("1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_range("a:b:c"), std::invalid_argument);
  CHECK_THROWS_AS(parse_range("1:2:0.5junk"), std::invalid_argument);
}

TEST_CASE("config serialization is stable and complete") {
  RunConfig cfg;
  cfg.command = "eval";
  cfg.parameters["functional"] = "entropy";
  cfg.parameters["density"] = "gaussian:M=1";
  cfg.seed = 7;
  const std::string a = config_json(cfg);
  CHECK(a == config_json(cfg));

  const json j = json::parse(a);
  CHECK(j["command"] == "eval");
  CHECK(j["grid"]["N"] == 2048);
  CHECK(j["grid"]["R_max"] == 100.0);
  CHECK(j["grid"]["grading"] == "geometric");
  CHECK(j["seed"] == 7);
  CHECK(j["parameters"]["functional"] == "entropy");
}

TEST_CASE("eval prints the value and a parseable result") {
  auto r = run({"eval", "--functional", "entropy", "--density", "gaussian", "--M", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("entropy[gaussian:M=1] = ") != std::string::npos);

  const json j = last_json_line(r.out);
  const double expect = -(1.0 + std::log(2.0 * 3.14159265358979323846));
  CHECK(std::abs(j["value"].get<double>() - expect) < 1e-4);
  CHECK(j["config"]["parameters"]["density"] == "gaussian:M=1");

  // the scale-invariant reduction carries the sharp constant, lambda-free
  auto g1 = run({"eval", "--functional", "g", "--a", "0.5", "--density",
                 "k-minimizer:a=0.5,lambda=1"});
  auto g2 = run({"eval", "--functional", "g", "--a", "0.5", "--density",
                 "k-minimizer:a=0.5,lambda=2"});
  const double v1 = last_json_line(g1.out)["value"].get<double>();
  const double v2 = last_json_line(g2.out)["value"].get<double>();
  CHECK(std::abs(v1 - v2) < 1e-6);
  CHECK(std::abs(v1 - (-2.8378770664093453)) < 1e-4);
}

TEST_CASE("invalid input exits with code 2 and names the condition") {
  auto r = run({"eval", "--functional", "entropy", "--density", "rho-eta:eta=0.5"});
  CHECK(r.code == 2);
  CHECK(r.err.find("eta > 1") != std::string::npos);

  r = run({"eval", "--functional", "does-not-exist", "--density", "gaussian"});
  CHECK(r.code == 2);

  r = run({"minimize", "--beta", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("unbounded") != std::string::npos);

  r = run({});
  CHECK(r.code == 2);

  r = run({"phase", "--a", "-1:1:0.1", "--b", "-1:1:0.2", "--out", "unused.csv"});
  CHECK(r.code == 2);
  CHECK(r.err.find("same step") != std::string::npos);
}

TEST_CASE("help requests succeed") {
  auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("eval") != std::string::npos);
  CHECK(r.out.find("minimize") != std::string::npos);

  r = run({"flow", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--dt") != std::string::npos);
}

TEST_CASE("verify passes its suites on the default grid") {
  TempFile rep("verify_report.json");
  auto r = run({"verify", "--suite", "scaling", "--report", rep.path});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);

  const json j = json::parse(slurp(rep.path));
  CHECK(j["ok"] == true);
  CHECK(j["failed"] == 0);
  CHECK(j["checks"].size() >= 20);
  CHECK(j["config"]["parameters"]["suite"] == "scaling");

  r = run({"verify", "--suite", "equalities"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("verify reports which tolerance broke on a degraded grid") {
  TempFile rep("verify_degraded.json");
  auto r = run({"verify", "--suite", "equalities", "--grid.N", "64", "--report", rep.path});
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);

  const json j = json::parse(slurp(rep.path));
  CHECK(j["ok"] == false);
  CHECK(j["failed"].get<int>() > 0);
  bool named = false;
  for (const auto& c : j["checks"])
    if (c["pass"] == false && !c["name"].get<std::string>().empty()) named = true;
  CHECK(named);
}

TEST_CASE("phase writes a labeled grid with embedded config") {
  TempFile csv("phase.csv");
  auto r = run({"phase", "--which", "free-energy", "--a", "-0.5:1.5:0.25", "--b",
                "-2.5:0.5:0.25", "--out", csv.path});
  CHECK(r.code == 0);

  std::istringstream in(slurp(csv.path));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("# config: {", 0) == 0);
  REQUIRE(std::getline(in, line));
  CHECK(line == "a,b,label,constant");

  int rows = 0;
  bool corner_sharp = false, isolated_unbounded = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line.rfind("0,-2,Bounded,", 0) == 0) {
      const double c = std::stod(line.substr(std::string("0,-2,Bounded,").size()));
      corner_sharp = std::abs(c - (-(1.0 + std::log(3.14159265358979323846)))) < 1e-12;
    }
    if (line.rfind("1,0,", 0) == 0) isolated_unbounded = line.find("Unbounded") != std::string::npos;
  }
  CHECK(rows == 9 * 13);
  CHECK(corner_sharp);
  CHECK(isolated_unbounded);
}

TEST_CASE("diverge confirms a divergent family and rejects a flat one") {
  TempFile out("diverge.json");
  auto r = run({"diverge", "--family", "two-bubble", "--eps", "0.3", "--a", "2", "--b", "1.5",
                "--members", "4", "--grid.N", "1024", "--out", out.path});
  CHECK(r.code == 0);
  const json j = json::parse(slurp(out.path));
  CHECK(j["analytic"].get<double>() == doctest::Approx(0.165));
  CHECK(j["confirmed"] == true);
  CHECK(j["members"].size() == 4);
  CHECK(std::abs(j["fitted"].get<double>() - 0.165) / 0.165 < 0.05);

  // at b = 0 the entropy term grows under dilation: F rises, nothing diverges
  r = run({"diverge", "--family", "scale", "--a", "0", "--b", "0", "--members", "4", "--grid.N",
           "1024"});
  CHECK(r.code == 1);
  CHECK(r.out.find("not confirmed") != std::string::npos);
}

TEST_CASE("flow writes history and profile sections and decreases F") {
  TempFile csv("flow.csv");
  auto r = run({"flow", "--a", "2", "--b", "0", "--N", "128", "--R", "15", "--time", "20",
                "--stop", "0", "--log-every", "50", "--out", csv.path});
  CHECK(r.code == 0);

  std::istringstream in(slurp(csv.path));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("# config: {", 0) == 0);
  REQUIRE(std::getline(in, line));
  CHECK(line == "# history");
  REQUIRE(std::getline(in, line));
  CHECK(line == "time,free_energy,dissipation,mass");

  double first_f = 0.0, last_f = 0.0, last_mass = 0.0;
  bool first = true, in_profile = false;
  int profile_rows = 0;
  while (std::getline(in, line)) {
    if (line == "# profile") {
      in_profile = true;
      std::getline(in, line);  // column header r,rho
      CHECK(line == "r,rho");
      continue;
    }
    if (in_profile) {
      ++profile_rows;
      continue;
    }
    std::istringstream row(line);
    std::string t, f, d, m;
    std::getline(row, t, ',');
    std::getline(row, f, ',');
    std::getline(row, d, ',');
    std::getline(row, m, ',');
    last_f = std::stod(f);
    last_mass = std::stod(m);
    if (first) first_f = last_f;
    first = false;
  }
  CHECK(profile_rows == 128);
  CHECK(last_f < first_f - 0.1);
  CHECK(std::abs(last_mass - 1.0) < 1e-9);
}

TEST_CASE("minimize reports the ground state and honors exit codes") {
  TempFile out("minimize.json");
  auto r = run({"minimize", "--alpha", "1", "--tol", "1e-5", "--N", "256", "--R", "30", "--out",
                out.path});
  CHECK(r.code == 0);
  const json j = json::parse(slurp(out.path));
  CHECK(j["converged"] == true);
  CHECK(j["residual"].get<double>() < 1e-4);
  CHECK(j["energy"].get<double>() < 2.35);  // below the gaussian trial value
  CHECK(j["trace"].size() >= 2);

  // unreachable tolerance: the stall is reported, not hidden
  r = run({"minimize", "--alpha", "1", "--tol", "1e-14", "--max-iters", "50", "--N", "128",
           "--R", "20"});
  CHECK(r.code == 1);
  CHECK(r.out.find("not converged") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical outputs") {
  TempFile csv("det_phase.csv");
  auto args = std::vector<std::string>{"phase",  "--which", "free-energy", "--a", "-0.5:0.5:0.5",
                                       "--b",    "-2:0:0.5", "--out",      csv.path};
  CHECK(run(args).code == 0);
  const std::string once = slurp(csv.path);
  CHECK(run(args).code == 0);
  CHECK(slurp(csv.path) == once);

  auto e1 = run({"eval", "--functional", "interaction", "--density", "rho-star"});
  auto e2 = run({"eval", "--functional", "interaction", "--density", "rho-star"});
  CHECK(e1.out == e2.out);
}

TEST_CASE("the LOGFE_GRID environment variable sets the default grid") {
  setenv("LOGFE_GRID", "N=128,R=50", 1);
  auto r = run({"eval", "--functional", "interaction", "--density", "gaussian"});
  unsetenv("LOGFE_GRID");
  CHECK(r.code == 0);
  const json j = last_json_line(r.out);
  CHECK(j["config"]["grid"]["N"] == 128);
  CHECK(j["config"]["grid"]["R_max"] == 50.0);

  setenv("LOGFE_GRID", "N=128,bogus=1", 1);
  r = run({"eval", "--functional", "interaction", "--density", "gaussian"});
  unsetenv("LOGFE_GRID");
  CHECK(r.code == 2);
  CHECK(r.err.find("LOGFE_GRID") != std::string::npos);

  // explicit flags override the environment
  setenv("LOGFE_GRID", "N=128", 1);
  r = run({"eval", "--functional", "interaction", "--density", "gaussian", "--grid.N", "256"});
  unsetenv("LOGFE_GRID");
  CHECK(r.code == 0);
  CHECK(last_json_line(r.out)["config"]["grid"]["N"] == 256);
}

}  // TEST_SUITE("cli")
