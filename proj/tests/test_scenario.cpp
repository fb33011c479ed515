#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "eip/errors.hpp"
#include "eip/scenario.hpp"

using namespace eip;

namespace {

std::string config_dir() { return EIP_CONFIG_DIR; }

nlohmann::json base_config() {
  return nlohmann::json::parse(R"({
    "motion": {"family": "identity"},
    "coefficient": {
      "branch1": {"kind": "constant", "value": 1.0},
      "branch2": {"kind": "constant", "value": 2.0},
      "alpha0": 1.0
    },
    "operator": {"diffusion": {"branch1": 1.0, "branch2": 1.0}},
    "data": {"g1": {"kind": "zero"}}
  })");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool scrub(const std::string& paths) {
  return std::system(("rm -rf " + paths).c_str()) == 0;
}

} // namespace

TEST_CASE("bundled heat_static config parses to the static scenario") {
  Scenario s = parse_config(config_dir() + "/heat_static.json");
  CHECK(s.name == "heat_static");
  CHECK(s.motion.family() == MotionFamily::Identity);
  CHECK(s.coefficient.value(0.2, 0.5, 1) == doctest::Approx(1.0));
  CHECK(s.coefficient.value(0.8, 0.5, 2) == doctest::Approx(1.0));
  CHECK(s.disc.cells == 8);
}

TEST_CASE("missing and unknown keys are named in errors") {
  nlohmann::json cfg = base_config();
  cfg.erase("motion");
  try {
    scenario_from_json(cfg);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("motion") != std::string::npos);
  }

  cfg = base_config();
  cfg["motion"]["wobble"] = 3;
  try {
    scenario_from_json(cfg);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("wobble") != std::string::npos);
  }
}

TEST_CASE("range validation") {
  nlohmann::json cfg = base_config();
  cfg["coefficient"]["alpha0"] = -1.0;
  CHECK_THROWS_AS(scenario_from_json(cfg), ValidationError);

  cfg = base_config();
  cfg["operator"]["diffusion"]["branch1"] = 0.0;
  CHECK_THROWS_AS(scenario_from_json(cfg), ValidationError);

  cfg = base_config();
  cfg["discretization"] = {{"cells", 1}};
  CHECK_THROWS_AS(scenario_from_json(cfg), ValidationError);

  cfg = base_config();
  cfg["motion"] = {{"family", "separable_flow"}, {"amplitude", 0.9}};
  CHECK_THROWS_AS(scenario_from_json(cfg), ValidationError);

  cfg = base_config();
  cfg["motion"]["gamma0"] = 0.999;
  CHECK_THROWS_AS(scenario_from_json(cfg), ValidationError);
}

TEST_CASE("normalized dump round-trips to an identical scenario") {
  Scenario s = parse_config(config_dir() + "/heat_static.json");
  const std::string dump = normalized_dump(s);
  Scenario s2 = scenario_from_json(nlohmann::json::parse(dump));
  CHECK(normalized_dump(s2) == dump);
  CHECK(fnv1a(normalized_dump(s2)) == fnv1a(dump));
}

TEST_CASE("manufactured scenarios expose exact fields where promised") {
  for (const char* name : {"m1", "m2", "m3", "heat_neumann_exact"}) {
    Scenario s = manufactured_scenario(name);
    if (std::string(name) != "heat") CHECK(s.exact.has_value());
  }
  CHECK(!manufactured_scenario("heat").exact.has_value());
  CHECK_THROWS_AS(manufactured_scenario("nope"), ValidationError);
  // manufactured data forbids explicit model sections
  nlohmann::json cfg = base_config();
  cfg["data"] = {{"manufactured", "m1"}};
  CHECK_THROWS_AS(scenario_from_json(cfg), ValidationError);
}

TEST_CASE("m2 exact field: flux continuity and derivative consistency") {
  Scenario s = manufactured_scenario("m2");
  const TimeDependentField& u = *s.exact;
  const double k1 = 1.0, k2 = 2.0;
  for (double t : {0.0, 0.3, 0.7, 1.0}) {
    const double g = s.motion.interface_position(t);
    // continuity of u and of the k-weighted flux across the interface
    CHECK(u.value(g, t, 1) == doctest::Approx(u.value(g, t, 2)).epsilon(1e-12));
    CHECK(k1 * u.dx(g, t, 1) == doctest::Approx(k2 * u.dx(g, t, 2)).epsilon(1e-12));
    // Dirichlet endpoints
    CHECK(std::abs(u.value(0.0, t, 1)) <= 1e-12);
    CHECK(std::abs(u.value(1.0, t, 2)) <= 1e-12);
  }
  // analytic derivatives match central differences, branch by branch
  const double h = 1e-6;
  for (double t : {0.31, 0.64})
    for (double x : {0.15, 0.31, 0.77, 0.9}) {
      const int side = x < s.motion.interface_position(t) ? 1 : 2;
      const double fd_t = (u.value(x, t + h, side) - u.value(x, t - h, side)) / (2 * h);
      const double fd_x = (u.value(x + h, t, side) - u.value(x - h, t, side)) / (2 * h);
      CHECK(u.dt(x, t, side) == doctest::Approx(fd_t).epsilon(1e-5));
      CHECK(u.dx(x, t, side) == doctest::Approx(fd_x).epsilon(1e-5));
    }
}

TEST_CASE("cli: repeated runs produce byte-identical csv artifacts") {
  const std::string cli = EIP_CLI_PATH;
  const std::string cfg = config_dir() + "/heat_static.json";
  const std::string out1 = "/tmp/eip_test_run1", out2 = "/tmp/eip_test_run2";
  REQUIRE(scrub(out1 + " " + out2));
  const std::string base = cli + " infsup --config " + cfg + " --seed 7 --out ";
  REQUIRE(std::system((base + out1 + " > /dev/null").c_str()) == 0);
  REQUIRE(std::system((base + out2 + " > /dev/null").c_str()) == 0);
  CHECK(slurp(out1 + "/infsup.csv") == slurp(out2 + "/infsup.csv"));
  CHECK(!slurp(out1 + "/infsup.csv").empty());
  CHECK(slurp(out1 + "/config_normalized.json") == slurp(out2 + "/config_normalized.json"));
}

TEST_CASE("cli: job count does not change study artifacts") {
  const std::string cli = EIP_CLI_PATH;
  const std::string cfg = config_dir() + "/heat_static.json";
  const std::string o1 = "/tmp/eip_jobs1", o2 = "/tmp/eip_jobs3";
  REQUIRE(scrub(o1 + " " + o2));
  REQUIRE(std::system((cli + " infsup --config " + cfg + " --jobs 1 --out " + o1 +
                       " > /dev/null").c_str()) == 0);
  REQUIRE(std::system((cli + " infsup --config " + cfg + " --jobs 3 --out " + o2 +
                       " > /dev/null").c_str()) == 0);
  CHECK(slurp(o1 + "/infsup.csv") == slurp(o2 + "/infsup.csv"));
}

TEST_CASE("cli: single-level infsup on the heat benchmark exits cleanly") {
  const std::string cli = EIP_CLI_PATH;
  const std::string cfg = "/tmp/eip_heat44.json";
  {
    std::ofstream out(cfg);
    out << R"({"data": {"manufactured": "heat"}, "study": {"levels": [[4, 4]]}})";
  }
  const std::string outdir = "/tmp/eip_test_heat44";
  REQUIRE(scrub(outdir));
  const int rc = std::system(
      (cli + " infsup --config " + cfg + " --out " + outdir + " > /dev/null").c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  std::istringstream csv(slurp(outdir + "/infsup.csv"));
  std::string line;
  int rows = 0;
  std::getline(csv, line); // header
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 1);
}

TEST_CASE("cli: convergence study on m1 exits cleanly with fitted orders") {
  const std::string cli = EIP_CLI_PATH;
  const std::string cfg = "/tmp/eip_m1_conv.json";
  {
    std::ofstream out(cfg);
    out << R"({"data": {"manufactured": "m1"},
               "study": {"levels": [[4, 4], [8, 8], [16, 16], [32, 32]]}})";
  }
  const std::string outdir = "/tmp/eip_test_m1conv";
  REQUIRE(scrub(outdir));
  const int rc = std::system((cli + " convergence --config " + cfg + " --out " + outdir +
                              " --jobs 2 > /dev/null").c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  CHECK(!slurp(outdir + "/convergence.csv").empty());
}

TEST_CASE("cli: exit codes for validation and missing config") {
  const std::string cli = EIP_CLI_PATH;
  const int rc_missing =
      std::system((cli + " solve --config /nonexistent.json > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(rc_missing) == 2);

  // config with an out-of-range alpha0
  const std::string bad = "/tmp/eip_bad_config.json";
  {
    nlohmann::json cfg = base_config();
    cfg["coefficient"]["alpha0"] = -1.0;
    std::ofstream out(bad);
    out << cfg.dump();
  }
  const int rc_bad =
      std::system((cli + " solve --config " + bad + " > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(rc_bad) == 2);
}

TEST_CASE("cli: solve writes solution artifacts and zero data solves to zero") {
  const std::string cli = EIP_CLI_PATH;
  const std::string cfg = "/tmp/eip_zero_config.json";
  {
    nlohmann::json c = base_config();
    c["discretization"] = {{"cells", 4}, {"slabs", 4}};
    std::ofstream out(cfg);
    out << c.dump();
  }
  const std::string outdir = "/tmp/eip_test_zero";
  REQUIRE(scrub(outdir));
  REQUIRE(std::system((cli + " solve --config " + cfg + " --out " + outdir +
                       " --dump-system > /dev/null").c_str()) == 0);
  const std::string sol = slurp(outdir + "/solution.csv");
  CHECK(!sol.empty());
  // every solution value is exactly zero
  std::istringstream lines(sol);
  std::string line;
  std::getline(lines, line); // header
  while (std::getline(lines, line)) {
    const auto pos = line.rfind(',');
    CHECK(line.substr(pos + 1) == "0");
  }
  CHECK(!slurp(outdir + "/system.txt").empty());
  CHECK(!slurp(outdir + "/manifest.json").empty());
}
