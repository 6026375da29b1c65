#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gymlab/io.hpp"

using namespace gymlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gymlab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const io::Json& j) { io::write_json(p.string(), j); }

/// Runs the binary and returns its exit code; stdout and stderr go to `log`.
int run_cli(const std::string& args, const fs::path& log, const std::string& env = "") {
  const char* bin = std::getenv("GYMLAB_BIN");
  REQUIRE(bin != nullptr);
  const std::string cmd = env + " '" + std::string(bin) + "' " + args + " > '" + log.string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

io::Json scenario(const std::string& command) { return {{"schema", "scenario.v1"}, {"command", command}}; }

}  // namespace

TEST_CASE("validate writes a defect table") {
  TempDir t;
  auto X = make_space(SpaceModel::interval(0.0, 1.0, 2));
  const DiscreteGYM mu(X, 1, {Atom{0, {1.0}, 1.0, 0.5}, Atom{1, {-1.0}, 1.0, 0.5}, Atom{1, {1.0}, 0.0, 3.0}});
  write(t.path / "mu.json", io::to_json(mu));
  auto sc = scenario("validate");
  sc["inputs"] = {{"measure", "mu.json"}};
  write(t.path / "s.json", sc);
  CHECK(run_cli("validate --scenario " + (t.path / "s.json").string() + " --out " + (t.path / "o").string(),
               t.path / "log") == 0);
  const auto csv = slurp(t.path / "o" / "validate.csv");
  CHECK(csv.rfind("cell,lambda,defect\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(io::read_json((t.path / "o" / "verdict.json").string())["status"] == "pass");

  // a measure that breaks the projection property fails
  write(t.path / "mu.json", io::to_json(DiscreteGYM(X, 1, {Atom{0, {1.0}, 1.0, 0.1}})));
  CHECK(run_cli("validate --scenario " + (t.path / "s.json").string() + " --out " + (t.path / "o").string(),
               t.path / "log") == 1);
}

TEST_CASE("errors exit with 2") {
  TempDir t;
  auto X = make_space(SpaceModel::interval(0.0, 1.0, 2));
  write(t.path / "mu.json", io::to_json(DiscreteGYM(X, 2, {Atom{0, {1.0, 0.0}, 1.0, 0.5}})));
  auto sc = scenario("pair");
  sc["inputs"] = {{"measure", "mu.json"}};
  sc["battery"] = {{"members", {io::to_json(HomFn::xi_norm(3))}}};
  write(t.path / "s.json", sc);
  CHECK(run_cli("pair --scenario " + (t.path / "s.json").string() + " --out " + (t.path / "o").string(),
               t.path / "log") == 2);
  CHECK(io::read_json((t.path / "o" / "verdict.json").string())["status"] == "error");

  auto d = scenario("derivative");
  d["params"] = {{"eps", {"0.1"}}};
  d["params"]["oracle"] = {{"kind", "linear"}, {"dim", 1}, {"lo", "0"}, {"hi", "1"}, {"v", {"1", "1"}}};
  d["params"]["oracle"]["space"] = io::to_json(*X);
  write(t.path / "d.json", d);
  CHECK(run_cli("derivative --scenario " + (t.path / "d.json").string() + " --out " + (t.path / "o").string(),
               t.path / "log") == 2);
  CHECK(slurp(t.path / "log").find("'params.t0'") != std::string::npos);

  CHECK(run_cli("validate --scenario " + (t.path / "d.json").string() + " --out " + (t.path / "o").string(),
               t.path / "log") == 2);
  CHECK(run_cli("validate --out " + (t.path / "o").string(), t.path / "log") == 2);
  CHECK(run_cli("bogus", t.path / "log") == 2);
  CHECK(run_cli("suite --out " + (t.path / "o").string(), t.path / "log", "SEED=abc") == 2);
}

TEST_CASE("derivative of the oscillation path at N = 2000") {
  TempDir t;
  auto d = scenario("derivative");
  d["params"] = {{"t0", "1"}, {"tol", "0.01"}};
  d["params"]["eps"] = {{"first", 3}, {"last", 10}};
  d["params"]["oracle"] = {{"kind", "oscillation"}, {"lo", "0"}, {"hi", "2"}};
  d["params"]["oracle"]["space"] = io::to_json(SpaceModel::interval(-1.0, 1.0, 2000));
  d["params"]["target_young"] = {{"values", {{"1"}, {"-1"}}}, {"probs", {"0.5", "0.5"}}};
  d["params"]["target_tol"] = "0.01";
  write(t.path / "d.json", d);
  CHECK(run_cli("derivative --scenario " + (t.path / "d.json").string() + " --out " + (t.path / "o").string(),
               t.path / "log") == 0);
  INFO(slurp(t.path / "log"));
  CHECK(fs::exists(t.path / "o" / "estimate.json"));
  CHECK(slurp(t.path / "o" / "derivative.csv").rfind("eps,side,member,value\n", 0) == 0);

  // a jump has no derivative at the jump time
  d["params"]["oracle"] = {{"kind", "jump"}, {"lo", "0"}, {"hi", "1"}, {"cell", 0}, {"t_jump", "0.5"}};
  d["params"]["oracle"]["mass"] = {"1"};
  d["params"]["oracle"]["space"] = io::to_json(SpaceModel::interval(-1.0, 1.0, 4));
  d["params"].erase("target_young");
  d["params"]["t0"] = "0.5";
  write(t.path / "j.json", d);
  CHECK(run_cli("derivative --scenario " + (t.path / "j.json").string() + " --out " + (t.path / "o").string(),
               t.path / "log") == 1);
  CHECK(io::read_json((t.path / "o" / "verdict.json").string())["status"] == "no-limit");
}

TEST_CASE("suite is deterministic and honours SEED and tolerance_scale") {
  TempDir t;
  auto sc = scenario("suite");
  sc["seed"] = 7;
  sc["params"] = {{"criteria", {"A1", "A2", "A6", "A7"}}};
  write(t.path / "s.json", sc);
  const std::string s = " --scenario " + (t.path / "s.json").string();
  CHECK(run_cli("suite" + s + " --out " + (t.path / "a").string(), t.path / "log") == 0);
  CHECK(run_cli("suite" + s + " --out " + (t.path / "b").string(), t.path / "log") == 0);
  CHECK(slurp(t.path / "a" / "suite.csv") == slurp(t.path / "b" / "suite.csv"));
  CHECK(slurp(t.path / "a" / "verdict.json") == slurp(t.path / "b" / "verdict.json"));

  CHECK(run_cli("suite" + s + " --out " + (t.path / "c").string(), t.path / "log", "SEED=99") == 0);
  CHECK(io::read_json((t.path / "c" / "verdict.json").string())["provenance"]["seed"] == "99");
  CHECK(slurp(t.path / "a" / "suite.csv") != slurp(t.path / "c" / "suite.csv"));

  sc["params"]["tolerance_scale"] = "0";
  write(t.path / "z.json", sc);
  CHECK(run_cli("suite --scenario " + (t.path / "z.json").string() + " --out " + (t.path / "z").string(),
               t.path / "log") == 1);
}
