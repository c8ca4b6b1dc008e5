#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = METASEL_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

fs::path tmpdir() {
  auto p = fs::temp_directory_path() / "metasel-cli-test";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("simulate then fit pipeline smoke") {
  const auto dir = tmpdir();
  const auto data = (dir / "tiny.csv").string();
  REQUIRE(run("simulate --scenario none --n 5 --theta0 0 --tau 0.1 --seed 1 "
              "--out " + data) == 0);
  const auto out = (dir / "fit").string();
  REQUIRE(run("fit --data " + data +
              " --model phack --chains 2 --warmup 300 --draws 300 --seed 2 "
              "--out " + out) == 0);
  std::ifstream js(out + "/summary.json");
  REQUIRE(js.good());
  const json summary = json::parse(js);
  CHECK(summary.contains("parameters"));
  CHECK(summary["config"]["model"] == "phack");
  CHECK(fs::exists(out + "/draws.csv"));
  CHECK(fs::exists(out + "/loo.json"));
  std::ifstream lj(out + "/loo.json");
  const json loo = json::parse(lj);
  CHECK(loo["looic"].get<double>() ==
        doctest::Approx(-2.0 * loo["elpd_loo"].get<double>()));
}

TEST_CASE("outputs carry the resolved configuration") {
  const auto dir = tmpdir();
  const auto data = (dir / "tiny2.csv").string();
  REQUIRE(run("simulate --scenario pubbias --n 8 --theta0 0.2 --tau 0.1 "
              "--weights 1,0.7,0.1 --seed 3 --out " + data) == 0);
  std::ifstream ds(data);
  std::string first;
  std::getline(ds, first);
  CHECK(first.find("seed=3") != std::string::npos);
  const auto out = (dir / "fit2").string();
  REQUIRE(run("fit --data " + data +
              " --model pubbias --chains 2 --warmup 200 --draws 200 --seed 4 "
              "--no-loo --emit-plotdata --out " + out) == 0);
  std::ifstream dc(out + "/draws.csv");
  std::getline(dc, first);
  CHECK(first.find("\"seed\":4") != std::string::npos);
  CHECK(fs::exists(out + "/plotdata.json"));
}

TEST_CASE("error paths exit nonzero") {
  CHECK(run("fit --data /nonexistent.csv --model pubbias --out /tmp/x") != 0);
  CHECK(run("fit --data /tmp --model bogus --out /tmp/x") != 0);
  CHECK(run("frobnicate") != 0);
  CHECK(run("fit --data /tmp/whatever.csv --unknown-flag --out /tmp/x") != 0);
  // contradictory flags
  const auto dir = tmpdir();
  const auto data = (dir / "tiny3.csv").string();
  REQUIRE(run("simulate --scenario none --n 5 --theta0 0 --tau 0.1 --seed 9 "
              "--out " + data) == 0);
  CHECK(run("fit --data " + data +
            " --effects fixed --tau 0.5 --model uncorrected --chains 2 "
            "--warmup 100 --draws 100 --out " + (dir / "fx").string()) != 0);
}

TEST_CASE("help exists for every subcommand") {
  for (const std::string sub : {"fit", "simulate", "replicate", "compare",
                                "convert-weights", "demo-selection-set"})
    CHECK(run(sub + " --help") == 0);
  CHECK(run("--help") == 0);
}

TEST_CASE("convert-weights round trips through the CLI") {
  const std::string cmd =
      kCli + " convert-weights --direction rho2pi --weights 1,0.7,0.1 "
             "--sigma 1 > /tmp/metasel-cw.json 2>/dev/null";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  std::ifstream js("/tmp/metasel-cw.json");
  const json out = json::parse(js);
  CHECK(out["pi"][0].get<double>() == doctest::Approx(0.181818).epsilon(1e-4));
}

TEST_CASE("demo-selection-set reports sane moments") {
  const std::string cmd =
      kCli + " demo-selection-set --H x --n 20000 --seed 5 "
             "> /tmp/metasel-ds.json 2>/dev/null";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  std::ifstream js("/tmp/metasel-ds.json");
  const json out = json::parse(js);
  // H = {x} leaves the theta marginal at N(0,1)
  CHECK(std::abs(out["theta_mean"].get<double>()) < 0.05);
  CHECK(out["theta_sd"].get<double>() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(out["x_mean"].get<double>() > 0.2);
}

TEST_CASE("config file values are overridable by flags") {
  const auto dir = tmpdir();
  const auto data = (dir / "tiny4.csv").string();
  REQUIRE(run("simulate --scenario none --n 5 --theta0 0 --tau 0.1 --seed 11 "
              "--out " + data) == 0);
  const auto cfgfile = dir / "fit.cfg";
  {
    std::ofstream os(cfgfile);
    os << "[fit]\nchains=2\nwarmup=150\ndraws=150\nseed=8\n";
  }
  const auto out = (dir / "fit4").string();
  REQUIRE(run("--config " + cfgfile.string() + " fit --data " + data +
              " --model uncorrected --seed 12 --no-loo --out " + out) == 0);
  std::ifstream js(out + "/summary.json");
  const json summary = json::parse(js);
  CHECK(summary["config"]["chains"] == 2);      // from the config file
  CHECK(summary["config"]["seed"] == 12);       // flag wins
}
