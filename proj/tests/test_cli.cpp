#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "satolab/cli.hpp"
#include "satolab/json_out.hpp"

using namespace satolab;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("satolab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args) { return cli::run(args); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("format17 round-trips") {
    CHECK(io::format17(0.1) == "0.10000000000000001");
    CHECK(io::format17(1.0) == "1");
    CHECK(io::format17(NAN) == "null");
    const json j = {{"a", 0.1}, {"b", 3}, {"c", "s"}};
    CHECK(json::parse(io::dump(j))["a"].get<double>() == 0.1);
  }

  TEST_CASE("measures writes the Chebyshev moment table") {
    const auto dir = fresh_dir("measures");
    REQUIRE(run({"--out", dir.string(), "measures", "--q", "4", "--max-m", "6"}) == 0);
    const std::string csv = slurp(dir / "measures.csv");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "q,m,closed_form,quadrature,abs_err");
    bool found = false;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ls(line);
      for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
      REQUIRE(cells.size() == 5);
      if (std::stod(cells[0]) == 4.0 && cells[1] == "2") {
        found = true;
        CHECK(std::stod(cells[2]) == 0.25);
        CHECK(std::abs(std::stod(cells[3]) - 0.25) <= 1e-9);
      }
      CHECK(std::stod(cells[4]) <= 1e-9);
    }
    CHECK(found);
    CHECK(fs::exists(dir / "measures_config.json"));
  }

  TEST_CASE("approx reports the mass defect") {
    const auto dir = fresh_dir("approx");
    REQUIRE(run({"approx", "--out", dir.string(), "--interval", "0", "3.14159265358979", "--M", "20"}) == 0);
    const json out = json::parse(slurp(dir / "approx.json"));
    CHECK(std::abs(out["mass_defect"]["plus"].get<double>() - 1.0 / 21.0) <= 1e-9);
    CHECK(std::abs(out["mass_defect"]["minus"].get<double>() - 1.0 / 21.0) <= 1e-9);
    CHECK(out["max_sandwich_violation"].get<double>() <= 1e-9);
    CHECK(out["f_plus"].size() == 21);

    const auto deg = fresh_dir("approx_deg");
    REQUIRE(run({"approx", "--out", deg.string(), "--interval", "45", "90", "--degrees", "--M", "10"}) == 0);
    const json d = json::parse(slurp(deg / "approx.json"));
    CHECK(d["interval"][0].get<double>() == doctest::Approx(kPi / 4));
    CHECK(d["interval"][1].get<double>() == doctest::Approx(kPi / 2));
  }

  TEST_CASE("primes summary") {
    const auto dir = fresh_dir("primes");
    REQUIRE(run({"primes", "--out", dir.string(), "--field", "Q", "--x", "10"}) == 0);
    const std::string csv = slurp(dir / "primes.csv");
    CHECK(csv == "p,f,norm,type\n2,1,2,rational\n3,1,3,rational\n5,1,5,rational\n7,1,7,rational\n");
    const json s = json::parse(slurp(dir / "primes_summary.json"));
    CHECK(s["pi_L"].get<int>() == 4);
  }

  TEST_CASE("clt report is identical across thread counts and from its own echo") {
    const auto a = fresh_dir("clt_a");
    const auto b = fresh_dir("clt_b");
    const auto c = fresh_dir("clt_c");
    const std::vector<std::string> common = {"clt", "--field", "sqrt5", "--x", "2000", "--H", "3000",
                                             "--seed", "20261016"};
    auto with = [&](const fs::path& out, const std::string& threads) {
      std::vector<std::string> v = {"--out", out.string()};
      v.insert(v.end(), common.begin(), common.end());
      v.push_back("--threads");
      v.push_back(threads);
      return v;
    };
    REQUIRE(run(with(a, "1")) == 0);
    REQUIRE(run(with(b, "4")) == 0);
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "histogram.csv") == slurp(b / "histogram.csv"));
    REQUIRE(run({"--out", c.string(), "--config", (a / "clt_config.json").string(), "clt"}) == 0);
    CHECK(slurp(a / "report.json") == slurp(c / "report.json"));
    const json rep = json::parse(slurp(a / "report.json"));
    CHECK(rep["config"]["seed"].get<std::uint64_t>() == 20261016ULL);
    CHECK(rep["H"].get<int>() == 3000);
  }

  TEST_CASE("config file values are overridden by flags") {
    const auto dir = fresh_dir("override");
    {
      std::ofstream f(dir / "in.json");
      f << R"({"lambda": 2.0, "M": 3, "points": 11})";
    }
    REQUIRE(run({"--out", dir.string(), "--config", (dir / "in.json").string(), "smooth", "--M", "5"}) == 0);
    const json echo = json::parse(slurp(dir / "smooth_config.json"));
    CHECK(echo["smooth"]["lambda"].get<double>() == 2.0);
    CHECK(echo["M"].get<double>() == 5.0);
    CHECK(echo["points"].get<int>() == 11);
  }

  TEST_CASE("configuration errors exit with 2") {
    const auto dir = fresh_dir("errors");
    const std::string out = dir.string();
    CHECK(run({"--out", out, "primes", "--field", "sqrt4", "--x", "100"}) == 2);
    CHECK(run({"--out", out, "primes", "--field", "cuberoot2", "--x", "100"}) == 2);
    CHECK(run({"--out", out, "approx", "--interval", "2", "1"}) == 2);
    CHECK(run({"--out", out, "approx", "--interval", "0", "1", "--M", "2"}) == 2);
    CHECK(run({"--out", out, "measures", "--q", "1"}) == 2);
    CHECK(run({"--out", out, "clt", "--H", "0"}) == 2);
    CHECK(run({"--out", out, "clt", "--statistic", "median"}) == 2);
    CHECK(run({"--out", out, "approx", "--bogus"}) == 2);
    CHECK(run({"--out", out}) == 2);
    CHECK(run({"--out", out, "--config", (dir / "missing.json").string(), "approx"}) == 2);
    {
      std::ofstream f(dir / "bad.json");
      f << "{ \"M\": ";
    }
    CHECK(run({"--out", out, "--config", (dir / "bad.json").string(), "approx"}) == 2);
    {
      std::ofstream f(dir / "unknown.json");
      f << R"({"interval": [0.1, 1.0], "colour": "blue"})";
    }
    CHECK(run({"--out", out, "--config", (dir / "unknown.json").string(), "approx"}) == 2);
    {
      std::ofstream f(dir / "array.json");
      f << "[1, 2]";
    }
    CHECK(run({"--out", out, "--config", (dir / "array.json").string(), "approx"}) == 2);
  }

  TEST_CASE("ensemble config JSON round trip") {
    json j = {{"field", "sqrt13"}, {"x", 500.0}, {"H", 10}, {"seed", "18446744073709551615"},
              {"statistic", "smooth"}, {"interval", {0.5, 1.5}}, {"smooth", {{"kind", "gaussian"}, {"lambda", 0.5}}},
              {"smooth_M", 3.0}, {"R", 4}};
    const auto cfg = cli::ensemble_config_from_json(j);
    CHECK(cfg.field.D == 13);
    CHECK(cfg.seed == 18446744073709551615ULL);
    CHECK(cfg.statistic == ensemble::StatisticKind::smooth);
    CHECK(cfg.smooth.lambda == 0.5);
    const auto again = cli::ensemble_config_from_json(cli::ensemble_config_to_json(cfg));
    CHECK(io::dump(cli::ensemble_config_to_json(again)) == io::dump(cli::ensemble_config_to_json(cfg)));
    j["extra"] = 1;
    CHECK_THROWS_AS(cli::ensemble_config_from_json(j), ConfigError);
  }
}
