#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/experiments.hpp"
#include "cli/state_spec.hpp"
#include "cvtele/epr.hpp"
#include "cvtele/errors.hpp"
#include "cvtele/serialize.hpp"
#include "support.hpp"

using namespace cvtele;
using namespace cvtele::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cvtele_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cvtele");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("state specs") {
  const FockDim d(20);
  CHECK(trace_distance(parse_state("vacuum", d), vacuum(d)) < 1e-15);
  CHECK(trace_distance(parse_state("fock:2", d), fock_state(2, d)) < 1e-15);
  CHECK(trace_distance(parse_state("coherent:0.8", d), coherent_state(0.8, d)) < 1e-15);
  CHECK(trace_distance(parse_state("coherent:0.3,-0.4", d), coherent_state(Complex(0.3, -0.4), d)) < 1e-15);
  CHECK(trace_distance(parse_state("cat:1.0", d), cat_state(1.0, 0.0, d)) < 1e-15);
  CHECK(trace_distance(parse_state("thermal:0.5", d), thermal_state(0.5, d)) < 1e-15);
  CHECK(is_coherent_spec("coherent:0.8"));
  CHECK_FALSE(is_coherent_spec("fock:1"));
  CHECK(coherent_amplitude("coherent:0.3,-0.4") == Complex(0.3, -0.4));

  for (const char* bad : {"squeezed:1", "fock:x", "fock:1.5", "fock:99", "coherent:", "cat:0,3.14159265358979",
                          "thermal:-1", "coherent:1,2,3"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_state(bad, d), ConfigError);
  }
}

TEST_CASE("resource files") {
  TempDir tmp;
  const FockDim d(12);
  {
    std::ofstream(tmp / "mix.json") << R"({"tmsv_mixture": [[0.25, 0.2], [0.75, 0.6]]})";
    const TwoModeState w = load_resource(tmp / "mix.json", d);
    CHECK(test::max_abs(w.dense() - tmsv_mixture({{0.25, 0.2}, {0.75, 0.6}}, d).dense()) < 1e-15);
  }
  {
    std::ofstream(tmp / "one.json") << R"({"tmsv": 0.4})";
    CHECK(test::max_abs(load_resource(tmp / "one.json", d).dense() - tmsv(0.4, d).dense()) < 1e-15);
  }
  {
    const TwoModeState w = test::random_two_mode(d, 2, 3);
    std::ofstream(tmp / "dense.json") << to_json(w).dump();
    CHECK(test::max_abs(load_resource(tmp / "dense.json", d).dense() - w.dense()) < 1e-15);
    CHECK_THROWS_AS(load_resource(tmp / "dense.json", FockDim(10)), ConfigError);
  }
  CHECK_THROWS_AS(load_resource(tmp / "missing.json", d), ConfigError);
  std::ofstream(tmp / "junk.json") << "{not json";
  CHECK_THROWS_AS(load_resource(tmp / "junk.json", d), ConfigError);
}

TEST_CASE("config overrides") {
  RunConfig c;
  c.command = "teleport";
  apply_overrides(c, nlohmann::json::parse(R"({"n-max": 30, "signal_var": 3.5, "input": "fock:1", "r": [0.2, 0.4]})"));
  CHECK(c.n_max == 30);
  CHECK(c.signal_var == 3.5);
  CHECK(c.input == "fock:1");
  CHECK(c.r == std::vector<double>{0.2, 0.4});
  CHECK_THROWS_AS(apply_overrides(c, nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(apply_overrides(c, nlohmann::json::parse(R"({"n_max": "many"})")), ConfigError);

  // round trip through the manifest form
  RunConfig d;
  apply_overrides(d, to_json(c));
  CHECK(to_json(d) == to_json(c));

  CHECK(defaults_table().at("version") == 1);
}

TEST_CASE("oracle cutoff rule") {
  CHECK(oracle_n_max(0.0, 40) == 40);
  CHECK(oracle_n_max(1.0, 40) == 51);
  CHECK(oracle_n_max(1.5, 40) == 139);
  CHECK(oracle_n_max(0.5, 40) == 40);
}

TEST_CASE("command line: exit codes and outputs") {
  TempDir tmp;

  SUBCASE("usage and configuration errors exit 2") {
    CHECK(run_cli({"kernel", "--no-such-flag"}) == kExitConfig);
    CHECK(run_cli({"teleport", "--input", "bogus", "--out", tmp / "b"}) == kExitConfig);
    CHECK(run_cli({"teleport", "--r", "0.5", "--T", "1.5", "--out", tmp / "t"}) == kExitConfig);
    CHECK(run_cli({"kernel", "--config", tmp / "absent.json"}) == kExitConfig);
    std::ofstream(tmp / "bad.json") << R"({"bogus": 1})";
    CHECK(run_cli({"kernel", "--config", tmp / "bad.json", "--out", tmp / "k"}) == kExitConfig);
    CHECK(run_cli({"kernel", "--resolution", "40", "--out", tmp / "k"}) == kExitConfig);
  }

  SUBCASE("verify --list") {
    CHECK(run_cli({"verify", "--list", "--out", tmp / "v"}) == kExitOk);
    const auto m = nlohmann::json::parse(slurp(tmp / "v.json"));
    CHECK(m.at("results").at("listed") == 8);
    CHECK(m.at("exit_code") == 0);
  }

  SUBCASE("kernel") {
    CHECK(run_cli({"kernel", "--r", "0.5", "--out", tmp / "k"}) == kExitOk);
    const std::string csv = slurp(tmp / "k.csv");
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.rfind("x,p,kernel,closed_form,abs_error\n", 0) == 0);
    const auto m = nlohmann::json::parse(slurp(tmp / "k.json"));
    for (const char* key : {"config", "defaults", "grid", "leakage", "wall_time_seconds", "checks", "threads"}) {
      CAPTURE(key);
      CHECK(m.contains(key));
    }
    CHECK(m.at("results").at("max_abs_error_vs_closed_form").get<double>() < 1e-10);

    // deterministic given the resolved config
    CHECK(run_cli({"kernel", "--r", "0.5", "--out", tmp / "k2"}) == kExitOk);
    CHECK(slurp(tmp / "k.csv") == slurp(tmp / "k2.csv"));

    CHECK(run_cli({"kernel", "--r", "0", "--out", tmp / "k0"}) == kExitOk);
    const auto m0 = nlohmann::json::parse(slurp(tmp / "k0.json"));
    CHECK(m0.at("results").at("peak").get<double>() == doctest::Approx(1.0 / (2 * test::kPi)).epsilon(1e-12));

    std::ofstream(tmp / "w.json") << R"({"tmsv_mixture": [[0.5, 0.3], [0.5, 0.8]]})";
    CHECK(run_cli({"kernel", "--state", tmp / "w.json", "--out", tmp / "kw"}) == kExitOk);
    const auto mw = nlohmann::json::parse(slurp(tmp / "kw.json"));
    CHECK(std::abs(mw.at("results").at("normalization").get<double>() - 1.0) < 1e-3);
  }

  SUBCASE("teleport") {
    CHECK(run_cli({"teleport", "--nbar", "0", "--input", "fock:1", "--out", tmp / "t"}) == kExitOk);
    const auto rows = read_csv(tmp / "t.csv");
    const auto fcol = column(rows[0], "fidelity");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][fcol]) == 1.0);

    CHECK(run_cli({"teleport", "--r", "0.35", "--T", "0.7", "--input", "vacuum", "--out", tmp / "n"}) == kExitOk);
    const auto nrows = read_csv(tmp / "n.csv");
    const auto ncol = column(nrows[0], "nbar");
    const double expected = 1.0 - (1.0 - std::exp(-0.7)) * 0.7;
    for (std::size_t i = 1; i < nrows.size(); ++i) CHECK(std::stod(nrows[i][ncol]) == doctest::Approx(expected));

    // --config overrides flags
    std::ofstream(tmp / "cfg.json") << R"({"input": "coherent:0.3", "nbar": 0.25})";
    CHECK(run_cli({"teleport", "--nbar", "0.9", "--config", tmp / "cfg.json", "--out", tmp / "c"}) == kExitOk);
    const auto mc = nlohmann::json::parse(slurp(tmp / "c.json"));
    CHECK(mc.at("config").at("input") == "coherent:0.3");
    CHECK(mc.at("config").at("nbar").get<double>() == 0.25);
  }

  SUBCASE("densecode") {
    CHECK(run_cli({"densecode", "--r", "0.5,1.0", "--T", "0", "--samples", "2000", "--out", tmp / "d"}) == kExitOk);
    const auto rows = read_csv(tmp / "d.csv");
    REQUIRE(rows.size() == 3);
    const auto ncol = column(rows[0], "nbar");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][ncol]) == 1.0);

    CHECK(run_cli({"densecode", "--r", "1.0", "--samples", "2000", "--seed", "3", "--out", tmp / "d1"}) == kExitOk);
    CHECK(run_cli({"densecode", "--r", "1.0", "--samples", "2000", "--seed", "3", "--out", tmp / "d2"}) == kExitOk);
    CHECK(slurp(tmp / "d1.csv") == slurp(tmp / "d2.csv"));
  }

  SUBCASE("fidelity sweep") {
    CHECK(run_cli({"fidelity-sweep", "--input", "fock:1", "--r-max", "1.0", "--r-step", "0.5",
                   "--out", tmp / "s"}) == kExitOk);
    const auto rows = read_csv(tmp / "s.csv");
    REQUIRE(rows.size() == 4);
    const auto col = column(rows[0], "f_oracle");
    for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][col]) > std::stod(rows[i - 1][col]));

    CHECK(run_cli({"fidelity-sweep", "--input", "coherent:0.5", "--r-max", "0.5", "--r-step", "0.5",
                   "--out", tmp / "sc"}) == kExitOk);
    const auto crows = read_csv(tmp / "sc.csv");
    const auto fk = column(crows[0], "f_kernel");
    CHECK(std::stod(crows[1][fk]) == doctest::Approx(0.5).epsilon(1e-6));
  }
}
