#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ldrm/cli.hpp"
#include "ldrm/errors.hpp"

using namespace ldrm;

namespace {

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ldrm");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell == "inf" ? INFINITY : std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("descriptor grammar") {
  auto d = cli::parse_descriptor("sc:1:edge");
  CHECK(d.kind == "sc");
  CHECK(d.params == std::vector<double>{1.0});
  CHECK(d.wall_at_edge);
  auto g = cli::parse_descriptor("goe:2");
  CHECK(g.kind == "sc");
  CHECK(std::isinf(g.wall));
  auto w = cli::parse_descriptor("mp:0.5:1.5:4");
  CHECK(w.params == std::vector<double>{0.5, 1.5});
  CHECK(w.wall == 4.0);
  CHECK(cli::parse_descriptor("dirac:0").wall_at_edge);
  CHECK(cli::parse_descriptor("gaussrect:1:0.5:inf").params.size() == 2);
  CHECK_THROWS_AS(cli::parse_descriptor("zz:1"), UsageError);
  CHECK_THROWS_AS(cli::parse_descriptor("sc:1:2:3"), UsageError);
  CHECK_THROWS_AS(cli::parse_descriptor("sc:abc"), UsageError);
  CHECK_THROWS_AS(cli::to_ensemble(cli::parse_descriptor("sc:1:1.5")), UsageError);
  auto r = cli::to_ensemble(cli::parse_descriptor("dirac:0:2"));
  CHECK(r.wall == 2.0);
}

TEST_CASE("grid parsing") {
  auto g = cli::parse_grid("2:3:11").points();
  REQUIRE(g.size() == 11);
  CHECK(g[5] == doctest::Approx(2.5));
  CHECK_THROWS_AS(cli::parse_grid("2:3:1"), UsageError);
  CHECK_THROWS_AS(cli::parse_grid("3:2:5"), UsageError);
}

TEST_CASE("rate-sum writes the documented columns") {
  std::string out = "test_cli_sum.csv";
  REQUIRE(run_cli({"rate-sum", "--a", "sc:1:edge", "--b", "sc:0.9:edge", "--grid", "2.7:3.9:13", "--out", out}) == 0);
  auto text = slurp(out);
  CHECK(text.rfind("x,rate,theta_star,regime\n", 0) == 0);
  auto rows = parse_csv(text);
  REQUIRE(rows.size() == 13);
  CHECK(rows[0][3] == 1);
  CHECK(std::isinf(rows[12][1]));
  CHECK(run_cli({"rate-sum", "--a", "sc:1:edge", "--b", "sc:0.9:edge", "--grid", "2.7:3.9:13", "--out", out}) == 0);
  CHECK(slurp(out) == text);
  std::remove(out.c_str());
}

TEST_CASE("one-matrix GOE output matches the closed form") {
  std::string out = "test_cli_one.csv";
  REQUIRE(run_cli({"one-matrix", "--a", "sc:1", "--grid", "2.5:3.5:3", "--out", out}) == 0);
  auto rows = parse_csv(slurp(out));
  std::remove(out.c_str());
  for (auto& r : rows) {
    double s = std::sqrt(r[0] * r[0] - 4);
    CHECK(r[1] == doctest::Approx(r[0] * s / 4 + std::log(2 / (r[0] + s))).epsilon(1e-9));
  }
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"rate-sum", "--a", "sc:1"}) == 2);
  CHECK(run_cli({"one-matrix", "--a", "bogus:1", "--grid", "2:3:5"}) == 2);
  CHECK(run_cli({"nope"}) == 2);
  CHECK(run_cli({"mc", "--model", "single", "--a", "sc:1", "--n", "64", "--samples", "5", "--x", "3.5", "--out",
                 "test_cli_tail.json"}) == 4);
  std::remove("test_cli_tail.json");
}

TEST_CASE("Monte Carlo reports are byte-identical on rerun") {
  std::string a = "test_cli_mc_a.json", b = "test_cli_mc_b.json";
  std::vector<std::string> args{"mc", "--model", "rk1rk1:2:1", "--n", "64", "--samples", "20000", "--seed", "7", "--x", "2.2"};
  auto with_out = [&](const std::string& p) {
    auto v = args;
    v.push_back("--out");
    v.push_back(p);
    return v;
  };
  REQUIRE(run_cli(with_out(a)) == 0);
  REQUIRE(run_cli(with_out(b)) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("\"rates\"") != std::string::npos);
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("standalone binary runs") {
  const char* bin = std::getenv("LDRM_CLI");
  if (!bin) return;
  std::string cmd = std::string(bin) + " rk1rk1 --grid 2.1:2.9:3 > test_cli_bin.csv";
  CHECK(std::system(cmd.c_str()) == 0);
  auto rows = parse_csv(slurp("test_cli_bin.csv"));
  std::remove("test_cli_bin.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][1] == doctest::Approx(-0.5 * std::log(2.5 * 0.5 / 2)).epsilon(1e-12));
}
