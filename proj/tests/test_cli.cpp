#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "satk/kernels.hpp"
#include "satk/specfun.hpp"
#include "satk/variance.hpp"

using json = nlohmann::json;
using namespace satk;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + SATKERNEL_BIN + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv(const std::string& s) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

double num(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace

TEST_CASE("cli: sine kernel rows") {
  const Run r = run("kernel --family sine --a 1 --grid 0:0.1:1 x 0");
  REQUIRE(r.code == 0);
  const auto t = csv(r.out);
  REQUIRE(t.size() == 12);
  CHECK(t[0] == std::vector<std::string>{"x", "y", "K"});
  CHECK(num(t[1][2]) == 1.0);
  CHECK(num(t[11][0]) == 1.0);
}

TEST_CASE("cli: LS values pass through bit for bit, approximation column") {
  const Run r = run("kernel --family LS --d 2 --grid -1:0.25:1");
  REQUIRE(r.code == 0);
  const auto t = csv(r.out);
  REQUIRE(t.size() == 1 + 81);
  const KernelHandle K = kernel_LS(EquidistantModel::from_d(2.0));
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(num(t[i][2]) == K(num(t[i][0]), num(t[i][1])));

  const Run c = run("--json kernel --family LS --d 2 --grid -1:0.25:1 --compare LS-approx");
  REQUIRE(c.code == 0);
  const json j = json::parse(c.out);
  CHECK(j["summary"]["max_abs_delta"].get<double>() < 10 * std::exp(-2 * kPi * 2.0));
  CHECK(j["parameters"]["family"] == "LS");
  CHECK(j["parameters"]["compare"] == "LS-approx");
  CHECK(j["rows"].size() == 81);
}

TEST_CASE("cli: variance sweeps") {
  {
    const Run r = run("--json variance --method averaged --d 20 --L 0.1:log:1e5");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    const auto& rows = j["rows"];
    REQUIRE(rows.size() == 50);
    CHECK(std::abs(rows.back()["value"].get<double>() - saturation_level(20.0)) < 1e-3);
    // log growth first, then the plateau
    CHECK(rows[10]["value"].get<double>() < rows[30]["value"].get<double>());
  }
  {
    const Run r = run("--json variance --method un --n 64 --arc 0:0.05:6.28");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j["summary"]["max_at_arc"].get<double>() - kPi) < 0.05);
  }
  {
    const Run r = run("--json variance --crosscheck --R 0.3 --L 7.6 --d 2");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["summary"]["max_abs_delta"].get<double>() < 1e-5);
  }
  {
    const Run r = run("variance --method sine --L 1 --d 1");
    REQUIRE(r.code == 0);
    CHECK(num(csv(r.out)[1][4]) == variance_sine_closed(1.0, 1.0).value);
  }
}

TEST_CASE("cli: gap cdf is monotone") {
  const Run r = run("gap --boundary absorbing --xi 0:0.1:4");
  REQUIRE(r.code == 0);
  const auto t = csv(r.out);
  REQUIRE(t.size() == 42);
  for (std::size_t i = 2; i < t.size(); ++i) CHECK(num(t[i][1]) >= num(t[i - 1][1]) - 1e-12);
  CHECK(num(t.back()[1]) > 0.999);
}

TEST_CASE("cli: simulate is reproducible across runs and workers") {
  const std::string args = "simulate --N 201 --S 1 --a 1 --samples 300 --window 0.25:5.25 --seed 7 --bins 5 --json";
  const Run a = run(args + " --workers 1");
  const Run b = run(args + " --workers 3");
  const Run c = run(args, "SATKERNEL_WORKERS=2");
  REQUIRE(a.code == 0);
  const json ja = json::parse(a.out), jb = json::parse(b.out), jc = json::parse(c.out);
  CHECK(ja["rows"] == jb["rows"]);
  CHECK(ja["rows"] == jc["rows"]);
  CHECK(ja["histograms"] == jb["histograms"]);
  CHECK(ja["parameters"]["seed"].get<double>() == 7.0);
  CHECK(ja["parameters"]["N"].get<double>() == 201.0);
  CHECK(run(args, "SATKERNEL_WORKERS=0").code == 2);
}

TEST_CASE("cli: approx max error decreases in alpha") {
  const Run r = run("--json approx --F power:0.05 --alpha 50,100,200 --T 2");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["rows"].size() == 3);
  CHECK(j["rows"][1]["max_lhs"].get<double>() < j["rows"][0]["max_lhs"].get<double>());
  CHECK(j["rows"][2]["max_lhs"].get<double>() < j["rows"][1]["max_lhs"].get<double>());
  CHECK(j["summary"]["max_lhs_decreasing"] == true);
}

TEST_CASE("cli: digits, config, manifest") {
  const Run r = run("kernel --family sine --grid 0.3 x 0 --digits 4");
  CHECK(csv(r.out)[1][2] == "0.8584");

  const auto dir = std::filesystem::temp_directory_path() / "satk_cli_test";
  std::filesystem::create_directories(dir);
  const auto cfg = (dir / "c.json").string();
  std::ofstream(cfg) << R"({"family": "LSS", "d": 2, "grid": ["0:0.5:1", "x", "0"]})";
  const Run a = run("kernel --config " + cfg + " --d 3");
  const Run b = run("kernel --family LSS --d 3 --grid 0:0.5:1 x 0");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  const auto out = (dir / "gap.csv").string();
  REQUIRE(run("--out " + out + " gap --xi 0:1:2").code == 0);
  std::ifstream mf(out + ".manifest.json");
  REQUIRE(mf.good());
  const json m = json::parse(mf);
  CHECK(m["outputs"][0] == out);
  CHECK(m["input_hash"].get<std::string>().size() == 40);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: exit codes") {
  CHECK(run("kernel --family nope").code == 2);
  CHECK(run("kernel --family LS --S 1 --d 2").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("kernel --grid 1:x:2 --d 1").code == 2);
  CHECK(run("variance --method un --arc 7").code == 3);
  CHECK(run("simulate --N 21 --window 0:5").code == 3);
  CHECK(run("--json --csv gap").code == 2);
  CHECK(run("--selftest --only 7,11").code == 0);
  CHECK(run("selftest --only 6").code != 0);
}
