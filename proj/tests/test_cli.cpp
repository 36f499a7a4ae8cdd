// SPDX-License-Identifier: Apache-2.0
// Runs the stabkit executable end to end.
#include <nlohmann/json.hpp>

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = STABKIT_CLI;
const fs::path kConfigs = STABKIT_CONFIG_DIR;

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = "\"" + kCli + "\" " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "stabkit_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string cfg(const std::string& name) { return "\"" + (kConfigs / name).string() + "\""; }

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("frobnicate").status == 2);
  CHECK(run("stat knn").status == 2);
  CHECK(run("stat knn --in /nonexistent/cloud.csv").status == 1);
  CHECK(run("--version").status == 0);
}

TEST_CASE("weights") {
  const auto r = run("weights --k 8 --d 4");
  REQUIRE(r.status == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc.at("weights").size() == 8);
  CHECK(doc.at("residuals").at("sum_to_one").get<double>() <= 1e-12);
  CHECK(doc.at("manifest").at("version") == "0.1.0");
}

TEST_CASE("sample then evaluate") {
  const fs::path dir = scratch();
  const auto cloud = (dir / "cloud.csv").string();
  REQUIRE(run("sample --config " + cfg("unit_square_binomial.json") + " --out \"" + cloud + "\"").status == 0);
  const std::string text = slurp(cloud);
  CHECK(text.rfind("# manifest ", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 101);

  const auto knn = run("stat knn --in \"" + cloud + "\" --k 2");
  REQUIRE(knn.status == 0);
  CHECK(json::parse(knn.out).at("value").get<double>() > 0.0);

  const auto euler = run("stat euler --in \"" + cloud + "\" --r 1 --kind cech");
  REQUIRE(euler.status == 0);
  CHECK(json::parse(euler.out).at("counts").at("counts").at(0) == 100);

  const auto mst = run("stat mst --in \"" + cloud + "\" --box 0,0..0.5,0.5");
  REQUIRE(mst.status == 0);
  const auto card = run("stat cardinality --in \"" + cloud + "\"");
  CHECK(json::parse(card.out).at("value") == 100);
  CHECK(run("stat entropy --in \"" + cloud + "\" --k 3").status == 0);

  // the same seed reproduces the file
  const auto again = (dir / "cloud2.csv").string();
  REQUIRE(run("sample --config " + cfg("unit_square_binomial.json") + " --out \"" + again + "\"").status == 0);
  CHECK(slurp(again) == text);
  const auto other = (dir / "cloud3.csv").string();
  REQUIRE(run("sample --config " + cfg("unit_square_binomial.json") + " --seed 8 --out \"" + other + "\"").status == 0);
  CHECK(slurp(other) != text);
}

TEST_CASE("cost operators") {
  const auto second = run("costs --stat euler --op second --config " + cfg("unit_square_binomial.json") +
                          " --x 0.5,0.5 --x2 0.52,0.5 --r 1 --scale-n 100");
  REQUIRE(second.status == 0);
  const auto doc = json::parse(second.out);
  CHECK(doc.at("op") == "second");
  const auto flex = run("costs --stat cardinality --op flex --config " + cfg("unit_square_binomial.json") +
                        " --x 0.5,0.5 --window '{\"kind\": \"empty\"}'");
  REQUIRE(flex.status == 0);
  CHECK(json::parse(flex.out).at("value") == 1.0);
  CHECK(run("costs --stat cardinality --op second --config " + cfg("unit_square_binomial.json") +
            " --x 0.5,0.5 --x2 0.5,0.5").status == 1);
}

TEST_CASE("diagnostics and bounds") {
  const auto tail = run("radius --assumption radius_decay --stat cardinality --config " + cfg("unit_square_poisson.json") +
                        " --x 0.5,0.5 --radii 0.05,0.1 --reps 100");
  REQUIRE(tail.status == 0);
  CHECK(json::parse(tail.out).at("kind") == "radius_decay");
  const auto theta = run("bound --mode theta --config " + cfg("unit_square_poisson.json") + " --region full");
  REQUIRE(theta.status == 0);
  CHECK(json::parse(theta.out).at("theta") == 200.0);
}

TEST_CASE("clt reports are byte-identical across reruns and worker counts") {
  const fs::path dir = scratch();
  const std::string base = "clt --stat knn --config " + cfg("unit_square_binomial.json") + " --grid 50,100,200 --reps 200";
  REQUIRE(run(base + " --workers 1 --out \"" + (dir / "a.json").string() + "\" --csv-out \"" + (dir / "a.csv").string() + "\"").status == 0);
  REQUIRE(run(base + " --workers 1 --out \"" + (dir / "b.json").string() + "\"").status == 0);
  REQUIRE(run(base + " --workers 8 --out \"" + (dir / "c.json").string() + "\"").status == 0);
  const std::string a = slurp(dir / "a.json");
  CHECK(!a.empty());
  CHECK(a == slurp(dir / "b.json"));
  CHECK(a == slurp(dir / "c.json"));
  CHECK(slurp(dir / "a.csv").rfind("n,mean,var,d_K,dkw_radius\n", 0) == 0);

  const auto rep = run("report --in \"" + (dir / "a.json").string() + "\" --config " + cfg("unit_square_binomial.json"));
  REQUIRE(rep.status == 0);
  const auto doc = json::parse(rep.out);
  CHECK(doc.at("digest_matches") == true);
  CHECK(doc.at("rows").size() == 3);
}
