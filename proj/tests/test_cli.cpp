/*
 * Copyright 2026 The meshgrain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "meshgrain/cli.hpp"
#include "meshgrain/matrix_io.hpp"
#include "meshgrain/maze.hpp"
#include "meshgrain/scaling.hpp"
#include "test_support.hpp"

using namespace meshgrain;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "meshgrain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("meshgrain_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string put(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix naive(const Matrix& a, const Matrix& b) {
  const auto sr = a.semiring();
  Matrix c(a.n(), sr);
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j)
      for (int k = 0; k < a.n(); ++k) c.at(i, j) = sr.plus(c.at(i, j), sr.times(a.at(i, k), b.at(k, j)));
  return c;
}

std::string value_of(const std::string& kv, const std::string& key) {
  std::istringstream in(kv);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return "<missing>";
}

}  // namespace

TEST_CASE("matmul from files") {
  for (const char* algo : {"systolic2d", "sim2d-on-3d", "alg-a", "alg-b"}) {
    CAPTURE(algo);
    auto a = testing::random_matrix(8, Semiring::plusmul(), 5);
    auto b = testing::random_matrix(8, Semiring::plusmul(), 6);
    const auto pa = put("a.mat", emit_matrix(a)), pb = put("b.mat", emit_matrix(b));
    const auto pc = (scratch() / "c.mat").string(), pl = (scratch() / "ledger.txt").string();
    auto r = cli({"matmul", "--algo", algo, "-A", pa, "-B", pb, "-o", pc, "--ledger", pl, "--forced-s", "1"});
    REQUIRE(r.code == 0);
    CHECK(read_matrix_file(pc, Semiring::plusmul()) == naive(a, b));
    const auto ledger = slurp(pl);
    CHECK(value_of(ledger, "algo") == algo);
    CHECK(std::stoull(value_of(ledger, "total_steps")) > 0);
  }
  auto a = testing::random_matrix(6, Semiring::minplus(), 9);
  const auto pa = put("m.mat", emit_matrix(a));
  auto r = cli({"matmul", "--algo", "alg-a", "--semiring", "minplus", "-A", pa, "-B", pa});
  REQUIRE(r.code == 0);
  CHECK(parse_matrix(r.out, Semiring::minplus()) == naive(a, a));
}

TEST_CASE("exit codes") {
  CHECK(cli({"matmul", "--algo", "nope", "--n", "4"}).code == 1);
  CHECK(cli({"matmul", "--algo", "systolic2d", "--n", "4", "--bogus"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"matmul", "--algo", "systolic2d", "-A", "/nonexistent/a", "-B", "/nonexistent/b"}).code == 1);
  CHECK(cli({"matmul", "--algo", "alg-b", "--n", "8"}).code == 1);  // Strassen needs --forced-s
  CHECK(cli({"--help"}).code == 0);

  auto budget = cli({"matmul", "--algo", "systolic2d", "--n", "4", "--word-budget", "4"});
  CHECK(budget.code == 2);
  CHECK(budget.err.find("processor (0,0)") != std::string::npos);
  CHECK(budget.err.find("step 0") != std::string::npos);

  auto twice = cli({"program", "--name", "double-send", "--target", "5"});
  CHECK(twice.code == 2);
  CHECK(twice.err.find("BandwidthViolation: processor (1,1) at step 1") != std::string::npos);

  auto maze = put("wall.txt", "2 3\nS#.\n.#.\n.#F\n");
  CHECK(cli({"maze", "--dim", "2", "--in", maze, "--require-path"}).code == 3);
  CHECK(cli({"maze", "--dim", "2", "--in", maze}).code == 0);
  CHECK(cli({"maze", "--dim", "3", "--in", maze}).code == 1);

  auto g = put("g.mat", "3\n0 1 INF\nINF 0 INF\nINF INF 0\n");
  CHECK(cli({"paths", "--problem", "apsp", "--in", g, "--path", "0", "2"}).code == 3);
}

TEST_CASE("step cap from the environment") {
  ::setenv("MESHGRAIN_STEP_CAP", "5", 1);
  auto r = cli({"program", "--name", "diffusion", "--rounds", "50"});
  ::unsetenv("MESHGRAIN_STEP_CAP");
  CHECK(r.code == 2);
  CHECK(r.err.find("NonHalting") != std::string::npos);
  CHECK(cli({"program", "--name", "diffusion", "--rounds", "50"}).code == 0);
}

TEST_CASE("bounds command") {
  auto r = cli({"bounds", "--n", "1024", "--dim", "3"});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "optimal_alpha") == "9/4");
  CHECK(value_of(r.out, "optimal_time_exponent") == "3/4");
  CHECK(value_of(r.out, "ring_exponent") == "2/3");
  auto two = cli({"bounds", "--n", "64", "--dim", "2"});
  CHECK(value_of(two.out, "binding") == "tie");
  CHECK(cli({"bounds", "--n", "64", "--alpha", "9/4", "--size", "10"}).code == 1);
}

TEST_CASE("paths and maze commands") {
  auto g = put("tri.mat", "3\n0 1 5\nINF 0 1\nINF INF 0\n");
  auto r = cli({"paths", "--problem", "apsp", "--in", g, "--path", "0", "2"});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "path") == "0 1 2");
  CHECK(value_of(r.out, "distance") == "2");

  auto chain = put("chain.mat", "4\n0 1 0 0\n0 0 1 0\n0 0 0 1\n0 0 0 0\n");
  for (const char* mode : {"ring", "boolean"}) {
    auto c = cli({"paths", "--problem", "closure", "--mode", mode, "--in", chain});
    REQUIRE(c.code == 0);
    CHECK(c.out == "4\n1 1 1 1\n0 1 1 1\n0 0 1 1\n0 0 0 1\n");
  }

  auto m = put("m.txt", "2 3\nS#.\n.#.\n..F\n");
  auto out = (scratch() / "marked.txt").string();
  auto s = cli({"maze", "--dim", "2", "--in", m, "--mark", "-o", out});
  REQUIRE(s.code == 0);
  CHECK(value_of(s.out, "distance") == "4");
  CHECK(slurp(out) == "2 3\nS#.\n*#.\n**F\n");
  auto w = cli({"maze", "--in", m, "--algo", "wave"});
  CHECK(value_of(w.out, "distance") == "4");
}

TEST_CASE("scaling csv") {
  auto r = cli({"scaling", "--algo", "systolic2d", "--sizes", "8,16,32", "--seeds", "2", "--fit"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind(std::string(kScalingHeader) + "\n", 0) == 0);
  auto rows = parse_scaling_csv(r.out);
  CHECK(rows.size() == 6);
  CHECK(emit_scaling_csv(rows) == r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].n <= rows[i].n);
  CHECK(r.err.find("slope=") != std::string::npos);

  const auto csv = put("rows.csv", r.out);
  auto f = cli({"scaling", "--in", csv});
  CHECK(value_of(f.out, "slope").substr(0, 3) == "1.0");

  auto skipped = cli({"scaling", "--algo", "alg-a", "--sizes", "8,16", "--alpha", "2.5"});
  CHECK(skipped.code == 1);
  CHECK(skipped.err.find("skipping n=8") != std::string::npos);
  CHECK_THROWS_AS(parse_scaling_csv("algo,n\n"), std::invalid_argument);
}

TEST_CASE("exponent fit") {
  auto rows = [](std::vector<std::pair<int, std::uint64_t>> pts) {
    std::vector<ScalingRow> out;
    for (auto [n, t] : pts) out.push_back({"x", n, 2, t, t, t, 1, 1});
    return out;
  };
  CHECK(fit_exponent(rows({{8, 80}, {16, 160}, {32, 320}})).slope == doctest::Approx(1.0));
  CHECK(fit_exponent(rows({{16, 100}, {256, 800}})).slope == doctest::Approx(0.75));
  CHECK(fit_exponent(rows({{16, 7}, {64, 7}})).slope == doctest::Approx(0.0));
  CHECK_THROWS_AS(fit_exponent(rows({{16, 7}, {16, 9}})), std::invalid_argument);
}

TEST_CASE("formats round trip") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto& sr = testing::kAllSemirings[seed % 4];
    auto m = testing::random_matrix(1 + static_cast<int>(seed % 9), sr, seed);
    CHECK(parse_matrix(emit_matrix(m), sr) == m);
    auto z = random_maze(2 + static_cast<int>(seed % 2), 2 + static_cast<int>(seed % 7), 0.6, seed);
    CHECK(Maze::parse(z.to_text()) == z);
  }
}

TEST_CASE("repeatable output") {
  const std::vector<std::vector<std::string>> commands{
      {"matmul", "--algo", "alg-a", "--n", "16", "--seed", "4"},
      {"paths", "--problem", "apsp", "--n", "12", "--seed", "2"},
      {"maze", "--dim", "3", "--n", "8", "--density", "0.5", "--seed", "3", "--mark"},
      {"scaling", "--algo", "maze2d", "--sizes", "8,16", "--seeds", "2"},
  };
  for (const auto& c : commands) {
    auto first = cli(c), second = cli(c);
    CHECK(first.code == 0);
    CHECK(first.out == second.out);
    CHECK(first.err == second.err);
  }
}
