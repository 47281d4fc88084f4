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

#include <deque>
#include <functional>
#include <numeric>

#include "doctest.h"
#include "meshgrain/maze.hpp"

using namespace meshgrain;

namespace {

// Plain BFS distance, independent of wave_bfs.
std::optional<std::uint64_t> bfs_distance(const Maze& m) {
  std::vector<int> dist(m.cells(), -1);
  std::deque<Coord> q{m.start()};
  dist[m.index(m.start())] = 0;
  while (!q.empty()) {
    const Coord c = q.front();
    q.pop_front();
    for (int a = 0; a < m.dim(); ++a)
      for (int s : {-1, 1}) {
        Coord nb = c;
        nb[a] += s;
        if (!m.in_bounds(nb) || !m.white(nb) || dist[m.index(nb)] >= 0) continue;
        dist[m.index(nb)] = dist[m.index(c)] + 1;
        q.push_back(nb);
      }
  }
  const int d = dist[m.index(m.finish())];
  if (d < 0) return std::nullopt;
  return static_cast<std::uint64_t>(d);
}

bool connected(const Maze& m) {
  std::vector<std::size_t> parent(m.cells());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (std::size_t i = 0; i < m.cells(); ++i) {
    if (!m.white(i)) continue;
    const Coord c = m.coord(i);
    for (int a = 0; a < m.dim(); ++a) {
      Coord nb = c;
      nb[a] += 1;
      if (m.in_bounds(nb) && m.white(nb)) parent[find(i)] = find(m.index(nb));
    }
  }
  return find(m.index(m.start())) == find(m.index(m.finish()));
}

void check_against_oracle(const Maze& m, const PathResult& r) {
  const auto expect = bfs_distance(m);
  CHECK(r.reachable == expect.has_value());
  CHECK(r.reachable == connected(m));
  CHECK(r.distance == expect);
  if (r.reachable) {
    CHECK_NOTHROW(validate_path(m, r.path));
    CHECK(r.path.size() == *r.distance + 1);
  } else {
    CHECK(r.path.empty());
  }
}

Maze open_maze(int dim, int n) {
  Maze m(dim, n);
  for (std::size_t i = 0; i < m.cells(); ++i) m.set_white(m.coord(i), true);
  m.set_start({0, 0, 0});
  m.set_finish({n - 1, n - 1, dim == 3 ? n - 1 : 0});
  return m;
}

}  // namespace

TEST_CASE("maze text round trip") {
  const std::string text = "2 3\nS#.\n.#.\n..F\n";
  auto m = Maze::parse(text);
  CHECK(m.dim() == 2);
  CHECK(m.start() == Coord{0, 0, 0});
  CHECK(m.finish() == Coord{2, 2, 0});
  CHECK_FALSE(m.white(Coord{1, 0, 0}));
  CHECK(m.to_text() == text);

  const std::string cube = "3 2\nS.\n#.\n\n..\n.F\n";
  auto c = Maze::parse(cube);
  CHECK(c.finish() == Coord{1, 1, 1});
  CHECK(c.to_text() == cube);

  CHECK_THROWS_AS(Maze::parse("2 3\nS#.\n.#.\n"), std::invalid_argument);
  CHECK_THROWS_AS(Maze::parse("2 2\nS.\n.."), std::invalid_argument);
  CHECK_THROWS_AS(Maze::parse("2 2\nSx\n.F"), std::invalid_argument);
  CHECK_THROWS_AS(Maze::parse("2 2\nS..\n.F"), std::invalid_argument);
}

TEST_CASE("wave propagation") {
  auto open = open_maze(2, 3);
  auto r = wave_bfs(open);
  CHECK(r.distance == 4u);
  CHECK(r.charged_time == 4);

  auto m = Maze::parse("2 3\nS#.\n.#.\n..F\n");
  r = wave_bfs(m);
  CHECK(r.distance == 4u);
  CHECK(r.path == std::vector<Coord>{{0, 0, 0}, {0, 1, 0}, {0, 2, 0}, {1, 2, 0}, {2, 2, 0}});
  CHECK(m.to_text(r.path) == "2 3\nS#.\n*#.\n**F\n");

  auto wall = Maze::parse("2 3\nS#.\n.#.\n.#F\n");
  r = wave_bfs(wall);
  CHECK_FALSE(r.reachable);
  CHECK_FALSE(r.distance.has_value());
  CHECK(r.path.empty());

  CHECK(wave_bfs(open_maze(3, 4)).distance == 9u);
}

TEST_CASE("random mazes") {
  auto full = random_maze(2, 8, 1.0, 3);
  for (std::size_t i = 0; i < full.cells(); ++i) CHECK(full.white(i));
  CHECK(random_maze(3, 8, 0.6, 11) == random_maze(3, 8, 0.6, 11));
  CHECK_FALSE(random_maze(3, 8, 0.6, 11) == random_maze(3, 8, 0.6, 12));
  int yes = 0, no = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) (connected(random_maze(2, 16, 0.6, seed)) ? yes : no)++;
  CHECK(yes > 0);
  CHECK(no > 0);
  CHECK_THROWS_AS(random_maze(2, 8, 0.0, 1), std::invalid_argument);
}

TEST_CASE("2-d solver") {
  auto open = open_maze(2, 8);
  auto r = solve_maze_2d(open);
  CHECK(r.distance == 14u);
  CHECK(r.path.size() == 15);
  CHECK_NOTHROW(validate_path(open, r.path));

  for (int n : {4, 8, 16, 32})
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      auto m = random_maze(2, n, 0.6, seed);
      auto r2 = solve_maze_2d(m);
      check_against_oracle(m, r2);
      CHECK(wave_bfs(m).distance == r2.distance);
      for (const auto& merge : r2.merges)
        CHECK(static_cast<double>(merge.vertices * merge.vertices) <= 32 * merge.processors);
    }
  CHECK_THROWS_AS(solve_maze_2d(random_maze(2, 12, 0.6, 1)), std::invalid_argument);
  CHECK_THROWS_AS(solve_maze_2d(open, 2.5), std::invalid_argument);
}

TEST_CASE("2-d charge is led by the top merge") {
  for (int n : {16, 32})
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto r = solve_maze_2d(random_maze(2, n, 0.6, seed));
      std::uint64_t sum = 0;
      for (auto c : r.level_charges) sum += c;
      CHECK(sum == r.charged_time);
      const auto top = r.level_charges[r.level_charges.size() - 2];
      CHECK(4 * top >= r.charged_time);
    }
}

TEST_CASE("3-d solver") {
  auto open = open_maze(3, 4);
  CHECK(solve_maze_3d(open).distance == 9u);
  for (int n : {4, 8})
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      auto m = random_maze(3, n, 0.5, seed);
      check_against_oracle(m, solve_maze_3d(m));
    }
  CHECK_THROWS_AS(solve_maze_3d(open, 3.5), SizeError);
  // every face cell white: the top matrix outgrows an n^4 mesh
  CHECK_THROWS_AS(solve_maze_3d(open_maze(3, 16), 4), SizeError);
  CHECK(solve_maze_3d(open_maze(3, 16), 4.5).distance == 45u);
  CHECK_THROWS_AS(solve_maze_3d(open, 5), std::invalid_argument);
  CHECK_THROWS_AS(solve_maze_3d(random_maze(2, 8, 0.6, 1)), std::invalid_argument);
}

TEST_CASE("3-d charge falls as the mesh grows") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto m = random_maze(3, 16, 0.5, seed);
    auto low = solve_maze_3d(m, 4);
    auto high = solve_maze_3d(m, 4.5);
    CHECK(low.path == high.path);
    CHECK(high.charged_time < low.charged_time);
    CHECK(high.mesh_size_used > low.mesh_size_used);
    check_against_oracle(m, high);
  }
}

TEST_CASE("charged squaring cost") {
  CHECK(charged_apsp_steps(1, 100) == 1);
  // 16 vertices on 16^(9/4) processors: 4 squarings of max(3 * 8, 8)
  CHECK(charged_apsp_steps(16, 512) == 4 * 24);
  // work bound dominates on a small mesh
  CHECK(charged_apsp_steps(64, 4096) == 6 * 64);
}
