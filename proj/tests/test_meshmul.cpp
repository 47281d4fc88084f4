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

#include "doctest.h"

#include <cmath>
#include <set>

#include "meshgrain/bounds.hpp"
#include "meshgrain/meshmul.hpp"
#include "test_support.hpp"

using namespace meshgrain;

namespace {

Matrix naive(const Matrix& a, const Matrix& b) {
  const auto sr = a.semiring();
  Matrix c(a.n(), sr);
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) {
      Word acc = sr.zero();
      for (int k = 0; k < a.n(); ++k) acc = sr.plus(acc, sr.times(a.at(i, k), b.at(k, j)));
      c.at(i, j) = acc;
    }
  return c;
}

std::set<Coord> points(const Region& r) {
  std::set<Coord> out;
  for (std::size_t i = 0; i < r.count(); ++i) out.insert(r.at(i));
  return out;
}

}  // namespace

TEST_CASE("alg A plan shapes") {
  SUBCASE("n=16, alpha 9/4") {
    auto p = plan_alg_a(16, 2.25);
    CHECK(p.levels == 1);
    CHECK(p.base_m == 8);
    CHECK(p.edge == 8);
    CHECK(p.leaf_edge == 4);
    REQUIRE(p.nodes.size() == 2);
    CHECK(p.nodes[1].size() == 8);
    for (const auto& node : p.nodes[1]) {
      CHECK(node.cube.extent == Coord{4, 4, 4});
      CHECK(node.size == 8);
    }
  }
  SUBCASE("n=256, alpha 9/4") {
    auto p = plan_alg_a(256, 2.25);
    CHECK(p.edge == 64);
    CHECK(p.base_m == 64);
    CHECK(p.levels == 2);
    CHECK(p.nodes.back().size() == 64);
    CHECK(p.nodes.back().front().cube.extent == Coord{16, 16, 16});
    // about n^alpha processors
    const double target = std::pow(256.0, 2.25);
    CHECK(std::pow(p.edge, 3) / target == doctest::Approx(p.slack));
    CHECK(p.slack <= 1.0);
    CHECK(p.slack >= 0.125);
  }
  SUBCASE("n=8, alpha 2") {
    auto p = plan_alg_a(8, 2.0);
    CHECK(p.levels == 0);
    CHECK(p.edge == 4);
    CHECK(p.nodes.size() == 1);
  }
  CHECK_THROWS_AS(plan_alg_a(12, 2.25), std::invalid_argument);
  CHECK_THROWS_AS(plan_alg_a(16, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(plan_alg_a(16, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(plan_alg_a(16, 2.25, 8), PlanError);
}

TEST_CASE("alg A subproblems are disjoint and tile the mesh") {
  for (int n : {16, 64, 256}) {
    auto p = plan_alg_a(n, 2.25);
    for (const auto& level : p.nodes) {
      std::set<Coord> seen;
      std::size_t total = 0;
      for (const auto& node : level) {
        auto pts = points(node.cube);
        total += pts.size();
        seen.insert(pts.begin(), pts.end());
      }
      CHECK(seen.size() == total);
      CHECK(total == static_cast<std::size_t>(p.edge) * p.edge * p.edge);
    }
    // every batch writes disjoint targets
    for (const auto& level : p.scatter)
      for (const auto& batch : level) {
        std::set<Coord> dst;
        std::size_t total = 0;
        for (const auto& [from, to] : batch.moves) {
          auto pts = points(to);
          total += pts.size();
          dst.insert(pts.begin(), pts.end());
        }
        CHECK(dst.size() == total);
      }
  }
}

TEST_CASE("alg A products") {
  SUBCASE("identity") {
    auto a = testing::random_matrix(16, Semiring::plusmul(), 3);
    auto r = general_matmul_3d(a, Matrix::identity(16, Semiring::plusmul()), 2.25);
    CHECK(r.c == a);
    CHECK(r.routed_on_engine);
  }
  SUBCASE("zero") {
    Matrix z(16, Semiring::minplus());
    auto r = general_matmul_3d(z, testing::random_matrix(16, Semiring::minplus(), 1), 2.25);
    CHECK(r.c == Matrix(16, Semiring::minplus()));
  }
  SUBCASE("oracle, every semiring") {
    for (const auto& sr : testing::kAllSemirings)
      for (std::uint64_t seed = 1; seed <= 2; ++seed) {
        for (auto [n, alpha] : {std::pair{16, 2.25}, {8, 2.0}, {11, 2.25}, {32, 2.1}}) {
          auto a = testing::random_matrix(n, sr, seed);
          auto b = testing::random_matrix(n, sr, seed + 100);
          auto r = general_matmul_3d(a, b, alpha);
          CHECK_MESSAGE(r.c == naive(a, b), sr.name() << " n=" << n << " alpha=" << alpha);
        }
      }
  }
  SUBCASE("ledger phases") {
    auto a = testing::random_matrix(16, Semiring::plusmul(), 9);
    auto r = general_matmul_3d(a, a, 2.25);
    std::set<std::string> labels;
    std::uint64_t sum = 0;
    for (const auto& [label, steps] : r.ledger.per_phase) {
      labels.insert(label);
      sum += steps;
    }
    CHECK(labels.count("scatter"));
    CHECK(labels.count("leaf"));
    CHECK(labels.count("combine"));
    CHECK(sum == r.ledger.total_steps);
    CHECK(r.ledger.peak_words <= 32);
  }
}

TEST_CASE("alg B grids") {
  CHECK(step_grid(8, 0).count() == 64);
  CHECK(step_grid(8, 1).count() == 8);
  CHECK(step_grid(32, 0).count() == 4096);
  CHECK(step_grid(32, 1).count() == 512);
  const auto g2 = step_grid(16, 2);
  CHECK(g2.origin == Coord{3, 3, 3});
  CHECK(g2.stride == Coord{8, 8, 8});
  for (int edge : {4, 8, 16}) {
    std::vector<std::set<Coord>> sets;
    for (int i = 0; (1 << (i + 1)) <= edge; ++i) sets.push_back(points(step_grid(edge, i)));
    for (std::size_t i = 0; i < sets.size(); ++i)
      for (std::size_t j = i + 1; j < sets.size(); ++j)
        for (const auto& c : sets[i]) CHECK_FALSE(sets[j].count(c));
  }
}

TEST_CASE("alg B schedule") {
  CHECK(memory_capped_levels(7, 2) == 3);
  CHECK_THROWS_AS(plan_alg_b(64), ScheduleError);
  CHECK_THROWS_AS(plan_alg_b(64, 2, 2), std::invalid_argument);

  // a = 2^2.5, b = 2: delta = 1/6
  auto h = plan_alg_b(std::uint64_t{1} << 36, std::pow(2.0, 2.5), 2);
  CHECK(h.delta == doctest::Approx(1.0 / 6));
  CHECK(h.steps == 1);
  CHECK(h.levels_needed == 36);
  CHECK(h.levels_per_step == 4);

  auto s = plan_alg_b(64, 7, 2, 1);
  CHECK(s.steps == 1);
  CHECK(s.levels_needed == 6);
  CHECK(s.levels_per_step == 3);
  CHECK(s.memory_factor == doctest::Approx(42.875));
  CHECK(s.grids.size() == 2);
  CHECK(s.grids[0].count() == 4096);
  CHECK(s.grids[1].count() == 512);
  CHECK(s.mesh_edge == 32);
}

TEST_CASE("alg B products") {
  for (int n : {8, 16, 32}) {
    auto sched = plan_alg_b(n, 7, 2, 1);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto a = testing::random_matrix(n, Semiring::plusmul(), seed);
      auto b = testing::random_matrix(n, Semiring::plusmul(), seed + 50);
      auto r = ring_matmul_3d(a, b, sched);
      CHECK(r.c == naive(a, b));
      CHECK(r.top_level_subproblems == 7);
    }
  }
  SUBCASE("odd size is padded") {
    auto sched = plan_alg_b(16, 7, 2, 1);
    auto a = testing::random_matrix(13, Semiring::plusmul(), 4);
    CHECK(ring_matmul_3d(a, a, sched).c == naive(a, a));
  }
  SUBCASE("zero") {
    auto sched = plan_alg_b(8, 7, 2, 1);
    Matrix z(8, Semiring::plusmul());
    CHECK(ring_matmul_3d(z, testing::random_matrix(8, Semiring::plusmul(), 2), sched).c == z);
  }
  SUBCASE("only rings") {
    auto sched = plan_alg_b(8, 7, 2, 1);
    Matrix m(8, Semiring::minplus());
    CHECK_THROWS_AS(ring_matmul_3d(m, m, sched), std::invalid_argument);
  }
  SUBCASE("overlapping grids") {
    auto sched = plan_alg_b(16, 7, 2, 1);
    sched.grids[1] = sched.grids[0];
    auto a = testing::random_matrix(16, Semiring::plusmul(), 1);
    CHECK_THROWS_AS(ring_matmul_3d(a, a, sched), StructureViolation);
  }
  SUBCASE("memory") {
    auto sched = plan_alg_b(16, 7, 2, 1);
    sched.memory_factor = 0.1;
    auto a = testing::random_matrix(16, Semiring::plusmul(), 1);
    CHECK_THROWS_AS(ring_matmul_3d(a, a, sched), BudgetViolation);
  }
}

TEST_CASE("rationals") {
  CHECK(Rational(6, 8) == Rational(3, 4));
  CHECK(Rational(3, -4) == Rational(-3, 4));
  CHECK(Rational::parse("9/4") == Rational(9, 4));
  CHECK(Rational::parse("2.25") == Rational(9, 4));
  CHECK(Rational::parse("2") == Rational(2));
  CHECK((Rational(1, 2) + Rational(1, 3)).str() == "5/6");
  CHECK(Rational(2, 3) < Rational(3, 4));
  CHECK_THROWS_AS(Rational::parse("x"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
}

TEST_CASE("bounds") {
  SUBCASE("2-d, one entry per processor: both linear") {
    auto r = bounds(1024, 2);
    CHECK(r.mesh_size == 1024 * 1024);
    CHECK(r.diameter_exponent.exact);
    CHECK(r.diameter_exponent.q == Rational(1));
    CHECK(r.speedup_exponent.q == Rational(1));
    CHECK(r.binding == Binding::Tie);
    CHECK(r.diameter_time == 2 * 1023);
    CHECK(r.speedup_time == 1024);
  }
  SUBCASE("3-d general optimum") {
    auto r = bounds(1024, 3);
    CHECK(r.optimal_alpha == Rational(9, 4));
    CHECK(r.optimal_time_exponent == Rational(3, 4));
    // optimum balances 3 - a = a / 3
    CHECK(Rational(3) - r.optimal_alpha == r.optimal_alpha / Rational(3));
    CHECK(r.ring_exponent == Rational(2, 3));
    CHECK(r.size_exponent.q == Rational(2));
    CHECK(r.binding == Binding::Speedup);
  }
  SUBCASE("crossover at 9/4") {
    CHECK(bounds(256, 3, {}, Rational(9, 4)).binding == Binding::Tie);
    CHECK(bounds(256, 3, {}, Rational(11, 5)).binding == Binding::Speedup);
    CHECK(bounds(256, 3, {}, Rational(23, 10)).binding == Binding::Diameter);
    auto r = bounds(16, 3, {}, Rational(9, 4));
    CHECK(r.mesh_size == 512);
    CHECK(r.diameter_time == 3 * 7);
    CHECK(r.speedup_time == 8);
  }
  SUBCASE("non powers of two") {
    auto r = bounds(1000, 3, std::uint64_t{1000000});
    CHECK_FALSE(r.size_exponent.exact);
    CHECK(r.size_exponent.approx == doctest::Approx(2.0));
    CHECK(r.diameter_time == 3 * 99);
    CHECK(r.speedup_time == 1000);
  }
  CHECK_THROWS_AS(bounds(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(bounds(8, 4), std::invalid_argument);
  CHECK_THROWS_AS(bounds(8, 3, std::uint64_t{64}, Rational(2)), std::invalid_argument);
}
