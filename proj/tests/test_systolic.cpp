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

#include <map>
#include <set>

#include "doctest.h"
#include "meshgrain/systolic.hpp"
#include "test_support.hpp"

using namespace meshgrain;

TEST_CASE("fold is a bijection with ring neighbours at most two hops apart") {
  for (int n = 1; n <= 33; ++n) {
    std::set<int> seen;
    for (int r = 0; r < n; ++r) {
      const int p = SystolicSchedule::fold(r, n);
      CHECK(SystolicSchedule::unfold(p, n) == r);
      seen.insert(p);
      const int next = SystolicSchedule::fold((r + 1) % n, n);
      CHECK(std::abs(next - p) <= 2);
    }
    CHECK(static_cast<int>(seen.size()) == n);
  }
}

TEST_CASE("pairs arrive at ring node (1,2) of a 4-torus at times 3,0,1,2") {
  const int n = 4;
  SystolicSchedule sched{n};
  Matrix a(n, Semiring::plusmul()), b(n, Semiring::plusmul());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a.at(i, j) = 100 * i + j;   // row, inner
      b.at(i, j) = 100 * j + i;   // column, inner
    }
  std::map<int, int> time_of_kappa;
  SystolicOptions opt;
  opt.trace = [&](const MacEvent& e) {
    if (e.x != 1 || e.y != 2) return;
    const int k = static_cast<int>(e.a % 100);
    CHECK(e.a / 100 == SystolicSchedule::fold(1, n));
    CHECK(e.b / 100 == SystolicSchedule::fold(2, n));
    CHECK(e.b % 100 == k);
    time_of_kappa[sched.inner_position(k)] = e.time;
  };
  systolic_matmul_2d(a, b, opt);
  REQUIRE(time_of_kappa.size() == 4);
  std::vector<int> times;
  for (auto [kappa, t] : time_of_kappa) times.push_back(t);
  CHECK(times == std::vector<int>{3, 0, 1, 2});
  for (int kappa = 0; kappa < n; ++kappa) CHECK(sched.arrival_time(1, 2, kappa) == times[kappa]);
}

TEST_CASE("every node sees each inner index exactly once per slot") {
  for (int n : {1, 2, 3, 5, 8}) {
    Matrix a(n, Semiring::plusmul()), b(n, Semiring::plusmul());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a.at(i, j) = 100 * i + j;
        b.at(i, j) = 100 * j + i;
      }
    std::map<std::pair<int, int>, std::set<int>> ks;
    std::map<std::pair<int, int>, std::set<int>> slots;
    SystolicOptions opt;
    opt.trace = [&](const MacEvent& e) {
      CHECK(e.a % 100 == e.b % 100);
      ks[{e.x, e.y}].insert(static_cast<int>(e.a % 100));
      slots[{e.x, e.y}].insert(e.time);
    };
    systolic_matmul_2d(a, b, opt);
    CHECK(static_cast<int>(ks.size()) == n * n);
    for (auto& [node, set] : ks) CHECK(static_cast<int>(set.size()) == n);
    for (auto& [node, set] : slots) CHECK(static_cast<int>(set.size()) == n);
  }
}

TEST_CASE("identity times A is A") {
  for (auto sr : testing::kAllSemirings) {
    const auto a = testing::random_matrix(6, sr, 11);
    CHECK(systolic_matmul_2d(Matrix::identity(6, sr), a).c == a);
    CHECK(systolic_matmul_2d(a, Matrix::identity(6, sr)).c == a);
  }
}

TEST_CASE("systolic equals the serial product") {
  for (auto sr : testing::kAllSemirings)
    for (int n : {1, 2, 3, 4, 7, 8, 16, 32})
      for (unsigned seed = 0; seed < 5; ++seed) {
        const auto a = testing::random_matrix(n, sr, seed);
        const auto b = testing::random_matrix(n, sr, seed + 100);
        CAPTURE(n);
        CAPTURE(seed);
        CHECK(systolic_matmul_2d(a, b).c == serial_matmul(a, b));
      }
}

TEST_CASE("step count is linear and matches the schedule") {
  std::map<int, std::uint64_t> total;
  for (int n : {2, 4, 8, 16, 32, 64}) {
    const auto a = testing::random_matrix(n, Semiring::plusmul(), 1);
    const auto r = systolic_matmul_2d(a, a);
    total[n] = r.ledger.total_steps;
    CHECK(r.ledger.total_steps == static_cast<std::uint64_t>(SystolicSchedule{n}.mesh_steps()));
    CHECK(r.ledger.total_steps <= static_cast<std::uint64_t>(8 * n));
    CHECK(r.ledger.peak_words <= 5);
  }
  for (int n : {8, 16, 32}) {
    const double ratio = static_cast<double>(total[2 * n]) / static_cast<double>(total[n]);
    CHECK(ratio >= 1.8);
    CHECK(ratio <= 2.2);
  }
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(systolic_matmul_2d(Matrix(0, Semiring::plusmul()), Matrix(0, Semiring::plusmul())),
                  std::invalid_argument);
  CHECK_THROWS_AS(systolic_matmul_2d(Matrix(2, Semiring::plusmul()), Matrix(3, Semiring::plusmul())),
                  std::invalid_argument);
  const auto spec = systolic_program(Matrix(4, Semiring::plusmul()), Matrix(4, Semiring::plusmul()));
  MeshState small({.dim = 2, .edge = 3});
  CHECK_THROWS_AS(spec.load(small), std::invalid_argument);
}
