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

#include <set>

#include "doctest.h"
#include "meshgrain/programs.hpp"
#include "meshgrain/stacked.hpp"
#include "meshgrain/systolic.hpp"
#include "test_support.hpp"

using namespace meshgrain;

namespace {

struct Direct {
  MeshState mesh;
  StepLedger ledger;
};

Direct run_direct(const ProgramSpec& spec, const MeshConfig& config) {
  MeshState mesh(config);
  spec.load(mesh);
  auto ledger = run_program(mesh, spec.program, spec.halt);
  return {std::move(mesh), std::move(ledger)};
}

}  // namespace

TEST_CASE("64 cells: four 4x4 subsquares on four layers") {
  const auto lay = StackedLayout::for_edge(8);
  CHECK(lay.m == 2);
  CHECK(lay.s == 4);
  CHECK(lay.padded == 8);
  std::set<int> layers;
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) layers.insert(lay.layer_of(u, v));
  CHECK(layers == std::set<int>{0, 1, 2, 3});
  CHECK(lay.layer_of(0, 4) == 1);
  CHECK(lay.layer_of(4, 0) == 2);
  CHECK(StackedLayout::for_edge(16).padded == 27);
  CHECK(StackedLayout::for_edge(64).s == 16);
  CHECK_THROWS_AS(StackedLayout::for_edge(0), std::invalid_argument);
}

TEST_CASE("2-d neighbours land on the same or adjacent processor columns") {
  for (int e : {8, 27, 64}) {
    const auto lay = StackedLayout::for_edge(e);
    for (int u = 0; u + 1 < e; ++u) CHECK(std::abs(lay.column_x(u + 1) - lay.column_x(u)) <= 1);
    for (int v = 0; v + 1 < e; ++v) CHECK(std::abs(lay.column_y(v + 1) - lay.column_y(v)) <= 1);
  }
}

TEST_CASE("simulated runs end in the direct final state") {
  const std::vector<std::pair<ProgramSpec, int>> cases = {
      {programs::broadcast(77), 8},  {programs::broadcast(5), 10},
      {programs::diffusion(9), 8},   {programs::diffusion(30), 16},
      {programs::diffusion(3), 1},   {programs::diffusion(12), 27},
  };
  for (const auto& [spec, edge] : cases) {
    CAPTURE(spec.name);
    CAPTURE(edge);
    const MeshConfig config{.dim = 2, .edge = edge};
    const auto direct = run_direct(spec, config);
    const auto sim = simulate_2d_on_3d(spec, config);
    CHECK(sim.final_state.same_state(direct.mesh));
    CHECK(sim.steps_2d == direct.ledger.total_steps);
    CHECK(sim.max_cells_per_processor <= 9);
    if (edge == 27) CHECK(sim.max_cells_per_processor == 9);
  }
}

TEST_CASE("systolic n=16 under simulation") {
  const auto a = testing::random_matrix(16, Semiring::minplus(), 3);
  const auto b = testing::random_matrix(16, Semiring::minplus(), 4);
  const auto spec = systolic_program(a, b);
  const MeshConfig config{.dim = 2, .edge = 16};
  const auto direct = run_direct(spec, config);
  const auto sim = simulate_2d_on_3d(spec, config);
  CHECK(sim.final_state.same_state(direct.mesh));
  CHECK(systolic_product(sim.final_state, 16, a.semiring()) == serial_matmul(a, b));
  CHECK(sim.steps_2d == direct.ledger.total_steps);
  CHECK(sim.steps_2d == static_cast<std::uint64_t>(SystolicSchedule{16}.mesh_steps()));
  CHECK(sim.max_cells_per_processor <= 9);
  CHECK(sim.ledger.total_steps >= sim.steps_2d);
}

TEST_CASE("simulation enforces the 3-d budget and the step cap") {
  const MeshConfig config{.dim = 2, .edge = 8};
  CHECK_THROWS_AS(simulate_2d_on_3d(programs::diffusion(2), config, {.word_budget_3d = 6}),
                  BudgetViolation);
  MeshConfig capped = config;
  capped.step_cap = 5;
  CHECK_THROWS_AS(simulate_2d_on_3d(programs::hoard(0), capped), NonHalting);
  CHECK_THROWS_AS(simulate_2d_on_3d(programs::diffusion(2), MeshConfig{.dim = 3, .edge = 4}),
                  std::invalid_argument);
}

TEST_CASE("3-d cost per simulated step is a constant") {
  auto ratio = [](int edge) {
    const auto spec = programs::diffusion(3 * edge);
    const auto sim = simulate_2d_on_3d(spec, {.dim = 2, .edge = edge});
    return static_cast<double>(sim.ledger.total_steps) / static_cast<double>(sim.steps_2d);
  };
  const double small = ratio(8), large = ratio(64);
  MESSAGE("3-d/2-d step ratio: N=64 " << small << ", N=4096 " << large);
  CHECK(std::abs(small - large) / std::max(small, large) <= 0.25);
}
