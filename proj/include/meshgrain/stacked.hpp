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

/**
 * @file stacked.hpp
 * @brief Step-by-step simulation of a 2-d mesh program on a 3-d cube.
 *
 * A 2-d mesh of edge m^3 (N = m^6 cells) is cut into s = m^2 subsquares of
 * edge s, arranged m x m. Subsquare (gx, gy) lives on layer z = gx * m + gy
 * of an s x s x s cube. Subsquares with odd gx are stored mirrored in x, odd
 * gy mirrored in y, so that any cell of a layer's 3s x 3s working region sits
 * on the same processor column as in its owner's layer, and 2-d neighbours
 * sit on the same or adjacent processors.
 *
 * Each major step: pull the 8 neighbour subsquares (ghost cells) down or up
 * the processor columns, then run s sub-steps on a shrinking region.
 *
 * Costs are measured from the traffic actually produced:
 *   sub-step   max(1, largest number of 2-d words on one 3-d link)
 *   exchange   longest z-distance + busiest z-link - 1
 */
#pragma once

#include <cstdint>

#include "meshgrain/engine.hpp"

namespace meshgrain {

struct StackedLayout {
  int edge2d = 0;  // edge of the simulated mesh
  int m = 0;
  int s = 0;       // m^2: layers, cube edge, subsquare edge
  int padded = 0;  // m^3 >= edge2d; cells beyond edge2d are absent

  /// Smallest m with m^3 >= edge. Throws std::invalid_argument on edge < 1.
  static StackedLayout for_edge(int edge);

  std::size_t cells() const { return static_cast<std::size_t>(padded) * padded; }
  int layer_of(int u, int v) const { return (u / s) * m + v / s; }
  /// Position of 2-d cell (u, v) within its processor column.
  int column_x(int u) const { return orient(u / s, u % s); }
  int column_y(int v) const { return orient(v / s, v % s); }
  int orient(int block, int local) const { return block % 2 == 0 ? local : s - 1 - local; }
};

struct StackedOptions {
  /// Words per 3-d processor; 0 means nine times the 2-d budget.
  int word_budget_3d = 0;
};

struct StackedResult {
  MeshState final_state;
  StepLedger ledger;  // 3-d steps
  StackedLayout layout;
  std::uint64_t steps_2d = 0;
  std::uint64_t major_steps = 0;
  int max_cells_per_processor = 0;
};

/// Runs `spec` (loader, program, halt) as if on a 2-d mesh with `config2d`,
/// but charges the cube. Throws NonHalting past config2d.step_cap 2-d steps
/// and BudgetViolation when a 3-d processor's cells exceed its budget.
StackedResult simulate_2d_on_3d(const ProgramSpec& spec, const MeshConfig& config2d,
                                const StackedOptions& options = {});

}  // namespace meshgrain
