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
 * @file meshmul.hpp
 * @brief Matrix multiplication on a 3-d mesh.
 *
 * Algorithm A (general semirings, mesh of size about n^alpha):
 *   the problem is split into octant subproblems L times, each leaf cube
 *   multiplies its blocks by the stacked simulation of the systolic program,
 *   and partial products are summed back up along the k axis.
 *
 * Data layout: a subproblem of block size b living in a cube of edge c keeps
 * A and B (one entry of each per processor) in the bottom slab of the cube,
 * quadrant (qi, qj) under the (x, y) half (qi, qj). Leaves use the stacked
 * layout of their 2-d systolic mesh. Octant (i, k, j) takes x-half i,
 * y-half j, z-half k, so every scatter is a rigid block shift and combining
 * is one shift down z.
 *
 * Algorithm B (rings): Strassen recursion over nested step grids, orchestrated
 * at block granularity with charged communication.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meshgrain/algebra.hpp"
#include "meshgrain/engine.hpp"

namespace meshgrain {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Algorithm A

struct AlgANode {
  int level = 0;
  Region cube;          // cube owned by this subproblem
  int row0 = 0;         // C rows / A rows
  int col0 = 0;         // C cols / B cols
  int inner0 = 0;       // A cols / B rows
  int size = 0;         // block dimension
  int parent = -1;      // index in the previous level
  int octant = 0;       // i*4 + k*2 + j within the parent
};

/// One group of rigid shifts performed together.
struct ShiftBatch {
  std::string label;              // e.g. "A(0,1,-1)" in half-edges
  char matrix = 'A';              // A, B, or C (combine)
  std::vector<std::pair<Region, Region>> moves;
  std::vector<int> parents;       // node index (level of the batch) per move
  std::vector<int> octants;       // child octant per move (C: the receiving child)
  int distance = 0;
};

struct AlgAPlan {
  int n = 0;          // padded problem size (power of 2)
  double alpha = 0;
  int edge = 0;
  int levels = 0;
  int base_m = 0;
  int leaf_edge = 0;
  int slab_depth = 0;
  int cells_per_processor = 0;  // stacked cells on a leaf processor
  double slack = 1;             // edge^3 / n^alpha
  std::vector<std::vector<AlgANode>> nodes;          // nodes[level]
  std::vector<std::vector<ShiftBatch>> scatter;      // scatter[level] moves level -> level+1
  std::vector<ShiftBatch> combine;                   // combine[level]

  MeshConfig mesh(int word_budget = 32) const;
  /// Processor (local to the level-`level` cube) holding entry (i, j) of that
  /// level's block.
  Coord slot(int level, int i, int j) const;
};

/// Throws std::invalid_argument (n not a power of 2, alpha outside [2, 9/4])
/// or PlanError (leaf does not fit the word budget, overlapping siblings).
AlgAPlan plan_alg_a(int n, double alpha, int word_budget = 32);

struct AlgAOptions {
  int word_budget = 32;
  /// Run every shift on the engine when the mesh edge is at most this.
  int engine_route_edge = 16;
};

struct AlgAResult {
  Matrix c;
  StepLedger ledger;  // phases: scatter, leaf, combine
  AlgAPlan plan;
  bool routed_on_engine = false;
};

/// C = A x B by Algorithm A. Matrices of any size are padded with the
/// semiring zero up to a power of two.
AlgAResult general_matmul_3d(const Matrix& a, const Matrix& b, double alpha,
                             const AlgAOptions& options = {});

/// 3-d cost of the stacked simulation of the systolic program for m x m
/// blocks (data independent, cached).
StepLedger stacked_systolic_cost(int m, int word_budget_3d = 32);

// ---------------------------------------------------------------------------
// Algorithm B

struct AlgBSchedule {
  std::uint64_t n = 0;
  double a = 7, b = 2;
  double alpha_serial = 0;
  double delta = 0;
  int steps = 0;            // s
  int levels_needed = 0;    // ceil(log_b n / s), before the memory cap
  int levels_per_step = 0;  // r, after the memory cap
  std::uint64_t leaf_size = 1;  // block dimension of leaf products
  double memory_factor = 1;     // (a/b)^r
  int mesh_edge = 0;
  std::vector<Region> grids;    // grids[i] for i = 0..s

  MeshConfig mesh(int word_budget = 32) const;
};

/// Step-i grid of a mesh of edge `edge`: coordinates congruent to 2^i - 1
/// modulo 2^(i+1) on every axis.
Region step_grid(int edge, int step);

/// Largest r with (a/b)^r <= 64.
int memory_capped_levels(double a, double b);

/// Throws std::invalid_argument on a <= b or b <= 1, ScheduleError when
/// delta <= 0 and no forced_s is given or when a grid would be empty.
AlgBSchedule plan_alg_b(std::uint64_t n, double a = 7, double b = 2,
                        std::optional<int> forced_s = {});

struct AlgBStep {
  std::size_t workers = 0;
  std::uint64_t subproblems = 0;   // subproblems arriving at this step
  std::uint64_t block = 0;         // their block dimension
  int peak_words = 0;              // per worker, all simulated processors
  std::uint64_t charged = 0;       // steps charged to this step
};

struct AlgBResult {
  Matrix c;
  StepLedger ledger;
  std::vector<AlgBStep> steps;     // one per grid
  std::uint64_t top_level_subproblems = 0;
  int peak_virtual_words = 0;
};

/// C = A x B over the wrapping ring by Strassen recursion on the schedule's
/// grids (a = 7, b = 2 only; inputs padded to schedule.n). StructureViolation on overlapping grids, BudgetViolation when a
/// worker needs more than memory_factor x word_budget words.
AlgBResult ring_matmul_3d(const Matrix& a, const Matrix& b, const AlgBSchedule& schedule,
                          int word_budget = 32);

}  // namespace meshgrain
