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
 * @file systolic.hpp
 * @brief Torus systolic multiplication folded onto a 2-d mesh.
 *
 * The n x n torus is embedded in the mesh by interleaving each ring:
 * ring position x lives at physical index fold(x) = 2x for the first half and
 * 2(n-1-x)+1 for the second, so every torus link spans at most two mesh hops.
 *
 * Physical processor (p, q) accumulates C(p, q). In ring coordinates it is
 * node (x, y) = (unfold(p), unfold(q)), and the inner index k is visited in
 * ring order kappa = -unfold(k) mod n. With that labeling the pair
 * (A(., k), B(k, .)) reaches node (x, y) at time (x + y + kappa) mod n after
 * the usual skew: ring row x of A rotated left by x, ring column y of B
 * rotated up by y.
 *
 * Timing: a logical torus step takes two mesh steps. Words crossing two hops
 * leave on the odd mesh step and are relayed on the even one; words crossing
 * one hop leave on the even step. Arrivals on odd steps are therefore always
 * for the receiver, arrivals on even steps are always relays.
 */
#pragma once

#include <functional>
#include <vector>

#include "meshgrain/algebra.hpp"
#include "meshgrain/engine.hpp"

namespace meshgrain {

struct SystolicSchedule {
  int n = 0;

  static int fold(int ring, int n);
  static int unfold(int physical, int n);

  /// Ring-order index of inner dimension `k`.
  int inner_position(int k) const;
  /// Time at which ring node (x, y) consumes the pair with inner position kappa.
  int arrival_time(int x, int y, int kappa) const { return (x + y + kappa) % n; }
  /// Logical steps spent skewing (every row/column takes the shorter way round).
  int skew_steps() const { return n / 2; }
  /// Mesh steps of the whole program.
  int mesh_steps() const { return n == 0 ? 0 : 2 * skew_steps() + 2 * n - 1; }
};

/// One multiply-accumulate, reported in ring coordinates.
struct MacEvent {
  int x, y;   // ring node
  int time;   // 0..n-1 within the multiply phase
  Word a, b;
};

struct SystolicOptions {
  int word_budget = 32;
  std::function<void(const MacEvent&)> trace;
};

struct SystolicResult {
  Matrix c;
  StepLedger ledger;
};

/// The mesh program (with loader and halt rule) for C = A x B on an n x n mesh.
ProgramSpec systolic_program(const Matrix& a, const Matrix& b, const SystolicOptions& options = {});

/// Reads C(p, q) from processor (p, q) after a run.
Matrix systolic_product(const MeshState& mesh, int n, Semiring sr);

/// Runs the program on an n x n 2-d mesh. Throws std::invalid_argument on
/// n == 0 or mismatched inputs.
SystolicResult systolic_matmul_2d(const Matrix& a, const Matrix& b,
                                  const SystolicOptions& options = {});

}  // namespace meshgrain
