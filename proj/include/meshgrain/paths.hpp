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

// Graph problems by repeated squaring on the mesh multipliers.
#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "meshgrain/algebra.hpp"
#include "meshgrain/engine.hpp"

namespace meshgrain {

/// A path was requested between vertices that are not connected.
class PathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ClosureMode { Ring, Boolean };

struct PathsOptions {
  double alpha = 2.25;  // mesh of size n^alpha for the semiring multiplier
  int word_budget = 32;
  /// Called after every squaring with the round number (1-based).
  std::function<void(int, const Matrix&)> on_round;
};

/// Number of squarings used for n vertices: ceil(lg n).
int squaring_rounds(int n);

struct ClosureResult {
  Matrix closure;  // boolor, reflexive-transitive
  StepLedger ledger;
  int squarings = 0;
};

/// Ring mode squares under plusmul with Strassen on the mesh, clamping every
/// entry to {0, 1} after each round; boolean mode squares under boolor with
/// the general multiplier. Throws std::invalid_argument on entries outside {0, 1}.
ClosureResult transitive_closure(const Matrix& adj, ClosureMode mode, const PathsOptions& options = {});

/// Improving midpoints recorded during squaring.
class WitnessTable {
 public:
  static constexpr int kNone = -1;

  WitnessTable() = default;
  explicit WitnessTable(int n);

  int n() const { return n_; }
  /// Midpoint of the final value, kNone for a direct edge or unreachable pair.
  int mid(int i, int j) const;
  /// Squaring round that set the final value: 0 for the input, -1 when unreachable.
  int round(int i, int j) const;

  void record(int i, int j, int mid, int round);
  void mark_unreachable(int i, int j);
  /// Midpoint in effect after `round`.
  int mid_as_of(int i, int j, int round) const;
  int round_as_of(int i, int j, int round) const;

 private:
  struct Entry {
    int round;
    int mid;
  };
  std::size_t at(int i, int j) const;
  int n_ = 0;
  std::vector<std::vector<Entry>> history_;  // per pair, rounds increasing
  std::vector<bool> unreachable_;
};

struct ApspResult {
  Matrix dist;
  WitnessTable witnesses;
  StepLedger ledger;
  int squarings = 0;
};

/// Minplus all-pairs shortest paths. The diagonal must be 0 (a positive
/// diagonal is std::invalid_argument); a negative cycle is std::domain_error.
ApspResult apsp(const Matrix& w, const PathsOptions& options = {});

struct BottleneckResult {
  Matrix widths;
  StepLedger ledger;
  int squarings = 0;
};

/// Maxmin all-pairs widest paths; the diagonal is taken as +INF.
BottleneckResult bottleneck_apsp(const Matrix& w, const PathsOptions& options = {});

/// Vertex sequence i .. j. Throws PathError when j is not reachable from i.
std::vector<int> reconstruct_path(const WitnessTable& wt, int i, int j);

}  // namespace meshgrain
