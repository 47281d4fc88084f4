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

// Experiment drivers: random inputs, scaling rows, CSV and exponent fits.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "meshgrain/algebra.hpp"

namespace meshgrain {

/// Random entries suited to the semiring (bits for boolor, small weights
/// with some INF for minplus, signed levels for maxmin, full words for plusmul).
Matrix random_matrix(int n, Semiring sr, std::uint64_t seed);

/// Random weighted digraph: identity-like diagonal (0 for minplus, INF for
/// maxmin, 1 for boolor), each arc present with probability `density`.
Matrix random_graph(int n, Semiring sr, double density, std::uint64_t seed);

struct ScalingRow {
  std::string algo;
  int n = 0;
  double alpha = 0;
  std::uint64_t comm_steps = 0;
  std::uint64_t compute_steps = 0;
  std::uint64_t total_steps = 0;
  std::uint64_t processors = 0;
  std::uint64_t seed = 0;

  bool operator==(const ScalingRow&) const = default;
};

inline constexpr std::string_view kScalingHeader =
    "algo,n,alpha,comm_steps,compute_steps,total_steps,processors,seed";

/// Algorithms accepted by run_scaling.
const std::vector<std::string>& scaling_algorithms();

/// One row per (n, seed), sorted. Sizes the algorithm cannot run are skipped
/// with a note on `notes`. Throws std::invalid_argument on an unknown algo.
std::vector<ScalingRow> run_scaling(const std::string& algo, const std::vector<int>& sizes,
                                    double alpha, int seeds, std::uint64_t first_seed,
                                    std::ostream& notes);

std::string emit_scaling_csv(const std::vector<ScalingRow>& rows);
/// Throws std::invalid_argument on a wrong header or malformed row.
std::vector<ScalingRow> parse_scaling_csv(std::string_view text);

struct ExponentFit {
  double slope = 0;
  double intercept = 0;  // natural log of the constant
};

/// Least squares of log total_steps against log n. Throws
/// std::invalid_argument with fewer than two distinct n.
ExponentFit fit_exponent(const std::vector<ScalingRow>& rows);

/// Shortest decimal that reads back as the same double ("2.25", "2").
std::string format_real(double v);

}  // namespace meshgrain
