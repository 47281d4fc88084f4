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
 * @file maze.hpp
 * @brief 2-d and 3-d mazes: wave propagation and recursive boundary APSP.
 *
 * The recursive solvers split a region into 2^dim children. A region's
 * vertices are its white cells facing maze cells outside the region (plus
 * start and finish). A merge joins the children's vertices by their inner
 * distances and by unit edges across child faces, keeps the parent's
 * vertices and records, for each kept target, the first step from every
 * joined vertex. The path is marked by descending those records.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "meshgrain/engine.hpp"

namespace meshgrain {

/// The configured mesh cannot hold a boundary distance matrix.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Maze {
 public:
  Maze() = default;
  /// All black; start and finish must be set before use.
  Maze(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t cells() const { return white_.size(); }

  bool in_bounds(const Coord& c) const;
  std::size_t index(const Coord& c) const;
  Coord coord(std::size_t i) const;
  bool white(const Coord& c) const { return white_[index(c)] != 0; }
  bool white(std::size_t i) const { return white_[i] != 0; }
  void set_white(const Coord& c, bool w) { white_[index(c)] = w; }

  const Coord& start() const { return start_; }
  const Coord& finish() const { return finish_; }
  void set_start(const Coord& c) { start_ = c; }
  void set_finish(const Coord& c) { finish_ = c; }

  /// Throws std::invalid_argument unless start != finish and both are white.
  void validate() const;

  /// Text form: "dim n", then n rows per layer ('#', '.', 'S', 'F'), layers
  /// separated by a blank line.
  static Maze parse(std::string_view text);
  std::string to_text(const std::vector<Coord>& marked = {}) const;

  bool operator==(const Maze&) const = default;

 private:
  int dim_ = 2;
  int n_ = 0;
  std::vector<std::uint8_t> white_;
  Coord start_{0, 0, 0};
  Coord finish_{0, 0, 0};
};

/// Start and finish at opposite corners, forced white.
Maze random_maze(int dim, int n, double white_density, std::uint64_t seed);

/// One merge of the recursive solver.
struct MergeRecord {
  int level = 0;           // 1 = just above the base blocks
  Coord origin{0, 0, 0};
  int edge = 0;
  std::size_t vertices = 0;    // joined vertices V: white face cells of the children
  std::size_t active = 0;      // those that can carry a path across a child
  std::size_t kept = 0;
  double processors = 0;       // share of the mesh hosting this region
  std::uint64_t charged = 0;
};

struct PathResult {
  bool reachable = false;
  std::optional<std::uint64_t> distance;
  std::vector<Coord> path;              // start .. finish
  std::uint64_t charged_time = 0;
  std::uint64_t mesh_size_used = 0;
  std::vector<std::uint64_t> level_charges;  // base, level 1, ..., then marking
  std::vector<MergeRecord> merges;
};

/// Breadth-first wave from the start; each cell keeps the first direction
/// it heard from (lowest direction index on ties).
PathResult wave_bfs(const Maze& maze);

struct MazeOptions {
  int word_budget = 32;  // boundary matrix words a processor may hold
  int base_edge = 4;
};

/// 2-d maze on a 3-d mesh of size n^alpha, alpha in [2, 9/4].
/// Throws std::invalid_argument (n not a power of 2, bad alpha) or SizeError.
PathResult solve_maze_2d(const Maze& maze, double alpha = 2.25, const MazeOptions& options = {});

/// 3-d maze on a mesh of size n^c, c in [4, 9/2]. SizeError for c < 4.
PathResult solve_maze_3d(const Maze& maze, double c = 4.5, const MazeOptions& options = {});

/// Steps charged for all-pairs paths over V vertices by repeated squaring
/// on `processors` processors.
std::uint64_t charged_apsp_steps(std::size_t vertices, double processors);

/// Throws std::invalid_argument describing the first defect.
void validate_path(const Maze& maze, const std::vector<Coord>& path);

}  // namespace meshgrain
