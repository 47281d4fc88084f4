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

#include "meshgrain/maze.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>

namespace meshgrain {

Maze::Maze(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("maze: dim must be 2 or 3");
  if (n < 1) throw std::invalid_argument("maze: n must be positive");
  white_.assign(dim == 2 ? static_cast<std::size_t>(n) * n : static_cast<std::size_t>(n) * n * n, 0);
}

bool Maze::in_bounds(const Coord& c) const {
  for (int a = 0; a < 3; ++a) {
    const int hi = a < dim_ ? n_ : 1;
    if (c[a] < 0 || c[a] >= hi) return false;
  }
  return true;
}

std::size_t Maze::index(const Coord& c) const {
  if (!in_bounds(c)) throw std::out_of_range("maze: cell out of range");
  return (static_cast<std::size_t>(c[2]) * n_ + c[1]) * n_ + c[0];
}

Coord Maze::coord(std::size_t i) const {
  const auto n = static_cast<std::size_t>(n_);
  return {static_cast<int>(i % n), static_cast<int>(i / n % n), static_cast<int>(i / (n * n))};
}

void Maze::validate() const {
  if (!in_bounds(start_) || !in_bounds(finish_)) throw std::invalid_argument("maze: start or finish outside");
  if (start_ == finish_) throw std::invalid_argument("maze: start equals finish");
  if (!white(start_) || !white(finish_)) throw std::invalid_argument("maze: start and finish must be white");
}

// Rows are axis 1, characters axis 0, layers axis 2.
Maze Maze::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  int dim = 0, n = 0;
  if (!(in >> dim >> n)) throw std::invalid_argument("maze: expected header 'dim n'");
  Maze m(dim, n);
  std::string line;
  std::getline(in, line);
  const int layers = dim == 3 ? n : 1;
  int starts = 0, finishes = 0;
  for (int z = 0; z < layers; ++z)
    for (int y = 0; y < n; ++y) {
      do {
        if (!std::getline(in, line)) throw std::invalid_argument("maze: too few rows");
        if (!line.empty() && line.back() == '\r') line.pop_back();
      } while (line.empty());
      if (static_cast<int>(line.size()) != n)
        throw std::invalid_argument("maze: row " + std::to_string(y) + " of layer " + std::to_string(z) +
                                    " has " + std::to_string(line.size()) + " cells, expected " +
                                    std::to_string(n));
      for (int x = 0; x < n; ++x) {
        const Coord c{x, y, z};
        switch (line[static_cast<std::size_t>(x)]) {
          case '#': break;
          case '.': m.set_white(c, true); break;
          case 'S': m.set_white(c, true); m.start_ = c; ++starts; break;
          case 'F': m.set_white(c, true); m.finish_ = c; ++finishes; break;
          default:
            throw std::invalid_argument(std::string("maze: unexpected character '") +
                                        line[static_cast<std::size_t>(x)] + "'");
        }
      }
    }
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw std::invalid_argument("maze: trailing rows");
  if (starts != 1 || finishes != 1) throw std::invalid_argument("maze: need exactly one S and one F");
  m.validate();
  return m;
}

std::string Maze::to_text(const std::vector<Coord>& marked) const {
  std::vector<std::uint8_t> mark(white_.size(), 0);
  for (const auto& c : marked) mark[index(c)] = 1;
  std::ostringstream out;
  out << dim_ << ' ' << n_ << '\n';
  const int layers = dim_ == 3 ? n_ : 1;
  for (int z = 0; z < layers; ++z) {
    if (z > 0) out << '\n';
    for (int y = 0; y < n_; ++y) {
      for (int x = 0; x < n_; ++x) {
        const Coord c{x, y, z};
        const auto i = index(c);
        out << (c == start_ ? 'S' : c == finish_ ? 'F' : mark[i] ? '*' : white_[i] ? '.' : '#');
      }
      out << '\n';
    }
  }
  return out.str();
}

Maze random_maze(int dim, int n, double white_density, std::uint64_t seed) {
  if (!(white_density > 0 && white_density <= 1)) throw std::invalid_argument("maze: density must be in (0, 1]");
  if (n < 2) throw std::invalid_argument("maze: n must be at least 2");
  Maze m(dim, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t i = 0; i < m.cells(); ++i) m.set_white(m.coord(i), coin(rng) < white_density);
  const Coord far{n - 1, n - 1, dim == 3 ? n - 1 : 0};
  m.set_start({0, 0, 0});
  m.set_finish(far);
  m.set_white(m.start(), true);
  m.set_white(far, true);
  return m;
}

PathResult wave_bfs(const Maze& maze) {
  maze.validate();
  const auto cells = maze.cells();
  std::vector<int> heard(cells, -1);  // direction toward the sender
  std::vector<std::uint32_t> wave(cells, 0);
  const auto s = maze.index(maze.start());
  heard[s] = kMaxLinks;
  std::deque<std::size_t> queue{s};
  std::uint32_t last_wave = 0;
  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    const Coord c = maze.coord(i);
    last_wave = wave[i];
    for (int d = 0; d < 2 * maze.dim(); ++d) {
      Coord nb = c;
      nb[d / 2] += d % 2 ? 1 : -1;
      if (!maze.in_bounds(nb)) continue;
      const auto j = maze.index(nb);
      if (!maze.white(j) || heard[j] != -1) continue;
      heard[j] = d ^ 1;
      wave[j] = wave[i] + 1;
      queue.push_back(j);
    }
  }

  PathResult r;
  r.mesh_size_used = cells;
  const auto f = maze.index(maze.finish());
  if (heard[f] == -1) {
    r.charged_time = last_wave;
    return r;
  }
  r.reachable = true;
  r.distance = wave[f];
  r.charged_time = wave[f];
  for (Coord c = maze.finish();;) {
    r.path.push_back(c);
    const int d = heard[maze.index(c)];
    if (d == kMaxLinks) break;
    c[d / 2] += d % 2 ? 1 : -1;
  }
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

void validate_path(const Maze& maze, const std::vector<Coord>& path) {
  if (path.empty()) throw std::invalid_argument("path: empty");
  if (path.front() != maze.start()) throw std::invalid_argument("path: does not begin at the start");
  if (path.back() != maze.finish()) throw std::invalid_argument("path: does not end at the finish");
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (!maze.in_bounds(path[k]) || !maze.white(path[k]))
      throw std::invalid_argument("path: cell " + std::to_string(k) + " is not a white cell");
    if (k == 0) continue;
    int manhattan = 0;
    for (int a = 0; a < 3; ++a) manhattan += std::abs(path[k][a] - path[k - 1][a]);
    if (manhattan != 1) throw std::invalid_argument("path: cells " + std::to_string(k - 1) + " and " +
                                                    std::to_string(k) + " are not adjacent");
  }
}

}  // namespace meshgrain
