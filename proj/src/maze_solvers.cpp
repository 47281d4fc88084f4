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

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include "meshgrain/maze.hpp"
#include "meshgrain/paths.hpp"

namespace meshgrain {

std::uint64_t charged_apsp_steps(std::size_t vertices, double processors) {
  if (vertices <= 1) return 1;
  const double v = static_cast<double>(vertices);
  const double p = std::max(1.0, std::min(processors, std::pow(v, 2.25)));
  const auto diameter = static_cast<std::uint64_t>(3 * std::ceil(std::cbrt(p) - 1e-9));
  const auto work = static_cast<std::uint64_t>(std::ceil(v * v * v / p - 1e-9));
  return static_cast<std::uint64_t>(squaring_rounds(static_cast<int>(vertices))) * std::max(diameter, work);
}

namespace {

constexpr std::uint32_t kFar = std::numeric_limits<std::uint32_t>::max();

struct Node {
  Coord origin{0, 0, 0};
  int edge = 0;
  int level = 0;
  std::vector<int> children;
  std::vector<std::size_t> kept;
  std::size_t on_faces = 0;         // all white face cells, endpoints included
  std::vector<std::uint32_t> dist;  // kept x kept

  // merges only
  std::vector<std::size_t> joined;
  std::vector<int> joined_child;
  std::vector<int> kept_at;                 // position of each kept vertex in `joined`
  std::vector<std::vector<int>> toward;     // [kept t][joined x] -> next joined vertex toward t

  std::uint32_t d(std::size_t i, std::size_t j) const { return dist[i * kept.size() + j]; }
};

class Solver {
 public:
  Solver(const Maze& maze, double exponent, const MazeOptions& options)
      : maze_(maze), dim_(maze.dim()), n_(maze.n()), options_(options),
        where_(maze.cells(), -1), owner_(maze.cells(), -1) {
    mesh_size_ = std::pow(static_cast<double>(n_), exponent);
  }

  PathResult run() {
    const int base = std::min(options_.base_edge, n_);
    const int root = build(Coord{0, 0, 0}, n_, base);
    levels_ = nodes_[static_cast<std::size_t>(root)].level;

    PathResult r;
    r.mesh_size_used = static_cast<std::uint64_t>(std::ceil(mesh_size_ - 1e-9));
    r.merges = merges_;
    r.level_charges.assign(static_cast<std::size_t>(levels_) + 2, 0);
    r.level_charges[0] = static_cast<std::uint64_t>(std::pow(base, dim_));
    for (const auto& m : merges_)
      r.level_charges[static_cast<std::size_t>(m.level)] =
          std::max(r.level_charges[static_cast<std::size_t>(m.level)], m.charged);
    std::uint64_t mark = 0;
    for (int e = base; e <= n_; e *= 2) mark += static_cast<std::uint64_t>(dim_) * e;
    r.level_charges.back() = mark;
    for (auto c : r.level_charges) r.charged_time += c;

    const Node& top = nodes_[static_cast<std::size_t>(root)];
    const auto s = maze_.index(maze_.start()), f = maze_.index(maze_.finish());
    const auto si = position(top, s), fi = position(top, f);
    const auto dist = top.d(si, fi);
    if (dist == kFar) return r;
    r.reachable = true;
    r.distance = dist;
    std::vector<std::size_t> cells{s};
    expand(root, s, f, cells);
    for (auto c : cells) r.path.push_back(maze_.coord(c));
    return r;
  }

 private:
  static std::size_t position(const Node& node, std::size_t cell) {
    return static_cast<std::size_t>(std::find(node.kept.begin(), node.kept.end(), cell) - node.kept.begin());
  }

  bool inside(const Coord& c, const Coord& origin, int edge) const {
    for (int a = 0; a < dim_; ++a)
      if (c[a] < origin[a] || c[a] >= origin[a] + edge) return false;
    return true;
  }

  template <class F>
  void for_cells(const Coord& origin, int edge, F&& f) const {
    const int ez = dim_ == 3 ? edge : 1;
    for (int z = 0; z < ez; ++z)
      for (int y = 0; y < edge; ++y)
        for (int x = 0; x < edge; ++x) f(Coord{origin[0] + x, origin[1] + y, origin[2] + z});
  }

  template <class F>
  void for_neighbors(const Coord& c, F&& f) const {
    for (int d = 0; d < 2 * dim_; ++d) {
      Coord nb = c;
      nb[d / 2] += d % 2 ? 1 : -1;
      if (maze_.in_bounds(nb)) f(nb);
    }
  }

  // White face cells plus start and finish; only those facing another cell of
  // the maze (or the endpoints) can carry a path and become search roots.
  std::vector<std::size_t> kept_cells(const Coord& origin, int edge, std::size_t& on_faces) const {
    std::vector<std::size_t> out;
    on_faces = 0;
    for_cells(origin, edge, [&](const Coord& c) {
      const auto i = maze_.index(c);
      if (!maze_.white(i)) return;
      const bool endpoint = c == maze_.start() || c == maze_.finish();
      bool face = endpoint, crossing = endpoint;
      for (int a = 0; a < dim_; ++a) face = face || c[a] == origin[a] || c[a] == origin[a] + edge - 1;
      for_neighbors(c, [&](const Coord& nb) { crossing = crossing || !inside(nb, origin, edge); });
      on_faces += face;
      if (crossing) out.push_back(i);
    });
    return out;
  }

  // Breadth-first search confined to a block; returns parents (cell -> cell).
  void block_bfs(const Node& node, std::size_t from, std::vector<std::uint32_t>& dist,
                 std::vector<std::size_t>& parent) const {
    const auto cells = maze_.cells();
    dist.assign(cells, kFar);
    parent.assign(cells, cells);
    dist[from] = 0;
    std::deque<std::size_t> q{from};
    while (!q.empty()) {
      const auto i = q.front();
      q.pop_front();
      for_neighbors(maze_.coord(i), [&](const Coord& nb) {
        if (!inside(nb, node.origin, node.edge)) return;
        const auto j = maze_.index(nb);
        if (!maze_.white(j) || dist[j] != kFar) return;
        dist[j] = dist[i] + 1;
        parent[j] = i;
        q.push_back(j);
      });
    }
  }

  int build(const Coord& origin, int edge, int base) {
    Node node;
    node.origin = origin;
    node.edge = edge;
    node.kept = kept_cells(origin, edge, node.on_faces);
    const auto k = node.kept.size();
    node.dist.assign(k * k, kFar);

    if (edge <= base) {
      std::vector<std::uint32_t> dist;
      std::vector<std::size_t> parent;
      for (std::size_t i = 0; i < k; ++i) {
        block_bfs(node, node.kept[i], dist, parent);
        for (std::size_t j = 0; j < k; ++j) node.dist[i * k + j] = dist[node.kept[j]];
      }
      nodes_.push_back(std::move(node));
      return static_cast<int>(nodes_.size()) - 1;
    }

    const int half = edge / 2;
    for (int c = 0; c < (1 << dim_); ++c) {
      Coord o = origin;
      for (int a = 0; a < dim_; ++a) o[a] += (c >> a & 1) * half;
      node.children.push_back(build(o, half, base));
    }
    node.level = nodes_[static_cast<std::size_t>(node.children[0])].level + 1;
    merge(node);
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
  }

  void merge(Node& node) {
    for (std::size_t c = 0; c < node.children.size(); ++c)
      for (auto cell : nodes_[static_cast<std::size_t>(node.children[c])].kept) {
        where_[cell] = static_cast<int>(node.joined.size());
        owner_[cell] = static_cast<int>(c);
        node.joined.push_back(cell);
        node.joined_child.push_back(static_cast<int>(c));
      }
    std::size_t v = 0;
    for (int c : node.children) v += nodes_[static_cast<std::size_t>(c)].on_faces;
    const auto active = node.joined.size();
    const double processors = mesh_size_ * std::pow(static_cast<double>(node.edge) / n_, dim_);
    if (static_cast<double>(v) * static_cast<double>(v) > options_.word_budget * processors) {
      std::ostringstream os;
      os << "boundary matrix of " << v << " x " << v << " entries does not fit the " << processors
         << " processors hosting the region of edge " << node.edge
         << " (the 3-d maze needs a mesh of Theta(n^4) processors)";
      throw SizeError(os.str());
    }

    // Unit edges across child faces.
    std::vector<std::vector<int>> cross(active);
    for (std::size_t x = 0; x < active; ++x)
      for_neighbors(maze_.coord(node.joined[x]), [&](const Coord& nb) {
        if (!inside(nb, node.origin, node.edge)) return;
        const auto j = maze_.index(nb);
        if (where_[j] >= 0 && owner_[j] != node.joined_child[x]) cross[x].push_back(where_[j]);
      });
    // Offsets of each child's vertices within `joined`.
    std::vector<std::size_t> first(node.children.size() + 1, 0);
    for (std::size_t c = 0; c < node.children.size(); ++c)
      first[c + 1] = first[c] + nodes_[static_cast<std::size_t>(node.children[c])].kept.size();

    const auto k = node.kept.size();
    node.kept_at.resize(k);
    for (std::size_t t = 0; t < k; ++t) node.kept_at[t] = where_[node.kept[t]];
    node.toward.assign(k, std::vector<int>(active, -1));
    std::vector<std::uint32_t> dist;
    using Item = std::pair<std::uint32_t, int>;
    for (std::size_t t = 0; t < k; ++t) {
      dist.assign(active, kFar);
      auto& prev = node.toward[t];
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      const int root = node.kept_at[t];
      dist[static_cast<std::size_t>(root)] = 0;
      pq.push({0, root});
      while (!pq.empty()) {
        auto [dx, x] = pq.top();
        pq.pop();
        const auto ux = static_cast<std::size_t>(x);
        if (dx != dist[ux]) continue;
        auto relax = [&](int y, std::uint32_t w) {
          const auto uy = static_cast<std::size_t>(y);
          if (dx + w < dist[uy]) {
            dist[uy] = dx + w;
            prev[uy] = x;
            pq.push({dist[uy], y});
          }
        };
        const auto c = static_cast<std::size_t>(node.joined_child[ux]);
        const Node& child = nodes_[static_cast<std::size_t>(node.children[c])];
        const auto ck = child.kept.size();
        const auto local = ux - first[c];
        for (std::size_t j = 0; j < ck; ++j) {
          const auto w = child.dist[local * ck + j];
          if (j != local && w != kFar) relax(static_cast<int>(first[c] + j), w);
        }
        for (int y : cross[ux]) relax(y, 1);
      }
      for (std::size_t i = 0; i < k; ++i) node.dist[i * k + t] = dist[static_cast<std::size_t>(node.kept_at[i])];
    }
    for (auto cell : node.joined) where_[cell] = owner_[cell] = -1;

    merges_.push_back({node.level, node.origin, node.edge, v, active, k, processors,
                       charged_apsp_steps(v, processors)});
  }

  // Appends the cells after `from` up to `to`, both kept by the node.
  void expand(int index, std::size_t from, std::size_t to, std::vector<std::size_t>& out) const {
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    if (node.children.empty()) {
      std::vector<std::uint32_t> dist;
      std::vector<std::size_t> parent;
      block_bfs(node, from, dist, parent);
      std::vector<std::size_t> rev;
      for (auto c = to; c != from; c = parent[c]) rev.push_back(c);
      out.insert(out.end(), rev.rbegin(), rev.rend());
      return;
    }
    const auto t = position(node, to);
    const auto joined_at = [&](std::size_t cell) {
      return static_cast<int>(std::find(node.joined.begin(), node.joined.end(), cell) - node.joined.begin());
    };
    int x = joined_at(from);
    const int goal = node.kept_at[t];
    while (x != goal) {
      const int y = node.toward[t][static_cast<std::size_t>(x)];
      const auto ux = static_cast<std::size_t>(x), uy = static_cast<std::size_t>(y);
      if (node.joined_child[ux] == node.joined_child[uy])
        expand(node.children[static_cast<std::size_t>(node.joined_child[ux])], node.joined[ux], node.joined[uy], out);
      else
        out.push_back(node.joined[uy]);
      x = y;
    }
  }

  const Maze& maze_;
  int dim_;
  int n_;
  MazeOptions options_;
  double mesh_size_ = 0;
  int levels_ = 0;
  std::vector<Node> nodes_;
  std::vector<MergeRecord> merges_;
  std::vector<int> where_, owner_;  // scratch for merges
};

void check_shape(const Maze& maze, int dim) {
  if (maze.dim() != dim) throw std::invalid_argument("maze: expected a " + std::to_string(dim) + "-d maze");
  maze.validate();
  if (!std::has_single_bit(static_cast<unsigned>(maze.n())))
    throw std::invalid_argument("maze: n must be a power of 2");
}

}  // namespace

PathResult solve_maze_2d(const Maze& maze, double alpha, const MazeOptions& options) {
  check_shape(maze, 2);
  if (!(alpha >= 2 - 1e-12 && alpha <= 2.25 + 1e-12))
    throw std::invalid_argument("maze: alpha must lie in [2, 9/4]");
  return Solver(maze, alpha, options).run();
}

PathResult solve_maze_3d(const Maze& maze, double c, const MazeOptions& options) {
  check_shape(maze, 3);
  if (c < 4 - 1e-12)
    throw SizeError("maze: a mesh of size n^" + std::to_string(c) +
                    " cannot hold the Theta(n^4) boundary distance matrix of a middle slice; need c >= 4");
  if (c > 4.5 + 1e-12) throw std::invalid_argument("maze: c must lie in [4, 9/2]");
  return Solver(maze, c, options).run();
}

}  // namespace meshgrain
