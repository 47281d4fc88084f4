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

#include "meshgrain/meshmul.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "meshgrain/stacked.hpp"
#include "meshgrain/systolic.hpp"

namespace meshgrain {

namespace {

bool power_of_two(int n) { return n >= 1 && std::has_single_bit(static_cast<unsigned>(n)); }

Coord add(const Coord& a, const Coord& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

Region box(const Coord& origin, int x, int y, int z) { return Region{origin, {x, y, z}, {1, 1, 1}}; }

std::string shift_label(char matrix, int dx, int dy, int dz) {
  std::ostringstream os;
  os << matrix << '(' << dx << ',' << dy << ',' << dz << ')';
  return os.str();
}

void require_disjoint(const std::vector<Region>& regions, const std::string& what) {
  for (std::size_t p = 0; p < regions.size(); ++p)
    for (std::size_t q = p + 1; q < regions.size(); ++q)
      if (regions[p].overlaps(regions[q]))
        throw PlanError(what + ": regions " + std::to_string(p) + " and " + std::to_string(q) +
                        " overlap");
}

}  // namespace

MeshConfig AlgAPlan::mesh(int word_budget) const {
  return MeshConfig{.dim = 3, .edge = edge, .word_budget = word_budget};
}

Coord AlgAPlan::slot(int level, int i, int j) const {
  if (level == levels) {
    const auto lay = StackedLayout::for_edge(base_m);
    return {lay.column_x(i), lay.column_y(j), lay.layer_of(i, j)};
  }
  const int h = (n >> level) / 2;
  const int half = (edge >> level) / 2;
  const Coord inner = slot(level + 1, i % h, j % h);
  return {inner[0] + (i / h) * half, inner[1] + (j / h) * half, inner[2]};
}

AlgAPlan plan_alg_a(int n, double alpha, int word_budget) {
  if (!power_of_two(n)) throw std::invalid_argument("alg-a: n must be a power of 2");
  if (!(alpha >= 2 - 1e-12 && alpha <= 2.25 + 1e-12))
    throw std::invalid_argument("alg-a: alpha must lie in [2, 9/4]");
  AlgAPlan plan;
  plan.n = n;
  plan.alpha = alpha;
  const int lg = std::countr_zero(static_cast<unsigned>(n));
  plan.levels = std::min(lg, static_cast<int>(std::ceil((alpha - 2) * lg - 1e-9)));
  plan.base_m = n >> plan.levels;
  const auto lay = StackedLayout::for_edge(plan.base_m);
  plan.leaf_edge = lay.s;
  plan.slab_depth = lay.s;
  plan.edge = lay.s << plan.levels;
  plan.slack = std::pow(plan.edge, 3) / std::pow(n, alpha);
  const int bands = std::min(3, (plan.base_m + lay.s - 1) / lay.s);
  plan.cells_per_processor = bands * bands;

  const int leaf_words = 3 + 3 * plan.cells_per_processor;
  if (leaf_words > word_budget)
    throw PlanError("alg-a: leaf needs 3 + 3*" + std::to_string(plan.cells_per_processor) + " = " +
                    std::to_string(leaf_words) + " words per processor > budget " +
                    std::to_string(word_budget));
  if (3 + 4 > word_budget) throw PlanError("alg-a: scatter needs 7 words per processor");

  plan.nodes.resize(static_cast<std::size_t>(plan.levels) + 1);
  plan.nodes[0].push_back({0, box({0, 0, 0}, plan.edge, plan.edge, plan.edge), 0, 0, 0, n, -1, 0});
  for (int level = 0; level < plan.levels; ++level) {
    const int half = (plan.edge >> level) / 2;
    const int d = plan.slab_depth;
    auto& parents = plan.nodes[static_cast<std::size_t>(level)];
    auto& children = plan.nodes[static_cast<std::size_t>(level) + 1];
    std::map<std::string, ShiftBatch> batches;
    ShiftBatch combine{"C(0,0,-1)", 'C', {}, {}, {}, half};
    for (std::size_t p = 0; p < parents.size(); ++p) {
      const AlgANode& par = parents[p];
      const int bs = par.size / 2;
      const Coord o = par.cube.origin;
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
          for (int j = 0; j < 2; ++j) {
            const int oct = i * 4 + k * 2 + j;
            const Coord co = add(o, {i * half, j * half, k * half});
            children.push_back({level + 1, box(co, half, half, half), par.row0 + i * bs,
                                par.col0 + j * bs, par.inner0 + k * bs, bs, static_cast<int>(p), oct});
            const Region dst = box(co, half, half, d);
            // A(i,k) sits under halves (i, k); B(k,j) under (k, j).
            const Region a_src = box(add(o, {i * half, k * half, 0}), half, half, d);
            const Region b_src = box(add(o, {k * half, j * half, 0}), half, half, d);
            for (auto [m, src] : {std::pair{'A', a_src}, std::pair{'B', b_src}}) {
              const int dx = (dst.origin[0] - src.origin[0]) / half;
              const int dy = (dst.origin[1] - src.origin[1]) / half;
              const int dz = (dst.origin[2] - src.origin[2]) / half;
              if (dx == 0 && dy == 0 && dz == 0) continue;
              auto& batch = batches[shift_label(m, dx, dy, dz)];
              batch.label = shift_label(m, dx, dy, dz);
              batch.matrix = m;
              batch.distance = (std::abs(dx) + std::abs(dy) + std::abs(dz)) * half;
              batch.moves.emplace_back(src, dst);
              batch.parents.push_back(static_cast<int>(p));
              batch.octants.push_back(oct);
            }
            if (k == 0) {
              combine.moves.emplace_back(box(add(co, {0, 0, half}), half, half, d), dst);
              combine.parents.push_back(static_cast<int>(p));
              combine.octants.push_back(oct);
            }
          }
    }
    std::vector<ShiftBatch> ordered;
    for (auto& [label, batch] : batches) {
      std::vector<Region> srcs, dsts;
      for (const auto& mv : batch.moves) {
        srcs.push_back(mv.first);
        dsts.push_back(mv.second);
      }
      require_disjoint(srcs, "alg-a scatter " + label + " sources");
      require_disjoint(dsts, "alg-a scatter " + label + " targets");
      ordered.push_back(std::move(batch));
    }
    plan.scatter.push_back(std::move(ordered));
    plan.combine.push_back(std::move(combine));
  }
  for (const auto& level : plan.nodes) {
    std::vector<Region> cubes;
    std::size_t volume = 0;
    for (const auto& node : level) {
      if (!node.cube.fits(plan.mesh(word_budget)))
        throw PlanError("alg-a: subcube outside the mesh");
      cubes.push_back(node.cube);
      volume += node.cube.count();
    }
    require_disjoint(cubes, "alg-a level " + std::to_string(level.front().level));
    if (volume != plan.mesh(word_budget).processors())
      throw PlanError("alg-a: subcubes do not tile the mesh");
  }
  return plan;
}

namespace {

std::mutex cost_lock;
std::map<std::pair<int, int>, StepLedger> cost_cache;

void remember_cost(int m, int word_budget_3d, const StepLedger& ledger) {
  std::lock_guard guard(cost_lock);
  cost_cache.emplace(std::pair{m, word_budget_3d}, ledger);
}

}  // namespace

StepLedger stacked_systolic_cost(int m, int word_budget_3d) {
  {
    std::lock_guard guard(cost_lock);
    if (auto it = cost_cache.find({m, word_budget_3d}); it != cost_cache.end()) return it->second;
  }
  // The systolic traffic does not depend on the data.
  const Matrix zero(m, Semiring::plusmul());
  const auto sim = simulate_2d_on_3d(systolic_program(zero, zero), {.dim = 2, .edge = m},
                                     {.word_budget_3d = word_budget_3d});
  remember_cost(m, word_budget_3d, sim.ledger);
  return sim.ledger;
}

namespace {

// Entry (i, j) of each processor of a level cube, for engine-routed checks.
struct SlotMap {
  int c = 0, d = 0;
  std::vector<std::pair<int, int>> at;  // (-1,-1) for empty slots

  SlotMap(const AlgAPlan& plan, int level)
      : c(plan.edge >> level), d(plan.slab_depth),
        at(static_cast<std::size_t>(c) * c * d, {-1, -1}) {
    const int size = level == plan.levels ? plan.base_m : plan.n >> level;
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) at[index(plan.slot(level, i, j))] = {i, j};
  }
  std::size_t index(const Coord& local) const {
    return (static_cast<std::size_t>(local[2]) * c + local[1]) * c + local[0];
  }
};

class AlgARunner {
 public:
  AlgARunner(const AlgAPlan& plan, const AlgAOptions& options, const Matrix& a, const Matrix& b)
      : plan_(plan), options_(options), a_(a), b_(b), sr_(a.semiring()),
        on_engine_(plan.edge <= options.engine_route_edge) {}

  AlgAResult run() {
    StepLedger scatter, leaf, combine;
    for (int level = 0; level < plan_.levels; ++level)
      for (const auto& batch : plan_.scatter[static_cast<std::size_t>(level)])
        scatter.then(shift(level, batch));

    const auto& leaves = plan_.nodes.back();
    std::vector<Matrix> partial;
    partial.reserve(leaves.size());
    for (std::size_t t = 0; t < leaves.size(); ++t) {
      const auto& node = leaves[t];
      const Matrix ab = a_.block(node.row0, node.inner0, node.size);
      const Matrix bb = b_.block(node.inner0, node.col0, node.size);
      if (t == 0) {
        const auto sim = simulate_2d_on_3d(systolic_program(ab, bb), {.dim = 2, .edge = node.size},
                                           {.word_budget_3d = options_.word_budget});
        partial.push_back(systolic_product(sim.final_state, node.size, sr_));
        remember_cost(node.size, options_.word_budget, sim.ledger);
      } else {
        partial.push_back(systolic_matmul_2d(ab, bb, {.word_budget = options_.word_budget, .trace = {}}).c);
      }
    }
    leaf = stacked_systolic_cost(plan_.base_m, options_.word_budget);

    for (int level = plan_.levels - 1; level >= 0; --level) {
      const auto& batch = plan_.combine[static_cast<std::size_t>(level)];
      combine.then(shift(level, batch, &partial));
      const auto& parents = plan_.nodes[static_cast<std::size_t>(level)];
      std::vector<Matrix> merged;
      for (std::size_t p = 0; p < parents.size(); ++p) {
        const int bs = parents[p].size / 2;
        Matrix c(parents[p].size, sr_);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            c.put_block(i * bs, j * bs,
                        add(partial[p * 8 + static_cast<std::size_t>(i * 4 + j)],
                            partial[p * 8 + static_cast<std::size_t>(i * 4 + 2 + j)]));
        merged.push_back(std::move(c));
      }
      StepLedger sum;
      sum.charge("combine-add", 1, 0, 0, 0);
      combine.then(sum);
      partial = std::move(merged);
    }

    AlgAResult out{std::move(partial.front()), {}, plan_, on_engine_};
    const int scatter_peak = 3 + 4;
    out.ledger.charge("scatter", scatter.total_steps, scatter.comm_steps, scatter.words_moved,
                      scatter_peak);
    out.ledger.charge("leaf", leaf.total_steps, leaf.comm_steps, leaf.words_moved, leaf.peak_words);
    out.ledger.charge("combine", combine.total_steps, combine.comm_steps, combine.words_moved,
                      scatter_peak);
    return out;
  }

 private:
  // Value held by a processor of level `level` under matrix `m` of node `node`.
  Word entry(char m, const AlgANode& node, int i, int j, const std::vector<Matrix>* partial,
             std::size_t partial_index) const {
    if (m == 'A') return a_.at(node.row0 + i, node.inner0 + j);
    if (m == 'B') return b_.at(node.inner0 + i, node.col0 + j);
    return (*partial)[partial_index].at(i, j);
  }

  StepLedger shift(int level, const ShiftBatch& batch, const std::vector<Matrix>* partial = nullptr) {
    StepLedger charged;
    std::uint64_t words = 0;
    for (const auto& mv : batch.moves) words += mv.first.count();
    if (batch.distance > 0)
      charged.charge(batch.label, static_cast<std::uint64_t>(batch.distance) + 1,
                     static_cast<std::uint64_t>(batch.distance),
                     words * static_cast<std::uint64_t>(batch.distance), 0);
    if (!on_engine_) return charged;

    // Route the real words and check they land where the child expects them.
    const SlotMap child_map(plan_, level + 1);
    const auto& children = plan_.nodes[static_cast<std::size_t>(level) + 1];
    std::vector<std::vector<Word>> payloads;
    std::vector<std::vector<Word>> expected;
    for (std::size_t t = 0; t < batch.moves.size(); ++t) {
      const auto& [src, dst] = batch.moves[t];
      const auto p = static_cast<std::size_t>(batch.parents[t]);
      const int oct = batch.octants[t];
      const AlgANode& child = children[p * 8 + static_cast<std::size_t>(oct)];
      // The source holds, in child layout, the block that the receiving child needs.
      const std::size_t src_child = batch.matrix == 'C' ? p * 8 + static_cast<std::size_t>(oct + 2)
                                                        : p * 8 + static_cast<std::size_t>(oct);
      std::vector<Word> pay, want;
      for (std::size_t q = 0; q < src.count(); ++q) {
        const Coord s = src.at(q), d = dst.at(q);
        const Coord ls{s[0] - src.origin[0], s[1] - src.origin[1], s[2] - src.origin[2]};
        const Coord ld{d[0] - child.cube.origin[0], d[1] - child.cube.origin[1],
                       d[2] - child.cube.origin[2]};
        const auto [si, sj] = child_map.at[child_map.index(ls)];
        const auto [di, dj] = child_map.at[child_map.index(ld)];
        pay.push_back(si < 0 ? sr_.zero()
                             : entry(batch.matrix, child, si, sj, partial, src_child));
        want.push_back(di < 0 ? sr_.zero() : entry(batch.matrix, child, di, dj, partial, src_child));
      }
      payloads.push_back(std::move(pay));
      expected.push_back(std::move(want));
    }
    StepLedger measured;
    const auto routed = route_blocks(plan_.mesh(options_.word_budget), batch.moves, payloads, &measured);
    for (std::size_t t = 0; t < routed.size(); ++t)
      if (routed[t].delivered != expected[t])
        throw StructureViolation("alg-a: shift " + batch.label + " delivered misplaced words");
    if (measured.total_steps != charged.total_steps || measured.comm_steps != charged.comm_steps)
      throw StructureViolation("alg-a: shift " + batch.label + " cost differs from its charge");
    return charged;
  }

  const AlgAPlan& plan_;
  AlgAOptions options_;
  const Matrix& a_;
  const Matrix& b_;
  Semiring sr_;
  bool on_engine_;
};

}  // namespace

AlgAResult general_matmul_3d(const Matrix& a, const Matrix& b, double alpha,
                             const AlgAOptions& options) {
  if (a.n() != b.n() || a.semiring() != b.semiring())
    throw std::invalid_argument("alg-a: dimension or semiring mismatch");
  if (a.n() == 0) throw std::invalid_argument("alg-a: n must be positive");
  const int n = static_cast<int>(std::bit_ceil(static_cast<unsigned>(a.n())));
  const auto plan = plan_alg_a(n, alpha, options.word_budget);
  const Matrix ap = a.padded(n), bp = b.padded(n);
  auto out = AlgARunner(plan, options, ap, bp).run();
  out.c = out.c.crop(a.n());
  return out;
}

}  // namespace meshgrain
