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

#include <bit>
#include <cmath>
#include <sstream>

#include "meshgrain/meshmul.hpp"
#include "meshgrain/systolic.hpp"

namespace meshgrain {

MeshConfig AlgBSchedule::mesh(int word_budget) const {
  return MeshConfig{.dim = 3, .edge = mesh_edge, .word_budget = word_budget};
}

Region step_grid(int edge, int step) {
  const int first = (1 << step) - 1;
  const int stride = 1 << (step + 1);
  const int extent = edge > first ? (edge - first + stride - 1) / stride : 0;
  return Region{{first, first, first}, {extent, extent, extent}, {stride, stride, stride}};
}

int memory_capped_levels(double a, double b) {
  int r = 0;
  while (std::pow(a / b, r + 1) <= 64 + 1e-9) ++r;
  return r;
}

namespace {

// Smallest t with t^3 >= n^2.
int cube_root_of_square(std::uint64_t n) {
  const long double target = static_cast<long double>(n) * static_cast<long double>(n);
  auto t = static_cast<std::uint64_t>(std::floor(std::cbrt(target)));
  while (static_cast<long double>(t) * t * t < target) ++t;
  while (t > 0 && static_cast<long double>(t - 1) * (t - 1) * (t - 1) >= target) --t;
  return static_cast<int>(t);
}

}  // namespace

AlgBSchedule plan_alg_b(std::uint64_t n, double a, double b, std::optional<int> forced_s) {
  if (n < 1) throw std::invalid_argument("alg-b: n must be positive");
  if (!(b > 1) || !(a > b)) throw std::invalid_argument("alg-b: needs a > b > 1");
  if (forced_s && *forced_s < 1) throw std::invalid_argument("alg-b: forced s must be >= 1");
  AlgBSchedule sc;
  sc.n = n;
  sc.a = a;
  sc.b = b;
  sc.alpha_serial = std::log(a) / std::log(b);
  sc.delta = 8.0 / 3.0 - sc.alpha_serial;
  const double log64n = std::log2(static_cast<double>(n)) / 6.0;
  if (sc.delta <= 0 && !forced_s) {
    std::ostringstream os;
    os << "alg-b: log_b a = " << sc.alpha_serial
       << " is not below 8/3, so delta = 8/3 - log_b a <= 0 and no step count s satisfies "
          "delta * log_64 n >= s; supply a forced step count";
    throw ScheduleError(os.str());
  }
  int s = sc.delta > 0 ? static_cast<int>(std::floor(sc.delta * log64n + 1e-9)) : *forced_s;
  if (forced_s) s = std::min(s, *forced_s);
  sc.steps = std::max(1, s);

  const int depth = static_cast<int>(std::ceil(std::log(static_cast<double>(n)) / std::log(b) - 1e-9));
  sc.levels_needed = (depth + sc.steps - 1) / sc.steps;
  sc.levels_per_step = std::min(sc.levels_needed, memory_capped_levels(a, b));
  sc.memory_factor = std::pow(a / b, sc.levels_per_step);
  const int done = std::min(depth, sc.levels_per_step * sc.steps);
  sc.leaf_size = static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(n) / std::pow(b, done) - 1e-9));

  sc.mesh_edge = 2 * cube_root_of_square(n);
  for (int i = 0; i <= sc.steps; ++i) {
    if (i >= 30) throw ScheduleError("alg-b: too many steps for the mesh");
    sc.grids.push_back(step_grid(sc.mesh_edge, i));
    if (sc.grids.back().extent[0] == 0)
      throw ScheduleError("alg-b: step " + std::to_string(i) + " grid is empty on a mesh of edge " +
                          std::to_string(sc.mesh_edge));
  }
  return sc;
}

namespace {

Matrix sub(const Matrix& x, const Matrix& y) {
  Matrix out(x.n(), x.semiring());
  for (std::size_t i = 0; i < out.entries().size(); ++i)
    out.entries()[i] = static_cast<Word>(static_cast<std::uint64_t>(x.entries()[i]) -
                                         static_cast<std::uint64_t>(y.entries()[i]));
  return out;
}

using Pair = std::pair<Matrix, Matrix>;

// The seven Strassen operand pairs.
std::vector<Pair> expand(const Matrix& a, const Matrix& b) {
  const int h = a.n() / 2;
  const Matrix a11 = a.block(0, 0, h), a12 = a.block(0, h, h), a21 = a.block(h, 0, h),
               a22 = a.block(h, h, h);
  const Matrix b11 = b.block(0, 0, h), b12 = b.block(0, h, h), b21 = b.block(h, 0, h),
               b22 = b.block(h, h, h);
  std::vector<Pair> out;
  out.reserve(7);
  out.emplace_back(add(a11, a22), add(b11, b22));
  out.emplace_back(add(a21, a22), b11);
  out.emplace_back(a11, sub(b12, b22));
  out.emplace_back(a22, sub(b21, b11));
  out.emplace_back(add(a11, a12), b22);
  out.emplace_back(sub(a21, a11), add(b11, b12));
  out.emplace_back(sub(a12, a22), add(b21, b22));
  return out;
}

Matrix combine(const std::vector<Matrix>& m) {
  const int h = m[0].n();
  Matrix c(2 * h, m[0].semiring());
  c.put_block(0, 0, add(sub(add(m[0], m[3]), m[4]), m[6]));
  c.put_block(0, h, add(m[2], m[4]));
  c.put_block(h, 0, add(m[1], m[3]));
  c.put_block(h, h, add(add(sub(m[0], m[1]), m[2]), m[5]));
  return c;
}

class AlgBRunner {
 public:
  AlgBRunner(const AlgBSchedule& sc, int budget) : sc_(sc), budget_(budget) {
    steps_.resize(sc.grids.size());
    levels_.assign(sc.grids.size(), 0);
    for (std::size_t i = 0; i < sc.grids.size(); ++i) steps_[i].workers = sc.grids[i].count();
  }

  Matrix run(const Matrix& a, const Matrix& b, int step) {
    auto& info = steps_[static_cast<std::size_t>(step)];
    ++info.subproblems;
    info.block = static_cast<std::uint64_t>(a.n());
    if (step == sc_.steps || static_cast<std::uint64_t>(a.n()) <= sc_.leaf_size) return leaf(a, b, step);

    // Breadth-first through r levels, then hand every subproblem down.
    std::vector<Pair> frontier;
    frontier.emplace_back(a, b);
    int levels = 0;
    while (levels < sc_.levels_per_step &&
           static_cast<std::uint64_t>(frontier.front().first.n()) > sc_.leaf_size) {
      std::vector<Pair> next;
      next.reserve(frontier.size() * 7);
      for (const auto& [x, y] : frontier)
        for (auto& p : expand(x, y)) next.push_back(std::move(p));
      frontier = std::move(next);
      if (step == 0 && levels == 0) top_level_ = frontier.size();
      ++levels;
    }
    levels_[static_cast<std::size_t>(step)] = levels;
    std::vector<Matrix> results;
    results.reserve(frontier.size());
    for (const auto& [x, y] : frontier) results.push_back(run(x, y, step + 1));
    for (int l = 0; l < levels; ++l) {
      std::vector<Matrix> up;
      for (std::size_t g = 0; g < results.size(); g += 7)
        up.push_back(combine({results.begin() + static_cast<std::ptrdiff_t>(g),
                              results.begin() + static_cast<std::ptrdiff_t>(g + 7)}));
      results = std::move(up);
    }
    return std::move(results.front());
  }

  AlgBResult finish(Matrix c) {
    AlgBResult out;
    out.c = std::move(c);
    out.top_level_subproblems = top_level_;
    const auto last = steps_.size() - 1;
    auto ceil_div = [](double x, double y) { return static_cast<std::uint64_t>(std::ceil(x / y)); };

    // Memory and descent/recursion charges per step.
    std::vector<StepLedger> down(steps_.size()), up(steps_.size());
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      auto& st = steps_[i];
      if (st.subproblems == 0) continue;
      const double workers = static_cast<double>(st.workers);
      const double x = static_cast<double>(st.block);
      const double per_sub = static_cast<double>(st.subproblems);
      const int levels = levels_[i];
      double resident = 0;
      std::uint64_t recurse = 0, merge = 0;
      for (int l = 0; l <= levels; ++l) {
        const double side = x / std::pow(2.0, l);
        const double volume = 2 * per_sub * std::pow(7.0, l) * side * side;
        resident += volume;
        if (l > 0) {
          recurse += ceil_div(volume, workers) + (2ULL << i);
          merge += ceil_div(volume / 2, workers) + (2ULL << i);
        }
      }
      st.peak_words = 3 + static_cast<int>(ceil_div(resident, workers));
      const double allowed = sc_.memory_factor * budget_;
      out.peak_virtual_words = std::max(out.peak_virtual_words, st.peak_words);
      if (st.peak_words > allowed)
        throw BudgetViolation("step " + std::to_string(i) + " worker", 0, st.peak_words,
                              static_cast<int>(allowed));
      if (i < last && steps_[i + 1].subproblems > 0) {
        const auto& nx = steps_[i + 1];
        const double nb = static_cast<double>(nx.block);
        const double words = 2 * static_cast<double>(nx.subproblems) * nb * nb;
        const std::uint64_t dist = 3ULL << i;
        const auto lanes = static_cast<double>(nx.workers);
        down[i].charge("down" + std::to_string(i), dist + ceil_div(words, lanes) - 1,
                       dist + ceil_div(words, lanes) - 1, static_cast<std::uint64_t>(words) * dist, 0);
        up[i].charge("up" + std::to_string(i), dist + ceil_div(words / 2, lanes) - 1,
                     dist + ceil_div(words / 2, lanes) - 1,
                     static_cast<std::uint64_t>(words / 2) * dist, 0);
      }
      if (recurse) down[i].charge("recurse" + std::to_string(i), recurse, 2ULL << i, 0, 0);
      if (merge) up[i].charge("merge" + std::to_string(i), merge, 2ULL << i, 0, 0);
      st.charged = down[i].total_steps + up[i].total_steps;
    }

    // Leaf products: stacked systolic on leaf^2 processors per product.
    StepLedger leaf_ledger;
    std::size_t leaf_step = last;
    while (leaf_step > 0 && leaf_products_at(leaf_step) == 0) --leaf_step;
    const double lb = static_cast<double>(leaf_block_);
    const auto rounds = ceil_div(static_cast<double>(leaf_count_) * lb * lb,
                                 static_cast<double>(steps_[leaf_step].workers));
    if (leaf_count_ > 0) {
      const auto each = leaf_block_ <= 1 ? StepLedger{}
                                         : stacked_systolic_cost(static_cast<int>(leaf_block_), budget_);
      const std::uint64_t per = leaf_block_ <= 1 ? 1 : each.total_steps;
      const std::uint64_t comm = leaf_block_ <= 1 ? 0 : each.comm_steps;
      leaf_ledger.charge("leaf", rounds * per, rounds * comm, rounds * each.words_moved,
                         each.peak_words);
      steps_[leaf_step].charged += leaf_ledger.total_steps;
    }

    for (std::size_t i = 0; i < steps_.size(); ++i) out.ledger.then(down[i]);
    out.ledger.then(leaf_ledger);
    for (std::size_t i = steps_.size(); i-- > 0;) out.ledger.then(up[i]);
    out.ledger.peak_words = std::max(out.ledger.peak_words, out.peak_virtual_words);
    out.steps = steps_;
    return out;
  }

 private:
  std::uint64_t leaf_products_at(std::size_t step) const {
    return leaf_step_counts_.size() > step ? leaf_step_counts_[step] : 0;
  }

  Matrix leaf(const Matrix& a, const Matrix& b, int step) {
    ++leaf_count_;
    leaf_step_counts_.resize(sc_.grids.size());
    ++leaf_step_counts_[static_cast<std::size_t>(step)];
    leaf_block_ = static_cast<std::uint64_t>(a.n());
    if (a.n() == 1) return Matrix(1, a.semiring(), {a.semiring().times(a.at(0, 0), b.at(0, 0))});
    return systolic_matmul_2d(a, b, {.word_budget = budget_, .trace = {}}).c;
  }

  const AlgBSchedule& sc_;
  int budget_;
  std::vector<AlgBStep> steps_;
  std::vector<int> levels_;
  std::vector<std::uint64_t> leaf_step_counts_;
  std::uint64_t top_level_ = 0;
  std::uint64_t leaf_count_ = 0;
  std::uint64_t leaf_block_ = 0;
};

void check_grids(const AlgBSchedule& sc) {
  const MeshConfig mesh = sc.mesh();
  for (std::size_t i = 0; i < sc.grids.size(); ++i) {
    if (!sc.grids[i].fits(mesh))
      throw StructureViolation("alg-b: step " + std::to_string(i) + " grid leaves the mesh");
    for (std::size_t j = i + 1; j < sc.grids.size(); ++j)
      if (sc.grids[i].overlaps(sc.grids[j]))
        throw StructureViolation("alg-b: workers of steps " + std::to_string(i) + " and " +
                                 std::to_string(j) + " overlap");
  }
}

}  // namespace

AlgBResult ring_matmul_3d(const Matrix& a, const Matrix& b, const AlgBSchedule& schedule,
                          int word_budget) {
  if (!a.semiring().is_ring() || a.semiring() != b.semiring())
    throw std::invalid_argument("alg-b: needs the plusmul ring");
  if (a.n() != b.n()) throw std::invalid_argument("alg-b: dimension mismatch");
  if (schedule.a != 7 || schedule.b != 2)
    throw std::invalid_argument("alg-b: only the Strassen scheme (7, 2) is executable");
  if (static_cast<std::uint64_t>(a.n()) > schedule.n)
    throw std::invalid_argument("alg-b: matrix larger than the schedule");
  check_grids(schedule);
  const int n = static_cast<int>(std::bit_ceil(static_cast<unsigned>(schedule.n)));
  AlgBRunner runner(schedule, word_budget);
  Matrix c = runner.run(a.padded(n), b.padded(n), 0);
  auto out = runner.finish(c.crop(a.n()));
  return out;
}

}  // namespace meshgrain
