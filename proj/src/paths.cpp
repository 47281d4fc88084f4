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

#include "meshgrain/paths.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "meshgrain/meshmul.hpp"

namespace meshgrain {

int squaring_rounds(int n) {
  return n <= 1 ? 0 : std::bit_width(static_cast<unsigned>(n - 1));
}

namespace {

std::uint64_t pow2_at_least(int n) { return std::bit_ceil(static_cast<std::uint64_t>(std::max(n, 1))); }

StepLedger square_phase(StepLedger l) {
  l.as_phase("square");
  return l;
}

}  // namespace

ClosureResult transitive_closure(const Matrix& adj, ClosureMode mode, const PathsOptions& options) {
  const int n = adj.n();
  for (Word e : adj.entries())
    if (e != 0 && e != 1) throw std::invalid_argument("closure: adjacency entries must be 0 or 1");

  ClosureResult out;
  out.squarings = squaring_rounds(n);
  if (mode == ClosureMode::Boolean) {
    Matrix c(n, Semiring::boolor(), adj.entries());
    for (int i = 0; i < n; ++i) c.at(i, i) = 1;
    for (int r = 1; r <= out.squarings; ++r) {
      auto sq = general_matmul_3d(c, c, options.alpha, {.word_budget = options.word_budget});
      c = std::move(sq.c);
      out.ledger.then(square_phase(std::move(sq.ledger)));
      if (options.on_round) options.on_round(r, c);
    }
    out.closure = std::move(c);
    return out;
  }

  Matrix c(n, Semiring::plusmul(), adj.entries());
  for (int i = 0; i < n; ++i) c.at(i, i) = 1;
  const auto schedule = plan_alg_b(pow2_at_least(n), 7, 2, 1);
  for (int r = 1; r <= out.squarings; ++r) {
    auto sq = ring_matmul_3d(c, c, schedule, options.word_budget);
    c = std::move(sq.c);
    for (auto& e : c.entries()) e = e != 0;
    out.ledger.then(square_phase(std::move(sq.ledger)));
    if (options.on_round) options.on_round(r, c);
  }
  out.closure = Matrix(n, Semiring::boolor(), c.entries());
  return out;
}

// ---------------------------------------------------------------------------

WitnessTable::WitnessTable(int n)
    : n_(n), history_(static_cast<std::size_t>(n) * n), unreachable_(static_cast<std::size_t>(n) * n) {
  for (auto& h : history_) h.push_back({0, kNone});
}

std::size_t WitnessTable::at(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("witness: vertex out of range");
  return static_cast<std::size_t>(i) * n_ + j;
}

int WitnessTable::mid(int i, int j) const { return history_[at(i, j)].back().mid; }

int WitnessTable::round(int i, int j) const {
  const auto k = at(i, j);
  return unreachable_[k] ? -1 : history_[k].back().round;
}

void WitnessTable::record(int i, int j, int m, int r) { history_[at(i, j)].push_back({r, m}); }

void WitnessTable::mark_unreachable(int i, int j) { unreachable_[at(i, j)] = true; }

int WitnessTable::mid_as_of(int i, int j, int r) const {
  const auto& h = history_[at(i, j)];
  auto it = std::upper_bound(h.begin(), h.end(), r, [](int v, const Entry& e) { return v < e.round; });
  return std::prev(it)->mid;
}

int WitnessTable::round_as_of(int i, int j, int r) const {
  const auto& h = history_[at(i, j)];
  auto it = std::upper_bound(h.begin(), h.end(), r, [](int v, const Entry& e) { return v < e.round; });
  return std::prev(it)->round;
}

ApspResult apsp(const Matrix& w, const PathsOptions& options) {
  if (w.semiring() != Semiring::minplus()) throw std::invalid_argument("apsp: needs a minplus matrix");
  const int n = w.n();
  for (int i = 0; i < n; ++i) {
    if (w.at(i, i) < 0) throw std::domain_error("apsp: negative cycle at vertex " + std::to_string(i));
    if (w.at(i, i) != 0) throw std::invalid_argument("apsp: diagonal must be 0");
  }
  const auto sr = w.semiring();
  ApspResult out{w, WitnessTable(n), {}, squaring_rounds(n)};
  Matrix& d = out.dist;
  for (int r = 1; r <= out.squarings; ++r) {
    auto sq = general_matmul_3d(d, d, options.alpha, {.word_budget = options.word_budget});
    // one witness word rides alongside every entry
    sq.ledger.peak_words += 1;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Word v = sq.c.at(i, j);
        if (v >= d.at(i, j)) continue;
        for (int k = 0; k < n; ++k)
          if (sr.times(d.at(i, k), d.at(k, j)) == v) {
            out.witnesses.record(i, j, k, r);
            break;
          }
      }
    d = std::move(sq.c);
    out.ledger.then(square_phase(std::move(sq.ledger)));
    for (int i = 0; i < n; ++i)
      if (d.at(i, i) < 0) throw std::domain_error("apsp: negative cycle at vertex " + std::to_string(i));
    if (options.on_round) options.on_round(r, d);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (d.at(i, j) >= kInf) out.witnesses.mark_unreachable(i, j);
  return out;
}

BottleneckResult bottleneck_apsp(const Matrix& w, const PathsOptions& options) {
  if (w.semiring() != Semiring::maxmin()) throw std::invalid_argument("bottleneck: needs a maxmin matrix");
  const int n = w.n();
  BottleneckResult out{w, {}, squaring_rounds(n)};
  for (int i = 0; i < n; ++i) out.widths.at(i, i) = kInf;
  for (int r = 1; r <= out.squarings; ++r) {
    auto sq = general_matmul_3d(out.widths, out.widths, options.alpha, {.word_budget = options.word_budget});
    out.widths = std::move(sq.c);
    out.ledger.then(square_phase(std::move(sq.ledger)));
    if (options.on_round) options.on_round(r, out.widths);
  }
  return out;
}

namespace {

void expand(const WitnessTable& wt, int i, int j, int as_of, std::vector<int>& path) {
  const int m = wt.mid_as_of(i, j, as_of);
  if (m == WitnessTable::kNone) {
    path.push_back(j);
    return;
  }
  const int r = wt.round_as_of(i, j, as_of);
  expand(wt, i, m, r - 1, path);
  expand(wt, m, j, r - 1, path);
}

}  // namespace

std::vector<int> reconstruct_path(const WitnessTable& wt, int i, int j) {
  if (wt.round(i, j) < 0)
    throw PathError("no path from " + std::to_string(i) + " to " + std::to_string(j));
  std::vector<int> path{i};
  if (i == j) return path;
  expand(wt, i, j, wt.round(i, j), path);
  return path;
}

}  // namespace meshgrain
