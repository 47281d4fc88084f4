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

#include "meshgrain/systolic.hpp"

#include <cstdlib>
#include <memory>

namespace meshgrain {

int SystolicSchedule::fold(int ring, int n) {
  const int half = (n + 1) / 2;
  return ring < half ? 2 * ring : 2 * (n - 1 - ring) + 1;
}

int SystolicSchedule::unfold(int physical, int n) {
  return physical % 2 == 0 ? physical / 2 : n - 1 - (physical - 1) / 2;
}

int SystolicSchedule::inner_position(int k) const { return (n - unfold(k, n)) % n; }

namespace {

constexpr int kDone = 1;
constexpr std::size_t kA = 0, kB = 1, kC = 2;

// Axis 0 carries B (moves between rows), axis 1 carries A (between columns).
constexpr int kAxisA = 1;
constexpr int kAxisB = 0;

struct Fold {
  std::vector<int> fold, unfold;
  std::vector<int> next, prev;  // physical index of the ring successor / predecessor
  explicit Fold(int n) : fold(n), unfold(n), next(n), prev(n) {
    for (int r = 0; r < n; ++r) fold[r] = SystolicSchedule::fold(r, n);
    for (int p = 0; p < n; ++p) unfold[p] = SystolicSchedule::unfold(p, n);
    for (int r = 0; r < n; ++r) {
      next[r] = fold[(r + 1) % n];
      prev[r] = fold[(r + n - 1) % n];
    }
  }
};

class SystolicKernel {
 public:
  SystolicKernel(int n, Semiring sr, std::function<void(const MacEvent&)> trace)
      : n_(n), skew_(n / 2), sr_(sr), fold_(n), trace_(std::move(trace)) {}

  void operator()(ProcessorContext& ctx) const {
    if (ctx.phase() == kDone) return;
    const Coord c = ctx.coords();
    const int p = c[0], q = c[1];
    if (p >= n_ || q >= n_) {
      ctx.set_phase(kDone);
      return;
    }
    const int x = fold_.unfold[p], y = fold_.unfold[q];
    const auto s = static_cast<int>(ctx.step());
    const bool owner_slot = s % 2 == 1;
    const int logical = (s - 1) / 2;

    // Ring direction of each stream in this logical step (0 = idle).
    int dir_a = 0, dir_b = 0;
    if (logical < skew_) {
      dir_a = skew_dir(x, logical);
      dir_b = skew_dir(y, logical);
    } else if (logical - skew_ < n_ - 1) {
      dir_a = dir_b = 1;
    }

    if (owner_slot) {
      for (bool positive : {false, true}) {
        if (auto w = ctx.inbox(dir_of(kAxisA, positive))) ctx.set(kA, *w);
        if (auto w = ctx.inbox(dir_of(kAxisB, positive))) ctx.set(kB, *w);
      }
      const int t = logical - skew_;
      if (t >= 0 && t < n_) {
        ctx.set(kC, sr_.plus(ctx.reg(kC), sr_.times(ctx.reg(kA), ctx.reg(kB))));
        if (trace_) trace_({x, y, t, ctx.reg(kA), ctx.reg(kB)});
        if (t == n_ - 1) {
          ctx.set_phase(kDone);
          return;
        }
      }
      send_if(ctx, kAxisA, q, y, dir_a, ctx.reg(kA), 2);
      send_if(ctx, kAxisB, p, x, dir_b, ctx.reg(kB), 2);
    } else {
      // Relays keep travelling in the direction they came.
      for (bool positive : {false, true}) {
        if (auto w = ctx.inbox(dir_of(kAxisA, positive))) ctx.send(dir_of(kAxisA, !positive), *w);
        if (auto w = ctx.inbox(dir_of(kAxisB, positive))) ctx.send(dir_of(kAxisB, !positive), *w);
      }
      send_if(ctx, kAxisA, q, y, dir_a, ctx.reg(kA), 1);
      send_if(ctx, kAxisB, p, x, dir_b, ctx.reg(kB), 1);
    }
  }

 private:
  // Rotation of ring line `line` by -line, the shorter way round.
  int skew_dir(int line, int logical) const {
    const int left = line, right = (n_ - line) % n_;
    if (left <= right) return logical < left ? -1 : 0;
    return logical < right ? 1 : 0;
  }

  // Sends `w` toward the ring neighbour in `dir` if it is `hops` mesh hops away.
  void send_if(ProcessorContext& ctx, int axis, int physical, int ring, int dir, Word w,
               int hops) const {
    if (dir == 0) return;
    const int target = dir > 0 ? fold_.next[ring] : fold_.prev[ring];
    if (std::abs(target - physical) != hops) return;
    ctx.send(dir_of(axis, target > physical), w);
  }

  int n_;
  int skew_;
  Semiring sr_;
  Fold fold_;
  std::function<void(const MacEvent&)> trace_;
};

void check_inputs(const Matrix& a, const Matrix& b) {
  if (a.n() == 0) throw std::invalid_argument("systolic: n must be positive");
  if (a.n() != b.n() || a.semiring() != b.semiring())
    throw std::invalid_argument("systolic: dimension or semiring mismatch");
}

}  // namespace

ProgramSpec systolic_program(const Matrix& a, const Matrix& b, const SystolicOptions& options) {
  check_inputs(a, b);
  const int n = a.n();
  auto kernel = std::make_shared<SystolicKernel>(n, a.semiring(), options.trace);
  ProgramSpec spec;
  spec.name = "systolic";
  spec.load = [a, b](MeshState& mesh) {
    if (mesh.dim() != 2 || mesh.edge() < a.n())
      throw std::invalid_argument("systolic: mesh too small");
    for (int p = 0; p < a.n(); ++p)
      for (int q = 0; q < a.n(); ++q) {
        const Word regs[] = {a.at(p, q), b.at(p, q), a.semiring().zero()};
        mesh.set_registers(mesh.index({p, q, 0}), regs);
      }
  };
  spec.program = [kernel](ProcessorContext& ctx) { (*kernel)(ctx); };
  spec.halt = [](const MeshState& mesh) {
    for (std::size_t i = 0; i < mesh.size(); ++i)
      if (mesh.phase_tag(i) != kDone) return false;
    return true;
  };
  return spec;
}

Matrix systolic_product(const MeshState& mesh, int n, Semiring sr) {
  Matrix c(n, sr);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) c.at(p, q) = mesh.registers(mesh.index({p, q, 0}))[kC];
  return c;
}

SystolicResult systolic_matmul_2d(const Matrix& a, const Matrix& b, const SystolicOptions& options) {
  check_inputs(a, b);
  const int n = a.n();
  MeshState mesh({.dim = 2, .edge = n, .word_budget = options.word_budget});
  auto spec = systolic_program(a, b, options);
  spec.load(mesh);
  SystolicKernel kernel(n, a.semiring(), options.trace);
  std::size_t cursor = 0;
  auto halt = [&cursor](const MeshState& m) {
    while (cursor < m.size() && m.phase_tag(cursor) == kDone) ++cursor;
    return cursor == m.size();
  };
  auto ledger = run_program(mesh, kernel, halt, "systolic");
  return {systolic_product(mesh, n, a.semiring()), std::move(ledger)};
}

}  // namespace meshgrain
