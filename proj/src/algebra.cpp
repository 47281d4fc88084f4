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

#include "meshgrain/algebra.hpp"

#include <bit>

namespace meshgrain {

Semiring Semiring::parse(std::string_view name) {
  if (name == "plusmul") return plusmul();
  if (name == "minplus") return minplus();
  if (name == "maxmin") return maxmin();
  if (name == "boolor") return boolor();
  throw std::invalid_argument("unknown semiring '" + std::string(name) + "'");
}

std::string_view Semiring::name() const {
  switch (kind) {
    case SemiringKind::PlusMul: return "plusmul";
    case SemiringKind::MinPlus: return "minplus";
    case SemiringKind::MaxMin: return "maxmin";
    case SemiringKind::BoolOr: return "boolor";
  }
  return "?";
}

Word Semiring::negate(Word a) const {
  if (!is_ring()) throw std::logic_error("semiring has no additive inverse");
  return static_cast<Word>(0ULL - static_cast<std::uint64_t>(a));
}

// ---------------------------------------------------------------------------

Matrix::Matrix(int n, Semiring sr)
    : n_(n), sr_(sr), e_(static_cast<std::size_t>(n) * n, sr.zero()) {
  if (n < 0) throw std::invalid_argument("matrix dimension must be non-negative");
}

Matrix::Matrix(int n, Semiring sr, std::vector<Word> entries)
    : n_(n), sr_(sr), e_(std::move(entries)) {
  if (e_.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("matrix needs n*n entries");
}

Matrix Matrix::identity(int n, Semiring sr) {
  Matrix m(n, sr);
  for (int i = 0; i < n; ++i) m.at(i, i) = sr.one();
  return m;
}

Matrix Matrix::crop(int size) const { return block(0, 0, size); }

Matrix Matrix::padded(int size) const {
  Matrix out(size, sr_);
  out.put_block(0, 0, *this);
  return out;
}

Matrix Matrix::block(int row0, int col0, int size) const {
  Matrix out(size, sr_);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) out.at(i, j) = at(row0 + i, col0 + j);
  return out;
}

void Matrix::put_block(int row0, int col0, const Matrix& b) {
  for (int i = 0; i < b.n(); ++i)
    for (int j = 0; j < b.n(); ++j) at(row0 + i, col0 + j) = b.at(i, j);
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (a.n() != b.n() || a.semiring() != b.semiring())
    throw std::invalid_argument("add: dimension or semiring mismatch");
  Matrix c(a.n(), a.semiring());
  const auto sr = a.semiring();
  for (std::size_t i = 0; i < c.entries().size(); ++i)
    c.entries()[i] = sr.plus(a.entries()[i], b.entries()[i]);
  return c;
}

Matrix serial_matmul(const Matrix& a, const Matrix& b) {
  if (a.n() != b.n()) throw std::invalid_argument("serial_matmul: dimension mismatch");
  if (a.semiring() != b.semiring()) throw std::invalid_argument("serial_matmul: semiring mismatch");
  const int n = a.n();
  const auto sr = a.semiring();
  Matrix c(n, sr);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Word acc = sr.zero();
      for (int k = 0; k < n; ++k) acc = sr.plus(acc, sr.times(a.at(i, k), b.at(k, j)));
      c.at(i, j) = acc;
    }
  return c;
}

// ---------------------------------------------------------------------------
// Strassen

namespace {

Matrix sub(const Matrix& a, const Matrix& b) {
  Matrix c(a.n(), a.semiring());
  for (std::size_t i = 0; i < c.entries().size(); ++i)
    c.entries()[i] = static_cast<Word>(static_cast<std::uint64_t>(a.entries()[i]) -
                                       static_cast<std::uint64_t>(b.entries()[i]));
  return c;
}

Matrix strassen_rec(const Matrix& a, const Matrix& b, int threshold, StrassenStats& stats) {
  const int n = a.n();
  if (n <= threshold || n == 1) {
    ++stats.base_multiplications;
    return serial_matmul(a, b);
  }
  ++stats.splits;
  const int h = n / 2;
  const Matrix a11 = a.block(0, 0, h), a12 = a.block(0, h, h), a21 = a.block(h, 0, h),
               a22 = a.block(h, h, h);
  const Matrix b11 = b.block(0, 0, h), b12 = b.block(0, h, h), b21 = b.block(h, 0, h),
               b22 = b.block(h, h, h);
  const Matrix m1 = strassen_rec(add(a11, a22), add(b11, b22), threshold, stats);
  const Matrix m2 = strassen_rec(add(a21, a22), b11, threshold, stats);
  const Matrix m3 = strassen_rec(a11, sub(b12, b22), threshold, stats);
  const Matrix m4 = strassen_rec(a22, sub(b21, b11), threshold, stats);
  const Matrix m5 = strassen_rec(add(a11, a12), b22, threshold, stats);
  const Matrix m6 = strassen_rec(sub(a21, a11), add(b11, b12), threshold, stats);
  const Matrix m7 = strassen_rec(sub(a12, a22), add(b21, b22), threshold, stats);
  Matrix c(n, a.semiring());
  c.put_block(0, 0, add(sub(add(m1, m4), m5), m7));
  c.put_block(0, h, add(m3, m5));
  c.put_block(h, 0, add(m2, m4));
  c.put_block(h, h, add(add(sub(m1, m2), m3), m6));
  return c;
}

}  // namespace

Matrix serial_strassen(const Matrix& a, const Matrix& b, int threshold, StrassenStats* stats) {
  if (!a.semiring().is_ring() || !b.semiring().is_ring())
    throw std::invalid_argument("serial_strassen: needs a ring (plusmul)");
  if (a.n() != b.n()) throw std::invalid_argument("serial_strassen: dimension mismatch");
  if (threshold < 1) throw std::invalid_argument("serial_strassen: threshold must be >= 1");
  const int n = a.n();
  if (n == 0) return Matrix(0, a.semiring());
  const int size = static_cast<int>(std::bit_ceil(static_cast<unsigned>(n)));
  StrassenStats local;
  Matrix c = strassen_rec(a.padded(size), b.padded(size), threshold, local);
  if (stats) *stats = local;
  return c.crop(n);
}

// ---------------------------------------------------------------------------

FloydWarshallResult floyd_warshall(const Matrix& w) {
  const auto sr = w.semiring();
  if (sr.kind != SemiringKind::MinPlus && sr.kind != SemiringKind::MaxMin)
    throw std::invalid_argument("floyd_warshall: needs minplus or maxmin");
  const int n = w.n();
  Matrix d = w;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      const Word dik = d.at(i, k);
      if (dik == sr.zero()) continue;
      for (int j = 0; j < n; ++j) d.at(i, j) = sr.plus(d.at(i, j), sr.times(dik, d.at(k, j)));
    }
  if (sr.kind == SemiringKind::MinPlus)
    for (int i = 0; i < n; ++i)
      if (d.at(i, i) < 0) throw std::domain_error("floyd_warshall: negative cycle");

  FloydWarshallResult out{d, std::vector<int>(static_cast<std::size_t>(n) * n, kNoWitness)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || d.at(i, j) == sr.zero()) continue;
      if (sr.plus(w.at(i, j), d.at(i, j)) == w.at(i, j)) continue;  // direct edge is optimal
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (sr.times(d.at(i, k), d.at(k, j)) == d.at(i, j)) {
          out.witness[static_cast<std::size_t>(i) * n + j] = k;
          break;
        }
      }
    }
  return out;
}

Matrix reachability_oracle(const Matrix& adj) {
  const int n = adj.n();
  Matrix out(n, Semiring::boolor());
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    out.at(s, s) = 1;
    stack.assign(1, s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v)
        if (adj.at(u, v) != 0 && out.at(s, v) == 0) {
          out.at(s, v) = 1;
          stack.push_back(v);
        }
    }
  }
  return out;
}

}  // namespace meshgrain
