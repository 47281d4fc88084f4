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
 * @file algebra.hpp
 * @brief Semirings over machine words, dense matrices, and serial oracles.
 *
 * Four semirings are shipped:
 *   plusmul    (+, *) mod 2^64, a commutative ring
 *   minplus    (min, +) with INF = 2^62 absorbing under saturating add
 *   maxmin     (max, min) with NEG_INF = -2^62 as the additive identity
 *   boolor     (or, and) on {0, 1}
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

inline constexpr Word kInf = Word{1} << 62;
inline constexpr Word kNegInf = -kInf;

enum class SemiringKind : std::uint8_t { PlusMul, MinPlus, MaxMin, BoolOr };

struct Semiring {
  SemiringKind kind = SemiringKind::PlusMul;

  static constexpr Semiring plusmul() { return {SemiringKind::PlusMul}; }
  static constexpr Semiring minplus() { return {SemiringKind::MinPlus}; }
  static constexpr Semiring maxmin() { return {SemiringKind::MaxMin}; }
  static constexpr Semiring boolor() { return {SemiringKind::BoolOr}; }
  /// Accepts plusmul, minplus, maxmin, boolor. Throws std::invalid_argument.
  static Semiring parse(std::string_view name);

  std::string_view name() const;
  bool is_ring() const { return kind == SemiringKind::PlusMul; }
  std::optional<Word> plus_identity() const { return zero(); }

  /// Identity of plus.
  constexpr Word zero() const {
    switch (kind) {
      case SemiringKind::PlusMul: return 0;
      case SemiringKind::MinPlus: return kInf;
      case SemiringKind::MaxMin: return kNegInf;
      case SemiringKind::BoolOr: return 0;
    }
    return 0;
  }
  /// Identity of times.
  constexpr Word one() const {
    switch (kind) {
      case SemiringKind::PlusMul: return 1;
      case SemiringKind::MinPlus: return 0;
      case SemiringKind::MaxMin: return kInf;
      case SemiringKind::BoolOr: return 1;
    }
    return 1;
  }

  constexpr Word plus(Word a, Word b) const {
    switch (kind) {
      case SemiringKind::PlusMul:
        return static_cast<Word>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
      case SemiringKind::MinPlus: return a < b ? a : b;
      case SemiringKind::MaxMin: return a > b ? a : b;
      case SemiringKind::BoolOr: return a | b;
    }
    return 0;
  }

  constexpr Word times(Word a, Word b) const {
    switch (kind) {
      case SemiringKind::PlusMul:
        return static_cast<Word>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
      case SemiringKind::MinPlus: {
        if (a >= kInf || b >= kInf) return kInf;
        const Word s = a + b;
        return s >= kInf ? kInf : (s <= kNegInf ? kNegInf + 1 : s);
      }
      case SemiringKind::MaxMin: return a < b ? a : b;
      case SemiringKind::BoolOr: return a & b;
    }
    return 0;
  }

  /// Additive inverse; only defined for the ring.
  Word negate(Word a) const;

  constexpr bool operator==(const Semiring&) const = default;
};

/// Dense n x n matrix, row-major, tagged with its semiring.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int n, Semiring sr);                       // filled with sr.zero()
  Matrix(int n, Semiring sr, std::vector<Word> entries);

  static Matrix identity(int n, Semiring sr);

  int n() const { return n_; }
  Semiring semiring() const { return sr_; }
  Word& at(int i, int j) { return e_[static_cast<std::size_t>(i) * n_ + j]; }
  Word at(int i, int j) const { return e_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<Word>& entries() const { return e_; }
  std::vector<Word>& entries() { return e_; }

  /// Top-left `size` x `size` block (size <= n).
  Matrix crop(int size) const;
  /// Embeds into `size` x `size`, padding with sr.zero() (diagonal of the
  /// padding is left at zero too; padded rows never reach real entries).
  Matrix padded(int size) const;
  Matrix block(int row0, int col0, int size) const;
  void put_block(int row0, int col0, const Matrix& b);

  bool operator==(const Matrix&) const = default;

 private:
  int n_ = 0;
  Semiring sr_{};
  std::vector<Word> e_;
};

/// Entrywise plus.
Matrix add(const Matrix& a, const Matrix& b);

/// Triple-loop product. Throws std::invalid_argument on n or semiring mismatch.
Matrix serial_matmul(const Matrix& a, const Matrix& b);

struct StrassenStats {
  std::uint64_t base_multiplications = 0;  // leaf products of size <= threshold
  std::uint64_t splits = 0;                // recursive 7-way expansions
};

/// Strassen over the wrapping ring; inputs padded to a power of two.
/// Blocks of dimension <= threshold are multiplied naively.
Matrix serial_strassen(const Matrix& a, const Matrix& b, int threshold = 1,
                       StrassenStats* stats = nullptr);

inline constexpr int kNoWitness = -1;

struct FloydWarshallResult {
  Matrix dist;
  /// Smallest intermediate vertex k with dist(i,k) (x) dist(k,j) == dist(i,j)
  /// whenever the direct entry is worse; kNoWitness otherwise.
  std::vector<int> witness;
  int mid(int i, int j) const { return witness[static_cast<std::size_t>(i) * dist.n() + j]; }
};

/// In-place F-W update pattern over minplus (shortest) or maxmin (bottleneck).
/// Throws std::domain_error on a negative cycle.
FloydWarshallResult floyd_warshall(const Matrix& w);

/// Reflexive-transitive closure by depth-first search from each vertex.
Matrix reachability_oracle(const Matrix& adj);

}  // namespace meshgrain
