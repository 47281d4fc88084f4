// Shared generators for the test suites.
#pragma once

#include <random>

#include "meshgrain/algebra.hpp"

namespace meshgrain::testing {

/// Random entries suited to each semiring: full 64-bit words for plusmul,
/// small weights with some INF for minplus, signed levels for maxmin, bits
/// for boolor.
inline Matrix random_matrix(int n, Semiring sr, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix m(n, sr);
  for (auto& e : m.entries()) {
    switch (sr.kind) {
      case SemiringKind::PlusMul: e = static_cast<Word>(rng()); break;
      case SemiringKind::MinPlus: e = rng() % 5 == 0 ? kInf : static_cast<Word>(rng() % 1000); break;
      case SemiringKind::MaxMin: e = rng() % 5 == 0 ? kNegInf : static_cast<Word>(rng() % 2001) - 1000; break;
      case SemiringKind::BoolOr: e = static_cast<Word>(rng() % 3 == 0); break;
    }
  }
  return m;
}

/// Weighted digraph for path problems: diagonal at the semiring's one().
inline Matrix random_graph(int n, Semiring sr, double density, std::uint64_t seed,
                           Word lo = 1, Word hi = 100) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<Word> weight(lo, hi);
  Matrix m(n, sr);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        m.at(i, j) = sr.kind == SemiringKind::BoolOr ? 0 : sr.one();
        continue;
      }
      if (coin(rng) < density) m.at(i, j) = sr.kind == SemiringKind::BoolOr ? 1 : weight(rng);
    }
  return m;
}

inline const Semiring kAllSemirings[] = {Semiring::plusmul(), Semiring::minplus(),
                                         Semiring::maxmin(), Semiring::boolor()};

}  // namespace meshgrain::testing
