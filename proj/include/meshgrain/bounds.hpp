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

// Lower bounds for matrix multiplication on d-dimensional meshes:
// the communication diameter of the mesh and linear speedup of n^3 work.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace meshgrain {

/// Exact fraction, always normalized (den > 0, gcd 1).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);
  /// "9/4", "2.25", "2". Throws std::invalid_argument.
  static Rational parse(std::string_view text);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  friend bool operator==(const Rational&, const Rational&) = default;
  friend auto operator<=>(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den <=> static_cast<__int128>(b.num) * a.den;
  }
};

/// A growth exponent in n: exact when n and the mesh size are powers of 2.
struct Exponent {
  bool exact = true;
  Rational q;
  double approx = 0;

  std::string str() const;
};

enum class Binding { Diameter, Speedup, Tie };
std::string_view to_string(Binding b);

struct BoundReport {
  std::uint64_t n = 0;
  int dim = 3;
  std::uint64_t mesh_size = 0;
  std::uint64_t diameter_time = 0;  // dim * (edge - 1)
  std::uint64_t speedup_time = 0;   // ceil(n^3 / mesh_size)
  Exponent size_exponent;           // log_n mesh_size
  Exponent diameter_exponent;
  Exponent speedup_exponent;
  Binding binding = Binding::Tie;
  Rational optimal_alpha;           // 3d / (d + 1)
  Rational optimal_time_exponent;   // 3 / (d + 1)
  Rational ring_exponent;           // 2 / d: diameter of a size-n^2 mesh

  std::string to_key_value() const;
};

/// Either `size` (processors) or `alpha` (size n^alpha) may be given; with
/// neither the mesh holds one entry per processor (size n^2).
/// Throws std::invalid_argument on n < 1, dim not 2 or 3, or both given.
BoundReport bounds(std::uint64_t n, int dim, std::optional<std::uint64_t> size = {},
                   std::optional<Rational> alpha = {});

}  // namespace meshgrain
