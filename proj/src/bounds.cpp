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

#include "meshgrain/bounds.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace meshgrain {

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const auto g = std::gcd(n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

Rational Rational::parse(std::string_view text) {
  const std::string s(text);
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      std::size_t used = 0, used2 = 0;
      const auto n = std::stoll(s.substr(0, slash), &used);
      const auto d = std::stoll(s.substr(slash + 1), &used2);
      if (used != slash || used2 != s.size() - slash - 1) throw std::invalid_argument(s);
      return {n, d};
    }
    const auto dot = s.find('.');
    if (dot == std::string::npos) {
      std::size_t used = 0;
      const auto n = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {n, 1};
    }
    const std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const auto places = s.size() - dot - 1;
    if (places > 12) throw std::invalid_argument(s);
    std::size_t used = 0;
    const auto n = std::stoll(digits, &used);
    if (used != digits.size()) throw std::invalid_argument(s);
    std::int64_t d = 1;
    for (std::size_t i = 0; i < places; ++i) d *= 10;
    return {n, d};
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }

std::string Exponent::str() const {
  if (exact) return q.str();
  std::ostringstream os;
  os.precision(9);
  os << approx;
  return os.str();
}

std::string_view to_string(Binding b) {
  switch (b) {
    case Binding::Diameter: return "diameter";
    case Binding::Speedup: return "speedup";
    case Binding::Tie: return "tie";
  }
  return "?";
}

namespace {

bool pow2(std::uint64_t x) { return x >= 1 && std::has_single_bit(x); }

Exponent exact(Rational q) { return {true, q, q.value()}; }
Exponent real(double v) { return {false, {}, v}; }

std::uint64_t ceil_root(std::uint64_t size, int dim) {
  auto e = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<long double>(size), 1.0L / dim)));
  auto power = [dim](std::uint64_t x) {
    long double p = 1;
    for (int i = 0; i < dim; ++i) p *= static_cast<long double>(x);
    return p;
  };
  while (power(e) < static_cast<long double>(size)) ++e;
  while (e > 1 && power(e - 1) >= static_cast<long double>(size)) --e;
  return std::max<std::uint64_t>(e, 1);
}

}  // namespace

BoundReport bounds(std::uint64_t n, int dim, std::optional<std::uint64_t> size,
                   std::optional<Rational> alpha) {
  if (n < 1) throw std::invalid_argument("bounds: n must be positive");
  if (dim != 2 && dim != 3) throw std::invalid_argument("bounds: dim must be 2 or 3");
  if (size && alpha) throw std::invalid_argument("bounds: give a size or an alpha, not both");
  if (size && *size < 1) throw std::invalid_argument("bounds: size must be positive");

  BoundReport r;
  r.n = n;
  r.dim = dim;
  const double ln = std::log(static_cast<double>(n));
  const double n3 = std::pow(static_cast<double>(n), 3);
  if (alpha) {
    r.mesh_size = static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(n), alpha->value()) - 1e-9));
    r.size_exponent = exact(*alpha);
  } else {
    r.mesh_size = size ? *size : n * n;
    if (pow2(n) && pow2(r.mesh_size) && n > 1)
      r.size_exponent = exact(Rational(std::countr_zero(r.mesh_size), std::countr_zero(n)));
    else if (!size)
      r.size_exponent = exact(Rational(2));
    else
      r.size_exponent = real(n > 1 ? std::log(static_cast<double>(r.mesh_size)) / ln : 0);
  }
  const std::uint64_t edge = ceil_root(r.mesh_size, dim);
  r.diameter_time = static_cast<std::uint64_t>(dim) * (edge - 1);
  r.speedup_time = static_cast<std::uint64_t>(std::ceil(n3 / static_cast<double>(r.mesh_size) - 1e-9));

  if (r.size_exponent.exact) {
    r.diameter_exponent = exact(r.size_exponent.q / Rational(dim));
    r.speedup_exponent = exact(Rational(3) - r.size_exponent.q);
    const auto cmp = r.diameter_exponent.q <=> r.speedup_exponent.q;
    r.binding = cmp == 0 ? Binding::Tie : cmp > 0 ? Binding::Diameter : Binding::Speedup;
  } else {
    r.diameter_exponent = real(r.size_exponent.approx / dim);
    r.speedup_exponent = real(3 - r.size_exponent.approx);
    const double diff = r.diameter_exponent.approx - r.speedup_exponent.approx;
    r.binding = std::abs(diff) <= 1e-9 ? Binding::Tie : diff > 0 ? Binding::Diameter : Binding::Speedup;
  }
  r.optimal_alpha = Rational(3 * dim, dim + 1);
  r.optimal_time_exponent = Rational(3, dim + 1);
  r.ring_exponent = Rational(2, dim);
  return r;
}

std::string BoundReport::to_key_value() const {
  std::ostringstream os;
  os << "n=" << n << '\n'
     << "dim=" << dim << '\n'
     << "mesh_size=" << mesh_size << '\n'
     << "diameter_time=" << diameter_time << '\n'
     << "speedup_time=" << speedup_time << '\n'
     << "size_exponent=" << size_exponent.str() << '\n'
     << "diameter_exponent=" << diameter_exponent.str() << '\n'
     << "speedup_exponent=" << speedup_exponent.str() << '\n'
     << "binding=" << to_string(binding) << '\n'
     << "optimal_alpha=" << optimal_alpha.str() << '\n'
     << "optimal_time_exponent=" << optimal_time_exponent.str() << '\n'
     << "ring_exponent=" << ring_exponent.str() << '\n';
  return os.str();
}

}  // namespace meshgrain
