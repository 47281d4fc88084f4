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

#include "meshgrain/scaling.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "meshgrain/maze.hpp"
#include "meshgrain/meshmul.hpp"
#include "meshgrain/paths.hpp"
#include "meshgrain/stacked.hpp"
#include "meshgrain/systolic.hpp"

namespace meshgrain {

Matrix random_matrix(int n, Semiring sr, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix m(n, sr);
  for (auto& e : m.entries()) {
    switch (sr.kind) {
      case SemiringKind::PlusMul: e = static_cast<Word>(rng()); break;
      case SemiringKind::MinPlus: e = rng() % 5 == 0 ? kInf : static_cast<Word>(rng() % 1000); break;
      case SemiringKind::MaxMin: e = rng() % 5 == 0 ? kNegInf : static_cast<Word>(rng() % 2001) - 1000; break;
      case SemiringKind::BoolOr: e = static_cast<Word>(rng() % 2); break;
    }
  }
  return m;
}

Matrix random_graph(int n, Semiring sr, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<Word> weight(1, 100);
  Matrix m(n, sr);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        m.at(i, j) = sr.kind == SemiringKind::MinPlus ? 0 : sr.kind == SemiringKind::MaxMin ? kInf : 1;
        continue;
      }
      if (coin(rng) < density) m.at(i, j) = sr.kind == SemiringKind::BoolOr ? 1 : weight(rng);
    }
  return m;
}

const std::vector<std::string>& scaling_algorithms() {
  static const std::vector<std::string> algos{"systolic2d", "sim2d-on-3d", "alg-a", "alg-b",
                                              "apsp",       "closure",     "maze2d", "maze3d"};
  return algos;
}

namespace {

std::uint64_t cube(std::uint64_t e) { return e * e * e; }

void fill(ScalingRow& row, const StepLedger& l) {
  row.comm_steps = l.comm_steps;
  row.compute_steps = l.compute_steps;
  row.total_steps = l.total_steps;
}

ScalingRow measure(const std::string& algo, int n, double alpha, std::uint64_t seed) {
  ScalingRow row{algo, n, alpha, 0, 0, 0, 0, seed};
  const auto ring = Semiring::plusmul();
  if (algo == "systolic2d" || algo == "sim2d-on-3d") {
    row.alpha = 2;
    const auto a = random_matrix(n, ring, seed), b = random_matrix(n, ring, seed + 1);
    if (algo == "systolic2d") {
      fill(row, systolic_matmul_2d(a, b).ledger);
      row.processors = static_cast<std::uint64_t>(n) * n;
    } else {
      auto r = simulate_2d_on_3d(systolic_program(a, b), {.dim = 2, .edge = n});
      fill(row, r.ledger);
      row.processors = cube(static_cast<std::uint64_t>(r.layout.s));
    }
  } else if (algo == "alg-a") {
    auto r = general_matmul_3d(random_matrix(n, ring, seed), random_matrix(n, ring, seed + 1), alpha);
    fill(row, r.ledger);
    row.processors = cube(static_cast<std::uint64_t>(r.plan.edge));
  } else if (algo == "alg-b") {
    row.alpha = 2;
    const auto sched = plan_alg_b(std::bit_ceil(static_cast<std::uint64_t>(n)), 7, 2, 1);
    fill(row, ring_matmul_3d(random_matrix(n, ring, seed), random_matrix(n, ring, seed + 1), sched).ledger);
    row.processors = cube(static_cast<std::uint64_t>(sched.mesh_edge));
  } else if (algo == "apsp") {
    auto r = apsp(random_graph(n, Semiring::minplus(), 0.3, seed), {.alpha = alpha});
    fill(row, r.ledger);
    row.processors = cube(static_cast<std::uint64_t>(
        plan_alg_a(static_cast<int>(std::bit_ceil(static_cast<unsigned>(n))), alpha).edge));
  } else if (algo == "closure") {
    row.alpha = 2;
    auto r = transitive_closure(random_graph(n, Semiring::boolor(), 2.0 / n, seed), ClosureMode::Ring);
    fill(row, r.ledger);
    row.processors = cube(static_cast<std::uint64_t>(
        plan_alg_b(std::bit_ceil(static_cast<std::uint64_t>(n)), 7, 2, 1).mesh_edge));
  } else if (algo == "maze2d" || algo == "maze3d") {
    const bool two = algo == "maze2d";
    auto r = two ? solve_maze_2d(random_maze(2, n, 0.6, seed), alpha)
                 : solve_maze_3d(random_maze(3, n, 0.5, seed), alpha);
    row.comm_steps = row.compute_steps = row.total_steps = r.charged_time;
    row.processors = r.mesh_size_used;
  } else {
    throw std::invalid_argument("scaling: unknown algorithm '" + algo + "'");
  }
  return row;
}

}  // namespace

std::vector<ScalingRow> run_scaling(const std::string& algo, const std::vector<int>& sizes,
                                    double alpha, int seeds, std::uint64_t first_seed,
                                    std::ostream& notes) {
  const auto& known = scaling_algorithms();
  if (std::find(known.begin(), known.end(), algo) == known.end())
    throw std::invalid_argument("scaling: unknown algorithm '" + algo + "'");
  if (seeds < 1) throw std::invalid_argument("scaling: need at least one seed");
  std::vector<int> sorted(sizes);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<ScalingRow> rows;
  for (int n : sorted) {
    std::vector<ScalingRow> batch;
    try {
      for (int s = 0; s < seeds; ++s) batch.push_back(measure(algo, n, alpha, first_seed + static_cast<std::uint64_t>(s)));
    } catch (const std::exception& e) {
      notes << "skipping n=" << n << ": " << e.what() << '\n';
      continue;
    }
    rows.insert(rows.end(), batch.begin(), batch.end());
  }
  return rows;
}

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string emit_scaling_csv(const std::vector<ScalingRow>& rows) {
  std::ostringstream out;
  out << kScalingHeader << '\n';
  for (const auto& r : rows)
    out << r.algo << ',' << r.n << ',' << format_real(r.alpha) << ',' << r.comm_steps << ','
        << r.compute_steps << ',' << r.total_steps << ',' << r.processors << ',' << r.seed << '\n';
  return out.str();
}

namespace {

template <class T>
T parse_field(std::string_view s, std::size_t line) {
  T v{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw std::invalid_argument("scaling csv line " + std::to_string(line) + ": bad field '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::vector<ScalingRow> parse_scaling_csv(std::string_view text) {
  std::vector<ScalingRow> rows;
  std::size_t line_no = 0;
  bool header = false;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      if (line != kScalingHeader) throw std::invalid_argument("scaling csv: unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    for (std::size_t pos = 0;;) {
      auto comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 8)
      throw std::invalid_argument("scaling csv line " + std::to_string(line_no) + ": expected 8 fields");
    rows.push_back({std::string(f[0]), parse_field<int>(f[1], line_no), parse_field<double>(f[2], line_no),
                    parse_field<std::uint64_t>(f[3], line_no), parse_field<std::uint64_t>(f[4], line_no),
                    parse_field<std::uint64_t>(f[5], line_no), parse_field<std::uint64_t>(f[6], line_no),
                    parse_field<std::uint64_t>(f[7], line_no)});
  }
  if (!header) throw std::invalid_argument("scaling csv: missing header");
  return rows;
}

ExponentFit fit_exponent(const std::vector<ScalingRow>& rows) {
  std::set<int> sizes;
  for (const auto& r : rows) {
    if (r.n < 1 || r.total_steps < 1) throw std::invalid_argument("fit: sizes and steps must be positive");
    sizes.insert(r.n);
  }
  if (sizes.size() < 2) throw std::invalid_argument("fit: need at least two distinct sizes");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.n)), y = std::log(static_cast<double>(r.total_steps));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  ExponentFit fit;
  fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / k;
  return fit;
}

}  // namespace meshgrain
