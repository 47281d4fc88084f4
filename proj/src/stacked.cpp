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

#include "meshgrain/stacked.hpp"

#include <algorithm>
#include <cstdlib>

namespace meshgrain {

StackedLayout StackedLayout::for_edge(int edge) {
  if (edge < 1) throw std::invalid_argument("stacked: edge must be positive");
  int m = 1;
  while (m * m * m < edge) ++m;
  return {edge, m, m * m, m * m * m};
}

namespace {

struct Layer {
  int z = 0;
  MeshState mesh;
  std::vector<int> margin;           // distance from own subsquare, -1 outside region
  std::vector<std::size_t> region;   // cells simulated here
  std::vector<std::size_t> own;      // cells of the own subsquare
};

int band_distance(int u, int lo, int s) {
  if (u < lo) return lo - u;
  if (u >= lo + s) return u - (lo + s) + 1;
  return 0;
}

class Simulator {
 public:
  Simulator(const ProgramSpec& spec, const MeshConfig& config, const StackedOptions& options)
      : spec_(spec),
        config_(config),
        lay_(StackedLayout::for_edge(config.edge)),
        budget_(options.word_budget_3d > 0 ? options.word_budget_3d : 9 * config.word_budget),
        global_(config) {
    spec_.load(global_);
    const int s = lay_.s, e = config.edge;
    layers_.reserve(static_cast<std::size_t>(s));
    for (int z = 0; z < s; ++z) {
      Layer layer{z, MeshState(config), std::vector<int>(global_.size(), -1), {}, {}};
      const int ox = (z / lay_.m) * s, oy = (z % lay_.m) * s;
      if (ox < e && oy < e) {
        for (int v = std::max(0, oy - s); v < std::min(e, oy + 2 * s); ++v)
          for (int u = std::max(0, ox - s); u < std::min(e, ox + 2 * s); ++u) {
            const auto i = global_.index({u, v, 0});
            const int d = std::max(band_distance(u, ox, s), band_distance(v, oy, s));
            layer.margin[i] = d;
            layer.region.push_back(i);
            if (d == 0) {
              layer.own.push_back(i);
              layer.mesh.copy_processor_from(global_, i);
            }
          }
      }
      layers_.push_back(std::move(layer));
    }
    link_load_.assign(static_cast<std::size_t>(s) * s * s * 4, 0);
    column_up_.assign(static_cast<std::size_t>(s) * s * (s + 1), 0);
    column_down_.assign(column_up_.size(), 0);
  }

  StackedResult run() {
    const auto cap = config_.step_cap;
    const int s = lay_.s;
    check_budget();
    while (!spec_.halt(global_)) {
      ++major_;
      exchange();
      for (int t = 1; t <= s; ++t) {
        if (t > 1 && spec_.halt(global_)) break;
        if (steps_2d_ >= cap) throw NonHalting(cap);
        sub_step(t);
        ++steps_2d_;
        assemble();
        check_budget();
      }
    }
    StackedResult out{global_, {}, lay_, steps_2d_, major_, max_cells()};
    out.ledger.charge("simulate", sim_steps_, sim_comm_, sim_words_, peak_);
    out.ledger.charge("exchange", ex_steps_, ex_steps_, ex_words_, peak_);
    return out;
  }

 private:
  std::size_t column(std::size_t cell) const {
    const Coord c = global_.coords(cell);
    return static_cast<std::size_t>(lay_.column_x(c[0])) * lay_.s +
           static_cast<std::size_t>(lay_.column_y(c[1]));
  }

  static int pending_words(const MeshState& mesh, std::size_t i) {
    int n = 0;
    for (int d = 0; d < 4; ++d) n += mesh.pending(i, static_cast<Dir>(d)).has_value();
    return n;
  }

  // Ghost cells travel along processor columns only.
  void exchange() {
    const auto s = static_cast<std::size_t>(lay_.s);
    std::fill(column_up_.begin(), column_up_.end(), 0);
    std::fill(column_down_.begin(), column_down_.end(), 0);
    std::uint64_t dmax = 0, words = 0;
    for (auto& layer : layers_) {
      for (auto i : layer.region) {
        if (layer.margin[i] == 0) continue;
        const Coord c = global_.coords(i);
        const auto& owner = layers_[static_cast<std::size_t>(lay_.layer_of(c[0], c[1]))];
        layer.mesh.copy_processor_from(owner.mesh, i);
        const auto w = static_cast<std::int64_t>(owner.mesh.registers(i).size()) + 1 +
                       pending_words(owner.mesh, i);
        const auto base = column(i) * (s + 1);
        const auto from = static_cast<std::size_t>(owner.z), to = static_cast<std::size_t>(layer.z);
        auto& diff = from < to ? column_up_ : column_down_;
        diff[base + std::min(from, to)] += w;
        diff[base + std::max(from, to)] -= w;
        const auto dist = static_cast<std::uint64_t>(std::max(from, to) - std::min(from, to));
        dmax = std::max(dmax, dist);
        words += static_cast<std::uint64_t>(w) * dist;
      }
    }
    std::int64_t lmax = 0;
    for (const auto* diff : {&column_up_, &column_down_})
      for (std::size_t col = 0; col < s * s; ++col) {
        std::int64_t run = 0;
        for (std::size_t z = 0; z < s; ++z) {
          run += (*diff)[col * (s + 1) + z];
          lmax = std::max(lmax, run);
        }
      }
    if (words > 0) ex_steps_ += dmax + static_cast<std::uint64_t>(lmax) - 1;
    ex_words_ += words;
  }

  void sub_step(int t) {
    const int s = lay_.s;
    const int limit = s - t;
    const int next_limit = t < s ? s - t - 1 : s - 1;
    std::fill(link_load_.begin(), link_load_.end(), 0);
    std::uint64_t crossing = 0;
    StepLedger scratch;
    for (auto& layer : layers_) {
      if (layer.region.empty()) continue;
      const auto& margin = layer.margin;
      auto active = [&margin, limit](std::size_t i) { return margin[i] >= 0 && margin[i] <= limit; };
      layer.mesh.step(spec_.program, active, scratch);
      for (auto i : layer.region) {
        if (margin[i] > limit) continue;
        const auto src_col = column(i);
        for (int d = 0; d < 4; ++d) {
          if (!layer.mesh.pending(i, static_cast<Dir>(d))) continue;
          const auto j = layer.mesh.neighbor(i, static_cast<Dir>(d));
          if (!j || margin[*j] < 0 || margin[*j] > next_limit) continue;
          const auto dst_col = column(*j);
          if (dst_col == src_col) continue;
          ++crossing;
          // Two columns that hold 2-d neighbours are adjacent in x or y.
          const int slot = dst_col == src_col + 1 ? 0 : dst_col + 1 == src_col ? 1
                           : dst_col > src_col ? 2 : 3;
          ++link_load_[((static_cast<std::size_t>(layer.z) * s * s) + src_col) * 4 +
                       static_cast<std::size_t>(slot)];
        }
      }
    }
    const int load = *std::max_element(link_load_.begin(), link_load_.end());
    sim_steps_ += static_cast<std::uint64_t>(std::max(1, load));
    sim_comm_ += static_cast<std::uint64_t>(load);
    sim_words_ += crossing;
  }

  void assemble() {
    for (const auto& layer : layers_)
      for (auto i : layer.own) global_.copy_processor_from(layer.mesh, i);
    global_.sync_clock(layers_.front().mesh);
  }

  void check_budget() {
    const auto s = static_cast<std::size_t>(lay_.s);
    std::vector<int> words(s * s);
    for (const auto& layer : layers_) {
      std::fill(words.begin(), words.end(), 3);
      for (auto i : layer.region) words[column(i)] += static_cast<int>(layer.mesh.registers(i).size());
      for (std::size_t col = 0; col < s * s; ++col) {
        peak_ = std::max(peak_, words[col]);
        if (words[col] > budget_) {
          const Coord at{static_cast<int>(col / s), static_cast<int>(col % s), layer.z};
          throw BudgetViolation(to_string(at, 3), steps_2d_, words[col], budget_);
        }
      }
    }
  }

  int max_cells() const {
    const auto s = static_cast<std::size_t>(lay_.s);
    int best = 0;
    std::vector<int> cells(s * s);
    for (const auto& layer : layers_) {
      std::fill(cells.begin(), cells.end(), 0);
      for (auto i : layer.region) best = std::max(best, ++cells[column(i)]);
    }
    return best;
  }

  const ProgramSpec& spec_;
  MeshConfig config_;
  StackedLayout lay_;
  int budget_;
  MeshState global_;
  std::vector<Layer> layers_;
  std::vector<int> link_load_;
  std::vector<std::int64_t> column_up_, column_down_;
  std::uint64_t steps_2d_ = 0, major_ = 0;
  std::uint64_t sim_steps_ = 0, sim_comm_ = 0, sim_words_ = 0;
  std::uint64_t ex_steps_ = 0, ex_words_ = 0;
  int peak_ = 0;
};

}  // namespace

StackedResult simulate_2d_on_3d(const ProgramSpec& spec, const MeshConfig& config2d,
                                const StackedOptions& options) {
  if (config2d.dim != 2) throw std::invalid_argument("stacked: needs a 2-d program");
  config2d.validate();
  return Simulator(spec, config2d, options).run();
}

}  // namespace meshgrain
