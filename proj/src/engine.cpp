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

#include "meshgrain/engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>

namespace meshgrain {

std::string to_string(const Coord& c, int dim) {
  std::ostringstream os;
  os << '(';
  for (int a = 0; a < dim; ++a) os << (a ? "," : "") << c[a];
  os << ')';
  return os.str();
}

BudgetViolation::BudgetViolation(const std::string& where, std::uint64_t step, int words,
                                 int budget)
    : ConstraintViolation("BudgetViolation: processor " + where + " holds " +
                          std::to_string(words) + " words (budget " + std::to_string(budget) +
                          ") at step " + std::to_string(step)) {}

BandwidthViolation::BandwidthViolation(const std::string& where, std::uint64_t step,
                                       const std::string& why)
    : ConstraintViolation("BandwidthViolation: processor " + where + " at step " +
                          std::to_string(step) + ": " + why) {}

NonHalting::NonHalting(std::uint64_t cap)
    : ConstraintViolation("NonHalting: step cap of " + std::to_string(cap) + " exceeded") {}

std::uint64_t default_step_cap() {
  if (const char* env = std::getenv("MESHGRAIN_STEP_CAP")) {
    char* end = nullptr;
    auto v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 100'000'000ULL;
}

void MeshConfig::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("mesh dim must be 2 or 3");
  if (edge < 1) throw std::invalid_argument("mesh edge must be at least 1");
  if (word_budget < 4) throw std::invalid_argument("word budget must be at least 4");
  if (link_width != 1) throw std::invalid_argument("link width is fixed at 1 word");
}

std::size_t MeshConfig::processors() const {
  std::size_t p = 1;
  for (int a = 0; a < dim; ++a) p *= static_cast<std::size_t>(edge);
  return p;
}

// ---------------------------------------------------------------------------
// StepLedger

void StepLedger::then(const StepLedger& next) {
  comm_steps += next.comm_steps;
  compute_steps += next.compute_steps;
  total_steps += next.total_steps;
  peak_words = std::max(peak_words, next.peak_words);
  words_moved += next.words_moved;
  per_phase.insert(per_phase.end(), next.per_phase.begin(), next.per_phase.end());
}

void StepLedger::charge(std::string label, std::uint64_t steps, std::uint64_t comm,
                        std::uint64_t words, int peak) {
  comm_steps += std::min(comm, steps);
  compute_steps += steps;
  total_steps += steps;
  words_moved += words;
  peak_words = std::max(peak_words, peak);
  per_phase.emplace_back(std::move(label), steps);
}

StepLedger& StepLedger::as_phase(std::string label) {
  per_phase.clear();
  per_phase.emplace_back(std::move(label), total_steps);
  return *this;
}

StepLedger StepLedger::concurrent(std::span<const StepLedger> parts) {
  StepLedger out;
  std::vector<std::string> order;
  std::map<std::string, std::uint64_t> longest;
  for (const auto& p : parts) {
    out.comm_steps = std::max(out.comm_steps, p.comm_steps);
    out.compute_steps = std::max(out.compute_steps, p.compute_steps);
    out.total_steps = std::max(out.total_steps, p.total_steps);
    out.peak_words = std::max(out.peak_words, p.peak_words);
    out.words_moved += p.words_moved;
    for (const auto& [label, steps] : p.per_phase) {
      auto [it, fresh] = longest.emplace(label, steps);
      if (fresh) order.push_back(label);
      else it->second = std::max(it->second, steps);
    }
  }
  for (const auto& label : order) out.per_phase.emplace_back(label, longest[label]);
  return out;
}

std::string StepLedger::to_key_value() const {
  std::ostringstream os;
  os << "comm_steps=" << comm_steps << '\n'
     << "compute_steps=" << compute_steps << '\n'
     << "total_steps=" << total_steps << '\n'
     << "peak_words=" << peak_words << '\n'
     << "words_moved=" << words_moved << '\n';
  for (const auto& [label, steps] : per_phase) os << "phase." << label << '=' << steps << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// MeshState

MeshState::MeshState(MeshConfig config) : config_(config) {
  config_.validate();
  const std::size_t n = config_.processors();
  slots_ = static_cast<std::size_t>(config_.word_budget - config_.dim);
  regs_.assign(n * slots_, 0);
  count_.assign(n, 0);
  phase_.assign(n, 0);
  inbox_.assign(n * kMaxLinks, 0);
  inbox_mask_.assign(n, 0);
  outbox_.assign(n * kMaxLinks, 0);
  outbox_mask_.assign(n, 0);
  link_mask_.assign(n, 0);
  coord_.resize(n);
  const auto e = static_cast<std::size_t>(config_.edge);
  for (int a = 1; a < config_.dim; ++a) stride_[a] = stride_[a - 1] * e;
  for (std::size_t i = 0; i < n; ++i) {
    Coord c{0, 0, 0};
    for (int a = 0, rest = static_cast<int>(i); a < config_.dim; ++a, rest /= config_.edge)
      c[a] = rest % config_.edge;
    coord_[i] = c;
    std::uint8_t mask = 0;
    for (int a = 0; a < config_.dim; ++a) {
      if (c[a] > 0) mask |= 1U << (2 * a);
      if (c[a] + 1 < config_.edge) mask |= 1U << (2 * a + 1);
    }
    link_mask_[i] = mask;
  }
}

MeshState build_mesh(const MeshConfig& config) { return MeshState(config); }


std::size_t MeshState::index(const Coord& c) const {
  std::size_t idx = 0;
  for (int a = config_.dim - 1; a >= 0; --a)
    idx = idx * static_cast<std::size_t>(config_.edge) + static_cast<std::size_t>(c[a]);
  return idx;
}

bool MeshState::contains(const Coord& c) const {
  for (int a = 0; a < config_.dim; ++a)
    if (c[a] < 0 || c[a] >= config_.edge) return false;
  for (int a = config_.dim; a < 3; ++a)
    if (c[a] != 0) return false;
  return true;
}


int MeshState::degree(std::size_t index) const {
  int deg = 0;
  for (int d = 0; d < kMaxLinks; ++d) deg += (link_mask_[index] >> d) & 1U;
  return deg;
}

std::optional<Word> MeshState::pending(std::size_t index, Dir d) const {
  if (!((outbox_mask_[index] >> static_cast<int>(d)) & 1U)) return std::nullopt;
  return outbox_[index * kMaxLinks + static_cast<int>(d)];
}

std::string MeshState::where(std::size_t index) const {
  return to_string(coords(index), config_.dim);
}

void MeshState::push(std::size_t index, Word w) {
  if (count_[index] >= slots_)
    throw BudgetViolation(where(index), steps_, resident_words(index) + 1, config_.word_budget);
  regs_[index * slots_ + count_[index]++] = w;
}

void MeshState::set_registers(std::size_t index, std::span<const Word> words) {
  if (words.size() > slots_)
    throw BudgetViolation(where(index), steps_, config_.dim + static_cast<int>(words.size()),
                          config_.word_budget);
  std::copy(words.begin(), words.end(), regs_.begin() + static_cast<std::ptrdiff_t>(index * slots_));
  count_[index] = static_cast<std::uint32_t>(words.size());
}

void MeshState::copy_processor_from(const MeshState& other, std::size_t index) {
  count_[index] = other.count_[index];
  std::copy_n(other.regs_.begin() + static_cast<std::ptrdiff_t>(index * slots_), slots_,
              regs_.begin() + static_cast<std::ptrdiff_t>(index * slots_));
  phase_[index] = other.phase_[index];
  outbox_mask_[index] = other.outbox_mask_[index];
  std::copy_n(other.outbox_.begin() + static_cast<std::ptrdiff_t>(index * kMaxLinks), kMaxLinks,
              outbox_.begin() + static_cast<std::ptrdiff_t>(index * kMaxLinks));
}

bool MeshState::same_state(const MeshState& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (phase_[i] != other.phase_[i]) return false;
    auto a = registers(i);
    auto b = other.registers(i);
    if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) return false;
  }
  return true;
}

void ProcessorContext::resize(std::size_t n) {
  if (n > mesh_->slots_)
    throw BudgetViolation(mesh_->where(index_), mesh_->steps_,
                          mesh_->config_.dim + static_cast<int>(n), mesh_->config_.word_budget);
  auto& count = mesh_->count_[index_];
  for (std::size_t i = count; i < n; ++i) mesh_->regs_[index_ * mesh_->slots_ + i] = 0;
  count = static_cast<std::uint32_t>(n);
}

void ProcessorContext::reject_send(Dir d) const {
  const int bit = static_cast<int>(d);
  if (!has_link(d))
    throw BandwidthViolation(mesh_->where(index_), mesh_->steps_,
                             "send on missing link " + std::to_string(bit));
  throw BandwidthViolation(mesh_->where(index_), mesh_->steps_,
                           "second word on link " + std::to_string(bit) + " in one phase");
}

// ---------------------------------------------------------------------------
// Regions and block routing

bool Region::fits(const MeshConfig& config) const {
  for (int a = 0; a < 3; ++a) {
    if (extent[a] < 1 || stride[a] < 1 || origin[a] < 0) return false;
    const int last = origin[a] + (extent[a] - 1) * stride[a];
    const int limit = a < config.dim ? config.edge : 1;
    if (last >= limit) return false;
  }
  return true;
}

bool Region::contains(const Coord& c) const {
  for (int a = 0; a < 3; ++a) {
    const int off = c[a] - origin[a];
    if (off < 0 || off % stride[a] != 0 || off / stride[a] >= extent[a]) return false;
  }
  return true;
}

Coord Region::at(std::size_t i) const {
  Coord c{};
  for (int a = 0; a < 3; ++a) {
    const auto e = static_cast<std::size_t>(extent[a]);
    c[a] = origin[a] + static_cast<int>(i % e) * stride[a];
    i /= e;
  }
  return c;
}

bool Region::overlaps(const Region& other) const {
  if (stride == Coord{1, 1, 1} && other.stride == Coord{1, 1, 1}) {
    for (int a = 0; a < 3; ++a)
      if (origin[a] + extent[a] <= other.origin[a] || other.origin[a] + other.extent[a] <= origin[a])
        return false;
    return true;
  }
  const Region& small = count() <= other.count() ? *this : other;
  const Region& big = count() <= other.count() ? other : *this;
  for (std::size_t i = 0; i < small.count(); ++i)
    if (big.contains(small.at(i))) return true;
  return false;
}

namespace {

struct Leg {
  int axis;
  int sign;
  int hops;
};

struct MovePlan {
  Region src;
  std::vector<Leg> legs;
  int distance = 0;

  /// Offset of the block after `hops` hops.
  Coord offset_after(int hops) const {
    Coord off{0, 0, 0};
    for (const auto& leg : legs) {
      const int h = std::min(hops, leg.hops);
      off[leg.axis] += leg.sign * h;
      hops -= h;
    }
    return off;
  }
  /// Direction of hop number `hop` (1-based).
  Dir hop_dir(int hop) const {
    for (const auto& leg : legs) {
      if (hop <= leg.hops) return dir_of(leg.axis, leg.sign > 0);
      hop -= leg.hops;
    }
    return Dir::XPlus;
  }
};

MovePlan plan_move(const MeshConfig& config, const Region& src, const Region& dst) {
  if (src.extent != dst.extent || src.stride != dst.stride)
    throw std::invalid_argument("route_block: source and destination must be congruent");
  if (!src.fits(config) || !dst.fits(config))
    throw std::invalid_argument("route_block: region outside the mesh");
  MovePlan plan{src, {}, 0};
  for (int a = 0; a < 3; ++a) {
    const int d = dst.origin[a] - src.origin[a];
    if (d != 0) plan.legs.push_back({a, d > 0 ? 1 : -1, std::abs(d)});
    plan.distance += std::abs(d);
  }
  return plan;
}

}  // namespace

std::vector<RouteResult> route_blocks(const MeshConfig& config,
                                      std::span<const std::pair<Region, Region>> moves,
                                      std::span<const std::vector<Word>> payloads,
                                      StepLedger* combined) {
  if (moves.size() != payloads.size())
    throw std::invalid_argument("route_blocks: one payload per move");
  std::vector<MovePlan> plans;
  int longest = 0;
  for (std::size_t b = 0; b < moves.size(); ++b) {
    plans.push_back(plan_move(config, moves[b].first, moves[b].second));
    if (payloads[b].size() != moves[b].first.count())
      throw std::invalid_argument("route_block: payload must hold one word per source processor");
    longest = std::max(longest, plans.back().distance);
  }

  MeshState mesh(config);
  // Registers hold (block, word) pairs for every word currently resident.
  for (std::size_t b = 0; b < plans.size(); ++b)
    for (std::size_t i = 0; i < plans[b].src.count(); ++i) {
      const auto idx = mesh.index(plans[b].src.at(i));
      mesh.push(idx, static_cast<Word>(b));
      mesh.push(idx, payloads[b][i]);
    }

  // Which block sent the word arriving on link `from` at `idx` for hop `hop`?
  auto sender_block = [&](const Coord& at, Dir from, int hop) -> std::optional<std::size_t> {
    for (std::size_t b = 0; b < plans.size(); ++b) {
      const auto& p = plans[b];
      if (hop > p.distance) continue;
      if (p.hop_dir(hop) != opposite(from)) continue;
      const Coord off = p.offset_after(hop);
      Coord home{at[0] - off[0], at[1] - off[1], at[2] - off[2]};
      if (p.src.contains(home)) return b;
    }
    return std::nullopt;
  };

  auto program = [&](ProcessorContext& ctx) {
    const int hop = static_cast<int>(ctx.step());  // hop launched this step
    const Coord at = ctx.coords();
    // Latch arrivals of hop-1.
    std::vector<Word> keep;
    for (std::size_t r = 0; r + 1 < ctx.size(); r += 2) {
      const auto b = static_cast<std::size_t>(ctx.reg(r));
      if (hop <= plans[b].distance) {
        ctx.send(plans[b].hop_dir(hop), ctx.reg(r + 1));
      } else {
        keep.push_back(ctx.reg(r));
        keep.push_back(ctx.reg(r + 1));
      }
    }
    for (int d = 0; d < kMaxLinks; ++d) {
      const auto dir = static_cast<Dir>(d);
      auto w = ctx.inbox(dir);
      if (!w) continue;
      auto b = sender_block(at, dir, hop - 1);
      if (!b) throw StructureViolation("route_block: unexpected word at " + to_string(at, 3));
      if (hop <= plans[*b].distance) {
        ctx.send(plans[*b].hop_dir(hop), *w);
      } else {
        keep.push_back(static_cast<Word>(*b));
        keep.push_back(*w);
      }
    }
    ctx.resize(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) ctx.set(r, keep[r]);
  };
  const std::uint64_t finish = longest == 0 ? 0 : static_cast<std::uint64_t>(longest) + 1;
  auto halt = [&](const MeshState& m) { return m.steps_run() >= finish; };
  StepLedger ledger = run_program(mesh, program, halt, "route");

  std::vector<RouteResult> out(plans.size());
  for (std::size_t b = 0; b < plans.size(); ++b) {
    const Region& dst = moves[b].second;
    out[b].delivered.resize(dst.count());
    StepLedger& lb = out[b].ledger;
    lb.comm_steps = static_cast<std::uint64_t>(plans[b].distance);
    lb.total_steps = lb.compute_steps = plans[b].distance == 0 ? 0 : lb.comm_steps + 1;
    lb.words_moved = static_cast<std::uint64_t>(plans[b].distance) * dst.count();
    lb.peak_words = ledger.peak_words;
    lb.per_phase.emplace_back("route", lb.total_steps);
    for (std::size_t i = 0; i < dst.count(); ++i) {
      const auto idx = mesh.index(dst.at(i));
      auto regs = mesh.registers(idx);
      bool found = false;
      for (std::size_t r = 0; r + 1 < regs.size(); r += 2)
        if (static_cast<std::size_t>(regs[r]) == b) {
          out[b].delivered[i] = regs[r + 1];
          found = true;
          break;
        }
      if (!found) throw StructureViolation("route_block: word missing at destination");
    }
  }
  if (combined) *combined = ledger;
  return out;
}

RouteResult route_block(const MeshConfig& config, const Region& src, const Region& dst,
                        std::span<const Word> payload) {
  std::pair<Region, Region> move{src, dst};
  std::vector<std::vector<Word>> payloads{std::vector<Word>(payload.begin(), payload.end())};
  StepLedger measured;
  RouteResult out = std::move(route_blocks(config, std::span(&move, 1), payloads, &measured).front());
  out.ledger = std::move(measured);
  return out;
}

}  // namespace meshgrain
