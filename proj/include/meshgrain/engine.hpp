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
 * @file engine.hpp
 * @brief Lockstep mesh-connected machine.
 *
 * A mesh is a square (2-d) or cubical (3-d) array of processors. Each
 * processor owns a bounded number of words and is linked to its axis
 * neighbors. One global step is a communication sub-step (every word queued
 * on a link during the previous step is delivered) followed by a compute
 * sub-step (every processor runs the program against its own registers and
 * the words just delivered). Sends become visible only in the next step.
 *
 * Accounting conventions (StepLedger):
 *   - total_steps counts global steps, idle ones included.
 *   - comm_steps counts steps whose communication sub-step moved a word.
 *   - compute_steps counts compute sub-steps. Every global step carries one,
 *     and a processor that only waits still occupies it, so
 *     compute_steps == total_steps and total_steps == max(comm, compute).
 */
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace meshgrain {

using Word = std::int64_t;

/// Link directions; axis = dir / 2, negative side first.
enum class Dir : std::uint8_t { XMinus = 0, XPlus, YMinus, YPlus, ZMinus, ZPlus };
inline constexpr int kMaxLinks = 6;

constexpr Dir opposite(Dir d) { return static_cast<Dir>(static_cast<int>(d) ^ 1); }
constexpr int axis_of(Dir d) { return static_cast<int>(d) / 2; }
constexpr Dir dir_of(int axis, bool positive) {
  return static_cast<Dir>(axis * 2 + (positive ? 1 : 0));
}

using Coord = std::array<int, 3>;

std::string to_string(const Coord& c, int dim);

// ---------------------------------------------------------------------------
// Errors. Every constraint violation names the processor and step.

class ConstraintViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetViolation : public ConstraintViolation {
 public:
  BudgetViolation(const std::string& where, std::uint64_t step, int words, int budget);
};

class BandwidthViolation : public ConstraintViolation {
 public:
  BandwidthViolation(const std::string& where, std::uint64_t step, const std::string& why);
};

/// Structural invariant broken (overlapping worker sets, oversize regions, ...).
class StructureViolation : public ConstraintViolation {
 public:
  using ConstraintViolation::ConstraintViolation;
};

class NonHalting : public ConstraintViolation {
 public:
  explicit NonHalting(std::uint64_t cap);
};

// ---------------------------------------------------------------------------

/// Step cap used when none is given: MESHGRAIN_STEP_CAP if set, else 10^8.
std::uint64_t default_step_cap();

struct MeshConfig {
  int dim = 3;
  int edge = 1;
  int word_budget = 32;
  int link_width = 1;
  std::uint64_t step_cap = default_step_cap();

  /// Throws std::invalid_argument on dim not in {2,3}, edge < 1, budget < 4.
  void validate() const;
  std::size_t processors() const;
  int diameter() const { return dim * (edge - 1); }
};

struct StepLedger {
  std::uint64_t comm_steps = 0;
  std::uint64_t compute_steps = 0;
  std::uint64_t total_steps = 0;
  int peak_words = 0;
  std::uint64_t words_moved = 0;
  std::vector<std::pair<std::string, std::uint64_t>> per_phase;

  /// Sequential composition: `next` runs after this one.
  void then(const StepLedger& next);
  /// Charges a phase whose cost comes from a plan rather than an engine run.
  void charge(std::string label, std::uint64_t steps, std::uint64_t comm,
              std::uint64_t words, int peak);
  /// Relabels the whole ledger as a single phase.
  StepLedger& as_phase(std::string label);

  /// Ledgers of regions running side by side: steps take the max,
  /// traffic adds up. Phase lists are merged by label (max per label).
  static StepLedger concurrent(std::span<const StepLedger> parts);

  /// key=value lines, phases as `phase.<label>=<steps>`.
  std::string to_key_value() const;

  bool operator==(const StepLedger&) const = default;
};

class ProcessorContext;

class MeshState {
 public:
  explicit MeshState(MeshConfig config);

  const MeshConfig& config() const { return config_; }
  int dim() const { return config_.dim; }
  int edge() const { return config_.edge; }
  std::size_t size() const { return count_.size(); }

  Coord coords(std::size_t index) const { return coord_[index]; }
  std::size_t index(const Coord& c) const;
  bool contains(const Coord& c) const;
  std::optional<std::size_t> neighbor(std::size_t index, Dir d) const {
    if (!((link_mask_[index] >> static_cast<int>(d)) & 1U)) return std::nullopt;
    const std::size_t stride = stride_[axis_of(d)];
    return (static_cast<int>(d) & 1) ? index + stride : index - stride;
  }
  int degree(std::size_t index) const;

  std::span<const Word> registers(std::size_t index) const {
    return {regs_.data() + index * slots_, count_[index]};
  }
  int phase_tag(std::size_t index) const { return phase_[index]; }
  /// Coordinates occupy `dim` words of every processor's budget.
  int resident_words(std::size_t index) const {
    return config_.dim + static_cast<int>(count_[index]);
  }
  std::optional<Word> pending(std::size_t index, Dir d) const;

  std::uint64_t steps_run() const { return steps_; }
  /// Adopts another mesh's clock (assembled views of simulated runs).
  void sync_clock(const MeshState& other) { steps_ = other.steps_; }

  // Host-side loading of inputs before a run. Budget-checked.
  void push(std::size_t index, Word w);
  void set_registers(std::size_t index, std::span<const Word> words);
  void set_phase(std::size_t index, int tag) { phase_[index] = tag; }
  void clear_registers(std::size_t index) { count_[index] = 0; }

  /// Copies registers, phase tag, and pending sends of one processor from
  /// another mesh with the same configuration.
  void copy_processor_from(const MeshState& other, std::size_t index);

  /// Same registers and phase tags everywhere (pending sends ignored).
  bool same_state(const MeshState& other) const;

  /// One global step restricted to processors with active(index) true.
  /// Deliveries into inactive processors are dropped; all pending sends are
  /// consumed. Used by the full runner and by region-restricted simulation.
  template <class Program, class Active>
  void step(Program& program, const Active& active, StepLedger& ledger);

 private:
  friend class ProcessorContext;

  void deliver(std::size_t index, Dir d, Word w) {
    inbox_[index * kMaxLinks + static_cast<int>(d)] = w;
    inbox_mask_[index] |= static_cast<std::uint8_t>(1U << static_cast<int>(d));
  }
  std::string where(std::size_t index) const;

  MeshConfig config_;
  std::size_t slots_;
  std::vector<Word> regs_;
  std::vector<std::uint32_t> count_;
  std::vector<int> phase_;
  std::vector<Word> inbox_;
  std::vector<std::uint8_t> inbox_mask_;
  std::vector<Word> outbox_;
  std::vector<std::uint8_t> outbox_mask_;
  std::vector<std::uint8_t> link_mask_;  // existing links per processor
  std::vector<Coord> coord_;
  std::size_t stride_[3] = {1, 1, 1};
  std::uint64_t steps_ = 0;
};

/// The only view a program gets of the machine: its own registers, the words
/// delivered this step, and its outgoing links.
class ProcessorContext {
 public:
  ProcessorContext(MeshState& mesh, std::size_t index)
      : mesh_(&mesh), index_(index) {}

  std::size_t index() const { return index_; }
  Coord coords() const { return mesh_->coords(index_); }
  int edge() const { return mesh_->config_.edge; }
  int dim() const { return mesh_->config_.dim; }
  /// Global clock: number of the step being executed (1-based).
  std::uint64_t step() const { return mesh_->steps_; }
  bool has_link(Dir d) const {
    return (mesh_->link_mask_[index_] >> static_cast<int>(d)) & 1U;
  }

  bool received(Dir d) const {
    return (mesh_->inbox_mask_[index_] >> static_cast<int>(d)) & 1U;
  }
  std::optional<Word> inbox(Dir d) const {
    if (!received(d)) return std::nullopt;
    return mesh_->inbox_[index_ * kMaxLinks + static_cast<int>(d)];
  }

  std::size_t size() const { return mesh_->count_[index_]; }
  Word reg(std::size_t i) const { return mesh_->regs_[index_ * mesh_->slots_ + i]; }
  void set(std::size_t i, Word w);
  void push(Word w);
  void resize(std::size_t n);

  int phase() const { return mesh_->phase_[index_]; }
  void set_phase(int tag) { mesh_->phase_[index_] = tag; }

  /// Queues one word on a link. A second word on the same link in the same
  /// step, or a send on a missing link, is a BandwidthViolation.
  void send(Dir d, Word w) {
    const int bit = static_cast<int>(d);
    auto& mask = mesh_->outbox_mask_[index_];
    if (!has_link(d) || ((mask >> bit) & 1U)) reject_send(d);
    mask |= static_cast<std::uint8_t>(1U << bit);
    mesh_->outbox_[index_ * kMaxLinks + bit] = w;
  }

 private:
  [[noreturn]] void reject_send(Dir d) const;

  MeshState* mesh_;
  std::size_t index_;
};

// ---------------------------------------------------------------------------

inline void ProcessorContext::set(std::size_t i, Word w) {
  if (i >= size()) resize(i + 1);
  mesh_->regs_[index_ * mesh_->slots_ + i] = w;
}

inline void ProcessorContext::push(Word w) { set(size(), w); }

template <class Program, class Active>
void MeshState::step(Program& program, const Active& active, StepLedger& ledger) {
  ++steps_;
  const std::size_t n = size();
  std::fill(inbox_mask_.begin(), inbox_mask_.end(), std::uint8_t{0});
  std::uint64_t moved = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint8_t mask = outbox_mask_[i];
    if (mask == 0) continue;
    for (int d = 0; d < kMaxLinks; ++d) {
      if (!((mask >> d) & 1U)) continue;
      ++moved;
      auto dst = neighbor(i, static_cast<Dir>(d));
      if (dst && active(*dst)) deliver(*dst, opposite(static_cast<Dir>(d)), outbox_[i * kMaxLinks + d]);
    }
    outbox_mask_[i] = 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!active(i)) continue;
    ProcessorContext ctx(*this, i);
    program(ctx);
    ledger.peak_words = std::max(ledger.peak_words, resident_words(i));
  }
  ++ledger.total_steps;
  ++ledger.compute_steps;
  if (moved > 0) ++ledger.comm_steps;
  ledger.words_moved += moved;
}

/// Runs global steps until halt(mesh) holds (checked before every step).
/// Throws NonHalting once config().step_cap steps have run in this call.
template <class Program, class Halt>
StepLedger run_program(MeshState& mesh, Program&& program, Halt&& halt,
                       std::string_view label = "run") {
  StepLedger ledger;
  for (std::size_t i = 0; i < mesh.size(); ++i)
    ledger.peak_words = std::max(ledger.peak_words, mesh.resident_words(i));
  const auto all = [](std::size_t) { return true; };
  std::uint64_t ran = 0;
  while (!halt(static_cast<const MeshState&>(mesh))) {
    if (ran >= mesh.config().step_cap) throw NonHalting(mesh.config().step_cap);
    mesh.step(program, all, ledger);
    ++ran;
  }
  ledger.per_phase.emplace_back(std::string(label), ledger.total_steps);
  return ledger;
}

/// Type-erased program, for callers that store programs (CLI, simulation).
using Program = std::function<void(ProcessorContext&)>;
using HaltPredicate = std::function<bool(const MeshState&)>;

/// A 2-d program together with its input loader and halt rule.
struct ProgramSpec {
  std::string name;
  std::function<void(MeshState&)> load;
  Program program;
  HaltPredicate halt;
};

/// Build a mesh with empty registers (coordinates are implicit but charged).
MeshState build_mesh(const MeshConfig& config);

/// Axis-aligned, possibly strided, set of processors.
struct Region {
  Coord origin{0, 0, 0};
  Coord extent{1, 1, 1};
  Coord stride{1, 1, 1};

  std::size_t count() const {
    return static_cast<std::size_t>(extent[0]) * extent[1] * extent[2];
  }
  bool fits(const MeshConfig& config) const;
  bool contains(const Coord& c) const;
  Coord at(std::size_t i) const;  // i-th point, axis 0 fastest
  bool overlaps(const Region& other) const;
};

/// Moves one word per processor of `src` to the congruent `dst` by
/// dimension-ordered shifting (axis 0, then 1, then 2). Every lane of the
/// block moves in lockstep, so the cost is the Manhattan displacement.
/// `payload` is in src.at(i) order; the result holds the words in dst order.
struct RouteResult {
  std::vector<Word> delivered;
  StepLedger ledger;
};
RouteResult route_block(const MeshConfig& config, const Region& src, const Region& dst,
                        std::span<const Word> payload);

/// Concurrent moves; any two moves that would put words on the same directed
/// link in the same step raise BandwidthViolation.
std::vector<RouteResult> route_blocks(const MeshConfig& config,
                                      std::span<const std::pair<Region, Region>> moves,
                                      std::span<const std::vector<Word>> payloads,
                                      StepLedger* combined = nullptr);

}  // namespace meshgrain
