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

#include "meshgrain/programs.hpp"

namespace meshgrain::programs {

namespace {
constexpr int kWaiting = 0;
constexpr int kHolding = 1;
constexpr int kDone = 2;
}  // namespace

ProgramSpec broadcast(Word value) {
  ProgramSpec spec;
  spec.name = "broadcast";
  spec.load = [value](MeshState& mesh) {
    mesh.push(0, value);
    mesh.set_phase(0, kHolding);
  };
  spec.program = [](ProcessorContext& ctx) {
    if (ctx.phase() == kWaiting) {
      for (int d = 0; d < kMaxLinks; ++d)
        if (auto w = ctx.inbox(static_cast<Dir>(d))) {
          ctx.push(*w);
          ctx.set_phase(kHolding);
          break;
        }
    }
    if (ctx.phase() == kHolding) {
      for (int d = 0; d < kMaxLinks; ++d)
        if (ctx.has_link(static_cast<Dir>(d))) ctx.send(static_cast<Dir>(d), ctx.reg(0));
      ctx.set_phase(kDone);
    }
  };
  spec.halt = [](const MeshState& mesh) {
    for (std::size_t i = 0; i < mesh.size(); ++i)
      if (mesh.registers(i).empty()) return false;
    return true;
  };
  return spec;
}

ProgramSpec diffusion(int rounds) {
  ProgramSpec spec;
  spec.name = "diffusion";
  spec.load = [](MeshState& mesh) {
    for (std::size_t i = 0; i < mesh.size(); ++i)
      mesh.push(i, static_cast<Word>(i * 2654435761ULL % 1000003ULL));
  };
  spec.program = [rounds](ProcessorContext& ctx) {
    const auto step = static_cast<int>(ctx.step());
    auto value = static_cast<std::uint64_t>(ctx.reg(0));
    for (int d = 0; d < kMaxLinks; ++d)
      if (auto w = ctx.inbox(static_cast<Dir>(d))) value = value * 31 + static_cast<std::uint64_t>(*w);
    ctx.set(0, static_cast<Word>(value));
    if (step <= rounds)
      for (int d = 0; d < kMaxLinks; ++d)
        if (ctx.has_link(static_cast<Dir>(d))) ctx.send(static_cast<Dir>(d), ctx.reg(0));
  };
  spec.halt = [rounds](const MeshState& mesh) {
    return mesh.steps_run() >= static_cast<std::uint64_t>(rounds) + 1;
  };
  return spec;
}

ProgramSpec hoard(std::size_t target) {
  ProgramSpec spec;
  spec.name = "hoard";
  spec.load = [](MeshState&) {};
  spec.program = [target](ProcessorContext& ctx) {
    if (ctx.index() == target) ctx.push(static_cast<Word>(ctx.step()));
  };
  spec.halt = [](const MeshState&) { return false; };
  return spec;
}

ProgramSpec double_send(std::size_t target) {
  ProgramSpec spec;
  spec.name = "double-send";
  spec.load = [](MeshState&) {};
  spec.program = [target](ProcessorContext& ctx) {
    if (ctx.index() != target) return;
    for (int d = 0; d < kMaxLinks; ++d)
      if (ctx.has_link(static_cast<Dir>(d))) {
        ctx.send(static_cast<Dir>(d), 1);
        ctx.send(static_cast<Dir>(d), 2);
        return;
      }
  };
  spec.halt = [](const MeshState& mesh) { return mesh.steps_run() >= 1; };
  return spec;
}

}  // namespace meshgrain::programs
