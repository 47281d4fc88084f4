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

// Small reference programs used by tests, the CLI self-checks, and the
// stacked-simulation equivalence suite.
#pragma once

#include "meshgrain/engine.hpp"

namespace meshgrain::programs {

/// Processor 0 floods `value` to the whole mesh; halts once every processor
/// holds it.
ProgramSpec broadcast(Word value);

/// Every processor exchanges its value with all neighbors for `rounds` steps,
/// folding what it hears into its own value (wrapping arithmetic).
ProgramSpec diffusion(int rounds);

/// `target` keeps appending words until it exceeds its budget.
ProgramSpec hoard(std::size_t target);

/// `target` puts two words on the same link in its first step.
ProgramSpec double_send(std::size_t target);

}  // namespace meshgrain::programs
