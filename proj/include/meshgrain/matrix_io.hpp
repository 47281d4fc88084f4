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

// Matrix text format: first line n, then n lines of n whitespace-separated
// tokens. INF is accepted for minplus/maxmin, -INF for maxmin, and boolor
// entries must be 0 or 1.
#pragma once

#include <iosfwd>
#include <string>

#include "meshgrain/algebra.hpp"

namespace meshgrain {

/// Throws std::invalid_argument with a line number on malformed input.
Matrix parse_matrix(std::istream& in, Semiring sr);
Matrix parse_matrix(const std::string& text, Semiring sr);
void emit_matrix(std::ostream& out, const Matrix& m);
std::string emit_matrix(const Matrix& m);

Matrix read_matrix_file(const std::string& path, Semiring sr);
void write_matrix_file(const std::string& path, const Matrix& m);

}  // namespace meshgrain
