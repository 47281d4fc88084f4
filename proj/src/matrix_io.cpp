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

#include "meshgrain/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace meshgrain {

namespace {

Word parse_token(const std::string& tok, Semiring sr, int line) {
  auto fail = [&](const std::string& why) {
    return std::invalid_argument("matrix line " + std::to_string(line) + ": " + why + " '" +
                                 tok + "'");
  };
  if (tok == "INF") {
    if (sr.kind != SemiringKind::MinPlus && sr.kind != SemiringKind::MaxMin)
      throw fail("INF not allowed for " + std::string(sr.name()));
    return kInf;
  }
  if (tok == "-INF") {
    if (sr.kind != SemiringKind::MaxMin) throw fail("-INF only allowed for maxmin");
    return kNegInf;
  }
  Word v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw fail("bad token");
  if (sr.kind == SemiringKind::BoolOr && v != 0 && v != 1) throw fail("boolean entry must be 0/1");
  if (sr.kind == SemiringKind::MinPlus || sr.kind == SemiringKind::MaxMin)
    if (v >= kInf || v <= kNegInf) throw fail("magnitude reserved for INF");
  return v;
}

}  // namespace

Matrix parse_matrix(std::istream& in, Semiring sr) {
  std::string line;
  int lineno = 0;
  int n = -1;
  while (n < 0 && std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || n < 0)
      throw std::invalid_argument("matrix line " + std::to_string(lineno) + ": bad dimension");
  }
  if (n < 0) throw std::invalid_argument("matrix: missing dimension line");
  Matrix m(n, sr);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw std::invalid_argument("matrix: expected " + std::to_string(n) + " rows");
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    int j = 0;
    while (ls >> tok) {
      if (j >= n) throw std::invalid_argument("matrix line " + std::to_string(lineno) + ": too many entries");
      m.at(i, j++) = parse_token(tok, sr, lineno);
    }
    if (j != n) throw std::invalid_argument("matrix line " + std::to_string(lineno) + ": too few entries");
  }
  return m;
}

Matrix parse_matrix(const std::string& text, Semiring sr) {
  std::istringstream in(text);
  return parse_matrix(in, sr);
}

void emit_matrix(std::ostream& out, const Matrix& m) {
  const bool sentinels = m.semiring().kind == SemiringKind::MinPlus ||
                         m.semiring().kind == SemiringKind::MaxMin;
  out << m.n() << '\n';
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) {
      if (j) out << ' ';
      const Word v = m.at(i, j);
      if (sentinels && v >= kInf) out << "INF";
      else if (sentinels && v <= kNegInf) out << "-INF";
      else out << v;
    }
    out << '\n';
  }
}

std::string emit_matrix(const Matrix& m) {
  std::ostringstream os;
  emit_matrix(os, m);
  return os.str();
}

Matrix read_matrix_file(const std::string& path, Semiring sr) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  return parse_matrix(in, sr);
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  emit_matrix(out, m);
}

}  // namespace meshgrain
