// Copyright 2026 The rdqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rdqc/circuit.hpp"
#include "rdqc/error.hpp"

namespace rdqc {

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline long parse_int(const std::string &tok, std::size_t line, const char *what) {
  long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(line, std::string("expected integer ") + what + ", got '" + tok + "'");
  return v;
}

inline double parse_real(const std::string &tok, std::size_t line) {
  std::istringstream in(tok);
  in.imbue(std::locale::classic());
  double v = 0;
  in >> v;
  if (in.fail() || !in.eof()) throw ParseError(line, "expected real number, got '" + tok + "'");
  return v;
}

}  // namespace detail

/// Parses the line-oriented circuit format:
///
///   qubits <n>
///   gate <NAME> <q...>
///   matgate <dim> <q...> <re im re im ...>   (row-major, dim = 2^#q)
///
/// `#` starts a comment. Blank lines are ignored.
inline Circuit parse_circuit(const std::string &text, int max_locality = kDefaultMaxLocality) {
  int n = -1;
  std::vector<Gate> gates;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;

    if (n < 0) {
      if (tok[0] != "qubits" || tok.size() != 2) throw ParseError(line_no, "first statement must be 'qubits <n>'");
      const long v = detail::parse_int(tok[1], line_no, "qubit count");
      if (v < 1 || v > 62) throw ParseError(line_no, "qubit count out of range");
      n = static_cast<int>(v);
      continue;
    }

    auto read_qubits = [&](std::size_t first, std::size_t count) {
      std::vector<int> q;
      for (std::size_t i = first; i < first + count; ++i) {
        const long v = detail::parse_int(tok[i], line_no, "qubit index");
        if (v < 0 || v >= n) throw ParseError(line_no, "qubit index " + tok[i] + " out of range for n=" + std::to_string(n));
        q.push_back(static_cast<int>(v));
      }
      if (static_cast<int>(q.size()) > max_locality)
        throw ParseError(line_no, "gate acts on " + std::to_string(q.size()) + " qubits, locality cap is " +
                                      std::to_string(max_locality));
      return q;
    };

    try {
      if (tok[0] == "gate") {
        if (tok.size() < 2) throw ParseError(line_no, "missing gate name");
        const int arity = gates::named_arity(tok[1]);
        if (arity == 0) throw ParseError(line_no, "unknown gate '" + tok[1] + "'");
        if (tok.size() != static_cast<std::size_t>(2 + arity))
          throw ParseError(line_no, "gate " + tok[1] + " takes " + std::to_string(arity) + " qubit(s)");
        gates.push_back(gates::make_named(tok[1], read_qubits(2, static_cast<std::size_t>(arity))));
      } else if (tok[0] == "matgate") {
        if (tok.size() < 3) throw ParseError(line_no, "matgate needs a dimension and qubits");
        const long dim = detail::parse_int(tok[1], line_no, "dimension");
        int arity = 0;
        while ((1L << arity) < dim) ++arity;
        if (dim < 2 || (1L << arity) != dim) throw ParseError(line_no, "matgate dimension must be a power of two >= 2");
        const std::size_t d = static_cast<std::size_t>(dim);
        if (tok.size() != 2 + static_cast<std::size_t>(arity) + 2 * d * d)
          throw ParseError(line_no, "matgate of dim " + tok[1] + " needs " + std::to_string(arity) + " qubits and " +
                                        std::to_string(2 * d * d) + " reals");
        auto q = read_qubits(2, static_cast<std::size_t>(arity));
        std::vector<Complex> m(d * d);
        const std::size_t base = 2 + static_cast<std::size_t>(arity);
        for (std::size_t i = 0; i < d * d; ++i)
          m[i] = Complex(detail::parse_real(tok[base + 2 * i], line_no), detail::parse_real(tok[base + 2 * i + 1], line_no));
        if (unitarity_defect(m, d) > kUnitarityTolerance) throw ParseError(line_no, "matgate matrix is not unitary");
        gates.emplace_back("MAT", std::move(q), std::move(m));
      } else {
        throw ParseError(line_no, "unknown statement '" + tok[0] + "'");
      }
    } catch (const ParseError &) {
      throw;
    } catch (const ContractViolation &e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (n < 0) throw ParseError(0, "missing 'qubits <n>' header");
  if (gates.empty()) throw ParseError(0, "circuit has no gates");
  return Circuit(n, std::move(gates), text, max_locality);
}

inline Circuit load_circuit(const std::string &path, int max_locality = kDefaultMaxLocality) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open circuit file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_circuit(buf.str(), max_locality);
}

}  // namespace rdqc
