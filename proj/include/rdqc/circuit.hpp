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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rdqc/error.hpp"

namespace rdqc {

using Complex = std::complex<double>;

/// Computational-basis index. Qubit 0 is the most significant of the n bits.
using Basis = std::uint64_t;

inline constexpr double kUnitarityTolerance = 1e-12;
inline constexpr int kDefaultMaxLocality = 3;

inline int qubit_bit(Basis x, int n, int q) { return static_cast<int>((x >> (n - 1 - q)) & 1U); }

/// Renders the low `width` bits of x, most significant first.
inline std::string to_bitstring(Basis x, int width) {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int i = 0; i < width; ++i) {
    if ((x >> (width - 1 - i)) & 1U) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

inline Basis from_bitstring(const std::string &s) {
  Basis x = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw ContractViolation("invalid bit string '" + s + "'");
    x = (x << 1) | static_cast<Basis>(c == '1');
  }
  return x;
}

/// Largest max-norm deviation of M^dagger M from the identity.
inline double unitarity_defect(const std::vector<Complex> &m, std::size_t dim) {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      Complex acc = 0.0;
      for (std::size_t r = 0; r < dim; ++r) acc += std::conj(m[r * dim + i]) * m[r * dim + j];
      if (i == j) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

/// A local unitary acting on an ordered support. The first support qubit is
/// the most significant bit of the matrix's row/column index.
class Gate {
 public:
  Gate(std::string name, std::vector<int> support, std::vector<Complex> matrix)
      : name_(std::move(name)), support_(std::move(support)), matrix_(std::move(matrix)) {
    if (support_.empty()) throw ContractViolation("gate " + name_ + " has empty support");
    if (support_.size() > 16) throw CapExceeded("gate " + name_ + " support too large");
    auto sorted = support_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ContractViolation("gate " + name_ + " repeats a qubit");
    if (sorted.front() < 0) throw ContractViolation("gate " + name_ + " has a negative qubit index");
    const std::size_t d = dim();
    if (matrix_.size() != d * d)
      throw ContractViolation("gate " + name_ + " matrix has " + std::to_string(matrix_.size()) + " entries, expected " +
                              std::to_string(d * d));
    if (unitarity_defect(matrix_, d) > kUnitarityTolerance) throw ContractViolation("gate " + name_ + " is not unitary");
  }

  const std::string &name() const { return name_; }
  const std::vector<int> &support() const { return support_; }
  const std::vector<Complex> &matrix() const { return matrix_; }
  std::size_t arity() const { return support_.size(); }
  std::size_t dim() const { return std::size_t{1} << support_.size(); }

  Complex entry(std::size_t row, std::size_t col) const { return matrix_[row * dim() + col]; }

  /// Restriction of basis state x (n qubits) to this gate's support.
  std::size_t local_index(Basis x, int n) const {
    std::size_t idx = 0;
    for (int q : support_) idx = (idx << 1) | static_cast<std::size_t>(qubit_bit(x, n, q));
    return idx;
  }

  /// Bits of x that lie on the support, as a mask over the n-bit index.
  Basis support_mask(int n) const {
    Basis m = 0;
    for (int q : support_) m |= Basis{1} << (n - 1 - q);
    return m;
  }

 private:
  std::string name_;
  std::vector<int> support_;
  std::vector<Complex> matrix_;
};

namespace gates {

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

inline std::vector<Complex> permutation_matrix(const std::vector<std::size_t> &image) {
  const std::size_t d = image.size();
  std::vector<Complex> m(d * d, 0.0);
  for (std::size_t col = 0; col < d; ++col) m[image[col] * d + col] = 1.0;
  return m;
}

inline Gate H(int q) { return Gate("H", {q}, {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2}); }
inline Gate X(int q) { return Gate("X", {q}, {0.0, 1.0, 1.0, 0.0}); }
inline Gate Y(int q) { return Gate("Y", {q}, {0.0, Complex(0, -1), Complex(0, 1), 0.0}); }
inline Gate Z(int q) { return Gate("Z", {q}, {1.0, 0.0, 0.0, -1.0}); }
inline Gate S(int q) { return Gate("S", {q}, {1.0, 0.0, 0.0, Complex(0, 1)}); }
inline Gate T(int q) { return Gate("T", {q}, {1.0, 0.0, 0.0, std::polar(1.0, M_PI / 4)}); }
inline Gate CNOT(int c, int t) { return Gate("CNOT", {c, t}, permutation_matrix({0, 1, 3, 2})); }
inline Gate CZ(int a, int b) {
  auto m = permutation_matrix({0, 1, 2, 3});
  m[15] = -1.0;
  return Gate("CZ", {a, b}, std::move(m));
}
inline Gate CCX(int c0, int c1, int t) { return Gate("CCX", {c0, c1, t}, permutation_matrix({0, 1, 2, 3, 4, 5, 7, 6})); }

/// Real rotation exp(-i theta Y / 2); handy for building instances with a
/// prescribed output probability.
inline Gate RY(int q, double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return Gate("RY", {q}, {c, -s, s, c});
}

/// Arity of a registered named gate, or 0 if the name is unknown.
inline int named_arity(const std::string &name) {
  if (name == "H" || name == "T" || name == "S" || name == "X" || name == "Y" || name == "Z") return 1;
  if (name == "CNOT" || name == "CZ") return 2;
  if (name == "CCX") return 3;
  return 0;
}

inline Gate make_named(const std::string &name, const std::vector<int> &q) {
  if (name == "H") return H(q[0]);
  if (name == "T") return T(q[0]);
  if (name == "S") return S(q[0]);
  if (name == "X") return X(q[0]);
  if (name == "Y") return Y(q[0]);
  if (name == "Z") return Z(q[0]);
  if (name == "CNOT") return CNOT(q[0], q[1]);
  if (name == "CZ") return CZ(q[0], q[1]);
  if (name == "CCX") return CCX(q[0], q[1], q[2]);
  throw ContractViolation("unknown gate '" + name + "'");
}

}  // namespace gates

/// Locality cap: default 3, and never above 2 + ceil(log2 n).
inline int max_locality_limit(int n) {
  int lg = 0;
  while ((1 << lg) < n) ++lg;
  return 2 + lg;
}

/// U = u_L ... u_1 acting on |0^n>; gates()[0] is u_1.
class Circuit {
 public:
  Circuit(int n, std::vector<Gate> gates, std::string source_text = {}, int max_locality = kDefaultMaxLocality)
      : n_(n), gates_(std::move(gates)), source_(std::move(source_text)) {
    if (n_ < 1 || n_ > 62) throw ContractViolation("qubit count must be in [1, 62]");
    if (gates_.empty()) throw ContractViolation("circuit needs at least one gate");
    if (max_locality < 1 || max_locality > std::max(kDefaultMaxLocality, max_locality_limit(n_)))
      throw CapExceeded("locality cap " + std::to_string(max_locality) + " outside the allowed range");
    for (const Gate &g : gates_) {
      if (static_cast<int>(g.arity()) > max_locality)
        throw CapExceeded("gate " + g.name() + " acts on " + std::to_string(g.arity()) + " qubits, cap is " +
                          std::to_string(max_locality));
      for (int q : g.support())
        if (q >= n_) throw ContractViolation("gate " + g.name() + " uses qubit " + std::to_string(q) + " >= n");
    }
  }

  int n() const { return n_; }
  int depth() const { return static_cast<int>(gates_.size()); }
  const std::vector<Gate> &gates() const { return gates_; }
  const Gate &gate(int i) const { return gates_[static_cast<std::size_t>(i)]; }
  const std::string &source_text() const { return source_; }

 private:
  int n_;
  std::vector<Gate> gates_;
  std::string source_;
};

}  // namespace rdqc
