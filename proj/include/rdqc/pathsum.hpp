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

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "rdqc/circuit.hpp"
#include "rdqc/error.hpp"
#include "rdqc/rng.hpp"

namespace rdqc {

inline constexpr int kEnumerationCap = 24;

/// Number of free path bits, (2L-1)n - k.
inline std::int64_t path_bit_count(int n, int depth, int k) {
  return (2 * static_cast<std::int64_t>(depth) - 1) * n - k;
}

namespace detail {

inline void unpack_layers(int n, int depth, int k, std::uint64_t packed, Basis *layers) {
  for (int j = 2 * depth - 1; j >= 1; --j) {
    const int w = j == depth ? n - k : n;
    layers[j - 1] = w == 0 ? 0 : (w >= 64 ? packed : packed & ((std::uint64_t{1} << w) - 1));
    packed = w >= 64 ? 0 : packed >> w;
  }
}

}  // namespace detail

/// One Feynman path: 2L-1 intermediate basis states. Layer L (1-based) holds
/// only the n-k unmeasured bits; the measured outcome z supplies the rest.
class PathAssignment {
 public:
  PathAssignment(int n, int depth, int k, std::vector<Basis> layers) : n_(n), depth_(depth), k_(k), layers_(std::move(layers)) {
    if (k_ < 0 || k_ > n_ || depth_ < 1) throw ContractViolation("path shape out of range");
    if (layers_.size() != static_cast<std::size_t>(2 * depth_ - 1))
      throw ContractViolation("path needs " + std::to_string(2 * depth_ - 1) + " layers");
    for (int j = 1; j <= 2 * depth_ - 1; ++j) {
      const int w = width(j);
      if (w < 64 && (layer(j) >> w) != 0) throw ContractViolation("path layer " + std::to_string(j) + " exceeds its width");
    }
  }

  static PathAssignment uniform(int n, int depth, int k, Rng &rng) {
    std::vector<Basis> layers(static_cast<std::size_t>(2 * depth - 1));
    for (int j = 1; j <= 2 * depth - 1; ++j)
      layers[static_cast<std::size_t>(j - 1)] = rng.bits_u64(static_cast<unsigned>(j == depth ? n - k : n));
    return PathAssignment(n, depth, k, std::move(layers));
  }

  /// Inverse of pack(): layer 1 is the most significant block.
  static PathAssignment unpack(int n, int depth, int k, std::uint64_t packed) {
    if (path_bit_count(n, depth, k) > 64) throw CapExceeded("packed path encoding limited to 64 bits");
    std::vector<Basis> layers(static_cast<std::size_t>(2 * depth - 1));
    detail::unpack_layers(n, depth, k, packed, layers.data());
    return PathAssignment(n, depth, k, std::move(layers));
  }

  std::uint64_t pack() const {
    if (bit_count() > 64) throw CapExceeded("packed path encoding limited to 64 bits");
    std::uint64_t packed = 0;
    for (int j = 1; j <= 2 * depth_ - 1; ++j) {
      const int w = width(j);
      packed = (w >= 64 ? 0 : packed << w) | layer(j);
    }
    return packed;
  }

  int n() const { return n_; }
  int depth() const { return depth_; }
  int k() const { return k_; }
  int width(int j) const { return j == depth_ ? n_ - k_ : n_; }
  std::int64_t bit_count() const { return path_bit_count(n_, depth_, k_); }
  /// 1-based layer access, matching s^(1) ... s^(2L-1).
  Basis layer(int j) const { return layers_[static_cast<std::size_t>(j - 1)]; }
  const std::vector<Basis> &layers() const { return layers_; }

  bool operator==(const PathAssignment &) const = default;

 private:
  int n_;
  int depth_;
  int k_;
  std::vector<Basis> layers_;
};

struct PathValue {
  Complex g;
  double bias;  // (1 + Re g) / 2
};

/// <out| u |in> for a gate embedded in n qubits. Zero unless out and in agree
/// off the gate's support.
inline Complex matrix_element(const Gate &gate, Basis out, Basis in, int n) {
  const Basis off = ~gate.support_mask(n);
  if ((out & off) != (in & off)) return 0.0;
  return gate.entry(gate.local_index(out, n), gate.local_index(in, n));
}

namespace detail {

// layers[j-1] holds s^(j); the caller guarantees the shape.
inline Complex path_summand(const Circuit &c, int k, Basis z, const Basis *layers) {
  const int n = c.n(), depth = c.depth();
  const Basis meet = (z << (n - k)) | layers[depth - 1];
  Complex bra = 1.0;
  Basis prev = 0;
  for (int j = 1; j <= depth; ++j) {
    const Basis next = j == depth ? meet : layers[j - 1];
    bra *= matrix_element(c.gate(j - 1), next, prev, n);
    if (bra == 0.0) return 0.0;
    prev = next;
  }
  Complex ket = 1.0;
  prev = 0;
  for (int i = 1; i <= depth; ++i) {
    const Basis next = i == depth ? meet : layers[depth + i - 1];
    ket *= matrix_element(c.gate(i - 1), next, prev, n);
    if (ket == 0.0) return 0.0;
    prev = next;
  }
  return std::conj(bra) * ket;
}

}  // namespace detail

/// Path summand g(z, s) = conj(B) K with
///   B = <z s^(L)| u_L |s^(L-1)> ... <s^(2)| u_2 |s^(1)> <s^(1)| u_1 |0^n>
///   K = <z s^(L)| u_L |s^(2L-1)> ... <s^(L+2)| u_2 |s^(L+1)> <s^(L+1)| u_1 |0^n>
/// so q_z = sum_s g(z, s). Cost is O(nL).
inline PathValue eval_g(const Circuit &c, Basis z, const PathAssignment &s) {
  if (s.n() != c.n() || s.depth() != c.depth()) throw ContractViolation("path shape does not match circuit");
  if (s.k() < 64 && (z >> s.k()) != 0) throw ContractViolation("outcome z has more than k bits");
  const Complex g = detail::path_summand(c, s.k(), z, s.layers().data());
  return {g, (1.0 + g.real()) / 2.0};
}

inline double coin_bias(const Circuit &c, Basis z, const PathAssignment &s) { return eval_g(c, z, s).bias; }

/// Exhaustive sum over all 2^((2L-1)n-k) paths. Test oracle only.
inline Complex brute_force_sum(const Circuit &c, int k, Basis z, int cap = kEnumerationCap) {
  const std::int64_t bits = path_bit_count(c.n(), c.depth(), k);
  if (bits > cap) throw CapExceeded("path enumeration of " + std::to_string(bits) + " bits exceeds cap " + std::to_string(cap));
  // Fixed-size blocks summed left to right, then combined pairwise, so the
  // rounding pattern is independent of how blocks are scheduled.
  const std::uint64_t total = std::uint64_t{1} << bits;
  const std::uint64_t block = std::uint64_t{1} << 10;
  if (k < 0 || k > c.n() || (k < 64 && (z >> k) != 0)) throw ContractViolation("outcome z does not fit in k bits");
  std::vector<Basis> layers(static_cast<std::size_t>(2 * c.depth() - 1));
  std::vector<Complex> partial;
  for (std::uint64_t start = 0; start < total; start += block) {
    Complex acc = 0.0;
    const std::uint64_t end = std::min(total, start + block);
    for (std::uint64_t p = start; p < end; ++p) {
      detail::unpack_layers(c.n(), c.depth(), k, p, layers.data());
      acc += detail::path_summand(c, k, z, layers.data());
    }
    partial.push_back(acc);
  }
  while (partial.size() > 1) {
    std::vector<Complex> next((partial.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = partial[2 * i] + (2 * i + 1 < partial.size() ? partial[2 * i + 1] : Complex(0.0));
    partial.swap(next);
  }
  return partial.front();
}

inline double brute_force_qz(const Circuit &c, int k, Basis z, int cap = kEnumerationCap) {
  const Complex sum = brute_force_sum(c, k, z, cap);
  if (std::abs(sum.imag()) > 1e-9) throw ContractViolation("path sum has a non-negligible imaginary part");
  return sum.real();
}

}  // namespace rdqc
