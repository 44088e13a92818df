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
#include <string>
#include <vector>

#include "rdqc/circuit.hpp"
#include "rdqc/error.hpp"
#include "rdqc/rng.hpp"

namespace rdqc {

inline constexpr int kStatevectorCap = 20;

struct StateVector {
  int n = 0;
  std::vector<Complex> amplitudes;

  double norm() const {
    double s = 0.0;
    for (const Complex &a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
  }
};

/// Probabilities of the first k qubits (z = high-order bits of the index).
struct OutputDistribution {
  int k = 0;
  std::vector<double> probs;
};

inline void apply_gate(StateVector &psi, const Gate &g) {
  const int n = psi.n;
  const std::size_t d = g.dim();
  std::vector<Basis> offset(d, 0);
  for (std::size_t local = 0; local < d; ++local) {
    for (std::size_t j = 0; j < g.arity(); ++j) {
      if ((local >> (g.arity() - 1 - j)) & 1U) offset[local] |= Basis{1} << (n - 1 - g.support()[j]);
    }
  }
  const Basis mask = g.support_mask(n);
  std::vector<Complex> in(d), out(d);
  const Basis size = Basis{1} << n;
  for (Basis base = 0; base < size; ++base) {
    if (base & mask) continue;
    for (std::size_t i = 0; i < d; ++i) in[i] = psi.amplitudes[base | offset[i]];
    for (std::size_t r = 0; r < d; ++r) {
      Complex acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) acc += g.entry(r, c) * in[c];
      out[r] = acc;
    }
    for (std::size_t i = 0; i < d; ++i) psi.amplitudes[base | offset[i]] = out[i];
  }
}

/// U|0^n> by sequential gate application.
inline StateVector simulate_statevector(const Circuit &c, int cap = kStatevectorCap) {
  if (c.n() > cap) throw CapExceeded("statevector simulation limited to " + std::to_string(cap) + " qubits");
  StateVector psi{c.n(), std::vector<Complex>(std::size_t{1} << c.n(), 0.0)};
  psi.amplitudes[0] = 1.0;
  for (const Gate &g : c.gates()) apply_gate(psi, g);
  return psi;
}

inline OutputDistribution marginal_distribution(const StateVector &psi, int k) {
  if (k < 1 || k > psi.n) throw ContractViolation("measured qubit count must be in [1, n]");
  OutputDistribution out{k, std::vector<double>(std::size_t{1} << k, 0.0)};
  const int shift = psi.n - k;
  for (std::size_t x = 0; x < psi.amplitudes.size(); ++x) out.probs[x >> shift] += std::norm(psi.amplitudes[x]);
  return out;
}

inline OutputDistribution exact_output_dist(const Circuit &c, int k, int cap = kStatevectorCap) {
  if (k < 1 || k > c.n()) throw ContractViolation("measured qubit count must be in [1, n]");
  return marginal_distribution(simulate_statevector(c, cap), k);
}

/// Repeated measurement of the first k qubits. Holds the cumulative
/// distribution so each draw is a binary search.
class OutputSampler {
 public:
  explicit OutputSampler(const OutputDistribution &dist) : cumulative_(dist.probs.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
      acc += dist.probs[i];
      cumulative_[i] = acc;
    }
  }

  Basis draw(Rng &rng) const {
    const double u = rng.uniform01() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<Basis>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

inline Basis sample_output(const Circuit &c, int k, Rng &rng) {
  return OutputSampler(exact_output_dist(c, k)).draw(rng);
}

}  // namespace rdqc
