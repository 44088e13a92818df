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

#include <gtest/gtest.h>

#include <cmath>

#include "rdqc/parser.hpp"
#include "rdqc/pathsum.hpp"
#include "rdqc/selftest.hpp"
#include "rdqc/statevector.hpp"

namespace rdqc {
namespace {

const double kR = 1.0 / std::sqrt(2.0);

Circuit hh() { return Circuit(1, {gates::H(0), gates::H(0)}); }

TEST(MatrixElement, Examples) {
  EXPECT_NEAR(matrix_element(gates::H(0), 1, 1, 1).real(), -kR, 1e-15);
  EXPECT_EQ(matrix_element(gates::CNOT(0, 1), 0b11, 0b10, 2), Complex(1.0));
  EXPECT_EQ(matrix_element(gates::CNOT(0, 1), 0b10, 0b10, 2), Complex(0.0));
  EXPECT_NEAR(matrix_element(gates::H(0), 0b01, 0b11, 2).real(), kR, 1e-15);
  EXPECT_EQ(matrix_element(gates::H(0), 0b01, 0b10, 2), Complex(0.0));
}

TEST(MatrixElement, FirstSupportQubitIsHighBitOfLocalIndex) {
  // CNOT(1, 0): control is qubit 1 (the low bit of a 2-qubit index).
  EXPECT_EQ(matrix_element(gates::CNOT(1, 0), 0b11, 0b01, 2), Complex(1.0));
  EXPECT_EQ(matrix_element(gates::CNOT(1, 0), 0b11, 0b10, 2), Complex(0.0));
}

TEST(PathAssignment, ShapeAndPacking) {
  EXPECT_EQ(path_bit_count(1, 2, 1), 2);
  EXPECT_EQ(path_bit_count(3, 4, 1), 20);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(rng.below(5));
    const int depth = 1 + static_cast<int>(rng.below(4));
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(n + 1)));
    const PathAssignment s = PathAssignment::uniform(n, depth, k, rng);
    EXPECT_EQ(s.bit_count(), (2 * depth - 1) * n - k);
    EXPECT_EQ(PathAssignment::unpack(n, depth, k, s.pack()), s);
  }
  // Layer 1 is the most significant block.
  const PathAssignment s = PathAssignment::unpack(2, 2, 1, 0b10'1'01);
  EXPECT_EQ(s.layer(1), 0b10U);
  EXPECT_EQ(s.layer(2), 0b1U);
  EXPECT_EQ(s.layer(3), 0b01U);
  EXPECT_THROW(PathAssignment(2, 2, 1, {0, 2, 0}), ContractViolation);
  EXPECT_THROW(PathAssignment(2, 2, 1, {0, 0}), ContractViolation);
}

TEST(EvalG, TwoHadamardsZeroOutcome) {
  for (std::uint64_t p = 0; p < 4; ++p) {
    const PathValue v = eval_g(hh(), 0, PathAssignment::unpack(1, 2, 1, p));
    EXPECT_NEAR(v.g.real(), 0.25, 1e-15);
    EXPECT_NEAR(v.g.imag(), 0.0, 1e-15);
    EXPECT_NEAR(v.bias, 5.0 / 8.0, 1e-15);
  }
}

TEST(EvalG, TwoHadamardsOneOutcomeSigns) {
  // (s1, s3) = 00, 01, 10, 11; layer 2 is empty for k = n.
  const double expected[] = {0.25, -0.25, -0.25, 0.25};
  for (std::uint64_t p = 0; p < 4; ++p) EXPECT_NEAR(eval_g(hh(), 1, PathAssignment::unpack(1, 2, 1, p)).g.real(), expected[p], 1e-15);
}

TEST(EvalG, CnotViolationGivesZero) {
  const Circuit bell(2, {gates::H(0), gates::CNOT(0, 1)});
  // s1 = 10, then z s2 = 1 0 would need CNOT|10> = |10>, which is wrong.
  const PathAssignment s(2, 2, 1, {0b10, 0b0, 0b10});
  EXPECT_EQ(eval_g(bell, 1, s).g, Complex(0.0));
  EXPECT_EQ(coin_bias(bell, 1, s), 0.5);
}

TEST(EvalG, ShapeMismatch) {
  EXPECT_THROW(eval_g(hh(), 0, PathAssignment::unpack(2, 2, 1, 0)), ContractViolation);
  EXPECT_THROW(eval_g(hh(), 2, PathAssignment::unpack(1, 2, 1, 0)), ContractViolation);
}

TEST(BruteForce, TwoHadamards) {
  EXPECT_NEAR(brute_force_qz(hh(), 1, 0), 1.0, 1e-15);
  EXPECT_NEAR(brute_force_qz(hh(), 1, 1), 0.0, 1e-15);
}

TEST(BruteForce, CapExceeded) {
  const Circuit c(3, {gates::H(0), gates::H(1), gates::H(2), gates::H(0), gates::H(1)});
  EXPECT_EQ(path_bit_count(3, 5, 1), 26);
  EXPECT_THROW(brute_force_qz(c, 1, 0), CapExceeded);
}

TEST(BruteForce, MatchesStatevectorOnRandomCircuits) {
  Rng rng(77);
  int checked = 0;
  while (checked < 200) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const int depth = 1 + static_cast<int>(rng.below(4));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    if (path_bit_count(n, depth, k) > 16) continue;
    const Circuit c = random_circuit(n, depth, rng, GatePool::with_rotations);
    const auto q = exact_output_dist(c, k).probs;
    const double norm = std::ldexp(1.0, static_cast<int>(-path_bit_count(n, depth, k)));
    for (Basis z = 0; z < q.size(); ++z) {
      const Complex sum = brute_force_sum(c, k, z);
      EXPECT_NEAR(sum.real(), q[z], 1e-9);
      EXPECT_NEAR(sum.imag(), 0.0, 1e-9);
      // Mean of Re g over all paths is q_z 2^-D.
      EXPECT_NEAR(sum.real() * norm, q[z] * norm, 1e-12);
    }
    ++checked;
  }
}

TEST(EvalG, BoundedAndLocal) {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const int depth = 1 + static_cast<int>(rng.below(4));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const Circuit c = random_circuit(n, depth, rng, GatePool::with_rotations);
    for (int j = 0; j < 50; ++j) {
      const PathAssignment s = PathAssignment::uniform(n, depth, k, rng);
      const Basis z = rng.below(std::uint64_t{1} << k);
      const PathValue v = eval_g(c, z, s);
      EXPECT_LE(std::abs(v.g), 1.0 + 1e-12);
      EXPECT_GE(v.bias, -1e-12);
      EXPECT_LE(v.bias, 1.0 + 1e-12);
      // Layer pairs that differ off the acting gate's support force g = 0.
      const Basis first = s.layer(1) & ~c.gate(0).support_mask(n);
      if (depth > 1 && first != 0) {
        EXPECT_EQ(v.g, Complex(0.0));
      }
    }
  }
}

TEST(CoinBias, HalfForZeroPathAndFiveEighthsForTwoHadamards) {
  EXPECT_NEAR(coin_bias(hh(), 0, PathAssignment::unpack(1, 2, 1, 3)), 5.0 / 8.0, 1e-15);
  const Circuit x(1, {gates::X(0), gates::X(0)});
  EXPECT_EQ(coin_bias(x, 0, PathAssignment::unpack(1, 2, 1, 0)), 0.5);
}

}  // namespace
}  // namespace rdqc
