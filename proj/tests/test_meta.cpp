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

#include "rdqc/meta.hpp"

namespace rdqc {
namespace {

IPOracle oracle(double c, double s, int m = 1) {
  IPOracle o;
  o.completeness = c;
  o.soundness = s;
  o.provers = m;
  return o;
}

double three_sigma(double p, int n) { return 3.0 * std::sqrt(p * (1 - p) / n) + 1e-12; }

ConstrainedRdqc coin_protocol(double c_yes, double witness) {
  ConstrainedRdqc r;
  r.c_yes = c_yes;
  r.witness = witness;
  r.run = [c_yes, witness](Truth truth, RdqcMode mode, Rng &rng) {
    const int right = truth == Truth::yes ? 1 : 0;
    if (mode == RdqcMode::rational) return RdqcRun{right, rng.bernoulli(c_yes) ? 1.0 : 0.0};
    return RdqcRun{1 - right, rng.bernoulli(c_yes - witness) ? 1.0 : 0.0};
  };
  return r;
}

TEST(Names, RoundTrip) {
  for (auto p : {BitPolicy::rational, BitPolicy::forced0, BitPolicy::forced1, BitPolicy::adversarial})
    EXPECT_EQ(bit_policy_from_string(to_string(p)), p);
  EXPECT_THROW(bit_policy_from_string("lazy"), ContractViolation);
  EXPECT_EQ(negate(Truth::yes), Truth::no);
  EXPECT_STREQ(to_string(Truth::no), "NO");
}

TEST(Oracle, Validation) {
  EXPECT_THROW(oracle(1.2, 0.1).validate(), ContractViolation);
  EXPECT_THROW(oracle(0.9, -0.1).validate(), ContractViolation);
  EXPECT_THROW(oracle(0.9, 0.1, 0).validate(), ContractViolation);
  EXPECT_DOUBLE_EQ(oracle(0.9, 0.2).gap(), 0.7);
}

TEST(Protocol2, TwoServersSplitTheReward) {
  const IPOracle o = oracle(0.9, 0.2, 2);
  Rng rng(1);
  const int n = 5000;
  int accepted = 0;
  for (int i = 0; i < n; ++i) {
    const MetaTranscript tr = run_protocol2(o, o, Truth::yes, Policy{}, rng);
    EXPECT_EQ(tr.b, 1);
    EXPECT_EQ(tr.branch, "L");
    EXPECT_EQ(tr.conclusion, Decision::yes);
    ASSERT_EQ(tr.rewards.size(), 2U);
    EXPECT_EQ(tr.rewards[0], tr.accepted ? 0.5 : 0.0);
    EXPECT_EQ(tr.rewards[1], tr.rewards[0]);
    accepted += tr.accepted ? 1 : 0;
  }
  EXPECT_NEAR(accepted / static_cast<double>(n), 0.9, three_sigma(0.9, n));
}

TEST(Protocol2, NoInstanceTakesComplementBranch) {
  Rng rng(2);
  const MetaTranscript tr = run_protocol2(oracle(0.9, 0.2), oracle(0.8, 0.1), Truth::no, Policy{}, rng);
  EXPECT_EQ(tr.b, 0);
  EXPECT_EQ(tr.branch, "Lbar");
  EXPECT_EQ(tr.conclusion, Decision::no);
}

TEST(Protocol2, ProverCountsMustAgree) {
  Rng rng(0);
  EXPECT_THROW(run_protocol2(oracle(0.9, 0.2, 2), oracle(0.9, 0.2, 1), Truth::yes, Policy{}, rng), ContractViolation);
  EXPECT_THROW(run_protocol2(oracle(0.9, 0.2), oracle(0.9, 0.2), Truth::yes, Policy{BitPolicy::rational, 1.5}, rng),
               ContractViolation);
}

TEST(Protocol2, PoliciesAndRho) {
  const IPOracle o = oracle(0.9, 0.2);
  Rng rng(3);
  EXPECT_EQ(run_protocol2(o, o, Truth::yes, Policy{BitPolicy::forced0, 0.0}, rng).b, 0);
  EXPECT_EQ(run_protocol2(o, o, Truth::no, Policy{BitPolicy::forced1, 0.0}, rng).b, 1);
  const int n = 10000;
  int flipped = 0, adv_accept = 0;
  for (int i = 0; i < n; ++i) {
    flipped += run_protocol2(o, o, Truth::yes, Policy{BitPolicy::rational, 0.2}, rng).b == 0 ? 1 : 0;
    const MetaTranscript adv = run_protocol2(o, o, Truth::yes, Policy{BitPolicy::adversarial, 0.0}, rng);
    EXPECT_EQ(adv.b, 0);
    adv_accept += adv.accepted ? 1 : 0;
  }
  EXPECT_NEAR(flipped / static_cast<double>(n), 0.2, three_sigma(0.2, n));
  EXPECT_LE(adv_accept / static_cast<double>(n), 0.2 + 0.02);
}

TEST(Protocol3, SingleServer) {
  const IPOracle o = oracle(0.8, 0.3);
  Rng rng(4);
  EXPECT_EQ(run_protocol3(o, Truth::no, Policy{}, rng).b, 0);
  EXPECT_EQ(run_protocol3(o, Truth::yes, Policy{}, rng).b, 1);
  EXPECT_EQ(run_protocol3(o, Truth::yes, Policy{}, rng).rewards.size(), 1U);
  EXPECT_THROW(run_protocol3(oracle(0.8, 0.3, 2), Truth::yes, Policy{}, rng), ContractViolation);
}

TEST(Protocol3, MeanRewardsMatchAcceptance) {
  const IPOracle o = oracle(0.8, 0.3);
  Rng rng(5);
  const int n = 10000;
  double honest = 0.0, adversarial = 0.0;
  for (int i = 0; i < n; ++i) {
    honest += run_protocol3(o, Truth::yes, Policy{}, rng).total();
    adversarial += run_protocol3(o, Truth::yes, Policy{BitPolicy::adversarial, 0.0}, rng).total();
  }
  EXPECT_NEAR(honest / n, 0.8, three_sigma(0.8, n));
  EXPECT_NEAR(adversarial / n, 0.3, three_sigma(0.3, n));
}

TEST(IpToRdqc, WitnessAndMargin) {
  const IPOracle o = oracle(0.9, 0.2);
  EXPECT_DOUBLE_EQ(ip_to_rdqc_witness(o, 0.0), 0.7);
  EXPECT_DOUBLE_EQ(ip_to_rdqc_witness(o, 0.1), 0.9 * 0.9 - 0.2);
  Rng rng(6);
  const int n = 20000;
  double rational = 0.0, incorrect = 0.0;
  for (int i = 0; i < n; ++i) {
    rational += ip_to_rdqc(o, o, Truth::yes, Policy{BitPolicy::rational, 0.1}, rng).total();
    incorrect += ip_to_rdqc(o, o, Truth::yes, Policy{BitPolicy::adversarial, 0.0}, rng).total();
  }
  const double expect_rational = 0.9 * 0.9 + 0.1 * 0.2;
  EXPECT_NEAR(rational / n, expect_rational, three_sigma(expect_rational, n));
  EXPECT_NEAR(incorrect / n, 0.2, three_sigma(0.2, n));
  EXPECT_GE((rational - incorrect) / n, ip_to_rdqc_witness(o, 0.1) - 3.0 * std::sqrt(0.5 / n));
}

TEST(IpToRdqc, Refusals) {
  Rng rng(0);
  EXPECT_THROW(ip_to_rdqc(oracle(0.5, 0.5), oracle(0.9, 0.2), Truth::yes, Policy{}, rng), ContractViolation);
  EXPECT_THROW(ip_to_rdqc(oracle(0.9, 0.2, 2), oracle(0.9, 0.2, 2), Truth::yes, Policy{}, rng), ContractViolation);
}

TEST(RdqcToIp, AcceptsInProportionToReward) {
  ConstrainedRdqc full;
  full.reward_bound = 2.0;
  full.run = [](Truth t, RdqcMode, Rng &) { return RdqcRun{t == Truth::yes ? 1 : 0, 2.0}; };
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    EXPECT_TRUE(rdqc_to_ip(full, Truth::yes, RdqcMode::rational, rng));
    EXPECT_FALSE(rdqc_to_ip(full, Truth::no, RdqcMode::rational, rng));
  }
  ConstrainedRdqc over = full;
  over.run = [](Truth, RdqcMode, Rng &) { return RdqcRun{1, 2.5}; };
  EXPECT_THROW(rdqc_to_ip(over, Truth::yes, RdqcMode::rational, rng), ContractViolation);
  over.run = [](Truth, RdqcMode, Rng &) { return RdqcRun{1, -0.1}; };
  EXPECT_THROW(rdqc_to_ip(over, Truth::yes, RdqcMode::rational, rng), ContractViolation);
  ConstrainedRdqc empty;
  EXPECT_THROW(rdqc_to_ip(empty, Truth::yes, RdqcMode::rational, rng), ContractViolation);

  ConstrainedRdqc half = full;
  half.run = [](Truth, RdqcMode, Rng &) { return RdqcRun{1, 0.5}; };
  const int n = 10000;
  int acc = 0;
  for (int i = 0; i < n; ++i) acc += rdqc_to_ip(half, Truth::yes, RdqcMode::rational, rng) ? 1 : 0;
  EXPECT_NEAR(acc / static_cast<double>(n), 0.25, three_sigma(0.25, n));
}

TEST(RdqcToIp, DeclaredOracle) {
  const IPOracle o = rdqc_to_ip_oracle(coin_protocol(0.6, 0.2));
  EXPECT_DOUBLE_EQ(o.completeness, 0.6);
  EXPECT_DOUBLE_EQ(o.soundness, 0.4);
  Rng rng(8);
  const int n = 10000;
  int yes = 0, no = 0;
  for (int i = 0; i < n; ++i) {
    yes += o.accept(Truth::yes, Honesty::honest, rng) ? 1 : 0;
    no += o.accept(Truth::no, Honesty::best_malicious, rng) ? 1 : 0;
  }
  EXPECT_NEAR(yes / static_cast<double>(n), 0.6, three_sigma(0.6, n));
  // On NO instances the malicious prover plays the incorrect strategy.
  EXPECT_NEAR(no / static_cast<double>(n), 0.4, three_sigma(0.4, n));
}

TEST(Majority, BinomialTail) {
  EXPECT_DOUBLE_EQ(binomial_upper_tail(3, 2, 0.5), 0.5);
  EXPECT_NEAR(binomial_upper_tail(5, 3, 0.6), 0.68256, 1e-12);
  EXPECT_EQ(binomial_upper_tail(5, 0, 0.3), 1.0);
  EXPECT_EQ(binomial_upper_tail(5, 6, 0.3), 0.0);
  EXPECT_EQ(binomial_upper_tail(5, 2, 0.0), 0.0);
  EXPECT_EQ(binomial_upper_tail(5, 2, 1.0), 1.0);
}

TEST(Majority, SimulationMatchesDeclared) {
  const IPOracle m = majority_vote(oracle(0.6, 0.4), 5);
  EXPECT_NEAR(m.completeness, 0.68256, 1e-12);
  EXPECT_NEAR(m.soundness, 1 - 0.68256, 1e-12);
  EXPECT_EQ(m.rounds, 5);
  Rng rng(9);
  const int n = 20000;
  int acc = 0;
  for (int i = 0; i < n; ++i) acc += m.accept(Truth::yes, Honesty::honest, rng) ? 1 : 0;
  EXPECT_NEAR(acc / static_cast<double>(n), m.completeness, three_sigma(m.completeness, n));
  EXPECT_THROW(majority_vote(oracle(0.6, 0.4), 4), ContractViolation);
  EXPECT_THROW(majority_vote(oracle(0.6, 0.4), 0), ContractViolation);
}

TEST(Complement, FlipsTruthAndClaim) {
  const ConstrainedRdqc base = coin_protocol(1.0, 0.5);
  const ConstrainedRdqc comp = complement(base);
  Rng rng(10);
  EXPECT_EQ(comp.run(Truth::yes, RdqcMode::rational, rng).b, 1);
  EXPECT_EQ(comp.run(Truth::no, RdqcMode::rational, rng).b, 0);
  EXPECT_EQ(comp.run(Truth::no, RdqcMode::incorrect, rng).b, 1);
}

TEST(Amplify, SingleRepetitionKeepsDeclaredValues) {
  const AmplifiedRdqc amp = amplify_gap(coin_protocol(0.6, 0.2), 1);
  EXPECT_DOUBLE_EQ(amp.oracle_l.completeness, 0.6);
  EXPECT_DOUBLE_EQ(amp.oracle_l.soundness, 0.4);
  EXPECT_DOUBLE_EQ(amp.protocol.witness, 0.2);
  EXPECT_DOUBLE_EQ(amp.protocol.reward_bound, 1.0);
}

TEST(Amplify, GapGrowsWithRepetitions) {
  const AmplifiedRdqc amp = amplify_gap(coin_protocol(0.6, 0.2), 61);
  EXPECT_NEAR(amp.oracle_l.completeness, binomial_upper_tail(61, 31, 0.6), 1e-15);
  EXPECT_GT(amp.protocol.witness, 0.7);
  Rng rng(11);
  const int n = 4000;
  double rational = 0.0, incorrect = 0.0;
  for (int i = 0; i < n; ++i) {
    const RdqcRun r = amp.protocol.run(Truth::yes, RdqcMode::rational, rng);
    const RdqcRun w = amp.protocol.run(Truth::yes, RdqcMode::incorrect, rng);
    EXPECT_EQ(w.b, 0);
    rational += r.reward;
    incorrect += w.reward;
  }
  EXPECT_GE((rational - incorrect) / n, amp.protocol.witness - 3.0 * std::sqrt(0.5 / n));
}

TEST(Amplify, RefusesWithoutMargin) {
  EXPECT_THROW(amplify_gap(coin_protocol(0.6, 0.0), 3), ContractViolation);
  EXPECT_THROW(amplify_gap(coin_protocol(0.6, -0.1), 3), ContractViolation);
  EXPECT_THROW(amplify_gap(coin_protocol(0.6, 0.2), 4), ContractViolation);
}

}  // namespace
}  // namespace rdqc
