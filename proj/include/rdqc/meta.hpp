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
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "rdqc/client.hpp"
#include "rdqc/error.hpp"
#include "rdqc/rng.hpp"

namespace rdqc {

enum class Truth { no, yes };

inline Truth negate(Truth t) { return t == Truth::yes ? Truth::no : Truth::yes; }
inline const char *to_string(Truth t) { return t == Truth::yes ? "YES" : "NO"; }

enum class Honesty { honest, best_malicious };

/// An interactive proof or argument for one language, described only by its
/// acceptance behavior. Without a custom sampler, the verifier accepts with
/// probability c' on members and s' on non-members whatever the provers do.
struct IPOracle {
  double completeness = 2.0 / 3.0;  // c'
  double soundness = 1.0 / 3.0;     // s'
  int provers = 1;                  // M
  int rounds = 1;
  std::function<bool(Truth, Honesty, Rng &)> sampler;  // optional

  void validate() const {
    if (!(completeness >= 0.0 && completeness <= 1.0) || !(soundness >= 0.0 && soundness <= 1.0))
      throw ContractViolation("acceptance probabilities must lie in [0, 1]");
    if (provers < 1 || rounds < 1) throw ContractViolation("oracle needs at least one prover and one round");
  }

  double gap() const { return completeness - soundness; }

  /// Declared acceptance probability.
  double accept_prob(Truth membership, Honesty) const { return membership == Truth::yes ? completeness : soundness; }

  bool accept(Truth membership, Honesty h, Rng &rng) const {
    if (sampler) return sampler(membership, h, rng);
    return rng.bernoulli(accept_prob(membership, h));
  }
};

enum class BitPolicy { rational, forced0, forced1, adversarial };

inline const char *to_string(BitPolicy p) {
  switch (p) {
    case BitPolicy::rational: return "rational";
    case BitPolicy::forced0: return "forced0";
    case BitPolicy::forced1: return "forced1";
    case BitPolicy::adversarial: return "adversarial";
  }
  return "?";
}

inline BitPolicy bit_policy_from_string(const std::string &s) {
  for (auto p : {BitPolicy::rational, BitPolicy::forced0, BitPolicy::forced1, BitPolicy::adversarial})
    if (s == to_string(p)) return p;
  throw ContractViolation("unknown bit policy '" + s + "'");
}

/// How the server picks its claim bit. rational compares the two branches'
/// declared expected rewards and then errs with probability rho; adversarial
/// always claims the wrong answer.
struct Policy {
  BitPolicy kind = BitPolicy::rational;
  double rho = 0.0;

  void validate() const {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ContractViolation("policy error rate rho must lie in [0, 1]");
  }
};

struct MetaTranscript {
  int b = 0;
  std::string branch;  // "L" or "Lbar"
  bool accepted = false;
  std::vector<double> rewards;
  Decision conclusion = Decision::no;

  double total() const {
    double s = 0.0;
    for (double r : rewards) s += r;
    return s;
  }
};

namespace detail {

inline int choose_bit(const Policy &policy, const IPOracle &oracle_l, const IPOracle &oracle_lbar, Truth truth, Rng &rng) {
  policy.validate();
  switch (policy.kind) {
    case BitPolicy::forced0: return 0;
    case BitPolicy::forced1: return 1;
    case BitPolicy::adversarial: return truth == Truth::yes ? 0 : 1;
    case BitPolicy::rational: break;
  }
  const double e1 = oracle_l.accept_prob(truth, Honesty::honest);
  const double e0 = oracle_lbar.accept_prob(negate(truth), Honesty::honest);
  int b = e1 > e0 ? 1 : 0;
  if (policy.rho > 0.0 && rng.bernoulli(policy.rho)) b = 1 - b;
  return b;
}

// Steps 1-4 shared by every claim-bit wrapper. Each of the M servers gets
// reward / M when the simulated verifier accepts.
inline MetaTranscript claim_and_simulate(const IPOracle &oracle_l, const IPOracle &oracle_lbar, Truth truth, const Policy &policy,
                                         double reward, SeedTree seeds) {
  oracle_l.validate();
  oracle_lbar.validate();
  if (oracle_l.provers != oracle_lbar.provers) throw ContractViolation("both oracles must use the same number of provers");
  Rng policy_rng = seeds.stream("policy");
  Rng oracle_rng = seeds.stream("oracle");
  MetaTranscript tr;
  tr.b = choose_bit(policy, oracle_l, oracle_lbar, truth, policy_rng);
  const bool honest = (tr.b == 1) == (truth == Truth::yes);
  const Honesty h = honest ? Honesty::honest : Honesty::best_malicious;
  if (tr.b == 1) {
    tr.branch = "L";
    tr.accepted = oracle_l.accept(truth, h, oracle_rng);
  } else {
    tr.branch = "Lbar";
    tr.accepted = oracle_lbar.accept(negate(truth), h, oracle_rng);
  }
  const int m = oracle_l.provers;
  tr.rewards.assign(static_cast<std::size_t>(m), tr.accepted ? reward / m : 0.0);
  tr.conclusion = tr.b == 1 ? Decision::yes : Decision::no;
  return tr;
}

}  // namespace detail

/// Multi-server wrapper: total reward 1 split over M servers on acceptance.
inline MetaTranscript run_protocol2(const IPOracle &oracle_l, const IPOracle &oracle_lbar, Truth truth, const Policy &policy,
                                    Rng &rng) {
  return detail::claim_and_simulate(oracle_l, oracle_lbar, truth, policy, 1.0, SeedTree(rng.next_u64()));
}

/// Single-server argument wrapper: reward 1 on acceptance; the same argument
/// system serves both L and its complement.
inline MetaTranscript run_protocol3(const IPOracle &oracle, Truth truth, const Policy &policy, Rng &rng) {
  if (oracle.provers != 1) throw ContractViolation("the single-server wrapper needs a one-prover oracle");
  return detail::claim_and_simulate(oracle, oracle, truth, policy, 1.0, SeedTree(rng.next_u64()));
}

/// Single-prover proof systems for L and its complement turned into a
/// constrained rational protocol with reward bound 1.
inline MetaTranscript ip_to_rdqc(const IPOracle &oracle_l, const IPOracle &oracle_lbar, Truth truth, const Policy &policy, Rng &rng) {
  if (oracle_l.provers != 1 || oracle_lbar.provers != 1) throw ContractViolation("ip_to_rdqc needs single-prover oracles");
  if (!(oracle_l.gap() > 0.0) || !(oracle_lbar.gap() > 0.0))
    throw ContractViolation("constrained condition fails: completeness must exceed soundness");
  return detail::claim_and_simulate(oracle_l, oracle_lbar, truth, policy, 1.0, SeedTree(rng.next_u64()));
}

/// Declared incorrectness margin c'(1 - rho) - s' of the converted protocol.
/// The realized margin is (1 - rho)(c' - s'), never smaller.
inline double ip_to_rdqc_witness(const IPOracle &oracle, double rho) {
  return oracle.completeness * (1.0 - rho) - oracle.soundness;
}

enum class RdqcMode { rational, incorrect };

struct RdqcRun {
  int b = 0;
  double reward = 0.0;
};

/// A rational protocol with a known reward bound c, expected rational reward
/// c_yes on members and margin witness >= c_yes - max incorrect E[R].
struct ConstrainedRdqc {
  double reward_bound = 1.0;  // c
  double c_yes = 1.0;
  double witness = 0.0;  // 1/f
  std::function<RdqcRun(Truth, RdqcMode, Rng &)> run;

  void validate() const {
    if (!(reward_bound > 0.0)) throw ContractViolation("reward bound c must be positive");
    if (!run) throw ContractViolation("constrained protocol has no runner");
  }
};

/// Verifier built from a rational protocol: on b = 1 accept with probability
/// R / c, on b = 0 reject.
inline bool rdqc_to_ip(const ConstrainedRdqc &rdqc, Truth truth, RdqcMode mode, Rng &rng) {
  rdqc.validate();
  const RdqcRun r = rdqc.run(truth, mode, rng);
  if (r.reward > rdqc.reward_bound * (1.0 + 1e-12) || r.reward < 0.0)
    throw ContractViolation("wrapped protocol paid " + std::to_string(r.reward) + " outside [0, c]");
  if (r.b != 1) return false;
  return rng.bernoulli(std::min(1.0, r.reward / rdqc.reward_bound));
}

/// The same verifier as an oracle: the honest prover plays the rational
/// server, the malicious one the incorrect strategy. Declared gap is
/// witness / c.
inline IPOracle rdqc_to_ip_oracle(ConstrainedRdqc rdqc) {
  rdqc.validate();
  IPOracle o;
  o.completeness = std::clamp(rdqc.c_yes / rdqc.reward_bound, 0.0, 1.0);
  o.soundness = std::clamp((rdqc.c_yes - rdqc.witness) / rdqc.reward_bound, 0.0, 1.0);
  o.sampler = [rdqc](Truth membership, Honesty, Rng &rng) {
    return rdqc_to_ip(rdqc, membership, membership == Truth::yes ? RdqcMode::rational : RdqcMode::incorrect, rng);
  };
  return o;
}

/// P[Binomial(n, p) >= k].
inline double binomial_upper_tail(std::uint64_t n, std::uint64_t k, double p) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
  return boost::math::cdf(boost::math::complement(dist, static_cast<double>(k - 1)));
}

/// Accept iff more than half of reps independent runs accept.
inline IPOracle majority_vote(IPOracle base, int reps) {
  base.validate();
  if (reps < 1 || reps % 2 == 0) throw ContractViolation("majority vote needs an odd repetition count");
  IPOracle o;
  const auto need = static_cast<std::uint64_t>(reps / 2 + 1);
  o.completeness = binomial_upper_tail(static_cast<std::uint64_t>(reps), need, base.completeness);
  o.soundness = binomial_upper_tail(static_cast<std::uint64_t>(reps), need, base.soundness);
  o.provers = base.provers;
  o.rounds = base.rounds * reps;
  o.sampler = [base, reps](Truth membership, Honesty h, Rng &rng) {
    int yes = 0;
    for (int i = 0; i < reps; ++i) yes += base.accept(membership, h, rng) ? 1 : 0;
    return 2 * yes > reps;
  };
  return o;
}

/// The protocol for the complement language: membership and claim bit flip.
inline ConstrainedRdqc complement(ConstrainedRdqc base) {
  base.validate();
  ConstrainedRdqc out = base;
  out.run = [base](Truth truth, RdqcMode mode, Rng &rng) {
    RdqcRun r = base.run(negate(truth), mode, rng);
    r.b = 1 - r.b;
    return r;
  };
  return out;
}

/// Conversion result of amplify_gap.
struct AmplifiedRdqc {
  IPOracle oracle_l;
  IPOracle oracle_lbar;
  ConstrainedRdqc protocol;
};

/// rdqc_to_ip, majority over reps runs, then ip_to_rdqc.
inline AmplifiedRdqc amplify_gap(const ConstrainedRdqc &base, const ConstrainedRdqc &base_lbar, int reps, double rho = 0.0) {
  base.validate();
  base_lbar.validate();
  if (!(base.witness > 0.0) || !(base_lbar.witness > 0.0))
    throw ContractViolation("base protocol has no positive incorrectness margin; amplification refused");
  AmplifiedRdqc out;
  out.oracle_l = majority_vote(rdqc_to_ip_oracle(base), reps);
  out.oracle_lbar = majority_vote(rdqc_to_ip_oracle(base_lbar), reps);
  out.protocol.reward_bound = 1.0;
  out.protocol.c_yes = out.oracle_l.completeness * (1.0 - rho);
  out.protocol.witness = ip_to_rdqc_witness(out.oracle_l, rho);
  out.protocol.run = [l = out.oracle_l, lbar = out.oracle_lbar, rho](Truth truth, RdqcMode mode, Rng &rng) {
    const Policy policy{mode == RdqcMode::rational ? BitPolicy::rational : BitPolicy::adversarial, rho};
    const MetaTranscript tr = ip_to_rdqc(l, lbar, truth, policy, rng);
    return RdqcRun{tr.b, tr.total()};
  };
  return out;
}

inline AmplifiedRdqc amplify_gap(const ConstrainedRdqc &base, int reps, double rho = 0.0) {
  return amplify_gap(base, complement(base), reps, rho);
}

}  // namespace rdqc
