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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rdqc/circuit.hpp"
#include "rdqc/client.hpp"
#include "rdqc/dyadic_sampler.hpp"
#include "rdqc/meta.hpp"
#include "rdqc/pathsum.hpp"
#include "rdqc/reward.hpp"
#include "rdqc/rng.hpp"
#include "rdqc/server.hpp"
#include "rdqc/statevector.hpp"

namespace rdqc {

/// Gate pool for random instances.
enum class GatePool { clifford_t, with_rotations };

/// Uniformly random gates on distinct random qubits; gates wider than n are skipped.
inline Circuit random_circuit(int n, int depth, Rng &rng, GatePool pool = GatePool::clifford_t) {
  static const char *kNames[] = {"H", "T", "S", "X", "CNOT", "CZ", "CCX"};
  const std::size_t choices = pool == GatePool::with_rotations ? 8 : 7;
  std::vector<Gate> gs;
  while (static_cast<int>(gs.size()) < depth) {
    const std::size_t pick = rng.below(choices);
    const int arity = pick == 7 ? 1 : gates::named_arity(kNames[pick]);
    if (arity > n) continue;
    std::vector<int> q;
    while (static_cast<int>(q.size()) < arity) {
      const int cand = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      if (std::find(q.begin(), q.end(), cand) == q.end()) q.push_back(cand);
    }
    gs.push_back(pick == 7 ? gates::RY(q[0], rng.uniform01() * 2.0 * M_PI) : gates::make_named(kNames[pick], q));
  }
  return Circuit(n, std::move(gs));
}

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SelftestOptions {
  std::uint64_t seed = 20261016;
};

namespace acceptance {

inline double three_sigma(double p, double n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

inline std::string fmt(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

/// Path sums reproduce statevector output probabilities.
inline CriterionResult path_sum_correctness(const SelftestOptions &opt) {
  Rng rng = SeedTree(opt.seed).stream("c1");
  int circuits = 0;
  double worst = 0.0;
  while (circuits < 200) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const int depth = 1 + static_cast<int>(rng.below(4));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    if (path_bit_count(n, depth, k) > 20) continue;
    const Circuit c = random_circuit(n, depth, rng);
    const OutputDistribution q = exact_output_dist(c, k);
    for (Basis z = 0; z < q.probs.size(); ++z) {
      const Complex sum = brute_force_sum(c, k, z);
      worst = std::max({worst, std::abs(sum.real() - q.probs[z]), std::abs(sum.imag())});
    }
    ++circuits;
  }
  return {1, "path-sum correctness", worst <= 1e-9,
          std::to_string(circuits) + " circuits, max |sum g - q| = " + fmt(worst) + " (tol 1e-9)"};
}

/// Closed-form expected reward equals exhaustive (s, b) enumeration.
inline CriterionResult closed_form_equivalence(const SelftestOptions &opt) {
  Rng rng = SeedTree(opt.seed).stream("c2");
  int triples = 0;
  double worst = 0.0, worst_scaled = 0.0;
  while (triples < 200) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const int depth = 1 + static_cast<int>(rng.below(4));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const std::int64_t d = path_bit_count(n, depth, k);
    if (d > 20) continue;
    const Circuit c = random_circuit(n, depth, rng);
    const Basis z = rng.below(std::uint64_t{1} << k);
    const double y = rng.uniform01() / 2.0;
    const double q = exact_output_dist(c, k).probs[z];
    const double divisor = std::ldexp(1.0, k);
    worst = std::max(worst, std::abs(expected_reward_closed_form(q, y, d, divisor) - exhaustive_expected_reward(c, z, y, k)));
    worst_scaled = std::max(worst_scaled, std::abs(scaled_reward_excess(q, y) - exhaustive_reward_excess(c, z, y, k)));
    ++triples;
  }
  return {2, "closed-form expected reward", worst <= 1e-12 && worst_scaled <= 1e-9,
          std::to_string(triples) + " triples, max |diff| = " + fmt(worst) + " (tol 1e-12), scaled excess diff " +
              fmt(worst_scaled) + " (tol 1e-9)"};
}

/// The grid argmax sits within one step of q/2 and the maximum is unique.
inline CriterionResult unique_argmax(const SelftestOptions &opt) {
  Rng rng = SeedTree(opt.seed).stream("c3");
  const double step = 1e-4;
  int failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double q = rng.uniform01();
    const auto d = static_cast<std::int64_t>(1 + rng.below(1000));
    const double ystar = argmax_scan(q, d, 2.0, step);
    worst = std::max(worst, std::abs(ystar - q / 2.0));
    bool ok = std::abs(ystar - q / 2.0) <= step + 1e-15;
    const double top = scaled_reward_excess(q, q / 2.0);
    for (int j = 0; j <= 5000 && ok; ++j) {
      const double y = std::min(0.5, j * step);
      if (std::abs(y - q / 2.0) >= step && !(scaled_reward_excess(q, y) < top)) ok = false;
    }
    failures += ok ? 0 : 1;
  }
  return {3, "unique argmax at q/2", failures == 0,
          "1000 (q, D) pairs, max |y* - q/2| = " + fmt(worst) + ", failures " + std::to_string(failures)};
}

/// Full protocol with the (f, h) = (10, 5) schedule lands within 1/f.
inline CriterionResult estimation_end_to_end(const SelftestOptions &opt) {
  const SeedTree root(opt.seed);
  Rng circ_rng = root.stream("c4-circuits");
  std::vector<std::pair<std::string, Circuit>> cases;
  const Circuit bell(2, {gates::H(0), gates::CNOT(0, 1)});
  cases.emplace_back("bell", bell);
  cases.emplace_back("random3", random_circuit(3, 6, circ_rng));
  const double f = 10.0, h = 5.0;
  const int runs = 200;
  const double target = 1.0 - std::exp(-h);
  const double floor_rate = target - three_sigma(target, runs);
  StrategyConfig cfg;
  cfg.kind = StrategyKind::honest_sampling;
  cfg.schedule = std::pair{f, h};
  const Protocol1Server server = make_protocol1_server(cfg);
  bool pass = true;
  std::string detail;
  for (const auto &[name, c] : cases) {
    for (int k = 1; k <= 2; ++k) {
      const OutputDistribution q = exact_output_dist(c, k);
      int hits = 0;
      for (int r = 0; r < runs; ++r) {
        ProtocolParams params;
        params.k = k;
        params.f = f;
        params.h = h;
        params.seed = root.child("c4").child(name).child(static_cast<std::uint64_t>(k)).child(static_cast<std::uint64_t>(r)).key();
        const ProtocolReport rep = run_protocol1(c, server, params);
        hits += l1_distance(rep.p, q.probs) <= 1.0 / f ? 1 : 0;
      }
      const double rate = static_cast<double>(hits) / runs;
      pass = pass && rate >= floor_rate;
      detail += name + " k=" + std::to_string(k) + ": " + fmt(rate) + "; ";
    }
  }
  return {4, "estimation end to end", pass, detail + "floor " + fmt(floor_rate)};
}

/// Realized totals stay within 3/2 +- 4 2^-D; the vertex total is at least 3/2.
inline CriterionResult reward_envelope(const SelftestOptions &opt) {
  Rng rng = SeedTree(opt.seed).stream("c5");
  bool pass = true;
  double worst_ratio = 0.0;
  std::string detail;
  for (int k = 1; k <= 3; ++k) {
    const int grid = k == 1 ? 11 : (k == 2 ? 5 : 3);
    const std::size_t outcomes = std::size_t{1} << k;
    for (std::int64_t d : {std::int64_t{k + 1}, std::int64_t{7}, std::int64_t{13}, std::int64_t{20}}) {
      const double divisor = std::ldexp(1.0, k);
      const double bound = std::ldexp(4.0, static_cast<int>(-d));
      std::vector<double> y(outcomes);
      std::vector<int> b(outcomes);
      std::uint64_t ycount = 1;
      for (std::size_t i = 0; i < outcomes; ++i) ycount *= static_cast<std::uint64_t>(grid);
      for (std::uint64_t yi = 0; yi < ycount; ++yi) {
        std::uint64_t rest = yi;
        for (std::size_t i = 0; i < outcomes; ++i) {
          y[i] = 0.5 * static_cast<double>(rest % static_cast<std::uint64_t>(grid)) / (grid - 1);
          rest /= static_cast<std::uint64_t>(grid);
        }
        for (std::uint64_t bi = 0; bi < (std::uint64_t{1} << outcomes); ++bi) {
          for (std::size_t i = 0; i < outcomes; ++i) b[i] = static_cast<int>((bi >> i) & 1U);
          const double dev = std::abs(realized_total_reward(y, b, d, divisor) - 1.5);
          worst_ratio = std::max(worst_ratio, dev / bound);
          if (dev > bound) pass = false;
        }
      }
    }
    for (int trial = 0; trial < 20; ++trial) {
      const Circuit c = random_circuit(3, 1 + static_cast<int>(rng.below(3)), rng);
      const OutputDistribution q = exact_output_dist(c, k);
      const std::int64_t d = path_bit_count(3, c.depth(), k);
      double scaled = 0.0;
      for (double qz : q.probs) scaled += scaled_reward_excess(qz, qz / 2.0) / std::ldexp(1.0, k);
      if (!(max_expected_total(q.probs, d, std::ldexp(1.0, k)) >= 1.5) || !(scaled >= std::ldexp(1.0, -(2 * k + 1)) * (1 - 1e-12)))
        pass = false;
    }
  }
  detail = "max |total - 3/2| / (4 2^-D) = " + fmt(worst_ratio) + " over all coins and gridded reports, k <= 3";
  return {5, "total reward envelope", pass, detail};
}

/// Q-CIRCUIT decisions with the k = 1 schedule on YES and NO instances.
inline CriterionResult qcircuit_decision(const SelftestOptions &opt) {
  const SeedTree root(opt.seed);
  const double f = 10.0, h = 5.0;
  const int runs = 500;
  struct Instance {
    std::string name;
    Circuit circuit;
    Decision truth;
  };
  const std::vector<Instance> instances = {
      {"yes1", Circuit(1, {gates::X(0), gates::H(0), gates::T(0), gates::H(0)}), Decision::yes},
      {"no1", Circuit(1, {gates::H(0), gates::T(0), gates::H(0)}), Decision::no},
      // First qubit rotated to q_1 = 3/4 (YES) or 1/4 (NO), entangled with two more.
      {"yes3", Circuit(3, {gates::RY(0, 2.0 * M_PI / 3.0), gates::H(1), gates::CNOT(1, 2), gates::CZ(0, 2), gates::T(1)}), Decision::yes},
      {"no3", Circuit(3, {gates::RY(0, M_PI / 3.0), gates::H(2), gates::CNOT(2, 1), gates::CZ(0, 1), gates::S(2)}), Decision::no},
  };
  StrategyConfig cfg;
  cfg.kind = StrategyKind::honest_sampling;
  cfg.schedule = std::pair{f, h};
  const Protocol1Server server = make_protocol1_server(cfg);
  const double p_fail = std::exp(-h);
  const double ceiling = p_fail + three_sigma(p_fail, runs);
  bool pass = true;
  std::string detail;
  for (const auto &inst : instances) {
    const double q1 = exact_output_dist(inst.circuit, 1).probs[1];
    if ((inst.truth == Decision::yes) != (q1 >= 2.0 / 3.0) || (inst.truth == Decision::no) != (q1 <= 1.0 / 3.0)) pass = false;
    int wrong = 0;
    for (int r = 0; r < runs; ++r) {
      ProtocolParams params;
      params.f = f;
      params.h = h;
      params.seed = root.child("c6").child(inst.name).child(static_cast<std::uint64_t>(r)).key();
      wrong += run_decision(inst.circuit, server, params).decision != inst.truth ? 1 : 0;
    }
    const double rate = static_cast<double>(wrong) / runs;
    pass = pass && rate <= ceiling;
    detail += inst.name + " (q1=" + fmt(q1) + ") wrong " + fmt(rate) + "; ";
  }
  return {6, "Q-CIRCUIT decision", pass, detail + "ceiling " + fmt(ceiling)};
}

/// Sparse protocol: list coverage, estimator accuracy, recovery, swap gap.
inline CriterionResult sparse_suite(const SelftestOptions &opt) {
  const SeedTree root(opt.seed);
  Rng rng = root.stream("c7");
  bool pass_a = true;
  struct Shape {
    int n;
    std::uint64_t t;
    double eps;
  };
  const Shape shapes[] = {{4, 1, 1.0 / 6.0}, {5, 2, 1.0 / 6.0}, {5, 1, 1.0 / 8.0}, {5, 2, 1.0 / 8.0}};
  for (int i = 0; i < 200; ++i) {
    const Shape &s = shapes[i % 4];
    const Circuit c = random_circuit(s.n, 2 + static_cast<int>(rng.below(5)), rng, GatePool::with_rotations);
    const SparseParams sp = SparseParams::make(s.t, s.eps, 1e-3);
    const OutputDistribution q = exact_output_dist(c, s.n);
    const SparseList list = build_sparse_list(q, sp);
    if (list.entries.size() != sp.list_size()) pass_a = false;
    for (Basis z = 0; z < q.probs.size(); ++z)
      if (q.probs[z] >= sp.heavy_threshold() && std::find(list.entries.begin(), list.entries.end(), z) == list.entries.end())
        pass_a = false;
  }

  // (b) and (c): Bell pair in five qubits (t = 2) and uniform over four
  // outcomes in six qubits (t = 4).
  const double delta = 1e-3;
  const int runs = 200;
  struct Case {
    std::string name;
    Circuit circuit;
    std::uint64_t t;
  };
  const std::vector<Case> cases = {{"bell5", Circuit(5, {gates::H(0), gates::CNOT(0, 1)}), 2},
                                   {"uniform4", Circuit(6, {gates::H(0), gates::H(1)}), 4}};
  bool pass_b = true, pass_c = true;
  std::string detail;
  for (const auto &cs : cases) {
    const SparseParams sp = SparseParams::make(cs.t, 1.0 / 6.0, delta);
    const OutputDistribution q = exact_output_dist(cs.circuit, cs.circuit.n());
    const SparseList list = build_sparse_list(q, sp);
    int held = 0, recovered = 0;
    for (int r = 0; r < runs; ++r) {
      Rng run_rng = root.child("c7").child(cs.name).child(static_cast<std::uint64_t>(r)).stream();
      const std::vector<double> eta = sparse_eta(q, list, sp, run_rng);
      std::vector<double> eta_full(q.probs.size(), 0.0), p_full(q.probs.size(), 0.0);
      const std::vector<double> p = recover_sparse_dist(eta, sp);
      for (std::size_t i = 0; i < list.entries.size(); ++i) {
        eta_full[list.entries[i]] = eta[i];
        p_full[list.entries[i]] = p[i];
      }
      const bool ok = l1_distance(eta_full, q.probs) <= 3.0 * sp.eps;
      held += ok ? 1 : 0;
      if (ok) {
        const bool rec = l1_distance(p_full, q.probs) <= 12.0 * sp.eps;
        recovered += rec ? 1 : 0;
        pass_c = pass_c && rec;
      }
    }
    const double rate = static_cast<double>(held) / runs;
    pass_b = pass_b && rate >= 1.0 - delta - three_sigma(1.0 - delta, runs);
    detail += cs.name + " l=" + std::to_string(sp.list_size()) + " estimator " + fmt(rate) + ", recovery " +
              std::to_string(recovered) + "/" + std::to_string(held) + "; ";
  }

  // (d): a heavy z1 reported from an estimate against a light z2 reported
  // at its optimum.
  const SparseParams sp = SparseParams::make(2, 1.0 / 6.0, 1e-3);
  const double eps_prime = swap_threshold(sp) / 2.0;
  bool pass_d = swap_gap_bound(sp.heavy_threshold(), 1.0 / static_cast<double>(sp.list_size()), sp, eps_prime, eps_prime / 2.0,
                               2 * 5) > 0.0;
  int pairs = 0, attempts = 0;
  double min_diff = 1e300;
  while (pairs < 50 && attempts < 5000) {
    ++attempts;
    const Circuit c = random_circuit(5, 2, rng, GatePool::with_rotations);
    const OutputDistribution q = exact_output_dist(c, 5);
    const SparseList list = build_sparse_list(q, sp);
    Basis z1 = 0;
    for (Basis z = 1; z < q.probs.size(); ++z)
      if (q.probs[z] > q.probs[z1]) z1 = z;
    std::vector<Basis> light;
    for (Basis z = 0; z < q.probs.size(); ++z)
      if (q.probs[z] <= 1.0 / static_cast<double>(sp.list_size())) light.push_back(z);
    if (q.probs[z1] < sp.heavy_threshold() || light.empty()) continue;
    const Basis z2 = light[rng.below(light.size())];
    Rng est_rng = root.child("c7d").child(static_cast<std::uint64_t>(pairs)).stream();
    const std::vector<double> eta = sparse_eta(q, list, sp, est_rng);
    const auto pos = static_cast<std::size_t>(std::find(list.entries.begin(), list.entries.end(), z1) - list.entries.begin());
    const double y1 = std::min(0.5, eta[pos] / 2.0);
    const double y2 = q.probs[z2] / 2.0;
    const double l = static_cast<double>(sp.list_size());
    const double diff = exhaustive_expected_reward(c, z1, y1, 5, l) - exhaustive_expected_reward(c, z2, y2, 5, l);
    const double diff_scaled = exhaustive_reward_excess(c, z1, y1, 5) - exhaustive_reward_excess(c, z2, y2, 5);
    min_diff = std::min(min_diff, diff);
    if (!(diff > 0.0) || !(diff_scaled > 0.0)) pass_d = false;
    pass_d = pass_d && swap_gap_bound(q.probs[z1], q.probs[z2], sp, eps_prime, eps_prime / 2.0, 2 * 5) > 0.0;
    ++pairs;
  }
  pass_d = pass_d && pairs == 50;
  detail += "(a) " + std::string(pass_a ? "ok" : "FAIL") + " (b) " + (pass_b ? "ok" : "FAIL") + " (c) " + (pass_c ? "ok" : "FAIL") +
            " (d) " + std::to_string(pairs) + " pairs, min E[R(z1)] - E[R(z2)] = " + fmt(min_diff);
  return {7, "sparse protocol suite", pass_a && pass_b && pass_c && pass_d, detail};
}

/// Truncated dyadic sampler: exact l1 bound, validity, draw frequencies.
inline CriterionResult dyadic_sampler(const SelftestOptions &opt) {
  Rng rng = SeedTree(opt.seed).stream("c8");
  bool pass = true;
  for (int i = 0; i < 1000; ++i) {
    const int k = 1 + static_cast<int>(rng.below(6));
    const auto m = static_cast<unsigned>(2 * k + rng.below(static_cast<std::uint64_t>(61 - 2 * k)));
    const std::size_t size = std::size_t{1} << k;
    // Integer weights over 2^52, so t is exact in double and sums to 1.
    std::vector<std::uint64_t> w(size);
    std::uint64_t remaining = std::uint64_t{1} << 52;
    for (std::size_t j = 0; j + 1 < size; ++j) {
      w[j] = rng.below(remaining / 2 + 1);
      remaining -= w[j];
    }
    w[size - 1] = remaining;
    std::vector<double> t(size);
    for (std::size_t j = 0; j < size; ++j) t[j] = std::ldexp(static_cast<double>(w[j]), -52);
    const BinaryApproxDist d = build_approx(t, m);
    BigInt sum = 0, l1 = 0;
    const unsigned top = std::max(m, 52U);
    for (std::size_t j = 0; j < size; ++j) {
      if (d.numerators()[j] < 0) pass = false;
      sum += d.numerators()[j];
      const BigInt a = d.numerators()[j] << (top - m);
      const BigInt b = BigInt(w[j]) << (top - 52);
      l1 += a > b ? a - b : b - a;
    }
    if (sum != (BigInt(1) << m)) pass = false;
    // l1 <= (2^k - 1) 2^(1-m), scaled by 2^top.
    if (l1 > (BigInt(size - 1) << (top + 1 - m))) pass = false;
  }
  // Frequencies for one eight-outcome distribution and one coin.
  const std::vector<double> t8 = {0.3, 0.05, 0.15, 0.0, 0.2, 0.1, 0.125, 0.075};
  const BinaryApproxDist d8 = build_approx(t8, 24);
  const int draws = 100000;
  std::vector<int> counts(8, 0);
  for (int i = 0; i < draws; ++i) ++counts[draw(d8, rng)];
  double worst_z = 0.0;
  for (std::size_t j = 0; j < 8; ++j) {
    const double p = d8.approx(j);
    const double sd = std::sqrt(draws * p * (1 - p));
    const double dev = std::abs(counts[j] - draws * p);
    if (sd == 0.0) {
      if (counts[j] != 0) pass = false;
    } else {
      worst_z = std::max(worst_z, dev / sd);
      if (dev > 3.0 * sd) pass = false;
    }
  }
  const double bias = 0.8535533905932737;
  int heads = 0;
  for (int i = 0; i < draws; ++i) heads += flip_biased_coin(bias, 40, rng);
  const double sd = std::sqrt(draws * bias * (1 - bias));
  worst_z = std::max(worst_z, std::abs(heads - draws * bias) / sd);
  if (std::abs(heads - draws * bias) > 3.0 * sd) pass = false;
  return {8, "dyadic sampler", pass, "1000 distributions checked exactly; worst frequency z-score " + fmt(worst_z)};
}

/// Claim-bit wrappers transfer the completeness-soundness gap to rewards.
inline CriterionResult meta_gap_transfer(const SelftestOptions &opt) {
  const std::uint64_t trials = 10000;
  IPOracle o2;
  o2.completeness = 2.0 / 3.0;
  o2.soundness = 1.0 / 3.0;
  o2.provers = 2;
  bool rewards_ok = true;
  auto runner2 = [&](Truth truth) {
    return [&, truth](const Policy &p, std::uint64_t s) {
      Rng rng(s);
      const MetaTranscript tr = run_protocol2(o2, o2, truth, p, rng);
      for (double r : tr.rewards)
        if (r != 0.0 && r != 0.5) rewards_ok = false;
      if (tr.total() != 0.0 && tr.total() != 1.0) rewards_ok = false;
      return TrialOutcome{tr.total(), (tr.conclusion == Decision::yes) == (truth == Truth::yes)};
    };
  };
  const Policy rational{BitPolicy::rational, 0.0};
  const std::vector<Policy> adversaries = {{BitPolicy::adversarial, 0.0}};
  const GapReport yes2 = measure_reward_gap(runner2(Truth::yes), rational, adversaries, trials, opt.seed);
  const GapReport no2 = measure_reward_gap(runner2(Truth::no), rational, adversaries, trials, opt.seed + 1);
  IPOracle o3;
  o3.completeness = 1.0 - 1e-6;
  o3.soundness = 1.0 / 3.0;
  auto runner3 = [&](const Policy &p, std::uint64_t s) {
    Rng rng(s);
    const MetaTranscript tr = run_protocol3(o3, Truth::yes, p, rng);
    return TrialOutcome{tr.total(), tr.conclusion == Decision::yes};
  };
  const GapReport yes3 = measure_reward_gap(runner3, rational, adversaries, trials, opt.seed + 2);
  const bool pass = std::abs(yes2.gap - 1.0 / 3.0) <= 0.02 && std::abs(no2.gap - 1.0 / 3.0) <= 0.02 &&
                    yes2.rational_expectation >= 2.0 / 3.0 - 0.02 && no2.rational_expectation >= 2.0 / 3.0 - 0.02 && rewards_ok &&
                    std::abs(yes3.gap - 2.0 / 3.0) <= 0.02 && yes2.adversary_flipped && yes3.adversary_flipped;
  return {9, "meta-protocol gap transfer", pass,
          "two-prover gap " + fmt(yes2.gap) + " (YES) / " + fmt(no2.gap) + " (NO), rational E " + fmt(yes2.rational_expectation) +
              " / " + fmt(no2.rational_expectation) + "; single-server gap " + fmt(yes3.gap)};
}

/// A synthetic constrained protocol: the rational server is paid
/// Bernoulli(c_yes), a wrong claim Bernoulli(c_yes - witness).
inline ConstrainedRdqc bernoulli_rdqc(double c_yes, double witness) {
  ConstrainedRdqc r;
  r.reward_bound = 1.0;
  r.c_yes = c_yes;
  r.witness = witness;
  r.run = [c_yes, witness](Truth truth, RdqcMode mode, Rng &rng) {
    const int right = truth == Truth::yes ? 1 : 0;
    if (mode == RdqcMode::rational) return RdqcRun{right, rng.bernoulli(c_yes) ? 1.0 : 0.0};
    return RdqcRun{1 - right, rng.bernoulli(c_yes - witness) ? 1.0 : 0.0};
  };
  return r;
}

/// Conversions between rational protocols and proof systems; amplification.
inline CriterionResult conversions(const SelftestOptions &opt) {
  const SeedTree root(opt.seed);
  const int trials = 10000;
  // (i) reward R = c U^2 with c = 2, so E[R | b = 1] / c = 1/3.
  ConstrainedRdqc wrapped;
  wrapped.reward_bound = 2.0;
  wrapped.c_yes = 2.0 / 3.0;
  wrapped.witness = 0.1;
  wrapped.run = [](Truth truth, RdqcMode, Rng &rng) {
    const double u = rng.uniform01();
    return RdqcRun{truth == Truth::yes ? 1 : 0, 2.0 * u * u};
  };
  Rng rng = root.stream("c10-ip");
  int acc_yes = 0, acc_no = 0;
  for (int i = 0; i < trials; ++i) {
    acc_yes += rdqc_to_ip(wrapped, Truth::yes, RdqcMode::rational, rng) ? 1 : 0;
    acc_no += rdqc_to_ip(wrapped, Truth::no, RdqcMode::rational, rng) ? 1 : 0;
  }
  const double acc_rate = static_cast<double>(acc_yes) / trials;
  const bool pass_i = std::abs(acc_rate - 1.0 / 3.0) <= 0.02 && acc_no == 0;

  // (ii) proof system (0.9, 0.2) with a rational error rate rho.
  const double rho = 0.05;
  IPOracle ip;
  ip.completeness = 0.9;
  ip.soundness = 0.2;
  Rng rng2 = root.stream("c10-rdqc");
  double sum_yes = 0.0, sum_bad = 0.0, sq_yes = 0.0, sq_bad = 0.0;
  for (int i = 0; i < trials; ++i) {
    const double a = ip_to_rdqc(ip, ip, Truth::yes, {BitPolicy::rational, rho}, rng2).total();
    const double b = ip_to_rdqc(ip, ip, Truth::no, {BitPolicy::adversarial, 0.0}, rng2).total();
    sum_yes += a;
    sq_yes += a * a;
    sum_bad += b;
    sq_bad += b * b;
  }
  const double mean_yes = sum_yes / trials, mean_bad = sum_bad / trials;
  const double sigma = std::sqrt((sq_yes / trials - mean_yes * mean_yes + sq_bad / trials - mean_bad * mean_bad) / trials);
  const double witness = ip_to_rdqc_witness(ip, rho);
  const double measured = mean_yes - mean_bad;
  const bool pass_ii = measured >= witness - 3.0 * sigma && witness > 0.0;

  // (iii) per-run acceptance 0.6 vs 0.4, majority of 61.
  const AmplifiedRdqc amp = amplify_gap(bernoulli_rdqc(0.6, 0.2), 61);
  auto runner = [&](RdqcMode mode, std::uint64_t s) {
    Rng r(s);
    const RdqcRun run = amp.protocol.run(Truth::yes, mode, r);
    return TrialOutcome{run.reward, run.b == 1};
  };
  const GapReport gap = measure_reward_gap(runner, RdqcMode::rational, std::vector<RdqcMode>{RdqcMode::incorrect},
                                           static_cast<std::uint64_t>(trials), root.child("c10-amp").key());
  const double majority_gap = amp.oracle_l.completeness - amp.oracle_l.soundness;
  const bool pass_iii = gap.adversary_flipped && gap.gap >= 0.3 && majority_gap >= 0.7;
  return {10, "conversions and amplification", pass_i && pass_ii && pass_iii,
          "accept rate " + fmt(acc_rate) + " vs 1/3, b=0 accepts " + std::to_string(acc_no) + "; margin " + fmt(measured) +
              " vs declared " + fmt(witness) + "; majority gap " + fmt(majority_gap) + ", amplified reward gap " + fmt(gap.gap)};
}

}  // namespace acceptance

struct NamedCriterion {
  int id;
  std::function<CriterionResult(const SelftestOptions &)> run;
};

inline std::vector<NamedCriterion> acceptance_criteria() {
  return {{1, acceptance::path_sum_correctness}, {2, acceptance::closed_form_equivalence},
          {3, acceptance::unique_argmax},        {4, acceptance::estimation_end_to_end},
          {5, acceptance::reward_envelope},      {6, acceptance::qcircuit_decision},
          {7, acceptance::sparse_suite},         {8, acceptance::dyadic_sampler},
          {9, acceptance::meta_gap_transfer},    {10, acceptance::conversions}};
}

/// Runs one criterion, timing it and turning exceptions into failures.
inline CriterionResult run_criterion(const NamedCriterion &c, const SelftestOptions &opt) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = c.run(opt);
  } catch (const std::exception &e) {
    r = {c.id, "criterion " + std::to_string(c.id), false, std::string("exception: ") + e.what()};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline std::string format_result(const CriterionResult &r) {
  std::ostringstream o;
  o.precision(3);
  o << (r.passed ? "PASS" : "FAIL") << "  C" << r.id << "  " << r.title << "  [" << std::fixed << r.seconds << " s]  " << r.detail;
  return o.str();
}

}  // namespace rdqc
