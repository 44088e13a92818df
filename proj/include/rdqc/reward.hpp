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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdqc/circuit.hpp"
#include "rdqc/client.hpp"
#include "rdqc/error.hpp"
#include "rdqc/pathsum.hpp"
#include "rdqc/rng.hpp"

namespace rdqc {

inline constexpr int kExhaustiveRewardCap = 20;

namespace detail {

inline void check_reward_domain(double q, double y, double divisor) {
  if (!(q >= 0.0 && q <= 1.0)) throw ContractViolation("probability q must lie in [0, 1]");
  if (!(y >= 0.0 && y <= 0.5)) throw ContractViolation("report y must lie in [0, 1/2]");
  if (!(divisor > 0.0)) throw ContractViolation("reward divisor must be positive");
}

}  // namespace detail

/// 2^(2D) (divisor E[R] - 3/2) = -2 (y - q/2)^2 + q^2/2.
/// Free of D, so it resolves the parabola at any depth.
inline double scaled_reward_excess(double q, double y) {
  const double d = y - q / 2.0;
  return -2.0 * d * d + q * q / 2.0;
}

/// E[R] = (1/divisor) [-2 (y - q/2)^2 / 2^(2D) + 3/2 + 2 q^2 / 2^(2(D+1))].
inline double expected_reward_closed_form(double q, double y, std::int64_t exponent, double divisor) {
  detail::check_reward_domain(q, y, divisor);
  return (1.5 + std::ldexp(scaled_reward_excess(q, y), static_cast<int>(-2 * exponent))) / divisor;
}

/// Coin bias off by delta on every path moves the vertex to q/2 + 2^D delta,
/// i.e. q becomes q + 2^(D+1) delta.
inline double effective_q(double q, double delta, std::int64_t exponent) {
  return q + std::ldexp(delta, static_cast<int>(exponent + 1));
}

inline double expected_reward_with_delta(double q, double y, std::int64_t exponent, double divisor, double delta) {
  detail::check_reward_domain(q, y, divisor);
  if (!(std::abs(delta) <= std::ldexp(divisor, static_cast<int>(-exponent))))
    throw ContractViolation("coin bias error |delta| exceeds divisor * 2^-D");
  const double qe = effective_q(q, delta, exponent);
  return (1.5 + std::ldexp(scaled_reward_excess(qe, y), static_cast<int>(-2 * exponent))) / divisor;
}

/// Grid argmax of E[R] over y in {0, step, 2 step, ...} together with 1/2.
/// Compares the scaled excess, since raw values differ only by 2^(-2D) terms.
inline double argmax_scan(double q, std::int64_t exponent, double divisor, double step) {
  detail::check_reward_domain(q, 0.0, divisor);
  (void)exponent;
  if (!(step > 0.0 && step <= 0.5)) throw ContractViolation("grid step must lie in (0, 1/2]");
  const auto count = static_cast<std::uint64_t>(std::floor(0.5 / step + 1e-9));
  double best_y = 0.0, best = scaled_reward_excess(q, 0.0);
  auto consider = [&](double y) {
    const double v = scaled_reward_excess(q, y);
    if (v > best) {
      best = v;
      best_y = y;
    }
  };
  for (std::uint64_t i = 1; i <= count; ++i) consider(std::min(0.5, static_cast<double>(i) * step));
  consider(0.5);
  return best_y;
}

struct RewardCurve {
  std::int64_t exponent = 0;
  double divisor = 1.0;
  double q = 0.0;
  std::vector<double> y;
  std::vector<double> expected;  // E[R](y)
  std::vector<double> excess;    // scaled_reward_excess(q, y)
  double vertex = 0.0;
  double max_value = 0.0;
};

inline RewardCurve reward_curve(double q, std::int64_t exponent, double divisor, double step) {
  RewardCurve rc;
  rc.exponent = exponent;
  rc.divisor = divisor;
  rc.q = q;
  rc.vertex = argmax_scan(q, exponent, divisor, step);
  rc.max_value = expected_reward_closed_form(q, q / 2.0, exponent, divisor);
  const auto count = static_cast<std::uint64_t>(std::floor(0.5 / step + 1e-9));
  for (std::uint64_t i = 0; i <= count; ++i) {
    const double y = std::min(0.5, static_cast<double>(i) * step);
    rc.y.push_back(y);
    rc.expected.push_back(expected_reward_closed_form(q, y, exponent, divisor));
    rc.excess.push_back(scaled_reward_excess(q, y));
  }
  return rc;
}

namespace detail {

// Sum over every path of 2 bias(s) - 1 = Re g(z, s) + 2 delta. Centering
// keeps the O(2^-D) signal clear of the 1/2 baseline.
inline double centered_bias_sum(const Circuit &c, int k, Basis z, int cap, double delta) {
  const std::int64_t bits = path_bit_count(c.n(), c.depth(), k);
  if (bits > cap) throw CapExceeded("reward enumeration of " + std::to_string(bits) + " path bits exceeds cap " + std::to_string(cap));
  if (k < 1 || k > c.n() || (z >> k) != 0) throw ContractViolation("outcome z does not fit in k bits");
  std::vector<Basis> layers(static_cast<std::size_t>(2 * c.depth() - 1));
  const std::uint64_t total = std::uint64_t{1} << bits;
  double acc = 0.0;
  for (std::uint64_t p = 0; p < total; ++p) {
    unpack_layers(c.n(), c.depth(), k, p, layers.data());
    acc += path_summand(c, k, z, layers.data()).real() + 2.0 * delta;
  }
  return acc;
}

}  // namespace detail

/// sum_s 2^-D [bias(s) R(y, 1) + (1 - bias(s)) R(y, 0)] over every path s,
/// each coin bias offset by delta.
inline double exhaustive_expected_reward(const Circuit &c, Basis z, double y, int k, double divisor, double delta = 0.0,
                                         int cap = kExhaustiveRewardCap) {
  const std::int64_t d = path_bit_count(c.n(), c.depth(), k);
  const double r1 = brier_reward(y, 1, d, divisor);
  const double r0 = brier_reward(y, 0, d, divisor);
  const double centered = std::ldexp(detail::centered_bias_sum(c, k, z, cap, delta), static_cast<int>(-d));
  return (r1 + r0) / 2.0 + (r1 - r0) / 2.0 * centered;
}

inline double exhaustive_expected_reward(const Circuit &c, Basis z, double y, int k) {
  return exhaustive_expected_reward(c, z, y, k, std::ldexp(1.0, k));
}

/// Same enumeration in units of 2^(-2D) / divisor above 3/2; comparable
/// with scaled_reward_excess. Per-coin excesses are +-2 y 2^D - 2 y^2.
inline double exhaustive_reward_excess(const Circuit &c, Basis z, double y, int k, double delta = 0.0,
                                       int cap = kExhaustiveRewardCap) {
  if (!(y >= 0.0 && y <= 0.5)) throw ContractViolation("report y must lie in [0, 1/2]");
  return -2.0 * y * y + 2.0 * y * detail::centered_bias_sum(c, k, z, cap, delta);
}

/// Realized total sum_z R(y_z, b_z) for one coin assignment.
inline double realized_total_reward(std::span<const double> y, std::span<const int> b, std::int64_t exponent, double divisor) {
  if (y.size() != b.size()) throw ContractViolation("reports and coins differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) total += brier_reward(y[i], b[i], exponent, divisor);
  return total;
}

/// Expected total at the vertex reports y_z = q_z / 2.
inline double max_expected_total(std::span<const double> q, std::int64_t exponent, double divisor) {
  double total = 0.0;
  for (double qz : q) total += expected_reward_closed_form(qz, qz / 2.0, exponent, divisor);
  return total;
}

/// Expected total reward of the sparse protocol over its list,
///   (1/l) sum [-2 (y/2^L' - q/2^(L'+1))^2 + 3/2 + 2 q^2 / 2^(2(L'+1))].
inline double sparse_expected_total(std::span<const double> q, std::span<const double> y, std::int64_t lprime, std::uint64_t l) {
  if (q.size() != y.size() || q.size() != l) throw ContractViolation("sparse totals need l probabilities and l reports");
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) total += expected_reward_closed_form(q[i], y[i], lprime, static_cast<double>(l));
  return total;
}

/// 2^(2L') (sparse_expected_total - 3/2).
inline double sparse_scaled_excess(std::span<const double> q, std::span<const double> y, std::uint64_t l) {
  if (q.size() != y.size() || q.size() != l) throw ContractViolation("sparse totals need l probabilities and l reports");
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    detail::check_reward_domain(q[i], y[i], 1.0);
    total += scaled_reward_excess(q[i], y[i]);
  }
  return total / static_cast<double>(l);
}

/// Largest estimator accuracy for which swapping a light entry for a heavy
/// one is guaranteed to pay: eps^2 (3t^2 + eps^2 - 4 t eps) / [2 t^2 (2t - eps)^2].
inline double swap_threshold(const SparseParams &sp) {
  const double t = static_cast<double>(sp.t), e = sp.eps;
  return e * e * (3 * t * t + e * e - 4 * t * e) / (2 * t * t * (2 * t - e) * (2 * t - e));
}

/// Lower bound on E[R(z1)] - E[R(z2)] in units of 2^(-2(L'+1)):
///   (2/l) [eps^2 (3t^2 + eps^2 - 4 t eps) / (t^2 (2t - eps)^2) - 2 eps'].
inline double swap_gap_bound_scaled(double q1, double q2, const SparseParams &sp, double eps_prime, double delta) {
  sp.validate();
  const double l = static_cast<double>(sp.list_size());
  if (!(q1 >= sp.heavy_threshold())) throw ContractViolation("precondition q1 >= eps/t violated");
  if (!(q2 <= 1.0 / l)) throw ContractViolation("precondition q2 <= 1/l violated");
  if (!(eps_prime <= swap_threshold(sp))) throw ContractViolation("precondition eps' below the swap threshold violated");
  if (!(eps_prime >= delta)) throw ContractViolation("precondition eps' >= delta violated");
  if (!(q1 <= 1.0 && q2 >= 0.0)) throw ContractViolation("probabilities must lie in [0, 1]");
  return (2.0 / l) * (2.0 * swap_threshold(sp) - 2.0 * eps_prime);
}

inline double swap_gap_bound(double q1, double q2, const SparseParams &sp, double eps_prime, double delta, std::int64_t lprime) {
  return std::ldexp(swap_gap_bound_scaled(q1, q2, sp, eps_prime, delta), static_cast<int>(-2 * (lprime + 1)));
}

/// Result of one Monte-Carlo trial under some strategy.
struct TrialOutcome {
  double reward = 0.0;
  bool correct = true;
};

struct GapReport {
  double rational_expectation = 0.0;
  double best_incorrect_expectation = 0.0;
  double gap = 0.0;
  std::uint64_t trials = 0;
  double confidence = 0.0;  // 3 sigma half-width of gap
  double rational_correct_rate = 0.0;
  std::optional<std::size_t> best_adversary;
  std::vector<double> adversary_expectations;
  std::vector<double> adversary_incorrect_rates;
  bool adversary_flipped = false;
  std::string note;
};

namespace detail {

struct TrialStats {
  double mean = 0.0;
  double var = 0.0;
  double correct_rate = 0.0;
};

template <class Strategy, class Runner>
TrialStats run_trials(const Runner &runner, const Strategy &s, std::uint64_t trials, const SeedTree &seeds) {
  double sum = 0.0, sumsq = 0.0;
  std::uint64_t correct = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const TrialOutcome o = runner(s, seeds.child(i).key());
    sum += o.reward;
    sumsq += o.reward * o.reward;
    correct += o.correct ? 1 : 0;
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  return {mean, std::max(0.0, sumsq / n - mean * mean), static_cast<double>(correct) / n};
}

}  // namespace detail

/// Monte-Carlo reward gap between a rational strategy and the best supplied
/// strategy that makes the client answer wrongly (wrong in at least half of
/// its trials). The adversary value is a max over the supplied set only.
/// runner(strategy, trial_seed) -> TrialOutcome.
template <class Strategy, class Runner>
GapReport measure_reward_gap(const Runner &runner, const Strategy &rational, const std::vector<Strategy> &adversaries,
                             std::uint64_t trials, std::uint64_t seed) {
  if (trials < 2) throw ContractViolation("gap measurement needs at least two trials");
  const SeedTree root(seed);
  const auto rat = detail::run_trials(runner, rational, trials, root.child("rational"));
  GapReport rep;
  rep.trials = trials;
  rep.rational_expectation = rat.mean;
  rep.rational_correct_rate = rat.correct_rate;
  const double n = static_cast<double>(trials);
  double best_var = 0.0;
  for (std::size_t a = 0; a < adversaries.size(); ++a) {
    const auto adv = detail::run_trials(runner, adversaries[a], trials, root.child("adversary").child(a));
    rep.adversary_expectations.push_back(adv.mean);
    rep.adversary_incorrect_rates.push_back(1.0 - adv.correct_rate);
    if (1.0 - adv.correct_rate < 0.5) continue;
    if (!rep.best_adversary || adv.mean > rep.best_incorrect_expectation) {
      rep.best_adversary = a;
      rep.best_incorrect_expectation = adv.mean;
      best_var = adv.var;
    }
  }
  rep.adversary_flipped = rep.best_adversary.has_value();
  if (!rep.adversary_flipped) {
    rep.note = "no supplied adversarial strategy flipped the client's output";
    rep.gap = 0.0;
    rep.confidence = 3.0 * std::sqrt(rat.var / n);
    return rep;
  }
  rep.gap = rep.rational_expectation - rep.best_incorrect_expectation;
  rep.confidence = 3.0 * std::sqrt(rat.var / n + best_var / n);
  return rep;
}

}  // namespace rdqc
