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
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rdqc/circuit.hpp"
#include "rdqc/client.hpp"
#include "rdqc/error.hpp"
#include "rdqc/rng.hpp"
#include "rdqc/statevector.hpp"

namespace rdqc {

inline constexpr std::uint64_t kDefaultDrawBudget = 100'000'000;

enum class StrategyKind { honest_sampling, exact_rational, fixed_report, perturbed, omit_heavy };

inline const char *to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::honest_sampling: return "honest_sampling";
    case StrategyKind::exact_rational: return "exact_rational";
    case StrategyKind::fixed_report: return "fixed_report";
    case StrategyKind::perturbed: return "perturbed";
    case StrategyKind::omit_heavy: return "omit_heavy";
  }
  return "?";
}

inline StrategyKind strategy_kind_from_string(const std::string &s) {
  for (auto k : {StrategyKind::honest_sampling, StrategyKind::exact_rational, StrategyKind::fixed_report,
                 StrategyKind::perturbed, StrategyKind::omit_heavy})
    if (s == to_string(k)) return k;
  throw ContractViolation("unknown strategy '" + s + "'");
}

/// Which server behavior produces the messages.
struct StrategyConfig {
  StrategyKind kind = StrategyKind::exact_rational;
  std::uint64_t samples = 0;                          // T for honest_sampling without a schedule
  std::optional<std::pair<double, double>> schedule;  // (f, h)
  double shift = 0.0;                                 // perturbed(shift)
  std::vector<double> fixed;                          // fixed_report; one value is broadcast
  std::uint64_t draw_budget = kDefaultDrawBudget;

  void validate() const {
    if (!std::isfinite(shift)) throw ContractViolation("perturbation must be finite");
    if (kind == StrategyKind::fixed_report && fixed.empty()) throw ContractViolation("fixed_report needs a value");
  }
};

struct Schedule {
  double eps_prime = 0.0;
  std::uint64_t samples = 0;  // T per outcome
};

/// eps' = 1 / {[(2^k + 1) f + 1] 2^k},  T = (k + 1 + h) / (2 eps'^2).
/// Per-outcome accuracy eps' makes sum |p - q| <= 1/f with probability
/// at least 1 - e^-h.
inline Schedule accuracy_schedule(int k, double f, double h, std::uint64_t budget = kDefaultDrawBudget) {
  if (!(f >= 1.0) || !(h >= 1.0)) throw ContractViolation("schedule needs f, h >= 1");
  if (k < 1 || k > 30) throw ContractViolation("schedule k out of range");
  const long double two_k = std::ldexp(1.0L, k);
  const long double denom = ((two_k + 1.0L) * static_cast<long double>(f) + 1.0L) * two_k;
  const long double samples = std::ceil((static_cast<long double>(k) + 1.0L + static_cast<long double>(h)) * denom * denom / 2.0L);
  if (samples * two_k > static_cast<long double>(budget))
    throw CapExceeded("schedule needs " + std::to_string(static_cast<double>(samples * two_k)) + " draws, budget is " +
                      std::to_string(budget));
  return {static_cast<double>(1.0L / denom), static_cast<std::uint64_t>(samples)};
}

/// eta_z = (# of T measurements of the first k qubits that gave z) / T.
/// One batch of T measurements serves every requested z.
inline std::vector<double> estimate_qz(const OutputDistribution &dist, std::span<const Basis> zs, std::uint64_t samples, Rng &rng) {
  if (samples < 1) throw ContractViolation("estimator needs T >= 1");
  const OutputSampler sampler(dist);
  std::vector<std::uint64_t> counts(dist.probs.size(), 0);
  for (std::uint64_t i = 0; i < samples; ++i) ++counts[sampler.draw(rng)];
  std::vector<double> eta;
  eta.reserve(zs.size());
  for (Basis z : zs) {
    if (z >= counts.size()) throw ContractViolation("outcome out of range");
    eta.push_back(static_cast<double>(counts[z]) / static_cast<double>(samples));
  }
  return eta;
}

inline std::vector<double> estimate_qz(const Circuit &c, int k, std::span<const Basis> zs, std::uint64_t samples, Rng &rng) {
  return estimate_qz(exact_output_dist(c, k), zs, samples, rng);
}

namespace detail {

inline std::vector<Basis> all_outcomes(int k) {
  std::vector<Basis> zs(std::size_t{1} << k);
  for (Basis z = 0; z < zs.size(); ++z) zs[z] = z;
  return zs;
}

inline std::vector<double> halve(std::vector<double> v) {
  for (double &x : v) x /= 2.0;
  return v;
}

inline std::uint64_t honest_samples(const StrategyConfig &cfg, int k) {
  if (cfg.schedule) return accuracy_schedule(k, cfg.schedule->first, cfg.schedule->second, cfg.draw_budget).samples;
  if (static_cast<long double>(cfg.samples) * std::ldexp(1.0L, k) > static_cast<long double>(cfg.draw_budget))
    throw CapExceeded("sample count exceeds the draw budget");
  return cfg.samples;
}

}  // namespace detail

/// Reports of a rational server: y_z = eta_z / 2 from sampling, or q_z / 2
/// from the exact oracle.
inline std::vector<double> honest_message(const Circuit &c, int k, const StrategyConfig &cfg, Rng &rng) {
  const auto zs = detail::all_outcomes(k);
  if (cfg.kind == StrategyKind::exact_rational) return detail::halve(exact_output_dist(c, k).probs);
  if (cfg.kind != StrategyKind::honest_sampling) throw ContractViolation("honest_message needs an honest strategy kind");
  return detail::halve(estimate_qz(c, k, zs, detail::honest_samples(cfg, k), rng));
}

/// Deviations from the oracle reports. perturbed shifts and clamps to
/// [0, 1/2]; fixed_report sends its constants verbatim.
inline std::vector<double> adversarial_message(const StrategyConfig &cfg, std::vector<double> truth) {
  switch (cfg.kind) {
    case StrategyKind::perturbed:
      for (double &y : truth) y = std::clamp(y + cfg.shift, 0.0, 0.5);
      return truth;
    case StrategyKind::fixed_report:
      if (cfg.fixed.size() == 1) return std::vector<double>(truth.size(), cfg.fixed.front());
      if (cfg.fixed.size() != truth.size()) throw ContractViolation("fixed_report length does not match the outcome count");
      return cfg.fixed;
    default:
      throw ContractViolation(std::string("strategy ") + to_string(cfg.kind) + " is not a report perturbation");
  }
}

inline Protocol1Server make_protocol1_server(StrategyConfig cfg) {
  cfg.validate();
  if (cfg.kind == StrategyKind::omit_heavy) throw ContractViolation("omit_heavy applies to the sparse protocol only");
  if (cfg.kind == StrategyKind::honest_sampling && !cfg.schedule && cfg.samples < 1)
    throw ContractViolation("honest sampling needs T >= 1 or an (f, h) schedule");
  return [cfg](const Circuit &c, int k, Rng &rng) {
    if (cfg.kind == StrategyKind::exact_rational || cfg.kind == StrategyKind::honest_sampling)
      return honest_message(c, k, cfg, rng);
    return adversarial_message(cfg, detail::halve(exact_output_dist(c, k).probs));
  };
}

struct SparseList {
  std::vector<Basis> entries;
};

/// Every z with q_z >= eps/t, then the smallest unused strings up to l
/// entries. Uses the exact output distribution in place of a quantum
/// heavy-output search, so the list property holds with certainty.
inline SparseList build_sparse_list(const OutputDistribution &dist, const SparseParams &sp) {
  sp.validate();
  const std::uint64_t l = sp.list_size();
  if (l > dist.probs.size())
    throw ContractViolation("list size " + std::to_string(l) + " exceeds the " + std::to_string(dist.probs.size()) +
                            " available strings");
  SparseList out;
  std::vector<bool> used(dist.probs.size(), false);
  for (Basis z = 0; z < dist.probs.size(); ++z) {
    if (dist.probs[z] >= sp.heavy_threshold()) {
      out.entries.push_back(z);
      used[z] = true;
    }
  }
  if (out.entries.size() > l) throw ContractViolation("more heavy strings than list slots; distribution is not a probability vector");
  for (Basis z = 0; z < dist.probs.size() && out.entries.size() < l; ++z) {
    if (!used[z]) {
      out.entries.push_back(z);
      used[z] = true;
    }
  }
  return out;
}

inline SparseList build_sparse_list(const Circuit &c, const SparseParams &sp) {
  return build_sparse_list(exact_output_dist(c, c.n()), sp);
}

struct SparseSchedule {
  double eps_prime = 0.0;
  std::uint64_t samples = 0;
};

/// eps' = eps / l,  T = ln(2(2t + eps) / (eps delta)) / (2 eps'^2).
inline SparseSchedule sparse_schedule(const SparseParams &sp, std::uint64_t budget = kDefaultDrawBudget) {
  sp.validate();
  const double l = static_cast<double>(sp.list_size());
  const double t = static_cast<double>(sp.t);
  const double eps_prime = sp.eps / l;
  const double samples = std::ceil(std::log(2.0 * (2.0 * t + sp.eps) / (sp.eps * sp.delta)) / (2.0 * eps_prime * eps_prime));
  if (samples * l > static_cast<double>(budget)) throw CapExceeded("sparse estimation exceeds the draw budget");
  return {eps_prime, static_cast<std::uint64_t>(samples)};
}

/// Estimates on the listed strings; everything off the list is zero.
inline std::vector<double> sparse_eta(const OutputDistribution &dist, const SparseList &list, const SparseParams &sp, Rng &rng,
                                      std::uint64_t budget = kDefaultDrawBudget) {
  if (list.entries.size() != sp.list_size()) throw ContractViolation("list has the wrong size");
  return estimate_qz(dist, list.entries, sparse_schedule(sp, budget).samples, rng);
}

inline std::vector<double> sparse_eta(const Circuit &c, const SparseList &list, const SparseParams &sp, Rng &rng,
                                      std::uint64_t budget = kDefaultDrawBudget) {
  return sparse_eta(exact_output_dist(c, c.n()), list, sp, rng, budget);
}

/// Replaces the heaviest listed string by the smallest string not yet listed.
inline SparseList omit_heaviest(SparseList list, const OutputDistribution &dist) {
  if (list.entries.empty()) return list;
  std::size_t heaviest = 0;
  for (std::size_t i = 1; i < list.entries.size(); ++i)
    if (dist.probs[list.entries[i]] > dist.probs[list.entries[heaviest]]) heaviest = i;
  const std::set<Basis> used(list.entries.begin(), list.entries.end());
  for (Basis z = 0; z < dist.probs.size(); ++z) {
    if (!used.count(z)) {
      list.entries[heaviest] = z;
      return list;
    }
  }
  throw ContractViolation("no unused string available to replace the heaviest entry");
}

/// Honest sampling here always follows sparse_schedule.
inline SparseServer make_sparse_server(StrategyConfig cfg) {
  cfg.validate();
  return [cfg](const Circuit &c, const SparseParams &sp, Rng &rng) {
    const OutputDistribution dist = exact_output_dist(c, c.n());
    SparseList list = build_sparse_list(dist, sp);
    if (cfg.kind == StrategyKind::omit_heavy) list = omit_heaviest(std::move(list), dist);
    std::vector<double> truth;
    for (Basis z : list.entries) truth.push_back(dist.probs[z] / 2.0);
    SparseMessage msg{list.entries, {}};
    switch (cfg.kind) {
      case StrategyKind::exact_rational:
      case StrategyKind::omit_heavy:
        msg.reports = std::move(truth);
        break;
      case StrategyKind::honest_sampling:
        msg.reports = detail::halve(sparse_eta(dist, list, sp, rng, cfg.draw_budget));
        break;
      default:
        msg.reports = adversarial_message(cfg, std::move(truth));
    }
    return msg;
  };
}

}  // namespace rdqc
