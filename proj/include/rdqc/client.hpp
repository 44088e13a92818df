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
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rdqc/circuit.hpp"
#include "rdqc/dyadic_sampler.hpp"
#include "rdqc/error.hpp"
#include "rdqc/pathsum.hpp"
#include "rdqc/rng.hpp"

namespace rdqc {

inline constexpr int kDefaultKCap = 10;
inline constexpr unsigned kCoinGuardBits = 64;

enum class Decision { no, yes };

inline const char *to_string(Decision d) { return d == Decision::yes ? "YES" : "NO"; }

/// Parameters of an approximately sparse output distribution and the list
/// size l = floor(2t / eps) the sparse protocol works with.
struct SparseParams {
  std::uint64_t t = 1;
  double eps = 1.0 / 6.0;
  double delta = 1e-6;

  static SparseParams make(std::uint64_t t, double eps, double delta) {
    SparseParams sp{t, eps, delta};
    sp.validate();
    return sp;
  }

  void validate() const {
    if (t < 1) throw ContractViolation("sparsity t must be positive");
    // 1/6 itself is not exactly representable; allow one ulp of slack.
    if (!(eps > 0.0) || eps > 1.0 / 6.0 + 1e-15) throw ContractViolation("eps must lie in (0, 1/6]");
    if (!(delta > 0.0 && delta < 1.0)) throw ContractViolation("delta must lie in (0, 1)");
  }

  std::uint64_t list_size() const { return static_cast<std::uint64_t>(std::floor(2.0 * static_cast<double>(t) / eps + 1e-9)); }
  double heavy_threshold() const { return eps / static_cast<double>(t); }
};

struct RewardRecord {
  Basis z = 0;
  double y = 0.0;
  int b = 0;
  double reward = 0.0;
  double Y = 0.5;
  std::string path;  // client's private path sample, layer 1 first
  double bias = 0.5;
};

struct ProtocolParams {
  int k = 1;
  unsigned m_coin = 0;  // 0 selects D + 64
  std::uint64_t seed = 0;
  double f = 10.0;
  double h = 5.0;
  int k_cap = kDefaultKCap;
};

struct ProtocolReport {
  std::string mode;  // "protocol1" or "sparse"
  int n = 0;
  int depth = 0;
  int k = 0;
  std::int64_t exponent = 0;  // D
  double divisor = 1.0;
  unsigned m_coin = 0;
  std::uint64_t seed = 0;
  double f = 0.0;
  double h = 0.0;
  std::vector<RewardRecord> records;
  std::vector<double> p;  // aligned with records
  double total_reward = 0.0;
  std::optional<Decision> decision;
  std::optional<double> eta;
  std::string transcript_ref;
};

/// Normalized report Y = (y + 2^(D-1)) / 2^D = 1/2 + y 2^-D.
inline double normalized_report(double y, std::int64_t exponent) {
  return 0.5 + std::ldexp(y, static_cast<int>(-exponent));
}

/// Modified Brier score
///   R = [2Yb + 2(1-Y)(1-b) - Y^2 - (1-Y)^2 + 1] / divisor.
/// Evaluated through u = Y - 1/2 as (3/2 +- 2u - 2u^2) / divisor, which keeps
/// the O(2^-D) deviation from 3/2 intact.
inline double brier_reward(double y, int b, std::int64_t exponent, double divisor) {
  if (!(y >= 0.0) || !std::isfinite(y)) throw ContractViolation("report y must be finite and nonnegative");
  if (b != 0 && b != 1) throw ContractViolation("coin bit must be 0 or 1");
  if (!(divisor > 0.0)) throw ContractViolation("reward divisor must be positive");
  const double u = std::ldexp(y, static_cast<int>(-exponent));
  if (u > 0.5) throw ContractViolation("report exceeds the representable range (Y > 1)");
  const double signed_term = b == 1 ? 2.0 * u : -2.0 * u;
  return (1.5 + signed_term - 2.0 * u * u) / divisor;
}

/// p_z = y_z / sum y.
inline std::vector<double> aggregate(std::span<const double> y) {
  double total = 0.0;
  for (double v : y) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ContractViolation("reports must be finite and nonnegative");
    total += v;
  }
  if (!(total > 0.0)) throw DegenerateAggregation("all reports are zero; the estimate is undefined");
  std::vector<double> p(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) p[i] = y[i] / total;
  return p;
}

/// YES above 2/3 - 1/f, NO below 1/3 + 1/f, a fair coin in between.
inline Decision decide_qcircuit(double eta, double f, Rng &rng) {
  if (!(2.0 / 3.0 - 1.0 / f > 1.0 / 3.0 + 1.0 / f)) throw ContractViolation("f too small: decision thresholds overlap");
  if (eta >= 2.0 / 3.0 - 1.0 / f) return Decision::yes;
  if (eta <= 1.0 / 3.0 + 1.0 / f) return Decision::no;
  return rng.bits_u64(1) ? Decision::yes : Decision::no;
}

/// p = eta / sum eta on the listed outcomes; the complement of the list
/// carries zero mass.
inline std::vector<double> recover_sparse_dist(std::span<const double> eta, const SparseParams &sp) {
  sp.validate();
  if (eta.size() > sp.list_size()) throw ContractViolation("estimate vector is longer than the list size");
  return aggregate(eta);
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractViolation("l1 distance of vectors with different lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

/// Server side of one protocol run: all 2^k reports in a single message.
using Protocol1Server = std::function<std::vector<double>(const Circuit &, int k, Rng &)>;

struct SparseMessage {
  std::vector<Basis> list;
  std::vector<double> reports;  // aligned with list
};

using SparseServer = std::function<SparseMessage(const Circuit &, const SparseParams &, Rng &)>;

namespace detail {

// Reports travel as nonnegative rationals with at most 64 fractional bits.
inline double quantize_report(double y) {
  if (!std::isfinite(y) || y < 0.0) throw ContractViolation("report must be finite and nonnegative");
  if (y > 0.5) throw ContractViolation("report " + std::to_string(y) + " exceeds 1/2");
  return std::ldexp(std::floor(std::ldexp(y, 64)), -64);
}

inline std::string path_string(const PathAssignment &s) {
  std::string out;
  for (int j = 1; j <= 2 * s.depth() - 1; ++j) out += to_bitstring(s.layer(j), s.width(j));
  return out;
}

// Steps (b)-(d) for one outcome: path sample, biased coin, reward.
inline RewardRecord sumcheck_round(const Circuit &c, int k, Basis z, double y, std::int64_t exponent, double divisor,
                                   unsigned m_coin, const SeedTree &round_seed) {
  Rng path_rng = round_seed.stream("path");
  Rng coin_rng = round_seed.stream("coin");
  const PathAssignment s = PathAssignment::uniform(c.n(), c.depth(), k, path_rng);
  const PathValue v = eval_g(c, z, s);
  RewardRecord rec;
  rec.z = z;
  rec.y = y;
  rec.bias = v.bias;
  rec.b = flip_biased_coin(v.bias, m_coin, coin_rng);
  rec.reward = brier_reward(y, rec.b, exponent, divisor);
  rec.Y = normalized_report(y, exponent);
  rec.path = path_string(s);
  return rec;
}

inline unsigned default_coin_precision(std::int64_t exponent) {
  return static_cast<unsigned>(exponent) + kCoinGuardBits;
}

}  // namespace detail

/// One-round sumcheck estimation of the first-k-qubit output distribution.
/// The server's reports for all z arrive in one message; each z then gets an
/// independent round (path sample, coin, Brier reward).
inline ProtocolReport run_protocol1(const Circuit &c, const Protocol1Server &server, const ProtocolParams &params) {
  const int k = params.k;
  if (k < 1 || k > c.n()) throw ContractViolation("k must lie in [1, n]");
  if (k > params.k_cap) throw CapExceeded("k=" + std::to_string(k) + " exceeds the cap " + std::to_string(params.k_cap));
  const std::int64_t exponent = path_bit_count(c.n(), c.depth(), k);
  const double divisor = std::ldexp(1.0, k);
  const unsigned m_coin = params.m_coin != 0 ? params.m_coin : detail::default_coin_precision(exponent);

  const SeedTree root(params.seed);
  Rng server_rng = root.stream("server");
  std::vector<double> reports = server(c, k, server_rng);
  if (reports.size() != std::size_t{1} << k) throw ContractViolation("server must send one report per outcome z");
  for (double &y : reports) y = detail::quantize_report(y);

  ProtocolReport rep;
  rep.mode = "protocol1";
  rep.n = c.n();
  rep.depth = c.depth();
  rep.k = k;
  rep.exponent = exponent;
  rep.divisor = divisor;
  rep.m_coin = m_coin;
  rep.seed = params.seed;
  rep.f = params.f;
  rep.h = params.h;
  const SeedTree client = root.child("client");
  for (Basis z = 0; z < reports.size(); ++z) {
    rep.records.push_back(detail::sumcheck_round(c, k, z, reports[z], exponent, divisor, m_coin, client.child(z)));
    rep.total_reward += rep.records.back().reward;
  }
  rep.p = aggregate(reports);
  return rep;
}

/// Q-CIRCUIT decision: a k = 1 estimation run, then thresholding p_1.
inline ProtocolReport run_decision(const Circuit &c, const Protocol1Server &server, ProtocolParams params) {
  params.k = 1;
  ProtocolReport rep = run_protocol1(c, server, params);
  Rng rng = SeedTree(params.seed).stream("decision");
  rep.eta = rep.p[1];
  rep.decision = decide_qcircuit(*rep.eta, params.f, rng);
  return rep;
}

/// Sparse variant: the server names l = floor(2t/eps) n-bit strings and one
/// report for each; paths have 2(L-1)n bits and rewards are divided by l.
inline ProtocolReport run_protocol_sparse(const Circuit &c, const SparseParams &sp, const SparseServer &server,
                                          const ProtocolParams &params) {
  sp.validate();
  const int n = c.n();
  const std::uint64_t l = sp.list_size();
  const std::int64_t exponent = path_bit_count(n, c.depth(), n);
  const double divisor = static_cast<double>(l);
  const unsigned m_coin = params.m_coin != 0 ? params.m_coin : detail::default_coin_precision(exponent);

  const SeedTree root(params.seed);
  Rng server_rng = root.stream("server");
  SparseMessage msg = server(c, sp, server_rng);
  if (msg.list.size() != l)
    throw ContractViolation("list has " + std::to_string(msg.list.size()) + " entries, expected " + std::to_string(l));
  if (msg.reports.size() != msg.list.size()) throw ContractViolation("one report per listed string is required");
  std::set<Basis> seen;
  for (Basis z : msg.list) {
    if (n < 64 && (z >> n) != 0) throw ContractViolation("listed string longer than n bits");
    if (!seen.insert(z).second) throw ContractViolation("duplicate list entry " + to_bitstring(z, n));
  }
  for (double &y : msg.reports) y = detail::quantize_report(y);

  ProtocolReport rep;
  rep.mode = "sparse";
  rep.n = n;
  rep.depth = c.depth();
  rep.k = n;
  rep.exponent = exponent;
  rep.divisor = divisor;
  rep.m_coin = m_coin;
  rep.seed = params.seed;
  rep.f = params.f;
  rep.h = params.h;
  const SeedTree client = root.child("client");
  std::vector<double> eta(msg.list.size());
  for (std::size_t i = 0; i < msg.list.size(); ++i) {
    rep.records.push_back(detail::sumcheck_round(c, n, msg.list[i], msg.reports[i], exponent, divisor, m_coin, client.child(i)));
    rep.total_reward += rep.records.back().reward;
    eta[i] = 2.0 * msg.reports[i];
  }
  rep.p = recover_sparse_dist(eta, sp);
  return rep;
}

}  // namespace rdqc
