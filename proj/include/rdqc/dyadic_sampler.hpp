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
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rdqc/error.hpp"
#include "rdqc/rng.hpp"

namespace rdqc {

using BigInt = boost::multiprecision::cpp_int;

namespace detail {

// x * 2^m rounded toward -inf (round_up = false) or +inf, exactly.
inline BigInt scale_dyadic(double x, unsigned m, bool round_up) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ContractViolation("probability must be finite and nonnegative");
  if (x == 0.0) return 0;
  int e = 0;
  const double f = std::frexp(x, &e);
  const auto mant = static_cast<std::uint64_t>(std::ldexp(f, 53));
  const long shift = static_cast<long>(e) - 53 + static_cast<long>(m);
  BigInt v = mant;
  if (shift >= 0) return v << shift;
  const long down = -shift;
  if (down >= 64) return round_up ? 1 : 0;
  BigInt q = v >> down;
  if (round_up && (q << down) != v) q += 1;
  return q;
}

}  // namespace detail

/// A distribution over 2^k outcomes whose masses are m-bit dyadic rationals
/// numerator / 2^m. All outcomes but s_max are truncated; s_max absorbs the
/// remainder, so the masses sum to exactly one.
class BinaryApproxDist {
 public:
  BinaryApproxDist(int k, unsigned m, std::vector<BigInt> numerators, std::size_t s_max)
      : k_(k), m_(m), numerators_(std::move(numerators)), s_max_(s_max) {
    if (numerators_.size() != std::size_t{1} << k_) throw ContractViolation("need 2^k numerators");
    BigInt total = 0;
    for (const BigInt &a : numerators_) {
      if (a < 0) throw ContractViolation("negative dyadic mass");
      total += a;
    }
    if (total != denominator()) throw ContractViolation("dyadic masses do not sum to one");
  }

  int k() const { return k_; }
  unsigned m() const { return m_; }
  std::size_t s_max() const { return s_max_; }
  const std::vector<BigInt> &numerators() const { return numerators_; }
  BigInt denominator() const { return BigInt(1) << m_; }

  double approx(std::size_t s) const {
    return std::ldexp(numerators_[s].convert_to<double>(), -static_cast<int>(m_));
  }

 private:
  int k_;
  unsigned m_;
  std::vector<BigInt> numerators_;
  std::size_t s_max_;
};

/// Truncates each t_s (s != s_max) to m bits; s_max is the first argmax.
inline BinaryApproxDist build_approx(std::span<const double> t, unsigned m) {
  int k = 0;
  while ((std::size_t{1} << k) < t.size()) ++k;
  if (t.empty() || (std::size_t{1} << k) != t.size()) throw ContractViolation("distribution length must be a power of two");
  if (m < static_cast<unsigned>(2 * k)) throw ContractViolation("precision m must be at least 2k");
  double sum = 0.0;
  std::size_t s_max = 0;
  for (std::size_t s = 0; s < t.size(); ++s) {
    if (!(t[s] >= 0.0) || !std::isfinite(t[s])) throw ContractViolation("distribution entries must be nonnegative");
    sum += t[s];
    if (t[s] > t[s_max]) s_max = s;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ContractViolation("distribution does not sum to one");
  std::vector<BigInt> num(t.size());
  BigInt rest = BigInt(1) << m;
  for (std::size_t s = 0; s < t.size(); ++s) {
    if (s == s_max) continue;
    num[s] = detail::scale_dyadic(t[s], m, false);
    rest -= num[s];
  }
  if (rest < 0) throw ContractViolation("truncated masses exceed one");
  num[s_max] = rest;
  return BinaryApproxDist(k, m, std::move(num), s_max);
}

/// Two-outcome case with t_0 = bias. The complement 1 - bias is handled
/// exactly instead of through a rounded double.
inline BinaryApproxDist build_coin(double bias, unsigned m) {
  if (!(bias >= 0.0 && bias <= 1.0)) throw ContractViolation("coin bias must lie in [0, 1]");
  if (m < 2) throw ContractViolation("coin precision must be at least 2 bits");
  const BigInt one = BigInt(1) << m;
  std::vector<BigInt> num(2);
  std::size_t s_max = 0;
  if (bias >= 0.5) {
    num[1] = one - detail::scale_dyadic(bias, m, true);  // floor((1 - bias) 2^m)
    num[0] = one - num[1];
  } else {
    s_max = 1;
    num[0] = detail::scale_dyadic(bias, m, false);
    num[1] = one - num[0];
  }
  return BinaryApproxDist(1, m, std::move(num), s_max);
}

/// Draws w uniformly from m-bit strings and returns the outcome s with
/// sum_{y<s} t~_y <= 0.w < sum_{y<=s} t~_y.
inline std::size_t draw(const BinaryApproxDist &d, Rng &rng) {
  const BigInt w = rng.bits_big(d.m());
  BigInt upper = 0;
  for (std::size_t s = 0; s < d.numerators().size(); ++s) {
    upper += d.numerators()[s];
    if (w < upper) return s;
  }
  return d.numerators().size() - 1;  // unreachable: the masses sum to 2^m
}

/// Returns 1 (heads) with probability within 2^(1-m) of bias.
inline int flip_biased_coin(double bias, unsigned m, Rng &rng) { return draw(build_coin(bias, m), rng) == 0 ? 1 : 0; }

}  // namespace rdqc
