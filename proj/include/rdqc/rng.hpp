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
#include <limits>
#include <random>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace rdqc {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace detail

/// A random stream. Wraps std::mt19937_64 and derives every variate from raw
/// 64-bit outputs, so sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform `bits`-bit unsigned integer, bits <= 64.
  std::uint64_t bits_u64(unsigned bits) {
    if (bits == 0) return 0;
    const std::uint64_t x = next_u64();
    return bits >= 64 ? x : (x >> (64 - bits));
  }

  /// Uniform integer in [0, 2^bits) of arbitrary width, most significant word first.
  boost::multiprecision::cpp_int bits_big(unsigned bits) {
    boost::multiprecision::cpp_int out = 0;
    unsigned remaining = bits;
    while (remaining > 0) {
      const unsigned take = remaining >= 64 ? 64 : remaining;
      out <<= take;
      out += bits_u64(take);
      remaining -= take;
    }
    return out;
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Hierarchical seed derivation. A master seed is split into named,
/// indexed children; each child yields an independent Rng. Derivation is a
/// pure function of (master, path), so trials can run in any order.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t master) : key_(detail::splitmix64(master)) {}

  SeedTree child(std::string_view name) const { return SeedTree(key_, detail::fnv1a(name)); }
  SeedTree child(std::uint64_t index) const { return SeedTree(key_, detail::splitmix64(index ^ 0x5851F42D4C957F2DULL)); }

  Rng stream(std::string_view name) const { return Rng(child(name).key_); }
  Rng stream() const { return Rng(key_); }

  std::uint64_t key() const { return key_; }

 private:
  SeedTree(std::uint64_t parent, std::uint64_t salt) : key_(detail::splitmix64(parent ^ detail::splitmix64(salt))) {}

  std::uint64_t key_;
};

}  // namespace rdqc
