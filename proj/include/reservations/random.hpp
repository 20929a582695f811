#pragma once

#include "reservations/rational.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace reservations {

/// SplitMix64 finalizer over (master, index). Used to give every department and every
/// replication its own stream, so adding one never perturbs the others.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Seedable generator for all lotteries. Only the raw 64-bit output of std::mt19937_64 is
/// consumed (its sequence is fixed by the standard), and branch choices are exact integer
/// comparisons, so draws are reproducible across compilers and platforms.
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64/exact-bernoulli/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// True with probability exactly p, 0 <= p <= 1.
  bool bernoulli(const Rational& p);

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace reservations
