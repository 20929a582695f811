#include "reservations/random.hpp"

#include <stdexcept>

namespace reservations {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const auto r = engine_();
    if (r >= threshold) return r % bound;
  }
}

bool Rng::bernoulli(const Rational& p) {
  if (p < 0 || p > 1) throw std::invalid_argument("bernoulli: probability " + to_string(p) + " outside [0,1]");
  if (p == 0) return false;
  if (p == 1) return true;
  return uniform_below(static_cast<std::uint64_t>(p.denominator())) < static_cast<std::uint64_t>(p.numerator());
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(uniform_below(span));
}

}  // namespace reservations
