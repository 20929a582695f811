#pragma once

// Shared problems and independent oracles for the test binaries.

#include "reservations/analysis.hpp"
#include "reservations/core.hpp"
#include "reservations/random.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace fixtures {

using reservations::Grid;
using reservations::Rational;
using reservations::ReservationProblem;
using reservations::ReservationScheme;

inline ReservationScheme thirds() { return ReservationScheme({"c1", "c2"}, {Rational(1, 3), Rational(2, 3)}); }
inline ReservationScheme halves() { return ReservationScheme({"c1", "c2"}, {Rational(1, 2), Rational(1, 2)}); }
inline ReservationScheme tenths() { return ReservationScheme({"c1", "c2"}, {Rational(1, 10), Rational(9, 10)}); }

/// Four departments, two categories, vacancies (2,1,2,1) in each of three periods.
inline ReservationProblem four_departments() {
  const std::vector<std::int64_t> q{2, 1, 2, 1};
  return ReservationProblem({"d1", "d2", "d3", "d4"}, thirds(), {q, q, q});
}

/// Two departments, alpha = (1/10, 9/10), q1 = (9, 8), q2 = (17, 7).
inline ReservationProblem two_period_tenths() {
  return ReservationProblem({"d1", "d2"}, tenths(), {{9, 8}, {17, 7}});
}

/// Seat p goes to c1 exactly when p is a multiple of 3.
inline reservations::Roster mod_three_roster(std::size_t length = 3) {
  std::vector<std::size_t> seats;
  for (std::size_t p = 1; p <= length; ++p) seats.push_back(p % 3 == 0 ? 0 : 1);
  return reservations::Roster(seats);
}

/// alpha = (1/4, 1/4, 1/2) with cumulative vacancies (2, 1, 3): rows (1/2,1/2,1), (1/4,1/4,1/2), (3/4,3/4,3/2).
inline reservations::FairShareTable quarter_table() {
  const ReservationScheme scheme({"c1", "c2", "c3"}, {Rational(1, 4), Rational(1, 4), Rational(1, 2)});
  return reservations::build_fair_share_table(ReservationProblem({"d1", "d2", "d3"}, scheme, {{2, 1, 3}}), 1);
}

template <typename T>
Grid<T> grid(const std::vector<std::vector<T>>& rows) {
  Grid<T> g(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) g(i, j) = rows[i][j];
  }
  return g;
}

inline Grid<std::int64_t> int_grid(const std::vector<std::vector<std::int64_t>>& rows) { return grid(rows); }

/// Scheme with n categories and random positive weights; denominators stay small.
inline ReservationScheme random_scheme(reservations::Rng& rng, std::size_t n, std::int64_t max_weight = 6) {
  std::vector<std::int64_t> w(n);
  std::int64_t total = 0;
  for (auto& x : w) total += (x = rng.uniform_int(1, max_weight));
  std::vector<std::string> names;
  std::vector<Rational> fractions;
  for (std::size_t j = 0; j < n; ++j) {
    names.push_back("c" + std::to_string(j + 1));
    fractions.emplace_back(w[j], total);
  }
  return ReservationScheme(names, fractions);
}

inline ReservationProblem random_problem(reservations::Rng& rng, std::size_t max_departments,
                                         std::size_t max_categories, std::int64_t max_vacancies,
                                         std::size_t periods = 1) {
  const auto m = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_departments)));
  const auto n = static_cast<std::size_t>(rng.uniform_int(2, static_cast<std::int64_t>(max_categories)));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < m; ++i) names.push_back("d" + std::to_string(i + 1));
  std::vector<std::vector<std::int64_t>> q(periods, std::vector<std::int64_t>(m));
  for (auto& period : q) {
    for (auto& x : period) x = rng.uniform_int(0, max_vacancies);
  }
  return ReservationProblem(names, random_scheme(rng, n), q);
}

/// Every 0/1 block of length k whose category prefix counts stay within floor/ceil of l*alpha_j.
inline std::vector<std::vector<std::size_t>> feasible_blocks(const ReservationScheme& scheme, std::size_t k) {
  const std::size_t n = scheme.size();
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> block(k, 0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= n;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < k; ++i) {
      block[i] = c % n;
      c /= n;
    }
    std::vector<std::int64_t> count(n, 0);
    bool ok = true;
    for (std::size_t l = 1; l <= k && ok; ++l) {
      count[block[l - 1]]++;
      for (std::size_t j = 0; j < n && ok; ++j) {
        ok = reservations::within_quota(count[j], Rational(static_cast<std::int64_t>(l)) * scheme.fraction(j));
      }
    }
    if (ok) out.push_back(block);
  }
  return out;
}

/// Binomial(n, p) probability mass function via log-gamma.
inline std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  for (int z = 0; z <= n; ++z) {
    const double log_choose = std::lgamma(n + 1.0) - std::lgamma(z + 1.0) - std::lgamma(n - z + 1.0);
    pmf[static_cast<std::size_t>(z)] = std::exp(log_choose + z * std::log(p) + (n - z) * std::log1p(-p));
  }
  return pmf;
}

/// Running mean and sample variance.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double standard_error() const { return std::sqrt(variance() / static_cast<double>(n)); }
  /// |mean - target| within `z` standard errors; exact agreement when the variance is zero.
  bool near(double target, double z = 3.0) const {
    const double se = standard_error();
    return se == 0.0 ? std::abs(mean - target) < 1e-12 : std::abs(mean - target) <= z * se;
  }
};

}  // namespace fixtures
