#pragma once

#include "reservations/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reservations {

/// Tables whose dimensions or periods do not line up.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's precondition (bad cycle, non-compliant callback, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Dense row-major matrix.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Fraction of positions owed to each beneficiary category.
class ReservationScheme {
 public:
  /// Throws std::invalid_argument unless every fraction is in (0,1), they sum to exactly 1,
  /// there are at least two categories and the names are unique.
  ReservationScheme(std::vector<std::string> categories, std::vector<Rational> fractions);

  std::size_t size() const { return categories_.size(); }
  const std::vector<std::string>& categories() const { return categories_; }
  const std::vector<Rational>& fractions() const { return fractions_; }
  const Rational& fraction(std::size_t j) const { return fractions_.at(j); }
  std::optional<std::size_t> index_of(std::string_view category) const;

  /// Least common multiple of the fraction denominators: the shortest roster block in which
  /// every category's share is an integer.
  std::int64_t minimal_block_length() const;

 private:
  std::vector<std::string> categories_;
  std::vector<Rational> fractions_;
};

/// Departments, scheme, and per-period vacancy vectors. Periods are 1-based in the API.
class ReservationProblem {
 public:
  ReservationProblem(std::vector<std::string> departments, ReservationScheme scheme,
                     std::vector<std::vector<std::int64_t>> vacancies);

  std::size_t department_count() const { return departments_.size(); }
  std::size_t category_count() const { return scheme_.size(); }
  std::size_t period_count() const { return vacancies_.size(); }
  const std::vector<std::string>& departments() const { return departments_; }
  const ReservationScheme& scheme() const { return scheme_; }

  /// Vacancy vector q^s of period s (1-based).
  const std::vector<std::int64_t>& vacancies(std::size_t period) const;
  /// Q_i^t: cumulative vacancies of department i up to and including period t (t may be 0).
  std::int64_t cumulative_vacancies(std::size_t department, std::size_t period) const;

 private:
  std::vector<std::string> departments_;
  ReservationScheme scheme_;
  std::vector<std::vector<std::int64_t>> vacancies_;
};

/// Additive table of fractional entitlements x_ij = alpha_j * Q_i^t with stored totals.
class FairShareTable {
 public:
  /// Validates additivity exactly, non-negativity and integral row totals.
  FairShareTable(Grid<Rational> internal, std::vector<Rational> row_totals, std::vector<Rational> column_totals,
                 Rational grand_total, std::size_t period);

  static FairShareTable from_internal(Grid<Rational> internal, std::size_t period);

  std::size_t rows() const { return internal_.rows(); }
  std::size_t cols() const { return internal_.cols(); }
  std::size_t period() const { return period_; }
  const Grid<Rational>& internal() const { return internal_; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return internal_(i, j); }
  const std::vector<Rational>& row_totals() const { return row_totals_; }
  const std::vector<Rational>& column_totals() const { return column_totals_; }
  const Rational& grand_total() const { return grand_total_; }

  friend bool operator==(const FairShareTable&, const FairShareTable&) = default;

 private:
  Grid<Rational> internal_;
  std::vector<Rational> row_totals_;
  std::vector<Rational> column_totals_;
  Rational grand_total_;
  std::size_t period_;
};

/// Additive table of reserved seat counts.
class ReservationTable {
 public:
  ReservationTable(Grid<std::int64_t> internal, std::vector<std::int64_t> row_totals,
                   std::vector<std::int64_t> column_totals, std::int64_t grand_total, std::size_t period);

  static ReservationTable from_internal(Grid<std::int64_t> internal, std::size_t period);

  std::size_t rows() const { return internal_.rows(); }
  std::size_t cols() const { return internal_.cols(); }
  std::size_t period() const { return period_; }
  const Grid<std::int64_t>& internal() const { return internal_; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return internal_(i, j); }
  const std::vector<std::int64_t>& row_totals() const { return row_totals_; }
  const std::vector<std::int64_t>& column_totals() const { return column_totals_; }
  std::int64_t grand_total() const { return grand_total_; }

  friend bool operator==(const ReservationTable&, const ReservationTable&) = default;

 private:
  Grid<std::int64_t> internal_;
  std::vector<std::int64_t> row_totals_;
  std::vector<std::int64_t> column_totals_;
  std::int64_t grand_total_;
  std::size_t period_;
};

enum class ExtensionPolicy { independent_blocks, repeat_block };

std::string_view to_string(ExtensionPolicy policy);
ExtensionPolicy parse_extension_policy(std::string_view text);

/// Ordered assignment of seat positions (1-based) to category indices.
class Roster {
 public:
  Roster(std::vector<std::size_t> assignment, std::int64_t block_length = 0,
         ExtensionPolicy policy = ExtensionPolicy::independent_blocks);

  std::size_t size() const { return assignment_.size(); }
  std::int64_t block_length() const { return block_length_; }
  ExtensionPolicy extension_policy() const { return policy_; }
  const std::vector<std::size_t>& assignment() const { return assignment_; }

  /// Category of seat `position` (1-based). Throws std::out_of_range past the end.
  std::size_t category_at(std::size_t position) const;
  /// Same, but wraps around the materialized positions.
  std::size_t cyclic_category_at(std::size_t position) const;

 private:
  std::vector<std::size_t> assignment_;
  std::int64_t block_length_;
  ExtensionPolicy policy_;
};

/// R(y) - x entrywise over the full (m+1) x (n+1) table; last row / column hold the totals.
struct BiasTable {
  Grid<Rational> entries;
  std::size_t period = 0;

  std::size_t departments() const { return entries.rows() - 1; }
  std::size_t categories() const { return entries.cols() - 1; }
  const Rational& internal(std::size_t i, std::size_t j) const { return entries(i, j); }
  const Rational& university(std::size_t j) const { return entries(entries.rows() - 1, j); }
};

struct PeriodOutcome {
  FairShareTable fair;
  ReservationTable reserved;
};

struct SolutionTrace {
  std::string label;
  std::optional<std::uint64_t> seed;
  std::vector<PeriodOutcome> periods;
};

struct DepartmentViolation {
  std::size_t department;
  std::size_t category;
  std::int64_t reserved;
  Rational fair;
};

struct UniversityViolation {
  std::size_t category;
  std::int64_t reserved;
  Rational fair;
};

/// True iff `value` is floor(fair) or ceil(fair); an integral fair share admits only itself.
inline bool within_quota(std::int64_t value, const Rational& fair) {
  return value == floor_of(fair) || value == ceil_of(fair);
}

FairShareTable build_fair_share_table(const ReservationProblem& problem, std::size_t period);

std::vector<DepartmentViolation> within_department_quota(const ReservationTable& reserved, const FairShareTable& fair);
std::vector<UniversityViolation> within_university_quota(const ReservationTable& reserved, const FairShareTable& fair);

BiasTable bias_of(const ReservationTable& reserved, const FairShareTable& fair);

/// Reservation tables never decrease entrywise from one period to the next.
bool is_monotone(const SolutionTrace& trace);

}  // namespace reservations
