#include "reservations/core.hpp"

#include <numeric>
#include <set>
#include <sstream>

namespace reservations {

ReservationScheme::ReservationScheme(std::vector<std::string> categories, std::vector<Rational> fractions)
    : categories_(std::move(categories)), fractions_(std::move(fractions)) {
  if (categories_.size() != fractions_.size()) {
    throw std::invalid_argument("scheme: category and fraction counts differ");
  }
  if (categories_.size() < 2) throw std::invalid_argument("scheme: at least two categories are required");
  std::set<std::string_view> seen;
  Rational sum = 0;
  for (std::size_t j = 0; j < fractions_.size(); ++j) {
    if (!seen.insert(categories_[j]).second) {
      throw std::invalid_argument("scheme: duplicate category '" + categories_[j] + "'");
    }
    if (fractions_[j] <= 0 || fractions_[j] >= 1) {
      throw std::invalid_argument("scheme: fraction of '" + categories_[j] + "' must lie strictly between 0 and 1");
    }
    sum += fractions_[j];
  }
  if (sum != 1) throw std::invalid_argument("scheme: fractions sum to " + to_string(sum) + ", not 1");
}

std::optional<std::size_t> ReservationScheme::index_of(std::string_view category) const {
  for (std::size_t j = 0; j < categories_.size(); ++j) {
    if (categories_[j] == category) return j;
  }
  return std::nullopt;
}

std::int64_t ReservationScheme::minimal_block_length() const {
  std::int64_t k = 1;
  for (const auto& f : fractions_) k = std::lcm(k, f.denominator());
  return k;
}

ReservationProblem::ReservationProblem(std::vector<std::string> departments, ReservationScheme scheme,
                                       std::vector<std::vector<std::int64_t>> vacancies)
    : departments_(std::move(departments)), scheme_(std::move(scheme)), vacancies_(std::move(vacancies)) {
  if (departments_.empty()) throw std::invalid_argument("problem: no departments");
  if (vacancies_.empty()) throw std::invalid_argument("problem: at least one period is required");
  std::set<std::string_view> seen;
  for (const auto& d : departments_) {
    if (!seen.insert(d).second) throw std::invalid_argument("problem: duplicate department '" + d + "'");
  }
  for (std::size_t s = 0; s < vacancies_.size(); ++s) {
    if (vacancies_[s].size() != departments_.size()) {
      throw std::invalid_argument("problem: period " + std::to_string(s + 1) + " has " +
                                  std::to_string(vacancies_[s].size()) + " vacancy entries, expected " +
                                  std::to_string(departments_.size()));
    }
    for (auto q : vacancies_[s]) {
      if (q < 0) throw std::invalid_argument("problem: negative vacancy count in period " + std::to_string(s + 1));
    }
  }
}

const std::vector<std::int64_t>& ReservationProblem::vacancies(std::size_t period) const {
  if (period < 1 || period > vacancies_.size()) {
    throw std::out_of_range("period " + std::to_string(period) + " outside 1.." + std::to_string(vacancies_.size()));
  }
  return vacancies_[period - 1];
}

std::int64_t ReservationProblem::cumulative_vacancies(std::size_t department, std::size_t period) const {
  if (period > vacancies_.size()) {
    throw std::out_of_range("period " + std::to_string(period) + " outside 0.." + std::to_string(vacancies_.size()));
  }
  std::int64_t total = 0;
  for (std::size_t s = 0; s < period; ++s) total += vacancies_[s].at(department);
  return total;
}

namespace {

template <typename T>
void check_additive(const Grid<T>& internal, const std::vector<T>& row_totals, const std::vector<T>& column_totals,
                    const T& grand_total, std::string_view what) {
  if (row_totals.size() != internal.rows() || column_totals.size() != internal.cols()) {
    throw ShapeError(std::string(what) + ": totals do not match the table dimensions");
  }
  T grand{};
  for (std::size_t i = 0; i < internal.rows(); ++i) {
    T sum{};
    for (const auto& v : internal.row(i)) sum += v;
    if (sum != row_totals[i]) {
      throw std::invalid_argument(std::string(what) + ": row " + std::to_string(i + 1) + " is not additive");
    }
    grand += sum;
  }
  for (std::size_t j = 0; j < internal.cols(); ++j) {
    T sum{};
    for (std::size_t i = 0; i < internal.rows(); ++i) sum += internal(i, j);
    if (sum != column_totals[j]) {
      throw std::invalid_argument(std::string(what) + ": column " + std::to_string(j + 1) + " is not additive");
    }
  }
  if (grand != grand_total) throw std::invalid_argument(std::string(what) + ": grand total is not additive");
}

template <typename T>
std::vector<T> row_sums(const Grid<T>& g) {
  std::vector<T> out(g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (const auto& v : g.row(i)) out[i] += v;
  }
  return out;
}

template <typename T>
std::vector<T> column_sums(const Grid<T>& g) {
  std::vector<T> out(g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) out[j] += g(i, j);
  }
  return out;
}

}  // namespace

FairShareTable::FairShareTable(Grid<Rational> internal, std::vector<Rational> row_totals,
                               std::vector<Rational> column_totals, Rational grand_total, std::size_t period)
    : internal_(std::move(internal)),
      row_totals_(std::move(row_totals)),
      column_totals_(std::move(column_totals)),
      grand_total_(grand_total),
      period_(period) {
  check_additive(internal_, row_totals_, column_totals_, grand_total_, "fair share table");
  for (const auto& v : internal_.data()) {
    if (v < 0) throw std::invalid_argument("fair share table: negative entry");
  }
  for (const auto& r : row_totals_) {
    if (!is_integral(r)) throw std::invalid_argument("fair share table: row total " + to_string(r) + " is not an integer");
  }
}

FairShareTable FairShareTable::from_internal(Grid<Rational> internal, std::size_t period) {
  auto rows = row_sums(internal);
  auto cols = column_sums(internal);
  Rational grand = 0;
  for (const auto& r : rows) grand += r;
  return FairShareTable(std::move(internal), std::move(rows), std::move(cols), grand, period);
}

ReservationTable::ReservationTable(Grid<std::int64_t> internal, std::vector<std::int64_t> row_totals,
                                   std::vector<std::int64_t> column_totals, std::int64_t grand_total,
                                   std::size_t period)
    : internal_(std::move(internal)),
      row_totals_(std::move(row_totals)),
      column_totals_(std::move(column_totals)),
      grand_total_(grand_total),
      period_(period) {
  check_additive(internal_, row_totals_, column_totals_, grand_total_, "reservation table");
  for (auto v : internal_.data()) {
    if (v < 0) throw std::invalid_argument("reservation table: negative entry");
  }
}

ReservationTable ReservationTable::from_internal(Grid<std::int64_t> internal, std::size_t period) {
  auto rows = row_sums(internal);
  auto cols = column_sums(internal);
  std::int64_t grand = std::accumulate(rows.begin(), rows.end(), std::int64_t{0});
  return ReservationTable(std::move(internal), std::move(rows), std::move(cols), grand, period);
}

std::string_view to_string(ExtensionPolicy policy) {
  switch (policy) {
    case ExtensionPolicy::independent_blocks:
      return "independent-blocks";
    case ExtensionPolicy::repeat_block:
      return "repeat-block";
  }
  return "unknown";
}

ExtensionPolicy parse_extension_policy(std::string_view text) {
  if (text == "independent-blocks" || text == "independent") return ExtensionPolicy::independent_blocks;
  if (text == "repeat-block" || text == "repeat") return ExtensionPolicy::repeat_block;
  throw std::invalid_argument("unknown extension policy '" + std::string(text) + "'");
}

Roster::Roster(std::vector<std::size_t> assignment, std::int64_t block_length, ExtensionPolicy policy)
    : assignment_(std::move(assignment)), block_length_(block_length), policy_(policy) {}

std::size_t Roster::category_at(std::size_t position) const {
  if (position < 1 || position > assignment_.size()) {
    throw std::out_of_range("roster position " + std::to_string(position) + " outside 1.." +
                            std::to_string(assignment_.size()));
  }
  return assignment_[position - 1];
}

std::size_t Roster::cyclic_category_at(std::size_t position) const {
  if (assignment_.empty()) throw std::out_of_range("empty roster");
  if (position < 1) throw std::out_of_range("roster positions start at 1");
  return assignment_[(position - 1) % assignment_.size()];
}

FairShareTable build_fair_share_table(const ReservationProblem& problem, std::size_t period) {
  if (period < 1 || period > problem.period_count()) {
    throw std::out_of_range("period " + std::to_string(period) + " outside 1.." +
                            std::to_string(problem.period_count()));
  }
  const auto m = problem.department_count();
  const auto n = problem.category_count();
  const auto& alpha = problem.scheme().fractions();
  Grid<Rational> internal(m, n);
  std::vector<Rational> row_totals(m);
  std::vector<Rational> column_totals(n);
  Rational grand = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const Rational q(problem.cumulative_vacancies(i, period));
    row_totals[i] = q;
    grand += q;
    for (std::size_t j = 0; j < n; ++j) internal(i, j) = alpha[j] * q;
  }
  for (std::size_t j = 0; j < n; ++j) column_totals[j] = alpha[j] * grand;
  return FairShareTable(std::move(internal), std::move(row_totals), std::move(column_totals), grand, period);
}

namespace {

void check_pair(const ReservationTable& reserved, const FairShareTable& fair) {
  if (reserved.rows() != fair.rows() || reserved.cols() != fair.cols()) {
    std::ostringstream msg;
    msg << "reservation table is " << reserved.rows() << "x" << reserved.cols() << " but fair share table is "
        << fair.rows() << "x" << fair.cols();
    throw ShapeError(msg.str());
  }
  if (reserved.period() != fair.period()) {
    throw ShapeError("reservation table period " + std::to_string(reserved.period()) +
                     " differs from fair share period " + std::to_string(fair.period()));
  }
}

void check_row_totals(const ReservationTable& reserved, const FairShareTable& fair) {
  for (std::size_t i = 0; i < reserved.rows(); ++i) {
    if (Rational(reserved.row_totals()[i]) != fair.row_totals()[i]) {
      throw ShapeError("row total of department " + std::to_string(i + 1) + " differs from its cumulative vacancies");
    }
  }
}

}  // namespace

std::vector<DepartmentViolation> within_department_quota(const ReservationTable& reserved,
                                                         const FairShareTable& fair) {
  check_pair(reserved, fair);
  check_row_totals(reserved, fair);
  std::vector<DepartmentViolation> out;
  for (std::size_t i = 0; i < reserved.rows(); ++i) {
    for (std::size_t j = 0; j < reserved.cols(); ++j) {
      if (!within_quota(reserved(i, j), fair(i, j))) out.push_back({i, j, reserved(i, j), fair(i, j)});
    }
  }
  return out;
}

std::vector<UniversityViolation> within_university_quota(const ReservationTable& reserved,
                                                         const FairShareTable& fair) {
  check_pair(reserved, fair);
  check_row_totals(reserved, fair);
  std::vector<UniversityViolation> out;
  for (std::size_t j = 0; j < reserved.cols(); ++j) {
    const auto z = reserved.column_totals()[j];
    const auto& x = fair.column_totals()[j];
    if (!within_quota(z, x)) out.push_back({j, z, x});
  }
  return out;
}

BiasTable bias_of(const ReservationTable& reserved, const FairShareTable& fair) {
  check_pair(reserved, fair);
  check_row_totals(reserved, fair);
  const auto m = reserved.rows();
  const auto n = reserved.cols();
  BiasTable bias{Grid<Rational>(m + 1, n + 1), reserved.period()};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) bias.entries(i, j) = Rational(reserved(i, j)) - fair(i, j);
    bias.entries(i, n) = Rational(reserved.row_totals()[i]) - fair.row_totals()[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    bias.entries(m, j) = Rational(reserved.column_totals()[j]) - fair.column_totals()[j];
  }
  bias.entries(m, n) = Rational(reserved.grand_total()) - fair.grand_total();
  return bias;
}

bool is_monotone(const SolutionTrace& trace) {
  for (std::size_t p = 1; p < trace.periods.size(); ++p) {
    const auto& prev = trace.periods[p - 1].reserved;
    const auto& next = trace.periods[p].reserved;
    if (prev.rows() != next.rows() || prev.cols() != next.cols()) return false;
    for (std::size_t i = 0; i < prev.rows(); ++i) {
      for (std::size_t j = 0; j < prev.cols(); ++j) {
        if (next(i, j) < prev(i, j)) return false;
      }
    }
  }
  return true;
}

}  // namespace reservations
