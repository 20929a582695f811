#pragma once

#include "reservations/core.hpp"
#include "reservations/random.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string_view>
#include <vector>

namespace reservations {

enum class Scope { department, university };

std::string_view to_string(Scope scope);

/// Quota violations of one reservation table. max_possible is m*n cells for department scope and
/// n column totals for university scope.
struct ViolationStats {
  Scope scope = Scope::department;
  std::size_t instances = 0;
  std::size_t max_possible = 0;
  double percentage = 0.0;              // instances / max_possible, in [0, 1]
  std::vector<Rational> magnitudes;     // |bias| at each violation
  double average_magnitude = 0.0;
  double min_magnitude = 0.0;
  double max_magnitude = 0.0;
};

ViolationStats violation_stats(const ReservationTable& reserved, const FairShareTable& fair, Scope scope);
/// Statistics of the final period's cumulative tables.
ViolationStats violation_stats(const SolutionTrace& trace, Scope scope);

/// Tukey box-plot summary; quartiles by linear interpolation between order statistics,
/// adjacent values are the extreme samples within 1.5 IQR of the quartiles.
struct BoxSummary {
  std::size_t count = 0;
  double median = 0.0;
  double lower_quartile = 0.0;
  double upper_quartile = 0.0;
  double lower_adjacent = 0.0;
  double upper_adjacent = 0.0;
  double minimum = 0.0;
  double maximum = 0.0;
};

BoxSummary summarize(std::vector<double> samples);

struct PeriodBiasSummary {
  std::size_t period = 0;
  BoxSummary department;   // internal-entry biases
  BoxSummary university;   // column-total biases
  double max_abs_department = 0.0;
  double max_abs_university = 0.0;
};

std::vector<PeriodBiasSummary> bias_trace(const SolutionTrace& trace);
/// Pools the bias samples of several traces (replications or advertisements) period by period.
/// Traces may have different lengths; period t pools every trace that reaches t.
std::vector<PeriodBiasSummary> bias_trace(std::span<const SolutionTrace> traces);

/// Empirical upper/lower tails of z_{m+1,j}^t - x_{m+1,j}^t under the proposed solution, next
/// to the ceilings exp(-b^2 / 3x) and exp(-b^2 / 2x).
struct TailDiagnostic {
  std::size_t category = 0;
  std::size_t period = 0;
  Rational fair_share;
  std::size_t replications = 0;
  std::vector<double> b;
  std::vector<double> upper_frequency;    // Pr(z - x >= b)
  std::vector<double> lower_frequency;    // Pr(z - x <= -b)
  std::vector<double> upper_standard_error;
  std::vector<double> lower_standard_error;
  std::vector<double> upper_bound;
  std::vector<double> lower_bound;
  std::map<std::int64_t, std::size_t> histogram;  // realized z -> count
  /// Replications needed so every frequency's standard error is below a quarter of the
  /// bound at the largest b; reported, not enforced.
  bool standard_error_target_met = false;
};

TailDiagnostic tail_diagnostic(const ReservationProblem& problem, std::size_t category, std::size_t period,
                               std::size_t replications, std::vector<double> b_grid, std::uint64_t seed);

/// What an adversarial decision callback sees: one vacancy in `department` this period.
struct AdversarialState {
  std::size_t period = 0;
  std::size_t department = 0;
  const Grid<std::int64_t>* reserved = nullptr;  // cumulative reservations before this vacancy
  const FairShareTable* fair = nullptr;          // fair shares including this vacancy
};

/// Returns the category that receives the vacancy.
using AdversarialPolicy = std::function<std::size_t(const AdversarialState&)>;

struct AdversarialRun {
  ReservationProblem problem;
  SolutionTrace trace;
  std::vector<double> max_department_bias;  // per period, max |bias| over internal cells
};

/// Three departments, alpha = (1/2, 1/2), one vacancy per period: d3 in odd periods; in even
/// periods d1 if d3 last gave c1 and d2 if it gave c2. Any policy that keeps
/// the university within quota must then starve d1 of c1 or d2 of c2. Throws ContractError if
/// `policy` breaks the university quota. Requires periods >= 2.
AdversarialRun adversarial_sequence(std::size_t periods, const AdversarialPolicy& policy);

/// The first category (in order) whose choice keeps every column total within quota.
std::size_t first_compliant_choice(const AdversarialState& state);

/// Synthetic advertisement corpus parameters; defaults follow the published data ranges.
struct SyntheticParameters {
  std::size_t min_departments = 8;
  std::size_t max_departments = 50;
  std::int64_t min_vacancies = 1;
  std::int64_t max_vacancies = 30;
  std::size_t periods = 9;
};

/// Departments and per-(department, period) vacancies drawn uniformly from the given ranges.
ReservationProblem synthesize_problem(const ReservationScheme& scheme, const SyntheticParameters& params, Rng& rng);

/// SC 15%, ST 7.5%, OBC 27%, EWS 10%, UR remainder (minimal block 200).
ReservationScheme indian_scheme();

}  // namespace reservations
