#include "reservations/analysis.hpp"

#include "reservations/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace reservations {

std::string_view to_string(Scope scope) { return scope == Scope::department ? "department" : "university"; }

namespace {

Rational abs_of(const Rational& x) { return x < 0 ? -x : x; }

void finish(ViolationStats& stats) {
  stats.percentage =
      stats.max_possible == 0 ? 0.0 : static_cast<double>(stats.instances) / static_cast<double>(stats.max_possible);
  if (stats.magnitudes.empty()) return;
  double sum = 0.0;
  stats.min_magnitude = std::numeric_limits<double>::infinity();
  stats.max_magnitude = 0.0;
  for (const auto& m : stats.magnitudes) {
    const double v = to_double(m);
    sum += v;
    stats.min_magnitude = std::min(stats.min_magnitude, v);
    stats.max_magnitude = std::max(stats.max_magnitude, v);
  }
  stats.average_magnitude = sum / static_cast<double>(stats.magnitudes.size());
}

double quantile(const std::vector<double>& sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ViolationStats violation_stats(const ReservationTable& reserved, const FairShareTable& fair, Scope scope) {
  ViolationStats stats;
  stats.scope = scope;
  if (scope == Scope::department) {
    stats.max_possible = reserved.rows() * reserved.cols();
    for (const auto& v : within_department_quota(reserved, fair)) {
      stats.magnitudes.push_back(abs_of(Rational(v.reserved) - v.fair));
    }
  } else {
    stats.max_possible = reserved.cols();
    for (const auto& v : within_university_quota(reserved, fair)) {
      stats.magnitudes.push_back(abs_of(Rational(v.reserved) - v.fair));
    }
  }
  stats.instances = stats.magnitudes.size();
  finish(stats);
  return stats;
}

ViolationStats violation_stats(const SolutionTrace& trace, Scope scope) {
  if (trace.periods.empty()) throw ContractError("violation_stats: empty trace");
  const auto& last = trace.periods.back();
  return violation_stats(last.reserved, last.fair, scope);
}

BoxSummary summarize(std::vector<double> samples) {
  BoxSummary box;
  box.count = samples.size();
  if (samples.empty()) return box;
  std::sort(samples.begin(), samples.end());
  box.minimum = samples.front();
  box.maximum = samples.back();
  box.median = quantile(samples, 0.5);
  box.lower_quartile = quantile(samples, 0.25);
  box.upper_quartile = quantile(samples, 0.75);
  const double iqr = box.upper_quartile - box.lower_quartile;
  const double low_fence = box.lower_quartile - 1.5 * iqr;
  const double high_fence = box.upper_quartile + 1.5 * iqr;
  box.lower_adjacent = *std::find_if(samples.begin(), samples.end(), [&](double v) { return v >= low_fence; });
  box.upper_adjacent = *std::find_if(samples.rbegin(), samples.rend(), [&](double v) { return v <= high_fence; });
  return box;
}

std::vector<PeriodBiasSummary> bias_trace(std::span<const SolutionTrace> traces) {
  std::size_t periods = 0;
  for (const auto& t : traces) periods = std::max(periods, t.periods.size());
  std::vector<PeriodBiasSummary> out;
  out.reserve(periods);
  for (std::size_t p = 0; p < periods; ++p) {
    std::vector<double> department;
    std::vector<double> university;
    for (const auto& trace : traces) {
      if (p >= trace.periods.size()) continue;
      const auto& outcome = trace.periods[p];
      const auto bias = bias_of(outcome.reserved, outcome.fair);
      for (std::size_t i = 0; i < bias.departments(); ++i) {
        for (std::size_t j = 0; j < bias.categories(); ++j) department.push_back(to_double(bias.internal(i, j)));
      }
      for (std::size_t j = 0; j < bias.categories(); ++j) university.push_back(to_double(bias.university(j)));
    }
    PeriodBiasSummary summary;
    summary.period = p + 1;
    for (double v : department) summary.max_abs_department = std::max(summary.max_abs_department, std::abs(v));
    for (double v : university) summary.max_abs_university = std::max(summary.max_abs_university, std::abs(v));
    summary.department = summarize(std::move(department));
    summary.university = summarize(std::move(university));
    out.push_back(summary);
  }
  return out;
}

std::vector<PeriodBiasSummary> bias_trace(const SolutionTrace& trace) {
  return bias_trace(std::span<const SolutionTrace>(&trace, 1));
}

TailDiagnostic tail_diagnostic(const ReservationProblem& problem, std::size_t category, std::size_t period,
                               std::size_t replications, std::vector<double> b_grid, std::uint64_t seed) {
  if (category >= problem.category_count()) throw std::out_of_range("category index out of range");
  if (replications == 0) throw std::invalid_argument("replications must be at least 1");
  const auto fair = build_fair_share_table(problem, period);

  TailDiagnostic diag;
  diag.category = category;
  diag.period = period;
  diag.fair_share = fair.column_totals()[category];
  diag.replications = replications;
  diag.b = std::move(b_grid);

  for (std::size_t r = 0; r < replications; ++r) {
    const auto trace = run_proposed(problem, derive_seed(seed, r));
    diag.histogram[trace.periods[period - 1].reserved.column_totals()[category]]++;
  }

  const double x = to_double(diag.fair_share);
  const double count = static_cast<double>(replications);
  for (double b : diag.b) {
    std::size_t upper = 0;
    std::size_t lower = 0;
    for (const auto& [z, c] : diag.histogram) {
      const double dev = to_double(Rational(z) - diag.fair_share);
      if (dev >= b) upper += c;
      if (dev <= -b) lower += c;
    }
    const double pu = static_cast<double>(upper) / count;
    const double pl = static_cast<double>(lower) / count;
    diag.upper_frequency.push_back(pu);
    diag.lower_frequency.push_back(pl);
    diag.upper_standard_error.push_back(std::sqrt(pu * (1 - pu) / count));
    diag.lower_standard_error.push_back(std::sqrt(pl * (1 - pl) / count));
    if (x > 0) {
      diag.upper_bound.push_back(std::exp(-b * b / (3 * x)));
      diag.lower_bound.push_back(std::exp(-b * b / (2 * x)));
    } else {
      diag.upper_bound.push_back(b > 0 ? 0.0 : 1.0);
      diag.lower_bound.push_back(b > 0 ? 0.0 : 1.0);
    }
  }
  if (!diag.b.empty()) {
    const auto largest = static_cast<std::size_t>(std::max_element(diag.b.begin(), diag.b.end()) - diag.b.begin());
    // Standard error of a frequency near the bound itself.
    auto se_at = [&](double p) { return std::sqrt(p * (1 - p) / count); };
    diag.standard_error_target_met = se_at(diag.upper_bound[largest]) < diag.upper_bound[largest] / 4 &&
                                     se_at(diag.lower_bound[largest]) < diag.lower_bound[largest] / 4;
  }
  return diag;
}

std::size_t first_compliant_choice(const AdversarialState& state) {
  const auto& reserved = *state.reserved;
  const auto& fair = *state.fair;
  for (std::size_t c = 0; c < reserved.cols(); ++c) {
    bool ok = true;
    for (std::size_t j = 0; j < reserved.cols() && ok; ++j) {
      std::int64_t total = c == j ? 1 : 0;
      for (std::size_t i = 0; i < reserved.rows(); ++i) total += reserved(i, j);
      ok = within_quota(total, fair.column_totals()[j]);
    }
    if (ok) return c;
  }
  throw std::logic_error("no category keeps the university within quota");
}

AdversarialRun adversarial_sequence(std::size_t periods, const AdversarialPolicy& policy) {
  if (periods < 2) throw std::invalid_argument("adversarial sequence needs at least 2 periods");
  const ReservationScheme scheme({"c1", "c2"}, {Rational(1, 2), Rational(1, 2)});
  const std::vector<std::string> departments{"d1", "d2", "d3"};
  constexpr std::size_t d1 = 0, d2 = 1, d3 = 2;

  std::vector<std::vector<std::int64_t>> vacancies;
  Grid<std::int64_t> reserved(3, 2, 0);
  std::vector<Grid<std::int64_t>> cumulative;
  std::size_t last_d3_choice = 0;
  for (std::size_t s = 1; s <= periods; ++s) {
    const std::size_t dept = s % 2 == 1 ? d3 : (last_d3_choice == 0 ? d1 : d2);
    std::vector<std::int64_t> q(3, 0);
    q[dept] = 1;
    vacancies.push_back(q);
    const ReservationProblem partial(departments, scheme, vacancies);
    const auto fair = build_fair_share_table(partial, s);

    const AdversarialState state{s, dept, &reserved, &fair};
    const auto choice = policy(state);
    if (choice >= 2) throw ContractError("adversarial policy returned an unknown category");
    reserved(dept, choice)++;
    if (dept == d3) last_d3_choice = choice;

    const auto table = ReservationTable::from_internal(reserved, s);
    if (!within_university_quota(table, fair).empty()) {
      throw ContractError("adversarial policy broke the university quota in period " + std::to_string(s));
    }
    cumulative.push_back(reserved);
  }

  ReservationProblem problem(departments, scheme, std::move(vacancies));
  AdversarialRun run{problem, SolutionTrace{"adversarial", std::nullopt, {}}, {}};
  for (std::size_t s = 1; s <= periods; ++s) {
    auto fair = build_fair_share_table(problem, s);
    auto table = ReservationTable::from_internal(cumulative[s - 1], s);
    const auto bias = bias_of(table, fair);
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 2; ++j) worst = std::max(worst, std::abs(to_double(bias.internal(i, j))));
    }
    run.max_department_bias.push_back(worst);
    run.trace.periods.push_back({std::move(fair), std::move(table)});
  }
  return run;
}

ReservationProblem synthesize_problem(const ReservationScheme& scheme, const SyntheticParameters& params, Rng& rng) {
  if (params.min_departments < 1 || params.min_departments > params.max_departments) {
    throw std::invalid_argument("synthetic department range is empty");
  }
  if (params.min_vacancies < 0 || params.min_vacancies > params.max_vacancies) {
    throw std::invalid_argument("synthetic vacancy range is empty");
  }
  if (params.periods < 1) throw std::invalid_argument("synthetic problem needs at least one period");
  const auto m = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(params.min_departments),
                                                          static_cast<std::int64_t>(params.max_departments)));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < m; ++i) {
    std::ostringstream name;
    name << "D" << std::setw(2) << std::setfill('0') << i + 1;
    names.push_back(name.str());
  }
  std::vector<std::vector<std::int64_t>> vacancies(params.periods, std::vector<std::int64_t>(m));
  for (auto& period : vacancies) {
    for (auto& q : period) q = rng.uniform_int(params.min_vacancies, params.max_vacancies);
  }
  return ReservationProblem(std::move(names), scheme, std::move(vacancies));
}

ReservationScheme indian_scheme() {
  return ReservationScheme({"SC", "ST", "OBC", "EWS", "UR"},
                           {Rational(3, 20), Rational(3, 40), Rational(27, 100), Rational(1, 10), Rational(81, 200)});
}

}  // namespace reservations
