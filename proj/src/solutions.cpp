#include "reservations/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace reservations {

std::string_view to_string(SolutionKind kind) {
  switch (kind) {
    case SolutionKind::government:
      return "government";
    case SolutionKind::court:
      return "court";
    case SolutionKind::proposed:
      return "proposed";
  }
  return "unknown";
}

SolutionKind parse_solution_kind(std::string_view text) {
  if (text == "gov" || text == "government") return SolutionKind::government;
  if (text == "court") return SolutionKind::court;
  if (text == "proposed") return SolutionKind::proposed;
  throw std::invalid_argument("unknown solution '" + std::string(text) + "'");
}

DepartmentOrder parse_department_order(std::string_view text) {
  if (text == "input") return DepartmentOrder::input;
  if (text == "alpha" || text == "alphabetic") return DepartmentOrder::alphabetic;
  throw std::invalid_argument("unknown department order '" + std::string(text) + "'");
}

std::vector<std::size_t> department_order(const ReservationProblem& problem, DepartmentOrder order) {
  std::vector<std::size_t> idx(problem.department_count());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (order == DepartmentOrder::alphabetic) {
    const auto& names = problem.departments();
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
  }
  return idx;
}

namespace {

class RosterReader {
 public:
  RosterReader(const Roster& roster, RosterMode mode, std::size_t categories) : roster_(roster), mode_(mode) {
    for (auto c : roster.assignment()) {
      if (c >= categories) throw std::invalid_argument("roster refers to an unknown category index");
    }
  }

  std::size_t at(std::size_t position) const {
    if (mode_ == RosterMode::strict) {
      if (position > roster_.size()) {
        throw std::length_error("roster exhausted: position " + std::to_string(position) + " requested but only " +
                                std::to_string(roster_.size()) + " available");
      }
      return roster_.category_at(position);
    }
    if (roster_.size() == 0) throw std::length_error("roster is empty");
    return roster_.cyclic_category_at(position);
  }

 private:
  const Roster& roster_;
  RosterMode mode_;
};

SolutionTrace make_trace(const ReservationProblem& problem, std::string label, std::optional<std::uint64_t> seed,
                         const std::vector<Grid<std::int64_t>>& cumulative) {
  SolutionTrace trace{std::move(label), seed, {}};
  trace.periods.reserve(problem.period_count());
  for (std::size_t t = 1; t <= problem.period_count(); ++t) {
    trace.periods.push_back({build_fair_share_table(problem, t), ReservationTable::from_internal(cumulative[t - 1], t)});
  }
  return trace;
}

/// Court-style consumption with one roster per department.
std::vector<Grid<std::int64_t>> consume_per_department(const ReservationProblem& problem,
                                                       const std::vector<RosterReader>& readers) {
  const auto m = problem.department_count();
  const auto n = problem.category_count();
  std::vector<Grid<std::int64_t>> out;
  Grid<std::int64_t> counts(m, n, 0);
  std::vector<std::size_t> used(m, 0);
  for (std::size_t t = 1; t <= problem.period_count(); ++t) {
    const auto& q = problem.vacancies(t);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::int64_t s = 0; s < q[i]; ++s) counts(i, readers[i].at(++used[i]))++;
    }
    out.push_back(counts);
  }
  return out;
}

}  // namespace

SolutionTrace run_government(const ReservationProblem& problem, const Roster& roster,
                             const std::vector<std::size_t>& order, RosterMode mode) {
  const auto m = problem.department_count();
  std::vector<std::size_t> sequence = order;
  if (sequence.empty()) sequence = department_order(problem, DepartmentOrder::input);
  {
    auto sorted = sequence;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expected(m);
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    if (sorted != expected) throw std::invalid_argument("government pooling order must list every department once");
  }
  RosterReader reader(roster, mode, problem.category_count());
  std::vector<Grid<std::int64_t>> cumulative;
  Grid<std::int64_t> counts(m, problem.category_count(), 0);
  std::size_t position = 0;
  for (std::size_t t = 1; t <= problem.period_count(); ++t) {
    const auto& q = problem.vacancies(t);
    for (auto i : sequence) {
      for (std::int64_t s = 0; s < q[i]; ++s) counts(i, reader.at(++position))++;
    }
    cumulative.push_back(counts);
  }
  return make_trace(problem, "government", std::nullopt, cumulative);
}

SolutionTrace run_court(const ReservationProblem& problem, const Roster& roster, RosterMode mode) {
  std::vector<RosterReader> readers(problem.department_count(), RosterReader(roster, mode, problem.category_count()));
  return make_trace(problem, "court", std::nullopt, consume_per_department(problem, readers));
}

SolutionTrace run_proposed(const ReservationProblem& problem, std::uint64_t seed, ExtensionPolicy policy,
                           std::int64_t block_length) {
  const auto m = problem.department_count();
  const RosterSampler sampler(problem.scheme(), block_length);
  std::vector<Roster> rosters;
  rosters.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rng rng(derive_seed(seed, i));
    const auto length = static_cast<std::size_t>(problem.cumulative_vacancies(i, problem.period_count()));
    rosters.push_back(sampler.draw_roster(length, rng, policy));
  }
  std::vector<RosterReader> readers;
  readers.reserve(m);
  for (const auto& r : rosters) readers.emplace_back(r, RosterMode::strict, problem.category_count());
  return make_trace(problem, "proposed", seed, consume_per_department(problem, readers));
}

SolutionTrace run_solution(const ReservationProblem& problem, const SolutionConfig& config, std::uint64_t seed) {
  switch (config.kind) {
    case SolutionKind::government:
      if (!config.roster) throw ContractError("government solution needs a roster");
      return run_government(problem, *config.roster, config.order, config.roster_mode);
    case SolutionKind::court:
      if (!config.roster) throw ContractError("court solution needs a roster");
      return run_court(problem, *config.roster, config.roster_mode);
    case SolutionKind::proposed:
      return run_proposed(problem, seed, config.policy, config.block_length);
  }
  throw std::invalid_argument("unknown solution kind");
}

ExpectedTable estimate_expected_table(const ReservationProblem& problem, std::size_t period,
                                      const SolutionConfig& config, std::size_t replications, std::uint64_t seed) {
  if (replications == 0) throw std::invalid_argument("replications must be at least 1");
  if (period < 1 || period > problem.period_count()) {
    throw std::out_of_range("period " + std::to_string(period) + " outside 1.." +
                            std::to_string(problem.period_count()));
  }
  const auto m = problem.department_count();
  const auto n = problem.category_count();
  Grid<double> sum(m + 1, n + 1, 0.0);
  Grid<double> sum_sq(m + 1, n + 1, 0.0);

  auto accumulate = [&](const ReservationTable& r, double weight) {
    auto add = [&](std::size_t i, std::size_t j, double v) {
      sum(i, j) += weight * v;
      sum_sq(i, j) += weight * v * v;
    };
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) add(i, j, static_cast<double>(r(i, j)));
      add(i, n, static_cast<double>(r.row_totals()[i]));
    }
    for (std::size_t j = 0; j < n; ++j) add(m, j, static_cast<double>(r.column_totals()[j]));
    add(m, n, static_cast<double>(r.grand_total()));
  };

  if (config.kind == SolutionKind::proposed) {
    for (std::size_t r = 0; r < replications; ++r) {
      const auto trace = run_solution(problem, config, derive_seed(seed, r));
      accumulate(trace.periods[period - 1].reserved, 1.0);
    }
  } else {
    // Deterministic: every replication yields the same table.
    const auto trace = run_solution(problem, config, seed);
    accumulate(trace.periods[period - 1].reserved, static_cast<double>(replications));
  }

  ExpectedTable out{period, replications, Grid<double>(m + 1, n + 1), Grid<double>(m + 1, n + 1, 0.0)};
  const auto count = static_cast<double>(replications);
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      const double mean = sum(i, j) / count;
      out.mean(i, j) = mean;
      if (replications > 1) {
        const double var = std::max(0.0, (sum_sq(i, j) - count * mean * mean) / (count - 1));
        out.standard_error(i, j) = std::sqrt(var / count);
      }
    }
  }
  return out;
}

Roster largest_deficit_roster(const ReservationScheme& scheme, std::size_t length) {
  std::vector<std::int64_t> counts(scheme.size(), 0);
  std::vector<std::size_t> assignment;
  assignment.reserve(length);
  for (std::size_t q = 1; q <= length; ++q) {
    std::size_t best = 0;
    Rational best_deficit;
    for (std::size_t j = 0; j < scheme.size(); ++j) {
      const Rational deficit = scheme.fraction(j) * static_cast<std::int64_t>(q) - counts[j];
      if (j == 0 || deficit > best_deficit) {
        best = j;
        best_deficit = deficit;
      }
    }
    counts[best]++;
    assignment.push_back(best);
  }
  return Roster(std::move(assignment), scheme.minimal_block_length(), ExtensionPolicy::repeat_block);
}

}  // namespace reservations
