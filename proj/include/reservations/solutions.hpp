#pragma once

#include "reservations/core.hpp"
#include "reservations/roster_flow.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace reservations {

enum class SolutionKind { government, court, proposed };

std::string_view to_string(SolutionKind kind);
SolutionKind parse_solution_kind(std::string_view text);

enum class DepartmentOrder { input, alphabetic };

DepartmentOrder parse_department_order(std::string_view text);
std::vector<std::size_t> department_order(const ReservationProblem& problem, DepartmentOrder order);

/// How a finite roster is read past its end: wrap around, or fail with std::length_error.
enum class RosterMode { cycle, strict };

struct SolutionConfig {
  SolutionKind kind = SolutionKind::proposed;
  std::optional<Roster> roster;                // government and court
  std::vector<std::size_t> order;              // government; empty means input order
  RosterMode roster_mode = RosterMode::cycle;
  ExtensionPolicy policy = ExtensionPolicy::independent_blocks;  // proposed
  std::int64_t block_length = 0;               // proposed; 0 = minimal
};

/// University as the unit: departments, in `order`, consume consecutive positions of one
/// university-wide roster, continuing the global index across periods.
SolutionTrace run_government(const ReservationProblem& problem, const Roster& roster,
                             const std::vector<std::size_t>& order, RosterMode mode = RosterMode::cycle);

/// Department as the unit: department i reads positions Q_i^{t-1}+1 .. Q_i^t of its own copy.
SolutionTrace run_court(const ReservationProblem& problem, const Roster& roster, RosterMode mode = RosterMode::cycle);

/// Independent random roster per department (stream derive_seed(seed, i)), consumed court-style.
SolutionTrace run_proposed(const ReservationProblem& problem, std::uint64_t seed,
                           ExtensionPolicy policy = ExtensionPolicy::independent_blocks,
                           std::int64_t block_length = 0);

/// Dispatches on config.kind; `seed` is only used by the proposed solution.
SolutionTrace run_solution(const ReservationProblem& problem, const SolutionConfig& config, std::uint64_t seed);

/// Empirical mean of the cumulative reservation table over the full (m+1) x (n+1) table with per-entry standard errors.
struct ExpectedTable {
  std::size_t period = 0;
  std::size_t replications = 0;
  Grid<double> mean;
  Grid<double> standard_error;
};

/// Replication r runs with seed derive_seed(seed, r).
ExpectedTable estimate_expected_table(const ReservationProblem& problem, std::size_t period,
                                      const SolutionConfig& config, std::size_t replications, std::uint64_t seed);

/// Deterministic roster for baselines when none is supplied: seat q goes to the category with the
/// largest outstanding share q*alpha_j - count_j, ties to the lower index.
Roster largest_deficit_roster(const ReservationScheme& scheme, std::size_t length);

}  // namespace reservations
