#pragma once

// File formats: problem CSV (department,period,vacancies), scheme CSV
// (category,numerator,denominator or category,fraction), roster CSV (index,category), and the
// JSON report. All CSVs are comma-delimited UTF-8 with a mandatory header row.

#include "reservations/analysis.hpp"
#include "reservations/core.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace reservations::io {

/// Malformed input; `line` is 1-based (0 when not tied to a line).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

ReservationScheme read_scheme(std::istream& in, const std::string& source = "scheme");
void write_scheme(std::ostream& out, const ReservationScheme& scheme);

/// Departments keep first-appearance order; periods run 1..max, missing pairs read as 0.
ReservationProblem read_problem(std::istream& in, const ReservationScheme& scheme,
                                const std::string& source = "problem");
void write_problem(std::ostream& out, const ReservationProblem& problem);

Roster read_roster(std::istream& in, const ReservationScheme& scheme, const std::string& source = "roster");
void write_roster(std::ostream& out, const Roster& roster, const ReservationScheme& scheme);

/// department,<categories...>,total rows plus a trailing total row.
void write_table_csv(std::ostream& out, const ReservationTable& table, const ReservationProblem& problem);
void write_table_csv(std::ostream& out, const FairShareTable& table, const ReservationProblem& problem);

nlohmann::json to_json(const FairShareTable& table);
nlohmann::json to_json(const ReservationTable& table);
nlohmann::json to_json(const ViolationStats& stats);
nlohmann::json to_json(const BoxSummary& box);
nlohmann::json to_json(const PeriodBiasSummary& summary);

FairShareTable fair_table_from_json(const nlohmann::json& j, std::size_t period);
ReservationTable reservation_table_from_json(const nlohmann::json& j, std::size_t period);

/// Full report: metadata, per-period fair and reservation tables with violation statistics at
/// both scopes, and the bias trace.
nlohmann::json make_report(const ReservationProblem& problem, const SolutionTrace& trace, nlohmann::json metadata);

/// Re-parses the per-period tables of a report; every table is validated on construction.
std::vector<PeriodOutcome> read_report_tables(const nlohmann::json& report);

/// period,department,category,fair,reserved,bias rows; totals use the name "total".
void write_trace_csv(std::ostream& out, const ReservationProblem& problem, const SolutionTrace& trace);

}  // namespace reservations::io
