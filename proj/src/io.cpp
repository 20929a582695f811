#include "reservations/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

namespace reservations::io {

using nlohmann::json;

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(line == 0 ? source + ": " + what : source + ":" + std::to_string(line) + ": " + what),
      line_(line) {}

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

/// Line reader that skips blank lines and a leading UTF-8 byte order mark.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (line_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (trim(line).empty()) continue;
      fields = split(line);
      return true;
    }
    return false;
  }

  std::vector<std::string> header() {
    std::vector<std::string> fields;
    if (!next(fields)) fail("missing header row");
    for (auto& f : fields) f = lower(f);
    return fields;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

  std::int64_t integer(const std::string& text, std::string_view what) const {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
      fail(std::string(what) + " '" + text + "' is not an integer");
    }
    return value;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

}  // namespace

ReservationScheme read_scheme(std::istream& in, const std::string& source) {
  CsvReader reader(in, source);
  const auto header = reader.header();
  const bool split_form = header == std::vector<std::string>{"category", "numerator", "denominator"};
  const bool single_form = header == std::vector<std::string>{"category", "fraction"};
  if (!split_form && !single_form) {
    reader.fail("expected header 'category,numerator,denominator' or 'category,fraction'");
  }
  std::vector<std::string> categories;
  std::vector<Rational> fractions;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() != header.size()) reader.fail("expected " + std::to_string(header.size()) + " fields");
    if (fields[0].empty()) reader.fail("empty category name");
    try {
      if (split_form) {
        const auto num = reader.integer(fields[1], "numerator");
        const auto den = reader.integer(fields[2], "denominator");
        if (den <= 0) reader.fail("denominator must be positive");
        fractions.emplace_back(num, den);
      } else {
        fractions.push_back(parse_rational(fields[1]));
      }
    } catch (const std::invalid_argument& e) {
      reader.fail(e.what());
    }
    categories.push_back(fields[0]);
  }
  try {
    return ReservationScheme(std::move(categories), std::move(fractions));
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, 0, e.what());
  }
}

void write_scheme(std::ostream& out, const ReservationScheme& scheme) {
  out << "category,numerator,denominator\n";
  for (std::size_t j = 0; j < scheme.size(); ++j) {
    out << scheme.categories()[j] << ',' << scheme.fraction(j).numerator() << ',' << scheme.fraction(j).denominator()
        << '\n';
  }
}

ReservationProblem read_problem(std::istream& in, const ReservationScheme& scheme, const std::string& source) {
  CsvReader reader(in, source);
  if (reader.header() != std::vector<std::string>{"department", "period", "vacancies"}) {
    reader.fail("expected header 'department,period,vacancies'");
  }
  std::vector<std::string> departments;
  std::map<std::string, std::size_t> index;
  std::map<std::pair<std::size_t, std::int64_t>, std::int64_t> cells;
  std::int64_t max_period = 0;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() != 3) reader.fail("expected 3 fields");
    if (fields[0].empty()) reader.fail("empty department name");
    const auto period = reader.integer(fields[1], "period");
    const auto vacancies = reader.integer(fields[2], "vacancies");
    if (period < 1) reader.fail("periods start at 1");
    if (vacancies < 0) reader.fail("vacancies must be non-negative");
    auto [it, inserted] = index.emplace(fields[0], departments.size());
    if (inserted) departments.push_back(fields[0]);
    if (!cells.emplace(std::make_pair(it->second, period), vacancies).second) {
      reader.fail("duplicate row for department '" + fields[0] + "' period " + fields[1]);
    }
    max_period = std::max(max_period, period);
  }
  if (departments.empty()) reader.fail("no data rows");
  std::vector<std::vector<std::int64_t>> vacancies(static_cast<std::size_t>(max_period),
                                                   std::vector<std::int64_t>(departments.size(), 0));
  for (const auto& [key, q] : cells) vacancies[static_cast<std::size_t>(key.second - 1)][key.first] = q;
  return ReservationProblem(std::move(departments), scheme, std::move(vacancies));
}

void write_problem(std::ostream& out, const ReservationProblem& problem) {
  out << "department,period,vacancies\n";
  for (std::size_t t = 1; t <= problem.period_count(); ++t) {
    for (std::size_t i = 0; i < problem.department_count(); ++i) {
      out << problem.departments()[i] << ',' << t << ',' << problem.vacancies(t)[i] << '\n';
    }
  }
}

Roster read_roster(std::istream& in, const ReservationScheme& scheme, const std::string& source) {
  CsvReader reader(in, source);
  if (reader.header() != std::vector<std::string>{"index", "category"}) reader.fail("expected header 'index,category'");
  std::vector<std::size_t> assignment;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() != 2) reader.fail("expected 2 fields");
    const auto position = reader.integer(fields[0], "index");
    if (position != static_cast<std::int64_t>(assignment.size()) + 1) {
      reader.fail("roster index " + fields[0] + " out of sequence, expected " + std::to_string(assignment.size() + 1));
    }
    const auto category = scheme.index_of(fields[1]);
    if (!category) reader.fail("unknown category '" + fields[1] + "'");
    assignment.push_back(*category);
  }
  if (assignment.empty()) reader.fail("roster has no positions");
  return Roster(std::move(assignment));
}

void write_roster(std::ostream& out, const Roster& roster, const ReservationScheme& scheme) {
  out << "index,category\n";
  for (std::size_t p = 1; p <= roster.size(); ++p) {
    out << p << ',' << scheme.categories().at(roster.category_at(p)) << '\n';
  }
}

void write_table_csv(std::ostream& out, const ReservationTable& table, const ReservationProblem& problem) {
  out << "department";
  for (const auto& c : problem.scheme().categories()) out << ',' << c;
  out << ",total\n";
  for (std::size_t i = 0; i < table.rows(); ++i) {
    out << problem.departments()[i];
    for (std::size_t j = 0; j < table.cols(); ++j) out << ',' << table(i, j);
    out << ',' << table.row_totals()[i] << '\n';
  }
  out << "total";
  for (auto v : table.column_totals()) out << ',' << v;
  out << ',' << table.grand_total() << '\n';
}

void write_table_csv(std::ostream& out, const FairShareTable& table, const ReservationProblem& problem) {
  out << "department";
  for (const auto& c : problem.scheme().categories()) out << ',' << c;
  out << ",total\n";
  for (std::size_t i = 0; i < table.rows(); ++i) {
    out << problem.departments()[i];
    for (std::size_t j = 0; j < table.cols(); ++j) out << ',' << to_string(table(i, j));
    out << ',' << to_string(table.row_totals()[i]) << '\n';
  }
  out << "total";
  for (const auto& v : table.column_totals()) out << ',' << to_string(v);
  out << ',' << to_string(table.grand_total()) << '\n';
}

json to_json(const FairShareTable& table) {
  json internal = json::array();
  for (std::size_t i = 0; i < table.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < table.cols(); ++j) row.push_back(to_string(table(i, j)));
    internal.push_back(std::move(row));
  }
  json rows = json::array();
  for (const auto& v : table.row_totals()) rows.push_back(to_string(v));
  json cols = json::array();
  for (const auto& v : table.column_totals()) cols.push_back(to_string(v));
  return {{"internal", internal}, {"row_totals", rows}, {"column_totals", cols},
          {"grand_total", to_string(table.grand_total())}};
}

json to_json(const ReservationTable& table) {
  json internal = json::array();
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const auto row = table.internal().row(i);
    internal.push_back(std::vector<std::int64_t>(row.begin(), row.end()));
  }
  return {{"internal", internal},
          {"row_totals", table.row_totals()},
          {"column_totals", table.column_totals()},
          {"grand_total", table.grand_total()}};
}

json to_json(const ViolationStats& stats) {
  json magnitudes = json::array();
  for (const auto& m : stats.magnitudes) magnitudes.push_back(to_string(m));
  return {{"scope", std::string(to_string(stats.scope))},
          {"instances", stats.instances},
          {"max_possible", stats.max_possible},
          {"max_possible_rule", stats.scope == Scope::department ? "departments x categories" : "categories"},
          {"percentage", stats.percentage},
          {"magnitudes", magnitudes},
          {"average_magnitude", stats.average_magnitude},
          {"min_magnitude", stats.min_magnitude},
          {"max_magnitude", stats.max_magnitude}};
}

json to_json(const BoxSummary& box) {
  return {{"count", box.count},
          {"median", box.median},
          {"lower_quartile", box.lower_quartile},
          {"upper_quartile", box.upper_quartile},
          {"lower_adjacent", box.lower_adjacent},
          {"upper_adjacent", box.upper_adjacent},
          {"minimum", box.minimum},
          {"maximum", box.maximum}};
}

json to_json(const PeriodBiasSummary& summary) {
  return {{"period", summary.period},
          {"department", to_json(summary.department)},
          {"university", to_json(summary.university)},
          {"max_abs_department", summary.max_abs_department},
          {"max_abs_university", summary.max_abs_university}};
}

namespace {

Rational rational_field(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  return parse_rational(j.get<std::string>());
}

}  // namespace

FairShareTable fair_table_from_json(const json& j, std::size_t period) {
  const auto& internal = j.at("internal");
  const std::size_t rows = internal.size();
  const std::size_t cols = rows == 0 ? 0 : internal.at(0).size();
  Grid<Rational> grid(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (internal[i].size() != cols) throw ShapeError("ragged fair share table");
    for (std::size_t jj = 0; jj < cols; ++jj) grid(i, jj) = rational_field(internal[i][jj]);
  }
  std::vector<Rational> row_totals;
  for (const auto& v : j.at("row_totals")) row_totals.push_back(rational_field(v));
  std::vector<Rational> column_totals;
  for (const auto& v : j.at("column_totals")) column_totals.push_back(rational_field(v));
  return FairShareTable(std::move(grid), std::move(row_totals), std::move(column_totals),
                        rational_field(j.at("grand_total")), period);
}

ReservationTable reservation_table_from_json(const json& j, std::size_t period) {
  const auto& internal = j.at("internal");
  const std::size_t rows = internal.size();
  const std::size_t cols = rows == 0 ? 0 : internal.at(0).size();
  Grid<std::int64_t> grid(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (internal[i].size() != cols) throw ShapeError("ragged reservation table");
    for (std::size_t jj = 0; jj < cols; ++jj) grid(i, jj) = internal[i][jj].get<std::int64_t>();
  }
  return ReservationTable(std::move(grid), j.at("row_totals").get<std::vector<std::int64_t>>(),
                          j.at("column_totals").get<std::vector<std::int64_t>>(),
                          j.at("grand_total").get<std::int64_t>(), period);
}

json make_report(const ReservationProblem& problem, const SolutionTrace& trace, json metadata) {
  json periods = json::array();
  for (const auto& outcome : trace.periods) {
    periods.push_back({{"period", outcome.fair.period()},
                       {"fair", to_json(outcome.fair)},
                       {"reservation", to_json(outcome.reserved)},
                       {"violations",
                        {{"department", to_json(violation_stats(outcome.reserved, outcome.fair, Scope::department))},
                         {"university", to_json(violation_stats(outcome.reserved, outcome.fair, Scope::university))}}}});
  }
  json bias = json::array();
  for (const auto& s : bias_trace(trace)) bias.push_back(to_json(s));
  return {{"format", "reservations-report/v1"},
          {"metadata", std::move(metadata)},
          {"departments", problem.departments()},
          {"categories", problem.scheme().categories()},
          {"periods", std::move(periods)},
          {"bias_trace", std::move(bias)}};
}

std::vector<PeriodOutcome> read_report_tables(const json& report) {
  std::vector<PeriodOutcome> out;
  for (const auto& p : report.at("periods")) {
    const auto period = p.at("period").get<std::size_t>();
    auto fair = fair_table_from_json(p.at("fair"), period);
    auto reserved = reservation_table_from_json(p.at("reservation"), period);
    for (std::size_t i = 0; i < reserved.rows(); ++i) {
      if (Rational(reserved.row_totals()[i]) != fair.row_totals()[i]) {
        throw ShapeError("report row totals disagree with fair share row totals");
      }
    }
    out.push_back({std::move(fair), std::move(reserved)});
  }
  return out;
}

void write_trace_csv(std::ostream& out, const ReservationProblem& problem, const SolutionTrace& trace) {
  out << "period,department,category,fair,reserved,bias\n";
  const auto& cats = problem.scheme().categories();
  for (const auto& outcome : trace.periods) {
    const auto bias = bias_of(outcome.reserved, outcome.fair);
    const auto m = outcome.fair.rows();
    const auto n = outcome.fair.cols();
    auto row = [&](const std::string& dept, const std::string& cat, const Rational& fair, std::int64_t reserved,
                   const Rational& b) {
      out << outcome.fair.period() << ',' << dept << ',' << cat << ',' << to_string(fair) << ',' << reserved << ','
          << to_string(b) << '\n';
    };
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        row(problem.departments()[i], cats[j], outcome.fair(i, j), outcome.reserved(i, j), bias.entries(i, j));
      }
      row(problem.departments()[i], "total", outcome.fair.row_totals()[i], outcome.reserved.row_totals()[i],
          bias.entries(i, n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      row("total", cats[j], outcome.fair.column_totals()[j], outcome.reserved.column_totals()[j], bias.entries(m, j));
    }
    row("total", "total", outcome.fair.grand_total(), outcome.reserved.grand_total(), bias.entries(m, n));
  }
}

}  // namespace reservations::io
