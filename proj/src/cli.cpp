#include "reservations/cli.hpp"

#include "reservations/analysis.hpp"
#include "reservations/controlled_rounding.hpp"
#include "reservations/io.hpp"
#include "reservations/random.hpp"
#include "reservations/roster_flow.hpp"
#include "reservations/solutions.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace reservations::cli {

using nlohmann::json;

namespace {

/// A flag combination that needs another flag.
class MissingDependency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::ParseError(path, 0, "cannot open file");
  return in;
}

ReservationScheme load_scheme(const std::string& path) {
  auto in = open_input(path);
  return io::read_scheme(in, path);
}

ReservationProblem load_problem(const std::string& problem_path, const std::string& scheme_path) {
  const auto scheme = load_scheme(scheme_path);
  auto in = open_input(problem_path);
  return io::read_problem(in, scheme, problem_path);
}

/// Writes to the named file, or to `fallback` when the path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  write(file);
}

json base_metadata(std::string_view command) {
  return {{"command", std::string(command)}, {"rng", std::string(Rng::kName)}};
}

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

struct RoundOptions {
  std::string problem, scheme, format = "csv", report;
  std::size_t period = 1;
  std::uint64_t seed = 0;
};

int cmd_round(const RoundOptions& o, std::ostream& out) {
  const auto problem = load_problem(o.problem, o.scheme);
  const auto fair = build_fair_share_table(problem, o.period);
  Rng rng(o.seed);
  const auto table = controlled_round(fair, rng);

  auto meta = base_metadata("round");
  meta["seed"] = o.seed;
  json doc = {{"format", "reservations-round/v1"},
              {"metadata", meta},
              {"departments", problem.departments()},
              {"categories", problem.scheme().categories()},
              {"period", o.period},
              {"fair", io::to_json(fair)},
              {"reservation", io::to_json(table)},
              {"violations",
               {{"department", io::to_json(violation_stats(table, fair, Scope::department))},
                {"university", io::to_json(violation_stats(table, fair, Scope::university))}}}};
  if (o.format == "json") {
    out << doc.dump(2) << '\n';
  } else {
    io::write_table_csv(out, table, problem);
  }
  if (!o.report.empty()) emit(o.report, out, [&](std::ostream& f) { f << doc.dump(2) << '\n'; });
  return kOk;
}

struct RosterOptions {
  std::string scheme, policy = "independent-blocks", output;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  std::int64_t block_length = 0;
};

int cmd_roster(const RosterOptions& o, std::ostream& out) {
  const auto scheme = load_scheme(o.scheme);
  if (o.length < 1) throw std::out_of_range("roster length must be at least 1");
  const auto policy = parse_extension_policy(o.policy);
  Rng rng(o.seed);
  const auto roster = draw_roster(scheme, o.length, rng, policy, o.block_length);
  emit(o.output, out, [&](std::ostream& f) { io::write_roster(f, roster, scheme); });
  return kOk;
}

struct RunOptions {
  std::string problem, scheme, solution, roster, order = "input", policy = "independent-blocks", format = "json",
                                                 output;
  std::optional<std::uint64_t> seed;
  bool strict_roster = false;
};

SolutionConfig make_config(const ReservationProblem& problem, SolutionKind kind, const std::string& roster_path,
                           const std::string& order, bool strict, const std::string& policy) {
  SolutionConfig config;
  config.kind = kind;
  config.roster_mode = strict ? RosterMode::strict : RosterMode::cycle;
  config.order = department_order(problem, parse_department_order(order));
  config.policy = parse_extension_policy(policy);
  if (!roster_path.empty()) {
    auto in = open_input(roster_path);
    config.roster = io::read_roster(in, problem.scheme(), roster_path);
  }
  return config;
}

int cmd_run(const RunOptions& o, std::ostream& out) {
  const auto kind = parse_solution_kind(o.solution);
  if (kind != SolutionKind::proposed && o.roster.empty()) {
    throw MissingDependency("--solution " + o.solution + " requires --roster");
  }
  if (kind == SolutionKind::proposed && !o.seed) throw MissingDependency("--solution proposed requires --seed");
  const auto problem = load_problem(o.problem, o.scheme);
  const auto config = make_config(problem, kind, o.roster, o.order, o.strict_roster, o.policy);
  const auto trace = run_solution(problem, config, o.seed.value_or(0));

  auto meta = base_metadata("run");
  meta["solution"] = std::string(to_string(kind));
  meta["seed"] = o.seed ? json(*o.seed) : json(nullptr);
  meta["order"] = o.order;
  meta["roster_mode"] = o.strict_roster ? "strict" : "cycle";
  if (kind == SolutionKind::proposed) {
    meta["extension_policy"] = std::string(to_string(config.policy));
    meta["block_length"] = problem.scheme().minimal_block_length();
  } else {
    meta["roster_length"] = config.roster->size();
  }
  emit(o.output, out, [&](std::ostream& f) {
    if (o.format == "csv") {
      io::write_trace_csv(f, problem, trace);
    } else {
      f << io::make_report(problem, trace, meta).dump(2) << '\n';
    }
  });
  return kOk;
}

struct CompareOptions {
  std::string problem, scheme, roster, order = "input", format = "csv", output;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  bool synthesize = false;
  std::size_t advertisements = 1;
  SyntheticParameters synthetic;
};

int cmd_compare(const CompareOptions& o, std::ostream& out) {
  if (o.replications < 1) throw std::out_of_range("--replications must be at least 1");
  if (!o.synthesize && (o.problem.empty() || o.scheme.empty())) {
    throw MissingDependency("compare needs --problem and --scheme, or --synthesize");
  }

  std::vector<ReservationProblem> problems;
  if (o.synthesize) {
    const auto scheme = o.scheme.empty() ? indian_scheme() : load_scheme(o.scheme);
    Rng synth(derive_seed(o.seed, 0x5157'0000ULL));
    for (std::size_t a = 0; a < o.advertisements; ++a) problems.push_back(synthesize_problem(scheme, o.synthetic, synth));
  } else {
    problems.push_back(load_problem(o.problem, o.scheme));
  }

  std::vector<SolutionTrace> government, court, proposed;
  for (std::size_t a = 0; a < problems.size(); ++a) {
    const auto& problem = problems[a];
    std::optional<Roster> roster;
    if (!o.roster.empty()) {
      auto in = open_input(o.roster);
      roster = io::read_roster(in, problem.scheme(), o.roster);
    } else {
      std::int64_t total = 0;
      for (std::size_t i = 0; i < problem.department_count(); ++i) {
        total += problem.cumulative_vacancies(i, problem.period_count());
      }
      roster = largest_deficit_roster(problem.scheme(), static_cast<std::size_t>(std::max<std::int64_t>(total, 1)));
    }
    government.push_back(
        run_government(problem, *roster, department_order(problem, parse_department_order(o.order))));
    court.push_back(run_court(problem, *roster));
    const auto problem_seed = derive_seed(o.seed, a);
    for (std::size_t r = 0; r < o.replications; ++r) proposed.push_back(run_proposed(problem, derive_seed(problem_seed, r)));
  }

  const std::vector<std::pair<std::string, std::vector<PeriodBiasSummary>>> series{
      {"government", bias_trace(government)}, {"court", bias_trace(court)}, {"proposed", bias_trace(proposed)}};

  emit(o.output, out, [&](std::ostream& f) {
    if (o.format == "json") {
      auto meta = base_metadata("compare");
      meta["seed"] = o.seed;
      meta["replications"] = o.replications;
      meta["synthesized"] = o.synthesize;
      meta["advertisements"] = problems.size();
      meta["baseline_roster"] = o.roster.empty() ? "largest-deficit" : o.roster;
      json doc = {{"format", "reservations-compare/v1"}, {"metadata", meta}};
      for (const auto& [name, summaries] : series) {
        json arr = json::array();
        for (const auto& s : summaries) arr.push_back(io::to_json(s));
        doc["series"][name] = arr;
      }
      f << doc.dump(2) << '\n';
      return;
    }
    f << "solution,period,scope,statistic,value\n";
    for (const auto& [name, summaries] : series) {
      for (const auto& s : summaries) {
        for (const auto& [scope, box, max_abs] :
             {std::tuple{"department", s.department, s.max_abs_department},
              std::tuple{"university", s.university, s.max_abs_university}}) {
          const std::pair<const char*, double> stats[] = {
              {"count", static_cast<double>(box.count)}, {"median", box.median},
              {"lower_quartile", box.lower_quartile},    {"upper_quartile", box.upper_quartile},
              {"lower_adjacent", box.lower_adjacent},    {"upper_adjacent", box.upper_adjacent},
              {"minimum", box.minimum},                  {"maximum", box.maximum},
              {"max_abs", max_abs}};
          for (const auto& [stat, value] : stats) {
            f << name << ',' << s.period << ',' << scope << ',' << stat << ',' << number(value) << '\n';
          }
        }
      }
    }
  });
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-dimensional seat reservations: controlled rounding, random rosters, and baselines"};
  app.require_subcommand(1);

  RoundOptions round;
  auto* round_cmd = app.add_subcommand("round", "Controlled rounding of one period's fair share table");
  round_cmd->add_option("--problem", round.problem, "Problem CSV (department,period,vacancies)")->required();
  round_cmd->add_option("--scheme", round.scheme, "Scheme CSV (category,numerator,denominator)")->required();
  round_cmd->add_option("-t,--period", round.period, "Period to round (1-based)")->required();
  round_cmd->add_option("--seed", round.seed, "64-bit seed");
  round_cmd->add_option("--format", round.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  round_cmd->add_option("--report", round.report, "Also write a JSON report to this file");

  RosterOptions roster;
  auto* roster_cmd = app.add_subcommand("roster", "Draw a random roster");
  roster_cmd->add_option("--scheme", roster.scheme, "Scheme CSV")->required();
  roster_cmd->add_option("--length", roster.length, "Number of positions")->required();
  roster_cmd->add_option("--seed", roster.seed, "64-bit seed");
  roster_cmd->add_option("--policy", roster.policy, "independent-blocks or repeat-block")
      ->check(CLI::IsMember({"independent-blocks", "repeat-block"}));
  roster_cmd->add_option("--block-length", roster.block_length, "Block length (0: minimal)");
  roster_cmd->add_option("-o,--output", roster.output, "Output file (default stdout)");

  RunOptions run_opts;
  std::uint64_t run_seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run a multi-period solution and report");
  run_cmd->add_option("--problem", run_opts.problem, "Problem CSV")->required();
  run_cmd->add_option("--scheme", run_opts.scheme, "Scheme CSV")->required();
  run_cmd->add_option("--solution", run_opts.solution, "gov, court or proposed")
      ->required()
      ->check(CLI::IsMember({"gov", "government", "court", "proposed"}));
  run_cmd->add_option("--roster", run_opts.roster, "Roster CSV for gov/court");
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "64-bit seed for the proposed solution");
  run_cmd->add_option("--order", run_opts.order, "Government pooling order: input or alpha")
      ->check(CLI::IsMember({"input", "alpha"}));
  run_cmd->add_flag("--strict-roster", run_opts.strict_roster, "Fail instead of cycling a short roster");
  run_cmd->add_option("--policy", run_opts.policy, "Roster extension policy for proposed")
      ->check(CLI::IsMember({"independent-blocks", "repeat-block"}));
  run_cmd->add_option("--format", run_opts.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  run_cmd->add_option("-o,--output", run_opts.output, "Output file (default stdout)");

  CompareOptions compare;
  auto* compare_cmd = app.add_subcommand("compare", "Bias distributions over time for all three solutions");
  compare_cmd->add_option("--problem", compare.problem, "Problem CSV");
  compare_cmd->add_option("--scheme", compare.scheme, "Scheme CSV (default with --synthesize: Indian scheme)");
  compare_cmd->add_option("--roster", compare.roster, "Roster CSV for the baselines (default: largest-deficit)");
  compare_cmd->add_option("--replications", compare.replications, "Proposed-solution draws per problem");
  compare_cmd->add_option("--seed", compare.seed, "64-bit seed");
  compare_cmd->add_option("--order", compare.order, "Government pooling order")->check(CLI::IsMember({"input", "alpha"}));
  compare_cmd->add_flag("--synthesize", compare.synthesize, "Generate synthetic problems instead of reading one");
  compare_cmd->add_option("--advertisements", compare.advertisements, "Synthetic problems to generate");
  compare_cmd->add_option("--departments-min", compare.synthetic.min_departments);
  compare_cmd->add_option("--departments-max", compare.synthetic.max_departments);
  compare_cmd->add_option("--vacancies-min", compare.synthetic.min_vacancies);
  compare_cmd->add_option("--vacancies-max", compare.synthetic.max_vacancies);
  compare_cmd->add_option("--periods", compare.synthetic.periods);
  compare_cmd->add_option("--format", compare.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  compare_cmd->add_option("-o,--output", compare.output, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }

  try {
    if (round_cmd->parsed()) return cmd_round(round, out);
    if (roster_cmd->parsed()) return cmd_roster(roster, out);
    if (run_cmd->parsed()) {
      if (seed_opt->count() > 0) run_opts.seed = run_seed;
      return cmd_run(run_opts, out);
    }
    if (compare_cmd->parsed()) return cmd_compare(compare, out);
  } catch (const io::ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const MissingDependency& e) {
    err << "error: " << e.what() << '\n';
    return kMissingDependency;
  } catch (const std::out_of_range& e) {
    err << "range error: " << e.what() << '\n';
    return kRangeError;
  } catch (const std::length_error& e) {
    err << "range error: " << e.what() << '\n';
    return kRangeError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kRangeError;
  }
  return kOk;
}

}  // namespace reservations::cli
