#include "reservations/analysis.hpp"
#include "reservations/controlled_rounding.hpp"
#include "reservations/core.hpp"
#include "reservations/roster_flow.hpp"
#include "reservations/solutions.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace reservations;

namespace {

py::object fraction_type() {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls;
}

py::object to_py(const Rational& r) { return fraction_type()(r.numerator(), r.denominator()); }

// Accepts int, str ("1/3", "0.15") or anything fractions.Fraction understands.
Rational to_rational(const py::handle& h) {
  const py::object f = fraction_type()(h);
  return Rational(f.attr("numerator").cast<std::int64_t>(), f.attr("denominator").cast<std::int64_t>());
}

py::dict fair_dict(const FairShareTable& x) {
  py::list internal;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    py::list row;
    for (std::size_t j = 0; j < x.cols(); ++j) row.append(to_py(x(i, j)));
    internal.append(row);
  }
  py::list rows, cols;
  for (const auto& v : x.row_totals()) rows.append(to_py(v));
  for (const auto& v : x.column_totals()) cols.append(to_py(v));
  py::dict d;
  d["period"] = x.period();
  d["internal"] = internal;
  d["row_totals"] = rows;
  d["column_totals"] = cols;
  d["total"] = to_py(x.grand_total());
  return d;
}

py::dict reserved_dict(const ReservationTable& r) {
  std::vector<std::vector<std::int64_t>> internal(r.rows());
  for (std::size_t i = 0; i < r.rows(); ++i) {
    for (std::size_t j = 0; j < r.cols(); ++j) internal[i].push_back(r(i, j));
  }
  py::dict d;
  d["period"] = r.period();
  d["internal"] = internal;
  d["row_totals"] = r.row_totals();
  d["column_totals"] = r.column_totals();
  d["total"] = r.grand_total();
  return d;
}

ReservationScheme make_scheme(std::vector<std::string> categories, const py::sequence& fractions) {
  std::vector<Rational> alpha;
  for (const auto& f : fractions) alpha.push_back(to_rational(f));
  return ReservationScheme(std::move(categories), std::move(alpha));
}

Roster roster_from_names(const ReservationScheme& scheme, const std::vector<std::string>& names) {
  std::vector<std::size_t> assignment;
  for (const auto& name : names) {
    const auto j = scheme.index_of(name);
    if (!j) throw std::invalid_argument("unknown category '" + name + "'");
    assignment.push_back(*j);
  }
  return Roster(std::move(assignment));
}

py::list trace_list(const SolutionTrace& trace) {
  py::list out;
  for (const auto& p : trace.periods) {
    py::dict d;
    d["fair"] = fair_dict(p.fair);
    d["reserved"] = reserved_dict(p.reserved);
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_reservations, m) {
  m.doc() = "Two-dimensional seat reservations over multiple periods";

  py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);

  py::class_<ReservationScheme>(m, "Scheme")
      .def(py::init(&make_scheme), py::arg("categories"), py::arg("fractions"))
      .def_property_readonly("categories", &ReservationScheme::categories)
      .def_property_readonly("fractions",
                             [](const ReservationScheme& s) {
                               py::list out;
                               for (const auto& f : s.fractions()) out.append(to_py(f));
                               return out;
                             })
      .def_property_readonly("minimal_block_length", &ReservationScheme::minimal_block_length)
      .def("__len__", &ReservationScheme::size);

  py::class_<ReservationProblem>(m, "Problem")
      .def(py::init<std::vector<std::string>, ReservationScheme, std::vector<std::vector<std::int64_t>>>(),
           py::arg("departments"), py::arg("scheme"), py::arg("vacancies"))
      .def_property_readonly("departments", &ReservationProblem::departments)
      .def_property_readonly("scheme", &ReservationProblem::scheme)
      .def_property_readonly("periods", &ReservationProblem::period_count)
      .def("cumulative_vacancies", &ReservationProblem::cumulative_vacancies, py::arg("department"),
           py::arg("period"));

  m.def("indian_scheme", &indian_scheme);
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));
  m.attr("RNG_NAME") = std::string(Rng::kName);

  m.def(
      "fair_share_table",
      [](const ReservationProblem& p, std::size_t period) { return fair_dict(build_fair_share_table(p, period)); },
      py::arg("problem"), py::arg("period"));

  m.def(
      "controlled_round",
      [](const ReservationProblem& p, std::size_t period, std::uint64_t seed) {
        Rng rng(seed);
        return reserved_dict(controlled_round(build_fair_share_table(p, period), rng));
      },
      py::arg("problem"), py::arg("period"), py::arg("seed"));

  m.def(
      "draw_roster",
      [](const ReservationScheme& scheme, std::size_t length, std::uint64_t seed, const std::string& policy,
         std::int64_t block_length) {
        Rng rng(seed);
        const auto roster = draw_roster(scheme, length, rng, parse_extension_policy(policy), block_length);
        std::vector<std::string> names;
        for (auto j : roster.assignment()) names.push_back(scheme.categories()[j]);
        return names;
      },
      py::arg("scheme"), py::arg("length"), py::arg("seed"), py::arg("policy") = "independent-blocks",
      py::arg("block_length") = 0);

  m.def(
      "run",
      [](const ReservationProblem& p, const std::string& solution, std::optional<std::uint64_t> seed,
         std::optional<std::vector<std::string>> roster, const std::string& order, bool strict) {
        SolutionConfig config;
        config.kind = parse_solution_kind(solution);
        if (roster) config.roster = roster_from_names(p.scheme(), *roster);
        config.order = department_order(p, parse_department_order(order));
        config.roster_mode = strict ? RosterMode::strict : RosterMode::cycle;
        if (config.kind == SolutionKind::proposed && !seed) throw std::invalid_argument("proposed solution needs a seed");
        return trace_list(run_solution(p, config, seed.value_or(0)));
      },
      py::arg("problem"), py::arg("solution"), py::arg("seed") = py::none(), py::arg("roster") = py::none(),
      py::arg("order") = "input", py::arg("strict") = false);

  m.def(
      "max_abs_bias",
      [](const ReservationProblem& p, const std::string& solution, std::optional<std::uint64_t> seed,
         std::optional<std::vector<std::string>> roster) {
        SolutionConfig config;
        config.kind = parse_solution_kind(solution);
        if (roster) config.roster = roster_from_names(p.scheme(), *roster);
        std::vector<std::pair<double, double>> out;
        for (const auto& s : bias_trace(run_solution(p, config, seed.value_or(0)))) {
          out.emplace_back(s.max_abs_department, s.max_abs_university);
        }
        return out;
      },
      py::arg("problem"), py::arg("solution"), py::arg("seed") = py::none(), py::arg("roster") = py::none(),
      "Per period (department, university) maximum absolute bias.");
}
