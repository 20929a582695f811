#include "fixtures.hpp"

#include "reservations/solutions.hpp"

#include <doctest.h>

using namespace reservations;
using fixtures::int_grid;

namespace {

bool trace_is_sound(const ReservationProblem& p, const SolutionTrace& trace) {
  if (trace.periods.size() != p.period_count() || !is_monotone(trace)) return false;
  for (std::size_t t = 1; t <= p.period_count(); ++t) {
    const auto& r = trace.periods[t - 1].reserved;
    if (r.period() != t) return false;
    for (std::size_t i = 0; i < p.department_count(); ++i) {
      if (r.row_totals()[i] != p.cumulative_vacancies(i, t)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("government") {
  const auto p = fixtures::four_departments();

  TEST_CASE("pooled mod-3 roster") {
    const auto trace = run_government(p, fixtures::mod_three_roster(), {});
    REQUIRE(trace.periods.size() == 3);
    CHECK(trace.periods[0].reserved.internal() == int_grid({{0, 2}, {1, 0}, {0, 2}, {1, 0}}));
    CHECK(trace.periods[1].reserved.internal() == int_grid({{0, 4}, {2, 0}, {0, 4}, {2, 0}}));
    CHECK(trace.periods[2].reserved.internal() == int_grid({{0, 6}, {3, 0}, {0, 6}, {3, 0}}));
    CHECK(trace_is_sound(p, trace));
    CHECK(trace.label == "government");
  }

  TEST_CASE("order matters") {
    const auto reversed = run_government(p, fixtures::mod_three_roster(), {3, 2, 1, 0});
    CHECK(reversed.periods[0].reserved.internal() != run_government(p, fixtures::mod_three_roster(), {}).periods[0].reserved.internal());
    CHECK(trace_is_sound(p, reversed));
    CHECK_THROWS(run_government(p, fixtures::mod_three_roster(), {0, 1, 2}));
    CHECK_THROWS(run_government(p, fixtures::mod_three_roster(), {0, 1, 2, 2}));
  }

  TEST_CASE("alphabetic order") {
    const ReservationProblem q({"zoology", "art"}, fixtures::halves(), {{1, 1}});
    CHECK(department_order(q, DepartmentOrder::alphabetic) == std::vector<std::size_t>{1, 0});
    CHECK(department_order(q, DepartmentOrder::input) == std::vector<std::size_t>{0, 1});
    CHECK(parse_department_order("alpha") == DepartmentOrder::alphabetic);
  }

  TEST_CASE("strict mode fails on exhaustion") {
    CHECK_THROWS_AS(run_government(p, fixtures::mod_three_roster(17), {}, RosterMode::strict), std::length_error);
    CHECK_NOTHROW(run_government(p, fixtures::mod_three_roster(18), {}, RosterMode::strict));
    CHECK(run_government(p, fixtures::mod_three_roster(18), {}, RosterMode::strict).periods.back().reserved ==
          run_government(p, fixtures::mod_three_roster(3), {}).periods.back().reserved);
  }

  TEST_CASE("single department equals court") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const ReservationProblem q({"d"}, fixtures::random_scheme(rng, 3), {{rng.uniform_int(0, 9)}, {rng.uniform_int(0, 9)}});
      const auto roster = largest_deficit_roster(q.scheme(), 7);
      const auto g = run_government(q, roster, {});
      const auto c = run_court(q, roster);
      for (std::size_t t = 0; t < 2; ++t) CHECK(g.periods[t].reserved == c.periods[t].reserved);
    }
  }
}

TEST_SUITE("court") {
  const auto p = fixtures::four_departments();

  TEST_CASE("per-department mod-3 roster") {
    const auto trace = run_court(p, fixtures::mod_three_roster());
    CHECK(trace.periods[0].reserved.internal() == int_grid({{0, 2}, {0, 1}, {0, 2}, {0, 1}}));
    CHECK(trace.periods[0].reserved.column_totals()[0] == 0);
    CHECK(trace.periods[1].reserved.internal() == int_grid({{1, 3}, {0, 2}, {1, 3}, {0, 2}}));
    CHECK(trace.periods[1].reserved.column_totals() == std::vector<std::int64_t>{2, 10});
    CHECK(trace.periods[2].reserved.internal() == int_grid({{2, 4}, {1, 2}, {2, 4}, {1, 2}}));
    CHECK(trace_is_sound(p, trace));
  }

  TEST_CASE("one vacancy each reserves the first seat's category") {
    const ReservationProblem q({"a", "b", "c"}, fixtures::thirds(), {{1, 1, 1}});
    const auto trace = run_court(q, fixtures::mod_three_roster());
    CHECK(trace.periods[0].reserved.internal() == int_grid({{0, 1}, {0, 1}, {0, 1}}));
  }

  TEST_CASE("strict mode") {
    CHECK_THROWS_AS(run_court(p, fixtures::mod_three_roster(5), RosterMode::strict), std::length_error);
    CHECK_NOTHROW(run_court(p, fixtures::mod_three_roster(6), RosterMode::strict));
  }
}

TEST_SUITE("proposed") {
  const auto p = fixtures::four_departments();

  TEST_CASE("department quota for every seed and period") {
    for (std::uint64_t s = 0; s < 2000; ++s) {
      const auto trace = run_proposed(p, s);
      REQUIRE(trace_is_sound(p, trace));
      for (const auto& o : trace.periods) REQUIRE(within_department_quota(o.reserved, o.fair).empty());
    }
  }

  TEST_CASE("seed is recorded and reproducible") {
    const auto a = run_proposed(p, 42);
    const auto b = run_proposed(p, 42);
    CHECK(a.seed == 42u);
    for (std::size_t t = 0; t < 3; ++t) CHECK(a.periods[t].reserved == b.periods[t].reserved);
  }

  TEST_CASE("adding a department leaves the others' draws alone") {
    const ReservationProblem wider({"d1", "d2", "d3", "d4", "d5"}, fixtures::thirds(),
                                   {{2, 1, 2, 1, 4}, {2, 1, 2, 1, 4}, {2, 1, 2, 1, 4}});
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto a = run_proposed(p, s);
      const auto b = run_proposed(wider, s);
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 2; ++j) CHECK(a.periods[2].reserved(i, j) == b.periods[2].reserved(i, j));
      }
    }
  }

  TEST_CASE("halves single department permutes each pair") {
    const ReservationProblem q({"d"}, fixtures::halves(), {{1}, {1}, {1}, {1}});
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto trace = run_proposed(q, s);
      CHECK(trace.periods[1].reserved.internal() == int_grid({{1, 1}}));
      CHECK(trace.periods[3].reserved.internal() == int_grid({{2, 2}}));
    }
  }

  TEST_CASE("period-two mean matches the fair shares") {
    SolutionConfig config;
    const auto e = estimate_expected_table(p, 2, config, 100000, 2024);
    const auto x = build_fair_share_table(p, 2);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        const double se = e.standard_error(i, j);
        CHECK(std::abs(e.mean(i, j) - to_double(x(i, j))) <= 3 * se + 1e-12);
      }
    }
  }

  TEST_CASE("cross-department independence") {
    const ReservationProblem q({"a", "b"}, fixtures::halves(), {{1, 1}});
    fixtures::Moments a, b, ab;
    for (std::uint64_t s = 0; s < 40000; ++s) {
      const auto t = run_proposed(q, s);
      const double za = static_cast<double>(t.periods[0].reserved(0, 0));
      const double zb = static_cast<double>(t.periods[0].reserved(1, 0));
      a.add(za);
      b.add(zb);
      ab.add(za * zb);
    }
    // E[ab] - E[a]E[b] against the product of the fair means
    CHECK(ab.near(0.25));
    CHECK(std::abs(ab.mean - a.mean * b.mean) < 4 * ab.standard_error());
  }

  TEST_CASE("property: random problems stay within department quota") {
    Rng gen(21);
    for (int trial = 0; trial < 60; ++trial) {
      const auto q = fixtures::random_problem(gen, 5, 4, 12, 3);
      const auto trace = run_proposed(q, derive_seed(5, static_cast<std::uint64_t>(trial)));
      CHECK(trace_is_sound(q, trace));
      for (const auto& o : trace.periods) CHECK(within_department_quota(o.reserved, o.fair).empty());
    }
  }

  TEST_CASE("all-integral problems coincide across solutions") {
    const ReservationProblem q({"a", "b"}, fixtures::thirds(), {{3, 6}, {0, 3}});
    const auto roster = largest_deficit_roster(q.scheme(), 3);
    const auto g = run_government(q, roster, {});
    const auto c = run_court(q, roster);
    const auto r = run_proposed(q, 9);
    for (std::size_t t = 0; t < 2; ++t) {
      const auto x = build_fair_share_table(q, t + 1);
      CHECK(within_department_quota(g.periods[t].reserved, x).empty());
      CHECK(g.periods[t].reserved == c.periods[t].reserved);
      CHECK(c.periods[t].reserved == r.periods[t].reserved);
    }
  }
}

TEST_SUITE("expected table") {
  const auto p = fixtures::four_departments();

  TEST_CASE("deterministic baseline is exact") {
    SolutionConfig config;
    config.kind = SolutionKind::government;
    config.roster = fixtures::mod_three_roster();
    const auto e = estimate_expected_table(p, 3, config, 10, 1);
    CHECK(e.replications == 10);
    CHECK(e.mean(0, 0) == 0.0);
    CHECK(e.mean(1, 0) == 3.0);
    CHECK(e.mean(4, 0) == 6.0);  // university total
    CHECK(e.standard_error(0, 0) == 0.0);
    const auto x = build_fair_share_table(p, 3);
    CHECK(e.mean(0, 0) - to_double(x(0, 0)) == -2.0);
  }

  TEST_CASE("proposed at period three is unbiased") {
    SolutionConfig config;
    const auto e = estimate_expected_table(p, 3, config, 20000, 8);
    const auto x = build_fair_share_table(p, 3);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(e.mean(i, j) - to_double(x(i, j))) <= 3 * e.standard_error(i, j) + 1e-12);
    }
  }

  TEST_CASE("baselines need a roster") {
    SolutionConfig config;
    config.kind = SolutionKind::court;
    CHECK_THROWS_AS(run_solution(p, config, 0), ContractError);
    CHECK_THROWS_AS(estimate_expected_table(p, 1, SolutionConfig{}, 0, 0), std::invalid_argument);
  }
}

TEST_SUITE("largest deficit roster") {
  TEST_CASE("thirds") {
    const auto r = largest_deficit_roster(fixtures::thirds(), 6);
    // deficits: seat 1 (1/3, 2/3) -> c2, seat 2 (2/3, 1/3) -> c1, seat 3 (0, 1) -> c2
    CHECK(r.assignment() == std::vector<std::size_t>{1, 0, 1, 1, 0, 1});
  }

  TEST_CASE("prefix counts stay within quota") {
    const auto r = largest_deficit_roster(indian_scheme(), 400);
    std::vector<std::int64_t> count(5, 0);
    for (std::size_t q = 1; q <= 400; ++q) {
      count[r.category_at(q)]++;
      for (std::size_t j = 0; j < 5; ++j) {
        CHECK(within_quota(count[j], Rational(static_cast<std::int64_t>(q)) * indian_scheme().fraction(j)));
      }
    }
  }
}
