#include "fixtures.hpp"

#include "reservations/roster_flow.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace reservations;

namespace {

std::size_t vertex_id(const FlowTopology& t, VertexKind kind, std::size_t seat = 0, std::size_t category = 0) {
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    const auto& x = t.vertices[v];
    if (x.kind != kind) continue;
    if (kind == VertexKind::source || kind == VertexKind::sink) return v;
    if (kind == VertexKind::row && x.seat == seat) return v;
    if (x.seat == seat && x.category == category) return v;
  }
  throw std::logic_error("no such vertex");
}

std::size_t edge_id(const FlowTopology& t, std::size_t tail, std::size_t head) {
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    if (t.edges[e].tail == tail && t.edges[e].head == head) return e;
  }
  throw std::logic_error("no such edge");
}

// C31 -> k31 -> R3 <- k32 <- C32 -> C22 -> k22 -> R2 <- k21 <- C21 <- C31 for the thirds block.
FlowCycle drawn_flow_cycle(const FlowTopology& t) {
  const auto C = [&](std::size_t l, std::size_t j) { return vertex_id(t, VertexKind::column_prefix, l, j - 1); };
  const auto K = [&](std::size_t i, std::size_t j) { return vertex_id(t, VertexKind::cell, i - 1, j - 1); };
  const auto R = [&](std::size_t i) { return vertex_id(t, VertexKind::row, i - 1); };
  FlowCycle c;
  const auto step = [&](std::size_t a, std::size_t b, bool forward) {
    c.edges.push_back(forward ? edge_id(t, a, b) : edge_id(t, b, a));
    c.forward.push_back(forward);
  };
  step(C(3, 1), K(3, 1), true);
  step(K(3, 1), R(3), true);
  step(R(3), K(3, 2), false);
  step(K(3, 2), C(3, 2), false);
  step(C(3, 2), C(2, 2), true);
  step(C(2, 2), K(2, 2), true);
  step(K(2, 2), R(2), true);
  step(R(2), K(2, 1), false);
  step(K(2, 1), C(2, 1), false);
  step(C(2, 1), C(3, 1), false);
  return c;
}

bool combination_holds(const FlowNetwork& net, const FlowDecomposition& d) {
  const auto beta = d.raise_forward_probability();
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    if (beta * d.raise_forward.flow(e) + (1 - beta) * d.raise_backward.flow(e) != net.flow(e)) return false;
  }
  return true;
}

// Prefix audit written from the definition.
bool prefixes_within_quota(const std::vector<std::size_t>& seats, const ReservationScheme& scheme) {
  std::vector<std::int64_t> count(scheme.size(), 0);
  for (std::size_t q = 1; q <= seats.size(); ++q) {
    count[seats[q - 1]]++;
    for (std::size_t j = 0; j < scheme.size(); ++j) {
      const Rational share = Rational(static_cast<std::int64_t>(q)) * scheme.fraction(j);
      const Rational gap = Rational(count[j]) - share;
      if (!(gap < 1 && gap > -1)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("scheme table") {
  TEST_CASE("thirds with k = 3") {
    const auto p = build_scheme_table(fixtures::thirds(), 3);
    CHECK(p.block_length == 3);
    REQUIRE(p.entries.rows() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(p.entries(i, 0) == Rational(1, 3));
      CHECK(p.entries(i, 1) == Rational(2, 3));
    }
  }

  TEST_CASE("halves with k = 2 and multiples") {
    CHECK(build_scheme_table(fixtures::halves(), 2).entries.rows() == 2);
    CHECK(build_scheme_table(fixtures::halves(), 6).entries.rows() == 6);
  }

  TEST_CASE("invalid k names the minimal one") {
    try {
      build_scheme_table(indian_scheme(), 100);
      FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("200") != std::string::npos);
    }
    CHECK_THROWS_AS(build_scheme_table(fixtures::thirds(), 0), std::invalid_argument);
  }
}

TEST_SUITE("constraints") {
  TEST_CASE("thirds block constraint counts and bounds") {
    const auto cs = build_constraints(build_scheme_table(fixtures::thirds(), 3));
    CHECK(cs.internal.size() == 6);
    CHECK(cs.rows.size() == 3);
    CHECK(cs.column_prefixes.size() == 4);  // l = 2, 3 for each category
    for (const auto& c : cs.column_prefixes) {
      if (c.cells.size() == 2 && c.cells[0].second == 0) {
        CHECK(c.lower == 0);
        CHECK(c.upper == 1);
      }
    }
  }

  TEST_CASE("both families are laminar") {
    Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
      const auto scheme = fixtures::random_scheme(rng, static_cast<std::size_t>(rng.uniform_int(2, 4)), 4);
      const auto cs = build_constraints(build_scheme_table(scheme, scheme.minimal_block_length()));
      std::vector<const Constraint*> source_side, sink_side;
      for (const auto& c : cs.internal) {
        source_side.push_back(&c);
        sink_side.push_back(&c);
      }
      for (const auto& c : cs.column_prefixes) source_side.push_back(&c);
      for (const auto& c : cs.rows) sink_side.push_back(&c);
      CHECK(is_laminar(source_side));
      CHECK(is_laminar(sink_side));
      // mixing rows with column prefixes crosses
      std::vector<const Constraint*> mixed{&cs.rows.front(), &cs.column_prefixes.front()};
      CHECK_FALSE(is_laminar(mixed));
    }
  }
}

TEST_SUITE("flow network") {
  TEST_CASE("thirds network flows") {
    const auto net = build_flow_network(build_scheme_table(fixtures::thirds(), 3));
    const auto& t = net.topology();
    const auto src = vertex_id(t, VertexKind::source);
    CHECK(net.flow(edge_id(t, src, vertex_id(t, VertexKind::column_prefix, 3, 0))) == 1);
    CHECK(net.flow(edge_id(t, src, vertex_id(t, VertexKind::column_prefix, 3, 1))) == 2);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto r = vertex_id(t, VertexKind::row, i);
      CHECK(net.flow(edge_id(t, vertex_id(t, VertexKind::cell, i, 0), r)) == Rational(1, 3));
      CHECK(net.flow(edge_id(t, vertex_id(t, VertexKind::cell, i, 1), r)) == Rational(2, 3));
    }
    CHECK(net.flow(edge_id(t, vertex_id(t, VertexKind::column_prefix, 3, 1),
                           vertex_id(t, VertexKind::column_prefix, 2, 1))) == Rational(4, 3));
    CHECK(net.conserves_flow());
    CHECK(net.within_bounds());
  }

  TEST_CASE("one incoming edge on the source tree, one outgoing on the sink tree") {
    const auto net = build_flow_network(build_scheme_table(indian_scheme(), 200));
    const auto& t = net.topology();
    std::vector<int> in(t.vertices.size(), 0), out(t.vertices.size(), 0);
    for (const auto& e : t.edges) {
      out[e.tail]++;
      in[e.head]++;
    }
    for (std::size_t v = 0; v < t.vertices.size(); ++v) {
      const auto kind = t.vertices[v].kind;
      if (kind == VertexKind::column_prefix || kind == VertexKind::cell) CHECK(in[v] == 1);
      if (kind == VertexKind::row || kind == VertexKind::cell) CHECK(out[v] == 1);
    }
    CHECK(net.conserves_flow());
  }

  TEST_CASE("conservation recomputed from prefix sums") {
    // C2j receives 2 * alpha_j and sends alpha_j to seats 1 and 2
    const auto net = build_flow_network(build_scheme_table(fixtures::thirds(), 3));
    const auto& t = net.topology();
    for (std::size_t j = 0; j < 2; ++j) {
      const auto c2 = vertex_id(t, VertexKind::column_prefix, 2, j);
      const auto c3 = vertex_id(t, VertexKind::column_prefix, 3, j);
      const Rational a = fixtures::thirds().fraction(j);
      CHECK(net.flow(edge_id(t, c3, c2)) == 2 * a);
      CHECK(net.flow(edge_id(t, c2, vertex_id(t, VertexKind::cell, 0, j))) == a);
      CHECK(net.flow(edge_id(t, c2, vertex_id(t, VertexKind::cell, 1, j))) == a);
    }
  }
}

TEST_SUITE("flow decomposition") {
  TEST_CASE("drawn cycle splits evenly") {
    const auto net = build_flow_network(build_scheme_table(fixtures::thirds(), 3));
    const auto d = decompose_flow(net, drawn_flow_cycle(net.topology()));
    CHECK(d.d_plus == Rational(1, 3));
    CHECK(d.d_minus == Rational(1, 3));
    CHECK(d.raise_forward_probability() == Rational(1, 2));
    CHECK(combination_holds(net, d));
    CHECK(d.raise_forward.conserves_flow());
    CHECK(d.raise_backward.conserves_flow());
    CHECK(d.raise_forward.within_bounds());
    CHECK(d.raise_backward.within_bounds());
  }

  TEST_CASE("found cycle is closed and fractional") {
    const auto net = build_flow_network(build_scheme_table(fixtures::thirds(), 3));
    const auto c = find_flow_cycle(net);
    REQUIRE(c.has_value());
    CHECK(c->edges.size() >= 3);
    const auto& t = net.topology();
    auto at = c->forward[0] ? t.edges[c->edges[0]].tail : t.edges[c->edges[0]].head;
    const auto start = at;
    for (std::size_t k = 0; k < c->edges.size(); ++k) {
      const auto& e = t.edges[c->edges[k]];
      CHECK_FALSE(is_integral(net.flow(c->edges[k])));
      CHECK((c->forward[k] ? e.tail : e.head) == at);
      at = c->forward[k] ? e.head : e.tail;
    }
    CHECK(at == start);
  }

  TEST_CASE("malformed cycle is rejected") {
    const auto net = build_flow_network(build_scheme_table(fixtures::thirds(), 3));
    auto c = drawn_flow_cycle(net.topology());
    c.edges.pop_back();
    c.forward.pop_back();
    CHECK_THROWS_AS(decompose_flow(net, c), ContractError);
  }

  TEST_CASE("integral network is a no-op") {
    Rng rng(1);
    auto net = build_flow_network(build_scheme_table(fixtures::halves(), 2));
    while (auto next = decompose_flow_once(net, rng)) net = std::move(*next);
    CHECK(net.fractional_edge_count() == 0);
    CHECK_FALSE(decompose_flow_once(net, rng).has_value());
    CHECK_FALSE(find_flow_cycle(net).has_value());
  }

  TEST_CASE("one-step expectation per edge") {
    const auto net = build_flow_network(build_scheme_table(fixtures::thirds(), 3));
    Rng rng(31);
    std::vector<fixtures::Moments> m(net.edge_count());
    for (int r = 0; r < 100000; ++r) {
      const auto next = decompose_flow_once(net, rng);
      for (std::size_t e = 0; e < m.size(); ++e) m[e].add(to_double(next->flow(e)));
    }
    for (std::size_t e = 0; e < m.size(); ++e) CHECK(m[e].near(to_double(net.flow(e))));
  }

  TEST_CASE("property: every step conserves, bounds, shrinks and is a martingale") {
    Rng gen(8);
    for (int trial = 0; trial < 40; ++trial) {
      const auto scheme = fixtures::random_scheme(gen, static_cast<std::size_t>(gen.uniform_int(2, 5)), 5);
      auto net = build_flow_network(build_scheme_table(scheme, scheme.minimal_block_length()));
      Rng rng(derive_seed(12, static_cast<std::uint64_t>(trial)));
      while (auto cycle = find_flow_cycle(net)) {
        const auto d = decompose_flow(net, *cycle);
        REQUIRE(combination_holds(net, d));
        REQUIRE(d.d_plus > 0);
        REQUIRE(d.d_minus > 0);
        auto next = rng.bernoulli(d.raise_forward_probability()) ? d.raise_forward : d.raise_backward;
        REQUIRE(next.conserves_flow());
        REQUIRE(next.within_bounds());
        REQUIRE(next.fractional_edge_count() < net.fractional_edge_count());
        net = std::move(next);
      }
      const auto table = net.to_table();
      for (std::size_t i = 0; i < table.rows(); ++i) {
        Rational row = 0;
        for (std::size_t j = 0; j < table.cols(); ++j) {
          CHECK((table(i, j) == 0 || table(i, j) == 1));
          row += table(i, j);
        }
        CHECK(row == 1);
      }
    }
  }
}

TEST_SUITE("blocks") {
  TEST_CASE("thirds blocks against the enumerated support") {
    const auto support = fixtures::feasible_blocks(fixtures::thirds(), 3);
    REQUIRE(support.size() == 3);
    Rng rng(2);
    std::vector<fixtures::Moments> c1_at(3);
    std::set<std::vector<std::size_t>> seen;
    for (int r = 0; r < 100000; ++r) {
      const auto b = draw_block(fixtures::thirds(), 3, rng);
      REQUIRE(std::find(support.begin(), support.end(), b.categories) != support.end());
      seen.insert(b.categories);
      for (std::size_t i = 0; i < 3; ++i) c1_at[i].add(b.categories[i] == 0 ? 1.0 : 0.0);
    }
    CHECK(seen.size() == 3);
    for (const auto& m : c1_at) CHECK(m.near(1.0 / 3.0));
  }

  TEST_CASE("halves blocks are the two permutations, evenly") {
    Rng rng(6);
    fixtures::Moments first_is_c1;
    for (int r = 0; r < 40000; ++r) {
      const auto b = draw_block(fixtures::halves(), 2, rng);
      REQUIRE(b.categories.size() == 2);
      CHECK(b.categories[0] != b.categories[1]);
      first_is_c1.add(b.categories[0] == 0 ? 1.0 : 0.0);
    }
    CHECK(first_is_c1.near(0.5));
  }

  TEST_CASE("block table has one 1 per row") {
    Rng rng(3);
    const auto b = draw_block(indian_scheme(), 200, rng);
    const auto t = b.to_table();
    for (std::size_t i = 0; i < t.rows(); ++i) {
      std::int64_t s = 0;
      for (std::size_t j = 0; j < t.cols(); ++j) s += t(i, j);
      CHECK(s == 1);
    }
    CHECK(prefixes_within_quota(b.categories, indian_scheme()));
  }

  TEST_CASE("property: every draw of random schemes matches the brute-force support") {
    Rng gen(10);
    for (int trial = 0; trial < 40; ++trial) {
      const auto scheme = fixtures::random_scheme(gen, static_cast<std::size_t>(gen.uniform_int(2, 3)), 3);
      const auto k = static_cast<std::size_t>(scheme.minimal_block_length());
      if (k > 9) continue;
      const auto support = fixtures::feasible_blocks(scheme, k);
      RosterSampler sampler(scheme);
      Rng rng(derive_seed(3, static_cast<std::uint64_t>(trial)));
      for (int r = 0; r < 200; ++r) {
        const auto b = sampler.draw_block(rng);
        CHECK(std::find(support.begin(), support.end(), b.categories) != support.end());
      }
    }
  }
}

TEST_SUITE("rosters") {
  TEST_CASE("repeat-block reproduces the mod-3 pattern") {
    for (std::uint64_t s = 0; s < 200; ++s) {
      Rng rng(s);
      const auto r = draw_roster(fixtures::thirds(), 6, rng, ExtensionPolicy::repeat_block);
      REQUIRE(r.size() == 6);
      for (std::size_t p = 1; p <= 3; ++p) CHECK(r.category_at(p) == r.category_at(p + 3));
      if (r.assignment() == std::vector<std::size_t>{1, 1, 0, 1, 1, 0}) {
        CHECK(r.assignment() == fixtures::mod_three_roster(6).assignment());
      }
    }
  }

  TEST_CASE("short rosters are a single block prefix") {
    Rng a(5), b(5);
    const auto r = draw_roster(fixtures::thirds(), 2, a);
    const auto block = draw_block(fixtures::thirds(), 3, b);
    CHECK(r.assignment() == std::vector<std::size_t>(block.categories.begin(), block.categories.begin() + 2));
    CHECK(r.block_length() == 3);
  }

  TEST_CASE("prefix quota over long rosters") {
    RosterSampler sampler(fixtures::thirds());
    Rng rng(77);
    for (int r = 0; r < 1000; ++r) {
      CHECK(prefixes_within_quota(sampler.draw_roster(300, rng).assignment(), fixtures::thirds()));
    }
    for (int r = 0; r < 50; ++r) {
      CHECK(prefixes_within_quota(draw_roster(indian_scheme(), 450, rng).assignment(), indian_scheme()));
    }
  }

  TEST_CASE("explicit block length multiple") {
    Rng rng(1);
    const auto r = draw_roster(fixtures::halves(), 10, rng, ExtensionPolicy::independent_blocks, 4);
    CHECK(r.block_length() == 4);
    CHECK(prefixes_within_quota(r.assignment(), fixtures::halves()));
    CHECK_THROWS_AS(draw_roster(fixtures::halves(), 10, rng, ExtensionPolicy::independent_blocks, 3),
                    std::invalid_argument);
  }
}
