#include "reservations/roster_flow.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace reservations {

SchemeTable build_scheme_table(const ReservationScheme& scheme, std::int64_t block_length) {
  const auto minimal = scheme.minimal_block_length();
  if (block_length <= 0 || block_length % minimal != 0) {
    throw std::invalid_argument("block length " + std::to_string(block_length) +
                                " does not make every category share integral; use a multiple of " +
                                std::to_string(minimal));
  }
  SchemeTable table{Grid<Rational>(static_cast<std::size_t>(block_length), scheme.size()), block_length};
  for (std::size_t i = 0; i < table.entries.rows(); ++i) {
    for (std::size_t j = 0; j < scheme.size(); ++j) table.entries(i, j) = scheme.fraction(j);
  }
  return table;
}

ConstraintSet build_constraints(const SchemeTable& table) {
  const auto k = table.entries.rows();
  const auto n = table.entries.cols();
  ConstraintSet set;
  for (std::size_t i = 0; i < k; ++i) {
    Rational row_sum = 0;
    Constraint row{ConstraintKind::row, {}, 0, 0};
    for (std::size_t j = 0; j < n; ++j) {
      const auto& p = table.entries(i, j);
      set.internal.push_back({ConstraintKind::internal, {{i, j}}, floor_of(p), ceil_of(p)});
      row.cells.emplace_back(i, j);
      row_sum += p;
    }
    row.lower = floor_of(row_sum);
    row.upper = ceil_of(row_sum);
    set.rows.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < n; ++j) {
    Rational prefix = table.entries(0, j);
    for (std::size_t l = 2; l <= k; ++l) {
      prefix += table.entries(l - 1, j);
      Constraint c{ConstraintKind::column_prefix, {}, floor_of(prefix), ceil_of(prefix)};
      for (std::size_t i = 0; i < l; ++i) c.cells.emplace_back(i, j);
      set.column_prefixes.push_back(std::move(c));
    }
  }
  return set;
}

bool is_laminar(const std::vector<const Constraint*>& family) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> sets;
  sets.reserve(family.size());
  for (const auto* c : family) {
    auto cells = c->cells;
    std::sort(cells.begin(), cells.end());
    sets.push_back(std::move(cells));
  }
  for (std::size_t a = 0; a < sets.size(); ++a) {
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      const auto& x = sets[a];
      const auto& y = sets[b];
      std::vector<std::pair<std::size_t, std::size_t>> common;
      std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
      if (!common.empty() && common.size() != x.size() && common.size() != y.size()) return false;
    }
  }
  return true;
}

FlowNetwork::FlowNetwork(std::shared_ptr<const FlowTopology> topology, std::vector<Rational> flow)
    : topology_(std::move(topology)), flow_(std::move(flow)) {
  if (flow_.size() != topology_->edges.size()) throw ShapeError("flow vector does not match the edge count");
}

std::size_t FlowNetwork::fractional_edge_count() const {
  return static_cast<std::size_t>(std::count_if(flow_.begin(), flow_.end(), [](const Rational& f) { return !is_integral(f); }));
}

bool FlowNetwork::conserves_flow() const {
  std::vector<Rational> balance(vertex_count(), Rational(0));
  for (std::size_t e = 0; e < edge_count(); ++e) {
    balance[topology_->edges[e].tail] -= flow_[e];
    balance[topology_->edges[e].head] += flow_[e];
  }
  for (std::size_t v = 0; v < vertex_count(); ++v) {
    const auto kind = topology_->vertices[v].kind;
    if (kind == VertexKind::source || kind == VertexKind::sink) continue;
    if (balance[v] != 0) return false;
  }
  return true;
}

bool FlowNetwork::within_bounds() const {
  for (std::size_t e = 0; e < edge_count(); ++e) {
    if (flow_[e] < topology_->lower[e] || flow_[e] > topology_->upper[e]) return false;
  }
  return true;
}

const Rational& FlowNetwork::cell_flow(std::size_t seat, std::size_t category) const {
  return flow_[topology_->cell_edge.at(seat * topology_->categories + category)];
}

Grid<Rational> FlowNetwork::to_table() const {
  Grid<Rational> out(topology_->block_length, topology_->categories);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = cell_flow(i, j);
  }
  return out;
}

Grid<std::int64_t> IntegralBlock::to_table() const {
  Grid<std::int64_t> out(categories.size(), category_count, 0);
  for (std::size_t i = 0; i < categories.size(); ++i) out(i, categories[i]) = 1;
  return out;
}

FlowNetwork build_flow_network(const SchemeTable& table) {
  const auto k = table.entries.rows();
  const auto n = table.entries.cols();
  if (k == 0 || n == 0) throw std::invalid_argument("scheme table is empty");

  auto topo = std::make_shared<FlowTopology>();
  topo->block_length = k;
  topo->categories = n;

  const std::size_t prefix_count = k >= 2 ? k - 1 : 0;
  const std::size_t source = 0;
  const std::size_t prefix_base = 1;
  const std::size_t cell_base = prefix_base + n * prefix_count;
  const std::size_t row_base = cell_base + k * n;
  const std::size_t sink = row_base + k;

  topo->vertices.push_back({VertexKind::source});
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 2; l <= k; ++l) topo->vertices.push_back({VertexKind::column_prefix, l, j});
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < n; ++j) topo->vertices.push_back({VertexKind::cell, i, j});
  }
  for (std::size_t i = 0; i < k; ++i) topo->vertices.push_back({VertexKind::row, i, 0});
  topo->vertices.push_back({VertexKind::sink});

  auto prefix_vertex = [&](std::size_t l, std::size_t j) { return prefix_base + j * prefix_count + (l - 2); };
  auto cell_vertex = [&](std::size_t i, std::size_t j) { return cell_base + i * n + j; };

  std::vector<std::tuple<std::size_t, std::size_t, Rational>> raw;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Rational> prefix(k + 1, Rational(0));
    for (std::size_t l = 1; l <= k; ++l) prefix[l] = prefix[l - 1] + table.entries(l - 1, j);

    if (k == 1) {
      raw.emplace_back(source, cell_vertex(0, j), prefix[1]);
      continue;
    }
    raw.emplace_back(source, prefix_vertex(k, j), prefix[k]);
    for (std::size_t l = k; l >= 3; --l) {
      raw.emplace_back(prefix_vertex(l, j), cell_vertex(l - 1, j), table.entries(l - 1, j));
      raw.emplace_back(prefix_vertex(l, j), prefix_vertex(l - 1, j), prefix[l - 1]);
    }
    raw.emplace_back(prefix_vertex(2, j), cell_vertex(1, j), table.entries(1, j));
    raw.emplace_back(prefix_vertex(2, j), cell_vertex(0, j), table.entries(0, j));
  }
  for (std::size_t i = 0; i < k; ++i) {
    Rational row_sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      raw.emplace_back(cell_vertex(i, j), row_base + i, table.entries(i, j));
      row_sum += table.entries(i, j);
    }
    raw.emplace_back(row_base + i, sink, row_sum);
  }
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });

  std::vector<Rational> flow;
  flow.reserve(raw.size());
  topo->incident.assign(topo->vertices.size(), {});
  topo->cell_edge.assign(k * n, 0);
  for (std::size_t e = 0; e < raw.size(); ++e) {
    const auto& [tail, head, f] = raw[e];
    topo->edges.push_back({tail, head});
    topo->incident[tail].push_back(e);
    topo->incident[head].push_back(e);
    topo->lower.push_back(floor_of(f));
    topo->upper.push_back(ceil_of(f));
    if (topo->vertices[tail].kind == VertexKind::cell) {
      const auto& v = topo->vertices[tail];
      topo->cell_edge[v.seat * n + v.category] = e;
    }
    flow.push_back(f);
  }
  for (auto& list : topo->incident) std::sort(list.begin(), list.end());
  return FlowNetwork(std::move(topo), std::move(flow));
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::optional<FlowCycle> find_cycle(const FlowTopology& topo, const std::vector<Rational>& flow,
                                    std::vector<std::size_t>& visited_at) {
  std::size_t start = kNone;
  for (std::size_t e = 0; e < flow.size(); ++e) {
    if (!is_integral(flow[e])) {
      start = e;
      break;
    }
  }
  if (start == kNone) return std::nullopt;

  visited_at.assign(topo.vertices.size(), kNone);
  std::vector<std::size_t> path_edges{start};
  std::vector<bool> path_forward{true};
  visited_at[topo.edges[start].tail] = 0;
  std::size_t vertex = topo.edges[start].head;
  std::size_t arrived_by = start;
  std::size_t steps = 1;
  while (visited_at[vertex] == kNone) {
    visited_at[vertex] = steps;
    std::size_t next = kNone;
    for (auto e : topo.incident[vertex]) {
      if (e != arrived_by && !is_integral(flow[e])) {
        next = e;
        break;
      }
    }
    if (next == kNone) throw std::logic_error("fractional edge walk hit a dead end; flow is not conserved");
    const bool fwd = topo.edges[next].tail == vertex;
    path_edges.push_back(next);
    path_forward.push_back(fwd);
    vertex = fwd ? topo.edges[next].head : topo.edges[next].tail;
    arrived_by = next;
    ++steps;
  }
  const auto first = visited_at[vertex];
  FlowCycle cycle;
  cycle.edges.assign(path_edges.begin() + static_cast<std::ptrdiff_t>(first), path_edges.end());
  cycle.forward.assign(path_forward.begin() + static_cast<std::ptrdiff_t>(first), path_forward.end());
  return cycle;
}

struct Amounts {
  Rational d_plus;
  Rational d_minus;
};

Amounts flow_amounts(const std::vector<Rational>& flow, const FlowCycle& cycle) {
  std::optional<Rational> d_plus;
  std::optional<Rational> d_minus;
  auto take_min = [](std::optional<Rational>& acc, const Rational& v) {
    if (!acc || v < *acc) acc = v;
  };
  for (std::size_t k = 0; k < cycle.edges.size(); ++k) {
    const auto& f = flow[cycle.edges[k]];
    const Rational up = Rational(ceil_of(f)) - f;
    const Rational down = f - Rational(floor_of(f));
    if (cycle.forward[k]) {
      take_min(d_plus, up);
      take_min(d_minus, down);
    } else {
      take_min(d_plus, down);
      take_min(d_minus, up);
    }
  }
  if (!d_plus || *d_plus <= 0 || *d_minus <= 0) throw std::logic_error("degenerate flow cycle: zero adjustment");
  return {*d_plus, *d_minus};
}

void shift(std::vector<Rational>& flow, const FlowCycle& cycle, const Rational& forward_delta) {
  for (std::size_t k = 0; k < cycle.edges.size(); ++k) {
    if (cycle.forward[k]) {
      flow[cycle.edges[k]] += forward_delta;
    } else {
      flow[cycle.edges[k]] -= forward_delta;
    }
  }
}

void validate_cycle(const FlowNetwork& net, const FlowCycle& cycle) {
  const auto& topo = net.topology();
  const auto len = cycle.edges.size();
  if (len < 2 || cycle.forward.size() != len) throw ContractError("flow cycle is too short or malformed");
  std::vector<std::size_t> seen(cycle.edges);
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) throw ContractError("flow cycle repeats an edge");
  const auto& e0 = topo.edges.at(cycle.edges[0]);
  const std::size_t start = cycle.forward[0] ? e0.tail : e0.head;
  std::size_t vertex = start;
  for (std::size_t k = 0; k < len; ++k) {
    const auto id = cycle.edges[k];
    if (id >= net.edge_count()) throw ContractError("flow cycle edge out of range");
    if (is_integral(net.flow(id))) throw ContractError("flow cycle contains an integral edge");
    const auto& e = topo.edges[id];
    const auto from = cycle.forward[k] ? e.tail : e.head;
    if (from != vertex) throw ContractError("flow cycle is not connected at position " + std::to_string(k));
    vertex = cycle.forward[k] ? e.head : e.tail;
  }
  if (vertex != start) throw ContractError("flow cycle is not closed");
}

}  // namespace

std::optional<FlowCycle> find_flow_cycle(const FlowNetwork& net) {
  std::vector<std::size_t> scratch;
  return find_cycle(net.topology(), net.flows(), scratch);
}

FlowDecomposition decompose_flow(const FlowNetwork& net, const FlowCycle& cycle) {
  validate_cycle(net, cycle);
  const auto amounts = flow_amounts(net.flows(), cycle);
  FlowDecomposition out{net, net, amounts.d_plus, amounts.d_minus};
  shift(out.raise_forward.mutable_flows(), cycle, amounts.d_plus);
  shift(out.raise_backward.mutable_flows(), cycle, -amounts.d_minus);
  return out;
}

std::optional<FlowNetwork> decompose_flow_once(const FlowNetwork& net, Rng& rng) {
  auto cycle = find_flow_cycle(net);
  if (!cycle) return std::nullopt;
  const auto [d_plus, d_minus] = flow_amounts(net.flows(), *cycle);
  FlowNetwork out = net;
  const bool forward = rng.bernoulli(d_minus / (d_plus + d_minus));
  shift(out.mutable_flows(), *cycle, forward ? d_plus : -d_minus);
  return out;
}

RosterSampler::RosterSampler(const ReservationScheme& scheme, std::int64_t block_length)
    : categories_(scheme.size()),
      block_length_(block_length == 0 ? scheme.minimal_block_length() : block_length),
      initial_(build_flow_network(build_scheme_table(scheme, block_length_))) {}

IntegralBlock RosterSampler::draw_block(Rng& rng) const {
  const auto& topo = initial_.topology();
  std::vector<Rational> flow = initial_.flows();
  std::vector<std::size_t> scratch;
  while (auto cycle = find_cycle(topo, flow, scratch)) {
    const auto [d_plus, d_minus] = flow_amounts(flow, *cycle);
    const bool forward = rng.bernoulli(d_minus / (d_plus + d_minus));
    shift(flow, *cycle, forward ? d_plus : -d_minus);
  }
  IntegralBlock block{std::vector<std::size_t>(static_cast<std::size_t>(block_length_), kNone), categories_};
  for (std::size_t i = 0; i < block.categories.size(); ++i) {
    for (std::size_t j = 0; j < categories_; ++j) {
      if (flow[topo.cell_edge[i * categories_ + j]] == 1) {
        if (block.categories[i] != kNone) throw std::logic_error("roster block assigns a seat twice");
        block.categories[i] = j;
      }
    }
    if (block.categories[i] == kNone) throw std::logic_error("roster block leaves a seat unassigned");
  }
  return block;
}

Roster RosterSampler::draw_roster(std::size_t length, Rng& rng, ExtensionPolicy policy) const {
  const auto k = static_cast<std::size_t>(block_length_);
  std::vector<std::size_t> assignment;
  assignment.reserve(length + k);
  if (length > 0) {
    const auto first = draw_block(rng);
    assignment.insert(assignment.end(), first.categories.begin(), first.categories.end());
    while (assignment.size() < length) {
      if (policy == ExtensionPolicy::repeat_block) {
        assignment.insert(assignment.end(), first.categories.begin(), first.categories.end());
      } else {
        const auto next = draw_block(rng);
        assignment.insert(assignment.end(), next.categories.begin(), next.categories.end());
      }
    }
    assignment.resize(length);
  }
  return Roster(std::move(assignment), block_length_, policy);
}

IntegralBlock draw_block(const ReservationScheme& scheme, std::int64_t block_length, Rng& rng) {
  return RosterSampler(scheme, block_length).draw_block(rng);
}

Roster draw_roster(const ReservationScheme& scheme, std::size_t length, Rng& rng, ExtensionPolicy policy,
                   std::int64_t block_length) {
  return RosterSampler(scheme, block_length).draw_roster(length, rng, policy);
}

}  // namespace reservations
