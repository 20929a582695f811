#pragma once

// Random rosters from a flow-network encoding of the reservation scheme.
//
// A k-seat block is the k x n table with every row equal to alpha. Three laminar families bound
// it: single cells in [0,1], rows summing to 1, and per-category prefix sums over seats 1..l kept
// within floor/ceil of l*alpha_j. Column prefixes and cells form one tree (source side), cells
// and rows the other (sink side); each tree edge carries the table mass of one constraint.
// Repeatedly shifting flow around a cycle of fractional edges, in a direction drawn so that the
// expected flow is unchanged, ends in a 0/1 table: a roster block whose every prefix is within
// quota and whose seat marginals are exactly alpha.

#include "reservations/core.hpp"
#include "reservations/random.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace reservations {

struct SchemeTable {
  Grid<Rational> entries;  // k x n, every row equals alpha
  std::int64_t block_length = 0;
};

enum class ConstraintKind { internal, row, column_prefix };

/// One bound sum_{cells} p'_ij in [lower, upper].
struct Constraint {
  ConstraintKind kind;
  std::vector<std::pair<std::size_t, std::size_t>> cells;  // (seat, category), 0-based
  std::int64_t lower = 0;
  std::int64_t upper = 0;
};

struct ConstraintSet {
  std::vector<Constraint> internal;        // one per cell
  std::vector<Constraint> rows;            // one per seat
  std::vector<Constraint> column_prefixes; // seats 1..l of category j, l = 2..k
};

/// Any two members nested or disjoint.
bool is_laminar(const std::vector<const Constraint*>& family);

enum class VertexKind { source, column_prefix, cell, row, sink };

struct Vertex {
  VertexKind kind;
  std::size_t seat = 0;      // prefix length l for column_prefix (1-based), seat index (0-based) for cell/row
  std::size_t category = 0;  // for column_prefix and cell
};

struct Edge {
  std::size_t tail;
  std::size_t head;
};

/// Fixed structure of the network for one (scheme, k); shared between flow states.
struct FlowTopology {
  std::size_t block_length = 0;
  std::size_t categories = 0;
  std::vector<Vertex> vertices;               // order: source, prefixes (by category, then l), cells (row-major), rows, sink
  std::vector<Edge> edges;                    // sorted by (tail, head)
  std::vector<std::vector<std::size_t>> incident;  // edge ids per vertex, ascending
  std::vector<std::size_t> cell_edge;         // edge k_ij -> R_i, indexed i * n + j
  std::vector<std::int64_t> lower;            // floor of the initial flow per edge
  std::vector<std::int64_t> upper;            // ceil of the initial flow per edge
};

class FlowNetwork {
 public:
  FlowNetwork(std::shared_ptr<const FlowTopology> topology, std::vector<Rational> flow);

  const FlowTopology& topology() const { return *topology_; }
  const std::shared_ptr<const FlowTopology>& shared_topology() const { return topology_; }
  const std::vector<Rational>& flows() const { return flow_; }
  std::vector<Rational>& mutable_flows() { return flow_; }
  const Rational& flow(std::size_t edge) const { return flow_[edge]; }

  std::size_t vertex_count() const { return topology_->vertices.size(); }
  std::size_t edge_count() const { return topology_->edges.size(); }
  std::size_t fractional_edge_count() const;

  /// Inflow equals outflow at every vertex other than source and sink.
  bool conserves_flow() const;
  /// Every edge flow lies within floor/ceil of its initial value.
  bool within_bounds() const;
  /// Flow through cell (seat, category).
  const Rational& cell_flow(std::size_t seat, std::size_t category) const;
  /// Maps the cell edges back to a k x n table.
  Grid<Rational> to_table() const;

 private:
  std::shared_ptr<const FlowTopology> topology_;
  std::vector<Rational> flow_;
};

/// Cycle in the undirected graph of fractional edges; forward[e] when traversed tail -> head.
struct FlowCycle {
  std::vector<std::size_t> edges;
  std::vector<bool> forward;
};

struct FlowDecomposition {
  FlowNetwork raise_forward;   // forward edges +d_plus, backward edges -d_plus
  FlowNetwork raise_backward;  // forward edges -d_minus, backward edges +d_minus
  Rational d_plus;
  Rational d_minus;

  Rational raise_forward_probability() const { return d_minus / (d_plus + d_minus); }
};

/// 0/1 block: `categories[i]` is the category of seat i + 1.
struct IntegralBlock {
  std::vector<std::size_t> categories;
  std::size_t category_count = 0;

  Grid<std::int64_t> to_table() const;
};

/// Throws std::invalid_argument naming the minimal valid k when k * alpha_j is not integral.
SchemeTable build_scheme_table(const ReservationScheme& scheme, std::int64_t block_length);

ConstraintSet build_constraints(const SchemeTable& table);

FlowNetwork build_flow_network(const SchemeTable& table);

/// Start at the smallest fractional edge, walk from its head along the smallest unused
/// fractional edge at each vertex, close at the first revisited vertex.
std::optional<FlowCycle> find_flow_cycle(const FlowNetwork& net);

/// Both branches of one adjustment. Throws ContractError on a malformed cycle.
FlowDecomposition decompose_flow(const FlowNetwork& net, const FlowCycle& cycle);

/// One random decomposition step; nullopt when the network is already integral.
std::optional<FlowNetwork> decompose_flow_once(const FlowNetwork& net, Rng& rng);

/// Draws blocks and rosters for one scheme; reuses the network structure across draws.
class RosterSampler {
 public:
  /// block_length 0 means the scheme's minimal block length.
  explicit RosterSampler(const ReservationScheme& scheme, std::int64_t block_length = 0);

  std::int64_t block_length() const { return block_length_; }
  const FlowNetwork& network() const { return initial_; }

  IntegralBlock draw_block(Rng& rng) const;
  Roster draw_roster(std::size_t length, Rng& rng,
                     ExtensionPolicy policy = ExtensionPolicy::independent_blocks) const;

 private:
  std::size_t categories_;
  std::int64_t block_length_;
  FlowNetwork initial_;
};

IntegralBlock draw_block(const ReservationScheme& scheme, std::int64_t block_length, Rng& rng);

Roster draw_roster(const ReservationScheme& scheme, std::size_t length, Rng& rng,
                   ExtensionPolicy policy = ExtensionPolicy::independent_blocks, std::int64_t block_length = 0);

}  // namespace reservations
