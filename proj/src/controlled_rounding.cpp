#include "reservations/controlled_rounding.hpp"

#include <algorithm>
#include <stdexcept>

namespace reservations {

std::size_t ExtendedTable::fractional_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.data().begin(), entries.data().end(), [](const Rational& v) { return !is_integral(v); }));
}

ExtendedTable extend_table(const FairShareTable& fair) {
  const auto m = fair.rows();
  const auto n = fair.cols();
  ExtendedTable v;
  v.entries = Grid<Rational>(m + 1, n);
  v.row_totals.assign(m + 1, Rational(0));
  v.column_totals.assign(n, Rational(0));
  v.source_rows = m;
  v.period = fair.period();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) v.entries(i, j) = fair(i, j);
    v.row_totals[i] = fair.row_totals()[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto f = fractional_part(fair.column_totals()[j]);
    const Rational pad = f == 0 ? Rational(0) : Rational(1) - f;
    v.entries(m, j) = pad;
    v.row_totals[m] += pad;
    v.column_totals[j] = fair.column_totals()[j] + pad;
  }
  return v;
}

std::optional<FractionCycle> find_fraction_cycle(const ExtendedTable& table) {
  const auto rows = table.entries.rows();
  const auto cols = table.entries.cols();
  auto fractional = [&](std::size_t i, std::size_t j) { return !is_integral(table.entries(i, j)); };

  std::optional<Cell> start;
  for (std::size_t i = 0; i < rows && !start; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (fractional(i, j)) {
        start = Cell{i, j};
        break;
      }
    }
  }
  if (!start) return std::nullopt;

  // Walk in the bipartite row/column graph whose edges are fractional cells. Vertex ids:
  // rows are 0..rows-1, columns are rows..rows+cols-1.
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> visited_at(rows + cols, kUnvisited);
  std::vector<std::size_t> path_vertices{rows + start->col};
  std::vector<Cell> path_cells{*start};
  visited_at[rows + start->col] = 0;

  std::size_t vertex = start->row;
  Cell arrived_by = *start;
  for (;;) {
    if (visited_at[vertex] != kUnvisited) break;
    visited_at[vertex] = path_vertices.size();
    path_vertices.push_back(vertex);

    std::optional<Cell> next;
    if (vertex < rows) {
      for (std::size_t j = 0; j < cols; ++j) {
        if (j != arrived_by.col && fractional(vertex, j)) {
          next = Cell{vertex, j};
          break;
        }
      }
    } else {
      const auto col = vertex - rows;
      for (std::size_t i = 0; i < rows; ++i) {
        if (i != arrived_by.row && fractional(i, col)) {
          next = Cell{i, col};
          break;
        }
      }
    }
    if (!next) {
      // Integral row and column totals guarantee a second fractional cell.
      throw std::logic_error("fraction cycle search hit a dead end; table totals are not integral");
    }
    path_cells.push_back(*next);
    arrived_by = *next;
    vertex = vertex < rows ? rows + next->col : next->row;
  }

  // path_cells[p] leaves path_vertices[p]; the cycle is the part after the first visit of `vertex`.
  const auto first = visited_at[vertex];
  std::vector<Cell> cycle(path_cells.begin() + static_cast<std::ptrdiff_t>(first), path_cells.end());
  if (path_vertices[first] < rows) {
    // Leaving a row vertex means cycle[0] and cycle[1] share a column; rotate so they share a row.
    std::rotate(cycle.begin(), cycle.begin() + 1, cycle.end());
  }
  return FractionCycle{std::move(cycle)};
}

namespace {

void validate_cycle(const ExtendedTable& table, const FractionCycle& cycle) {
  const auto& cells = cycle.cells;
  const auto len = cells.size();
  if (len < 4 || len % 2 != 0) throw ContractError("fraction cycle must have even length >= 4");
  for (std::size_t k = 0; k < len; ++k) {
    const auto& a = cells[k];
    const auto& b = cells[(k + 1) % len];
    if (a.row >= table.entries.rows() || a.col >= table.entries.cols()) {
      throw ContractError("fraction cycle cell outside the table");
    }
    if (is_integral(table.entries(a.row, a.col))) throw ContractError("fraction cycle contains an integral cell");
    const bool shares_row = a.row == b.row && a.col != b.col;
    const bool shares_col = a.col == b.col && a.row != b.row;
    if (k % 2 == 0 ? !shares_row : !shares_col) {
      throw ContractError("fraction cycle does not alternate row, column at position " + std::to_string(k));
    }
    for (std::size_t l = k + 1; l < len; ++l) {
      if (cells[l] == a) throw ContractError("fraction cycle repeats a cell");
    }
  }
}

struct Amounts {
  Rational d_plus;
  Rational d_minus;
};

Amounts adjustment_amounts(const ExtendedTable& table, const FractionCycle& cycle) {
  std::optional<Rational> d_plus;
  std::optional<Rational> d_minus;
  auto take_min = [](std::optional<Rational>& acc, const Rational& v) {
    if (!acc || v < *acc) acc = v;
  };
  for (std::size_t k = 0; k < cycle.cells.size(); ++k) {
    const auto& v = table.entries(cycle.cells[k].row, cycle.cells[k].col);
    const Rational up = Rational(ceil_of(v)) - v;
    const Rational down = v - Rational(floor_of(v));
    if (k % 2 == 0) {
      take_min(d_plus, up);
      take_min(d_minus, down);
    } else {
      take_min(d_plus, down);
      take_min(d_minus, up);
    }
  }
  if (*d_plus <= 0 || *d_minus <= 0) throw std::logic_error("degenerate fraction cycle: zero adjustment");
  return {*d_plus, *d_minus};
}

void shift(ExtendedTable& table, const FractionCycle& cycle, const Rational& odd_delta) {
  for (std::size_t k = 0; k < cycle.cells.size(); ++k) {
    auto& v = table.entries(cycle.cells[k].row, cycle.cells[k].col);
    if (k % 2 == 0) {
      v += odd_delta;
    } else {
      v -= odd_delta;
    }
  }
}

}  // namespace

Decomposition decompose(const ExtendedTable& table, const FractionCycle& cycle) {
  validate_cycle(table, cycle);
  const auto amounts = adjustment_amounts(table, cycle);
  Decomposition out{table, table, amounts.d_plus, amounts.d_minus};
  shift(out.raise_odd, cycle, amounts.d_plus);
  shift(out.raise_even, cycle, -amounts.d_minus);
  return out;
}

ExtendedTable decompose_once(const ExtendedTable& table, const FractionCycle& cycle, Rng& rng,
                             DecompositionStep* step) {
  validate_cycle(table, cycle);
  const auto [d_plus, d_minus] = adjustment_amounts(table, cycle);
  const Rational p_odd = d_minus / (d_plus + d_minus);
  const bool odd = rng.bernoulli(p_odd);
  ExtendedTable out = table;
  shift(out, cycle, odd ? d_plus : -d_minus);
  if (step) *step = {d_plus, d_minus, odd ? Branch::raise_odd : Branch::raise_even, odd ? p_odd : 1 - p_odd};
  return out;
}

ReservationTable controlled_round(const FairShareTable& fair, Rng& rng, const RoundingObserver& observer) {
  ExtendedTable v = extend_table(fair);
  while (auto cycle = find_fraction_cycle(v)) {
    if (observer) {
      auto d = decompose(v, *cycle);
      const bool odd = rng.bernoulli(d.raise_odd_probability());
      const auto branch = odd ? Branch::raise_odd : Branch::raise_even;
      observer(v, d, branch);
      v = odd ? std::move(d.raise_odd) : std::move(d.raise_even);
    } else {
      const auto [d_plus, d_minus] = adjustment_amounts(v, *cycle);
      const bool odd = rng.bernoulli(d_minus / (d_plus + d_minus));
      shift(v, *cycle, odd ? d_plus : -d_minus);
    }
  }
  // Drop the synthetic row.
  Grid<std::int64_t> internal(v.source_rows, v.entries.cols());
  for (std::size_t i = 0; i < v.source_rows; ++i) {
    for (std::size_t j = 0; j < v.entries.cols(); ++j) internal(i, j) = v.entries(i, j).numerator();
  }
  return ReservationTable::from_internal(std::move(internal), fair.period());
}

}  // namespace reservations
