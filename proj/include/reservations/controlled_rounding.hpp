#pragma once

// Unbiased controlled rounding of a single fair share table.
//
// The table gets one synthetic row that makes every column total integral. Then, while a
// fractional cell remains, a closed alternating row/column cycle of fractional cells is
// shifted by +d/-d in one of two directions until some cell becomes integral. The direction is
// drawn so the expected table is unchanged, so every draw stays within quota and the lottery
// over outcomes averages to the input.

#include "reservations/core.hpp"
#include "reservations/random.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace reservations {

struct Cell {
  std::size_t row;
  std::size_t col;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Fair share internals plus one synthetic last row; every column total is an integer.
struct ExtendedTable {
  Grid<Rational> entries;
  std::vector<Rational> row_totals;
  std::vector<Rational> column_totals;
  std::size_t source_rows = 0;
  std::size_t period = 0;

  std::size_t fractional_count() const;
  friend bool operator==(const ExtendedTable&, const ExtendedTable&) = default;
};

/// Closed cycle of fractional cells. cells[0] and cells[1] share a row, cells[1] and cells[2]
/// share a column, and so on; the last cell shares a column with cells[0]. Cells at even
/// indices (0, 2, ...) are the "odd edges" in 1-based counting.
struct FractionCycle {
  std::vector<Cell> cells;
};

enum class Branch { raise_odd, raise_even };

/// Both outcomes of one adjustment along a cycle.
struct Decomposition {
  ExtendedTable raise_odd;   // odd cells +d_plus, even cells -d_plus
  ExtendedTable raise_even;  // odd cells -d_minus, even cells +d_minus
  Rational d_plus;
  Rational d_minus;

  /// d_minus / (d_plus + d_minus); makes the expected adjustment zero.
  Rational raise_odd_probability() const { return d_minus / (d_plus + d_minus); }
};

struct DecompositionStep {
  Rational d_plus;
  Rational d_minus;
  Branch branch;
  Rational probability;  // probability of the branch that was taken
};

ExtendedTable extend_table(const FairShareTable& fair);

/// Deterministic cycle search: start at the row-major-smallest fractional cell, move along its
/// row, then its column, and so on, always to the smallest eligible fractional cell; the cycle
/// closes at the first revisited row or column. Returns nullopt when the table is integral.
std::optional<FractionCycle> find_fraction_cycle(const ExtendedTable& table);

/// Materializes both branches. Throws ContractError for a malformed cycle and std::logic_error
/// if an adjustment comes out as zero.
Decomposition decompose(const ExtendedTable& table, const FractionCycle& cycle);

ExtendedTable decompose_once(const ExtendedTable& table, const FractionCycle& cycle, Rng& rng,
                             DecompositionStep* step = nullptr);

/// Called once per iteration with the table before the step, both branches, and the choice.
using RoundingObserver = std::function<void(const ExtendedTable&, const Decomposition&, Branch)>;

ReservationTable controlled_round(const FairShareTable& fair, Rng& rng, const RoundingObserver& observer = {});

}  // namespace reservations
