#pragma once

#include <span>
#include <vector>

namespace femmir {

struct Assignment {
  /// Column chosen for each row.
  std::vector<int> row_to_col;
  double total = 0.0;
  /// False when every full assignment uses an infinite cell.
  bool feasible = true;
};

/// Minimum-cost assignment of every row of a rows x cols matrix (row-major,
/// rows <= cols) to a distinct column. Cells may be +infinity; internally
/// they become a sentinel larger than any finite assignment. Among equal
/// reduced costs the lowest column index is taken, so results are
/// deterministic.
Assignment solve_assignment(int rows, int cols, std::span<const double> cells);

}  // namespace femmir
