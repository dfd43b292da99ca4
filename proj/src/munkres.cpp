#include "femmir/munkres.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace femmir {

// Shortest augmenting path form of the Hungarian method with row/column
// potentials, O(rows^2 * cols).
Assignment solve_assignment(int rows, int cols, std::span<const double> cells) {
  if (rows < 0 || cols < 0 || cells.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("solve_assignment: matrix shape mismatch");
  }
  if (rows > cols) throw std::invalid_argument("solve_assignment: more rows than columns");
  Assignment out;
  if (rows == 0) return out;

  double finite_sum = 0.0;
  for (double c : cells) {
    if (std::isnan(c) || c < 0) throw std::invalid_argument("solve_assignment: bad cell");
    if (std::isfinite(c)) finite_sum += c;
  }
  const double sentinel = finite_sum + 1.0;
  auto cost = [&](int i, int j) {
    double c = cells[static_cast<std::size_t>(i) * cols + j];
    return std::isfinite(c) ? c : sentinel;
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual start.
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<int> match(cols + 1, 0), way(cols + 1, 0);
  for (int i = 1; i <= rows; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(cols + 1, kInf);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  out.row_to_col.assign(rows, -1);
  for (int j = 1; j <= cols; ++j) {
    if (match[j] != 0) out.row_to_col[match[j] - 1] = j - 1;
  }
  for (int i = 0; i < rows; ++i) {
    const double c = cells[static_cast<std::size_t>(i) * cols + out.row_to_col[i]];
    if (!std::isfinite(c)) out.feasible = false;
    out.total += c;
  }
  if (!out.feasible) out.total = kInf;
  return out;
}

}  // namespace femmir
