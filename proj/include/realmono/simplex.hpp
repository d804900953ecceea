#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "realmono/error.hpp"
#include "realmono/rational.hpp"

namespace realmono {

/// One column of a sparse constraint matrix: (row, coefficient) entries.
using SparseColumn = std::vector<std::pair<std::size_t, Rational>>;

/// Outcome of a feasibility test for { x >= 0 : A x = b }.
struct FeasibilityResult {
  bool feasible = false;
  /// A solution (feasible case), one entry per column.
  std::vector<Rational> solution;
  /// Farkas witness y (infeasible case): y'A <= 0 column-wise and y'b > 0.
  std::vector<Rational> certificate;
  std::size_t pivots = 0;
};

/// Phase-one revised simplex in exact rational arithmetic.
///
/// One artificial variable per row starts as the basis; the artificial sum is
/// minimized with Bland's rule (smallest-index entering column, smallest-index
/// leaving variable among ratio ties), so the method terminates on degenerate
/// systems. The dense basis inverse is fine for the few dozen rows the
/// marginal systems produce; columns are only ever touched when priced.
inline FeasibilityResult solve_feasibility(std::size_t rows, const std::vector<SparseColumn>& columns,
                                           std::vector<Rational> rhs) {
  if (rhs.size() != rows) throw InvalidInput("right-hand side size does not match row count");
  const std::size_t n = columns.size();
  const std::size_t m = rows;

  std::vector<int> sign(m, 1);
  for (std::size_t r = 0; r < m; ++r)
    if (rhs[r] < 0) {
      sign[r] = -1;
      rhs[r] = -rhs[r];
    }
  for (const auto& col : columns)
    for (const auto& [r, v] : col)
      if (r >= m) throw InvalidInput("column entry references row out of range");

  // Variables 0..n-1 structural, n..n+m-1 artificial.
  std::vector<std::size_t> basis(m);
  std::vector<char> is_basic(n + m, 0);
  for (std::size_t r = 0; r < m; ++r) {
    basis[r] = n + r;
    is_basic[n + r] = 1;
  }
  std::vector<std::vector<Rational>> binv(m, std::vector<Rational>(m, Rational(0)));
  for (std::size_t r = 0; r < m; ++r) binv[r][r] = 1;
  std::vector<Rational> xb = rhs;

  auto coeff = [&](std::size_t r) { return sign[r]; };
  auto cost = [&](std::size_t var) { return var >= n ? 1 : 0; };

  FeasibilityResult result;
  std::vector<Rational> y(m);
  std::vector<Rational> u(m);
  Rational d;
  for (;;) {
    // Duals y' = c_B' B^{-1}.
    for (std::size_t j = 0; j < m; ++j) y[j] = 0;
    for (std::size_t r = 0; r < m; ++r)
      if (cost(basis[r]))
        for (std::size_t j = 0; j < m; ++j) y[j] += binv[r][j];

    std::size_t entering = n + m;
    for (std::size_t j = 0; j < n + m && entering == n + m; ++j) {
      if (is_basic[j]) continue;
      if (j < n) {
        d = 0;
        for (const auto& [r, v] : columns[j]) d -= y[r] * v * coeff(r);
      } else {
        d = 1 - y[j - n];
      }
      if (d < 0) entering = j;
    }

    if (entering == n + m) {
      Rational objective = 0;
      for (std::size_t r = 0; r < m; ++r)
        if (cost(basis[r])) objective += xb[r];
      if (objective > 0) {
        result.feasible = false;
        result.certificate.resize(m);
        for (std::size_t r = 0; r < m; ++r) result.certificate[r] = y[r] * sign[r];
      } else {
        result.feasible = true;
        result.solution.assign(n, Rational(0));
        for (std::size_t r = 0; r < m; ++r)
          if (basis[r] < n) result.solution[basis[r]] = xb[r];
      }
      return result;
    }

    // u = B^{-1} a_entering
    for (std::size_t r = 0; r < m; ++r) u[r] = 0;
    if (entering < n) {
      for (const auto& [row, v] : columns[entering]) {
        Rational a = v * coeff(row);
        for (std::size_t r = 0; r < m; ++r)
          if (binv[r][row] != 0) u[r] += binv[r][row] * a;
      }
    } else {
      for (std::size_t r = 0; r < m; ++r) u[r] = binv[r][entering - n];
    }

    std::size_t leave = m;
    Rational best;
    for (std::size_t r = 0; r < m; ++r) {
      if (u[r] <= 0) continue;
      Rational ratio = xb[r] / u[r];
      if (leave == m || ratio < best || (ratio == best && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    // Phase one is bounded below by zero, so some row must block.
    if (leave == m) throw Error("simplex: unbounded phase-one direction");

    Rational pivot = u[leave];
    for (std::size_t j = 0; j < m; ++j) binv[leave][j] /= pivot;
    xb[leave] /= pivot;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == leave || u[r] == 0) continue;
      Rational factor = u[r];
      for (std::size_t j = 0; j < m; ++j)
        if (binv[leave][j] != 0) binv[r][j] -= factor * binv[leave][j];
      xb[r] -= factor * xb[leave];
    }
    is_basic[basis[leave]] = 0;
    basis[leave] = entering;
    is_basic[entering] = 1;
    ++result.pivots;
  }
}

}  // namespace realmono
