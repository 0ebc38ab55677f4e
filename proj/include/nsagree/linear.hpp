#pragma once

#include <optional>
#include <vector>

#include "nsagree/rational.hpp"

namespace nsagree {

/// Dense row-major rational matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  [[nodiscard]] const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  [[nodiscard]] std::vector<Rational> multiply(const std::vector<Rational>& v) const {
    std::vector<Rational> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (!is_zero((*this)(i, j))) out[i] += (*this)(i, j) * v[j];
    return out;
  }

 private:
  static bool is_zero(const Rational& r) { return r == 0; }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

struct LinearSolution {
  std::vector<Rational> x;
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_columns;
};

/// Solves A x = b by Gauss-Jordan elimination over the rationals.
///
/// Pivots are taken column by column, left to right, using the first row with a
/// nonzero entry; free variables are set to zero. The result is therefore a
/// deterministic particular solution. Returns nullopt when the system is
/// inconsistent (rank(A) < rank(A|b)).
inline std::optional<LinearSolution> solve_linear_system(const Matrix& A, const std::vector<Rational>& b) {
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  if (b.size() != m) throw std::invalid_argument("right-hand side size mismatch");

  Matrix aug(m, n + 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = A(i, j);
    aug(i, n) = b[i];
  }

  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m; ++col) {
    std::size_t p = row;
    while (p < m && aug(p, col) == 0) ++p;
    if (p == m) continue;
    if (p != row)
      for (std::size_t j = col; j <= n; ++j) std::swap(aug(p, j), aug(row, j));
    const Rational inv = 1 / aug(row, col);
    for (std::size_t j = col; j <= n; ++j) aug(row, j) *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row || aug(i, col) == 0) continue;
      const Rational f = aug(i, col);
      for (std::size_t j = col; j <= n; ++j)
        if (aug(row, j) != 0) aug(i, j) -= f * aug(row, j);
    }
    pivots.push_back(col);
    ++row;
  }

  for (std::size_t i = row; i < m; ++i)
    if (aug(i, n) != 0) return std::nullopt;

  LinearSolution sol;
  sol.x.assign(n, Rational(0));
  for (std::size_t k = 0; k < pivots.size(); ++k) sol.x[pivots[k]] = aug(k, n);
  sol.rank = pivots.size();
  sol.pivot_columns = std::move(pivots);
  return sol;
}

/// Outcome of an exact feasibility test for { x >= 0 : A x = b }.
struct FeasibilityResult {
  bool feasible = false;
  /// A basic feasible solution when feasible.
  std::vector<Rational> x;
  /// When infeasible, a Farkas vector y with y^T A <= 0 componentwise and y^T b > 0.
  std::vector<Rational> farkas;
  std::size_t pivots = 0;
};

/// Phase-one primal simplex in exact arithmetic with Bland's rule.
///
/// Minimizes the sum of artificial variables on the tableau [A | I]. Bland's
/// rule (smallest entering index, smallest leaving basic index on ties) rules
/// out cycling, so the loop terminates on every input.
inline FeasibilityResult find_nonnegative_solution(const Matrix& A, const std::vector<Rational>& b) {
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  if (b.size() != m) throw std::invalid_argument("right-hand side size mismatch");

  // Rows are sign-normalized so that the artificial basis starts feasible.
  std::vector<int> row_sign(m, 1);
  const std::size_t width = n + m;  // structural columns, then artificials
  Matrix T(m, width + 1);
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0) row_sign[i] = -1;
    for (std::size_t j = 0; j < n; ++j) T(i, j) = row_sign[i] < 0 ? Rational(-A(i, j)) : A(i, j);
    T(i, n + i) = 1;
    T(i, width) = row_sign[i] < 0 ? Rational(-b[i]) : b[i];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  // Reduced costs of the phase-one objective (cost 1 on artificials).
  std::vector<Rational> reduced(width + 1);
  for (std::size_t j = 0; j <= width; ++j) {
    if (j >= n && j < width) continue;
    Rational s = 0;
    for (std::size_t i = 0; i < m; ++i) s += T(i, j);
    reduced[j] = -s;  // last entry holds -objective
  }

  FeasibilityResult result;
  for (;;) {
    // Artificials never re-enter; optimality is only needed on structural columns.
    std::size_t enter = n;
    for (std::size_t j = 0; j < n; ++j)
      if (reduced[j] < 0) {
        enter = j;
        break;
      }
    if (enter == n) break;

    std::size_t leave = m;
    Rational best_ratio;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(T(i, enter) > 0)) continue;
      Rational ratio = T(i, width) / T(i, enter);
      if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = std::move(ratio);
      }
    }
    // Phase one is bounded below by zero, so an entering column always has a pivot row.
    if (leave == m) throw std::logic_error("phase-one simplex reported unboundedness");

    const Rational inv = 1 / T(leave, enter);
    for (std::size_t j = 0; j <= width; ++j)
      if (T(leave, j) != 0) T(leave, j) *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || T(i, enter) == 0) continue;
      const Rational f = T(i, enter);
      for (std::size_t j = 0; j <= width; ++j)
        if (T(leave, j) != 0) T(i, j) -= f * T(leave, j);
    }
    if (reduced[enter] != 0) {
      const Rational f = reduced[enter];
      for (std::size_t j = 0; j <= width; ++j)
        if (T(leave, j) != 0) reduced[j] -= f * T(leave, j);
    }
    basis[leave] = enter;
    ++result.pivots;
  }

  const Rational objective = -reduced[width];
  if (objective == 0) {
    result.feasible = true;
    result.x.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] < n) result.x[basis[i]] = T(i, width);
    return result;
  }

  // Phase-one duals y = c_B B^{-1}. Column n+i of the tableau holds B^{-1} e_i.
  result.farkas.assign(m, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    Rational s = 0;
    for (std::size_t k = 0; k < m; ++k)
      if (basis[k] >= n) s += T(k, n + i);
    result.farkas[i] = row_sign[i] < 0 ? Rational(-s) : s;
  }
  return result;
}

}  // namespace nsagree
