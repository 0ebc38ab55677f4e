#include <gtest/gtest.h>

#include <random>

#include "nsagree/linear.hpp"

using namespace nsagree;

namespace {

Matrix from_rows(const std::vector<std::vector<int>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

std::vector<Rational> ints(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(GaussJordan, UniqueSolution) {
  const Matrix A = from_rows({{2, 1}, {1, 3}});
  const auto sol = solve_linear_system(A, ints({3, 5}));
  ASSERT_TRUE(sol);
  EXPECT_EQ(sol->x[0], Rational(4, 5));
  EXPECT_EQ(sol->x[1], Rational(7, 5));
  EXPECT_EQ(sol->rank, 2u);
}

TEST(GaussJordan, FreeVariablesAreZero) {
  const Matrix A = from_rows({{1, 1, 1}});
  const auto sol = solve_linear_system(A, ints({1}));
  ASSERT_TRUE(sol);
  EXPECT_EQ(sol->x, ints({1, 0, 0}));
  EXPECT_EQ(sol->pivot_columns, std::vector<std::size_t>{0});
}

TEST(GaussJordan, InconsistentSystem) {
  const Matrix A = from_rows({{1, 1}, {2, 2}});
  EXPECT_FALSE(solve_linear_system(A, ints({1, 3})));
}

TEST(Simplex, FeasibleSystemGivesNonnegativeSolution) {
  const Matrix A = from_rows({{1, 1, 0}, {0, 1, 1}});
  const auto res = find_nonnegative_solution(A, ints({1, 1}));
  ASSERT_TRUE(res.feasible);
  EXPECT_EQ(A.multiply(res.x), ints({1, 1}));
  for (const auto& v : res.x) EXPECT_GE(v, 0);
}

TEST(Simplex, InfeasibleSystemGivesFarkasVector) {
  // x1 - x2 = -1 and x1 + x2 = 0 force x2 = 1/2, x1 = -1/2.
  const Matrix A = from_rows({{1, -1}, {1, 1}});
  const std::vector<Rational> b = ints({-1, 0});
  const auto res = find_nonnegative_solution(A, b);
  ASSERT_FALSE(res.feasible);
  Rational yb = 0;
  for (std::size_t i = 0; i < b.size(); ++i) yb += res.farkas[i] * b[i];
  EXPECT_GT(yb, 0);
  for (std::size_t j = 0; j < A.cols(); ++j) {
    Rational col = 0;
    for (std::size_t i = 0; i < A.rows(); ++i) col += res.farkas[i] * A(i, j);
    EXPECT_LE(col, 0);
  }
}

TEST(Simplex, RandomSystemsAgreeWithCertificates) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coeff(-2, 3);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t m = 2 + rng() % 3, n = 2 + rng() % 5;
    Matrix A(m, n);
    std::vector<Rational> b(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) A(i, j) = coeff(rng);
      b[i] = coeff(rng);
    }
    const auto res = find_nonnegative_solution(A, b);
    if (res.feasible) {
      ++feasible;
      EXPECT_EQ(A.multiply(res.x), b);
      for (const auto& v : res.x) EXPECT_GE(v, 0);
    } else {
      ++infeasible;
      Rational yb = 0;
      for (std::size_t i = 0; i < m; ++i) yb += res.farkas[i] * b[i];
      EXPECT_GT(yb, 0);
      for (std::size_t j = 0; j < n; ++j) {
        Rational col = 0;
        for (std::size_t i = 0; i < m; ++i) col += res.farkas[i] * A(i, j);
        EXPECT_LE(col, 0);
      }
    }
  }
  EXPECT_GT(feasible, 20);
  EXPECT_GT(infeasible, 20);
}

TEST(Simplex, DegenerateSystemTerminates) {
  // Many redundant rows; Bland's rule must still terminate.
  const Matrix A = from_rows({{1, 1, 1, 1}, {1, 1, 1, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}, {1, 1, 0, 0}});
  const auto res = find_nonnegative_solution(A, ints({2, 2, 1, 1, 1}));
  ASSERT_TRUE(res.feasible);
  EXPECT_EQ(A.multiply(res.x), ints({2, 2, 1, 1, 1}));
}
