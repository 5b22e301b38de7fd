#include <gtest/gtest.h>

#include <random>

#include "hpflex/simplex.hpp"

using namespace hpflex;

namespace {

constexpr double inf = LpBuilder::inf;

SolveOptions primal_only() {
  SolveOptions o;
  o.dual = false;
  o.presolve = false;
  return o;
}

// Random bounded LP: min c x, row bounds around A x0 so x0 is feasible.
LinearProgram random_lp(std::mt19937& rng, int n, int m, bool negative_costs) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LpBuilder b;
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    x0[j] = 2.0 * u(rng);
    const double lo = u(rng) < 0.2 ? -inf : 0.0;
    const double up = u(rng) < 0.5 ? 2.0 + 3.0 * u(rng) : inf;
    double c = negative_costs ? u(rng) * 2.0 - 0.5 : u(rng);
    if (!std::isfinite(up) && c < 0) c = -c;
    if (!std::isfinite(lo) && c > 0 && std::isfinite(up)) c = -c;
    if (!std::isfinite(lo) && !std::isfinite(up)) c = 0.0;
    b.add_column("x" + std::to_string(j), lo, up, c, "x");
  }
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j)
      if (u(rng) < 0.3) {
        const double a = std::round((u(rng) * 4.0 - 2.0) * 4.0) / 4.0;
        if (a == 0.0) continue;
        terms.push_back({j, a});
        act += a * x0[j];
      }
    const double kind = u(rng);
    double lo = -inf, up = inf;
    if (kind < 0.3) lo = up = act;
    else if (kind < 0.6) lo = act - u(rng);
    else if (kind < 0.9) up = act + u(rng);
    else {
      lo = act - u(rng);
      up = act + u(rng);
    }
    b.add_row("r" + std::to_string(i), lo, up, "r", terms);
  }
  return std::move(b).finish();
}

}  // namespace

TEST(Simplex, SingleLowerBound) {
  LpBuilder b;
  int x = b.add_column("x", -inf, inf, 1.0, "x");
  b.add_row("c", 1.0, inf, "c", {{x, 1.0}});
  auto lp = std::move(b).finish();
  auto s = solve(lp);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.x[0], 1.0, 1e-12);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
}

TEST(Simplex, ContradictoryBoundsAreInfeasible) {
  LpBuilder b;
  int x = b.add_column("x", 0.0, 1.0, 1.0, "x");
  b.add_row("c", 2.0, inf, "c", {{x, 1.0}});
  auto lp = std::move(b).finish();
  EXPECT_EQ(solve(lp).status, SolveStatus::infeasible);
  EXPECT_EQ(solve(lp, primal_only()).status, SolveStatus::infeasible);

  LpBuilder c;
  c.add_column("y", 3.0, 1.0, 0.0, "x");
  EXPECT_EQ(solve(std::move(c).finish()).status, SolveStatus::infeasible);
}

TEST(Simplex, InfeasibleCoupledRows) {
  LpBuilder b;
  int x = b.add_column("x", 0.0, inf, 1.0, "x");
  int y = b.add_column("y", 0.0, inf, 1.0, "x");
  b.add_row("a", 3.0, inf, "r", {{x, 1.0}, {y, 1.0}});
  b.add_row("b", -inf, 2.0, "r", {{x, 1.0}, {y, 1.0}});
  auto lp = std::move(b).finish();
  EXPECT_EQ(solve(lp).status, SolveStatus::infeasible);
  EXPECT_EQ(solve(lp, primal_only()).status, SolveStatus::infeasible);
}

TEST(Simplex, Unbounded) {
  LpBuilder b;
  int x = b.add_column("x", 0.0, inf, -1.0, "x");
  int y = b.add_column("y", 0.0, inf, 0.0, "x");
  b.add_row("a", -inf, 1.0, "r", {{x, 1.0}, {y, -1.0}});
  EXPECT_EQ(solve(std::move(b).finish()).status, SolveStatus::unbounded);
}

TEST(Simplex, TextbookMaximization) {
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  x=2, y=6, 36
  LpBuilder b;
  int x = b.add_column("x", 0.0, inf, -3.0, "x");
  int y = b.add_column("y", 0.0, inf, -5.0, "x");
  b.add_row("a", -inf, 4.0, "r", {{x, 1.0}});
  b.add_row("b", -inf, 12.0, "r", {{y, 2.0}});
  b.add_row("c", -inf, 18.0, "r", {{x, 3.0}, {y, 2.0}});
  auto lp = std::move(b).finish();
  for (const auto& opt : {SolveOptions{}, primal_only()}) {
    auto s = solve(lp, opt);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_NEAR(s.x[x], 2.0, 1e-9);
    EXPECT_NEAR(s.x[y], 6.0, 1e-9);
    EXPECT_NEAR(s.objective, -36.0, 1e-9);
  }
}

TEST(Simplex, DualPathAgreesWithPrimalOnRandomPrograms) {
  std::mt19937 rng(7);
  int optimal = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 25), m = 2 + static_cast<int>(rng() % 20);
    const auto lp = random_lp(rng, n, m, trial % 2 == 1);
    const auto a = solve(lp);
    const auto b = solve(lp, primal_only());
    ASSERT_EQ(a.status, b.status) << "trial " << trial;
    if (a.status != SolveStatus::optimal) continue;
    ++optimal;
    EXPECT_NEAR(a.objective, b.objective, 1e-7 * std::max(1.0, std::abs(b.objective))) << "trial " << trial;
    EXPECT_LE(a.max_violation, 1e-6);
    EXPECT_LE(b.max_violation, 1e-6);
  }
  EXPECT_GT(optimal, 100);
}

TEST(Simplex, DegenerateTransportation) {
  // Balanced transportation problem: heavily degenerate, unique objective.
  const int S = 6, D = 6;
  LpBuilder b;
  std::vector<std::vector<int>> x(S, std::vector<int>(D));
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < D; ++j)
      x[i][j] = b.add_column("x" + std::to_string(i) + "_" + std::to_string(j), 0.0, inf,
                             1.0 + ((i * 7 + j * 3) % 5), "x");
  for (int i = 0; i < S; ++i) {
    std::vector<std::pair<int, double>> t;
    for (int j = 0; j < D; ++j) t.push_back({x[i][j], 1.0});
    b.add_row("s" + std::to_string(i), 10.0, 10.0, "r", t);
  }
  for (int j = 0; j < D; ++j) {
    std::vector<std::pair<int, double>> t;
    for (int i = 0; i < S; ++i) t.push_back({x[i][j], 1.0});
    b.add_row("d" + std::to_string(j), 10.0, 10.0, "r", t);
  }
  auto lp = std::move(b).finish();
  const auto a = solve(lp);
  const auto p = solve(lp, primal_only());
  ASSERT_EQ(a.status, SolveStatus::optimal);
  ASSERT_EQ(p.status, SolveStatus::optimal);
  EXPECT_NEAR(a.objective, p.objective, 1e-9);
}

TEST(Simplex, Deterministic) {
  std::mt19937 rng(11);
  const auto lp = random_lp(rng, 30, 20, false);
  const auto a = solve(lp), b = solve(lp);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.x, b.x);
}

TEST(Simplex, PresolveRemovesFixedAndSingletons) {
  LpBuilder b;
  int x = b.add_column("x", 2.0, 2.0, 1.0, "x");
  int y = b.add_column("y", 0.0, inf, 1.0, "x");
  int z = b.add_column("z", 0.0, inf, 2.0, "x");
  b.add_row("fix", 1.0, 1.0, "r", {{x, 1.0}, {y, 1.0}});      // y in [-1,-1] + ... -> y = -1? no: 2 + y = 1
  b.add_row("bal", 5.0, inf, "r", {{y, 1.0}, {z, 1.0}});
  auto lp = std::move(b).finish();
  EXPECT_EQ(solve(lp).status, SolveStatus::infeasible);  // y = -1 < 0

  LpBuilder c;
  x = c.add_column("x", 2.0, 2.0, 1.0, "x");
  y = c.add_column("y", 0.0, inf, 1.0, "x");
  z = c.add_column("z", 0.0, inf, 2.0, "x");
  c.add_row("cap", -inf, 3.0, "r", {{x, 1.0}, {y, 1.0}});  // y <= 1
  c.add_row("bal", 5.0, inf, "r", {{y, 1.0}, {z, 1.0}});
  auto lp2 = std::move(c).finish();
  const auto s = solve(lp2);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_EQ(s.stats.presolved_rows, 1);
  EXPECT_NEAR(s.x[y], 1.0, 1e-12);
  EXPECT_NEAR(s.x[z], 4.0, 1e-12);
  EXPECT_NEAR(s.objective, 2.0 + 1.0 + 8.0, 1e-12);
  // Duals: raising the cap by one saves one unit of z at price 2 minus y's 1.
  EXPECT_NEAR(s.row_dual[0], -1.0, 1e-9);
  EXPECT_NEAR(s.row_dual[1], 2.0, 1e-9);
}

TEST(Simplex, IterationLimitIsReported) {
  std::mt19937 rng(3);
  const auto lp = random_lp(rng, 40, 30, false);
  SolveOptions o;
  o.max_iterations = 1;
  const auto s = solve(lp, o);
  EXPECT_EQ(s.status, SolveStatus::iteration_limit);
}
