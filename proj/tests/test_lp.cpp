#include <random>

#include <gtest/gtest.h>

#include "palm/lp.hpp"
#include "support/vertex_enum.hpp"

namespace palm {
namespace {

using testing::dual_objective;
using testing::enumerate_vertices;
using testing::random_feasible_bounded_lp;
using testing::vertex_min;

// min y1 + y2  s.t. 0.5 y1 + y2 >= 3, y1 + 0.5 y2 >= 3, y >= 0
LpProblem lower_level_at_zero() {
  LpProblem lp = LpProblem::free_vars(2);
  lp.cost << 1.0, 1.0;
  lp.lower_bounds.setZero();
  lp.add_ineq(Vector{{0.5, 1.0}}, 3.0);
  lp.add_ineq(Vector{{1.0, 0.5}}, 3.0);
  return lp;
}

// min w1 + w2  s.t. w1 + w2 >= 1, w >= 0
LpProblem simplex_face() {
  LpProblem lp = LpProblem::free_vars(2);
  lp.cost << 1.0, 1.0;
  lp.lower_bounds.setZero();
  lp.add_ineq(Vector{{1.0, 1.0}}, 1.0);
  return lp;
}

TEST(SolveLp, LowerLevelAtZero) {
  const LpProblem lp = lower_level_at_zero();
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.w(0), 2.0, 1e-12);
  EXPECT_NEAR(sol.w(1), 2.0, 1e-12);
  EXPECT_NEAR(sol.objective, 4.0, 1e-12);
  EXPECT_NEAR(dual_objective(lp, sol.duals), 4.0, 1e-9);
  EXPECT_NEAR(sol.duals(0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(sol.duals(1), 2.0 / 3.0, 1e-12);
}

TEST(SolveLp, Infeasible) {
  LpProblem lp = LpProblem::free_vars(1);
  lp.add_ineq(Vector{{1.0}}, 1.0);
  lp.add_ineq(Vector{{-1.0}}, 0.0);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Infeasible);
}

TEST(SolveLp, Unbounded) {
  LpProblem lp = LpProblem::free_vars(1);
  lp.cost << -1.0;
  lp.add_ineq(Vector{{1.0}}, 0.0);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Unbounded);
}

TEST(SolveLp, UnboundedFreeVariableWithoutRows) {
  LpProblem lp = LpProblem::free_vars(2);
  lp.cost << 0.0, 1.0;
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Unbounded);
}

TEST(SolveLp, EmptyProblemIsOptimalAtZero) {
  LpProblem lp = LpProblem::free_vars(3);
  const LpSolution sol = solve_lp(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_EQ(sol.w, Vector::Zero(3));
}

TEST(SolveLp, DualOfLowerLevelMatchesVertexEnumeration) {
  // max 3 l1 + 3 l2  s.t. 0.5 l1 + l2 + l3 = 1, l1 + 0.5 l2 + l4 = 1, l >= 0
  LpProblem lp = LpProblem::free_vars(4);
  lp.cost << -3.0, -3.0, 0.0, 0.0;
  lp.lower_bounds.setZero();
  lp.add_eq(Vector{{0.5, 1.0, 1.0, 0.0}}, 1.0);
  lp.add_eq(Vector{{1.0, 0.5, 0.0, 1.0}}, 1.0);

  const auto vertices = enumerate_vertices(lp);
  ASSERT_FALSE(vertices.empty());
  EXPECT_NEAR(vertex_min(lp, vertices), -4.0, 1e-12);

  const LpSolution sol = solve_lp(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective, -4.0, 1e-12);
  const Vector expected{{2.0 / 3.0, 2.0 / 3.0, 0.0, 0.0}};
  EXPECT_LE((sol.w - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveLp, RedundantEqualityRows) {
  LpProblem lp = LpProblem::free_vars(2);
  lp.cost << 1.0, 2.0;
  lp.lower_bounds.setZero();
  lp.add_eq(Vector{{1.0, 1.0}}, 1.0);
  lp.add_eq(Vector{{2.0, 2.0}}, 2.0);
  const LpSolution sol = solve_lp(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.w(0), 1.0, 1e-12);
  EXPECT_NEAR(sol.objective, 1.0, 1e-12);
  EXPECT_NEAR(dual_objective(lp, sol.duals), 1.0, 1e-9);
}

TEST(SolveLp, NegativeRightHandSidesAndFreeVariables) {
  // min -w0 + w1  s.t. -w0 >= -2, w1 - w0 >= -5, w1 free, w0 free
  LpProblem lp = LpProblem::free_vars(2);
  lp.cost << -1.0, 1.0;
  lp.add_ineq(Vector{{-1.0, 0.0}}, -2.0);
  lp.add_ineq(Vector{{-1.0, 1.0}}, -5.0);
  const LpSolution sol = solve_lp(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.w(0), 2.0, 1e-12);
  EXPECT_NEAR(sol.w(1), -3.0, 1e-12);
  EXPECT_NEAR(sol.objective, -5.0, 1e-12);
  EXPECT_NEAR(dual_objective(lp, sol.duals), -5.0, 1e-9);
}

TEST(ValidateLp, RejectsBadShapesAndBounds) {
  LpProblem lp = LpProblem::free_vars(2);
  lp.lower_bounds(1) = 1.0;
  EXPECT_THROW(validate_lp(lp), DimensionError);

  LpProblem lp2 = LpProblem::free_vars(2);
  lp2.h.resize(1);
  EXPECT_THROW(solve_lp(lp2), DimensionError);

  LpProblem lp3 = LpProblem::free_vars(1);
  lp3.add_ineq(Vector{{std::numeric_limits<double>::quiet_NaN()}}, 0.0);
  EXPECT_THROW(solve_lp(lp3), DimensionError);
}

TEST(SolveLp, RandomInstancesAgreeWithVertexEnumeration) {
  std::mt19937_64 rng(20240611);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    LpProblem lp = random_feasible_bounded_lp(rng, 4, 5);
    lp.lower_bounds.setZero();  // pointed polyhedron, so the optimum is a vertex
    // Rebuild a bounded cost for the all-nonnegative variant.
    std::uniform_real_distribution<double> pos(0.0, 2.0);
    for (Index j = 0; j < lp.nvars; ++j) lp.cost(j) = pos(rng);
    const auto vertices = enumerate_vertices(lp);
    const LpSolution sol = solve_lp(lp);
    if (vertices.empty()) {
      EXPECT_NE(sol.status, LpStatus::Optimal) << dump(lp);
      continue;
    }
    ASSERT_EQ(sol.status, LpStatus::Optimal) << dump(lp);
    EXPECT_NEAR(sol.objective, vertex_min(lp, vertices), 1e-8) << dump(lp);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(SolveLp, StrongDualityComplementarySlacknessAndDeterminism) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const LpProblem lp = random_feasible_bounded_lp(rng);
    const LpSolution sol = solve_lp(lp);
    ASSERT_EQ(sol.status, LpStatus::Optimal) << dump(lp);
    EXPECT_LE(max_violation(lp, sol.w), kTolFeas) << dump(lp);
    EXPECT_NEAR(sol.objective, dual_objective(lp, sol.duals), kTolDual) << dump(lp);
    for (Index i = 0; i < lp.n_ineq(); ++i) {
      EXPECT_GE(sol.duals(i), -kTolFeas);
      EXPECT_LE(std::abs(sol.duals(i) * (lp.G.row(i).dot(sol.w) - lp.h(i))), 1e-6);
    }
    const LpSolution again = solve_lp(lp);
    EXPECT_TRUE((again.w.array() == sol.w.array()).all());
    EXPECT_TRUE((again.duals.array() == sol.duals.array()).all());
  }
}

TEST(SolveClosest, PreviousPointOnOptimalFaceIsKept) {
  const LpProblem lp = simplex_face();
  const LpSolution a = solve_closest(lp, Vector{{0.5, 0.5}});
  ASSERT_TRUE(a.optimal());
  EXPECT_LE((a.w - Vector{{0.5, 0.5}}).cwiseAbs().maxCoeff(), 1e-9);

  const LpSolution b = solve_closest(lp, Vector{{1.0, 0.0}});
  ASSERT_TRUE(b.optimal());
  EXPECT_LE((b.w - Vector{{1.0, 0.0}}).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveClosest, EquidistantFaceReturnsAFacePointAtDistanceThree) {
  const LpProblem lp = simplex_face();
  const Vector prev{{2.0, 2.0}};
  const LpSolution sol = solve_closest(lp, prev);
  ASSERT_TRUE(sol.optimal());
  // The objective cap lets the point sit up to kTolFix above the face.
  EXPECT_NEAR(sol.w.sum(), 1.0, kTolFix + 1e-12);
  EXPECT_GE(sol.w.minCoeff(), -kTolFeas);
  EXPECT_NEAR((sol.w - prev).lpNorm<1>(), 3.0, kTolFix + 1e-12);

  // Every optimal vertex is at the same distance.
  for (const auto& v : enumerate_vertices(lp))
    if (std::abs(lp.cost.dot(v) - 1.0) < 1e-9) EXPECT_NEAR((v - prev).lpNorm<1>(), 3.0, 1e-12);
}

TEST(SolveClosest, MeasuredSubsetOnlyCountsListedCoordinates) {
  // min w0  s.t. w0 >= 1, 0 <= w1 <= 4: w1 is free on the optimal face.
  LpProblem lp = LpProblem::free_vars(2);
  lp.cost << 1.0, 0.0;
  lp.lower_bounds.setZero();
  lp.add_ineq(Vector{{1.0, 0.0}}, 1.0);
  lp.add_ineq(Vector{{0.0, -1.0}}, -4.0);
  const Index measured[] = {1};
  const LpSolution sol = solve_closest(lp, Vector{{100.0, 3.0}}, measured);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.w(0), 1.0, kTolFix + 1e-12);
  EXPECT_NEAR(sol.w(1), 3.0, 1e-9);
}

TEST(SolveClosest, PropagatesNonOptimalStatusAndChecksLength) {
  LpProblem lp = LpProblem::free_vars(1);
  lp.cost << -1.0;
  EXPECT_EQ(solve_closest(lp, Vector::Zero(1)).status, LpStatus::Unbounded);
  EXPECT_THROW(solve_closest(lp, Vector::Zero(2)), DimensionError);
}

TEST(PinVariables, AddsEqualityRows) {
  const LpProblem lp = simplex_face();
  const Index idx[] = {0};
  const LpProblem pinned = pin_variables(lp, idx, Vector{{0.25}});
  const LpSolution sol = solve_lp(pinned);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.w(0), 0.25, 1e-12);
  EXPECT_NEAR(sol.w(1), 0.75, 1e-12);
}

TEST(Dump, ListsRowsWithSeventeenDigits) {
  LpProblem lp = LpProblem::free_vars(2);
  lp.cost << 0.1, -1.0;
  lp.lower_bounds(0) = 0.0;
  lp.add_ineq(Vector{{1.0, 0.0}}, 0.1);
  lp.add_eq(Vector{{0.0, 2.0}}, 3.0);
  const std::string text = dump(lp);
  EXPECT_EQ(text,
            "minimize 0.10000000000000001 w0 - 1 w1\n"
            "g0: 1 w0 >= 0.10000000000000001\n"
            "e0: 2 w1 = 3\n"
            "w0 >= 0\n"
            "w1 free\n");
}

}  // namespace
}  // namespace palm
