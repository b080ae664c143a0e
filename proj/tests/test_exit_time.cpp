#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "zdpot/errors.hpp"
#include "zdpot/exit_time.hpp"
#include "zdpot/kernel.hpp"

using namespace zdpot;

TEST(ExitCdf, MatchesKilledPathEnumeration) {
  for (int d = 1; d <= 2; ++d) {
    const int R = 3;
    const ExitCdf ex = exact_exit_cdf(make_ball(LatticePoint(d), R), LatticePoint(d), 9);
    for (int n = 0; n <= 9; ++n) {
      double alive = 0.0;
      for (const auto& [p, w] : oracle::enumerate_paths(d, n, R)) alive += w;
      EXPECT_NEAR(ex.survival[static_cast<std::size_t>(n)], alive, 1e-15);
      EXPECT_NEAR(ex.cdf[static_cast<std::size_t>(n)] + ex.survival[static_cast<std::size_t>(n)], 1.0,
                  1e-15);
    }
    EXPECT_EQ(ex.cdf[static_cast<std::size_t>(R)], 0.0);
    EXPECT_GT(ex.cdf[static_cast<std::size_t>(R + 1)], 0.0);
  }
}

TEST(ExitCdf, LazyReductionIsExactInOneDimension) {
  const LazyWalk lazy(1);
  const int R = 7;
  const ExitCdf ex = exact_exit_cdf(make_ball(LatticePoint{0}, R), LatticePoint{0}, 200);
  const auto lz = lazy.exit_cdf(R, 200);
  for (int n = 0; n <= 200; ++n) {
    EXPECT_NEAR(ex.cdf[static_cast<std::size_t>(n)], lz[static_cast<std::size_t>(n)], 1e-13);
  }
}

TEST(ExitCdf, Errors) {
  auto B = make_ball(LatticePoint{0, 0}, 2);
  EXPECT_THROW(exact_exit_cdf(B, LatticePoint{3, 0}, 4), DomainError);
  EXPECT_THROW(exact_exit_cdf(B, LatticePoint{0, 0}, -1), UsageError);
  EXPECT_THROW(chernoff_audit(2, 1, 4), UsageError);
  EXPECT_THROW(crude_tail_audit(1, 0), UsageError);
}

TEST(Chernoff, SmallGridPassesWithCsv) {
  const AuditReport rep = chernoff_audit(2, 4, 10);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.constants.at("bound_violations"), 0.0);
  EXPECT_LT(rep.constants.at("max_exact_over_bound"), 1.0);
  ASSERT_EQ(rep.table.header, (std::vector<std::string>{"R", "n", "exact", "bound", "vacuous"}));
  EXPECT_FALSE(rep.table.rows.empty());
  EXPECT_EQ(rep.table.render().back(), '\n');
}

TEST(CrudeTail, EnvelopeDominatesAndTargetReached) {
  const AuditReport rep = crude_tail_audit(1, 3, 1e-6);
  EXPECT_TRUE(rep.pass);
  EXPECT_GT(rep.constants.at("n_below_target"), 0.0);
  EXPECT_EQ(rep.constants.at("monotone_violations"), 0.0);
}

TEST(MonteCarloExit, DeterministicAndConsistent) {
  auto B = make_ball(LatticePoint{0, 0}, 4);
  const auto a = mc_exit_sample(B, LatticePoint{0, 0}, 64, 4000, 5, 1);
  const auto b = mc_exit_sample(B, LatticePoint{0, 0}, 64, 4000, 5, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t n = 0; n < a.size(); ++n) {
    EXPECT_EQ(a[n].mean, b[n].mean);
    if (n > 0) {
      EXPECT_GE(a[n].mean, a[n - 1].mean);
    }
  }
  EXPECT_TRUE(mc_exit_audit(2, 4, 64, 20000, 9).pass);
}
