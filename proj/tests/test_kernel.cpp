#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "zdpot/errors.hpp"
#include "zdpot/kernel.hpp"

using namespace zdpot;

namespace {

LatticePoint lp(const oracle::Point& p) { return LatticePoint(std::span<const int>(p)); }

}  // namespace

TEST(FreeField, MatchesPathEnumeration) {
  for (int d = 1; d <= 3; ++d) {
    FreeField f = FreeField::point_mass(LatticePoint(d));
    const int n_max = d == 3 ? 5 : 7;
    for (int n = 0; n <= n_max; ++n) {
      const auto paths = oracle::enumerate_paths(d, n);
      for (const auto& p : oracle::ball(d, n)) {
        const auto it = paths.find(p);
        const double want = it == paths.end() ? 0.0 : it->second;
        EXPECT_NEAR(f.at(lp(p)), want, 1e-15) << "d=" << d << " n=" << n;
      }
      f = f.stepped();
    }
  }
}

TEST(FreeField, NormalizationParityAndSymmetry) {
  for (int d = 1; d <= 3; ++d) {
    FreeField f = FreeField::point_mass(LatticePoint(d));
    for (int n = 0; n <= 24; ++n) {
      EXPECT_NEAR(f.total(), 1.0, 1e-13);
      const auto vals = f.values();
      for (std::size_t i = 0; i < vals.size(); ++i) {
        const LatticePoint y = f.offset_of(i);
        if (!same_parity(n, y) || l1_norm(y) > n) {
          EXPECT_EQ(vals[i], 0.0);
        }
        LatticePoint r = y;
        r[0] = -r[0];
        EXPECT_EQ(f.at_offset(r), vals[i]);
      }
      if (n == 2) {
        EXPECT_EQ(f.at(LatticePoint(d)), 1.0 / (2.0 * d));
      }
      f = step(f);
    }
  }
}

TEST(FreeField, ClosedFormAgrees) {
  for (int d = 1; d <= 2; ++d) {
    FreeField f = FreeField::point_mass(LatticePoint(d));
    for (int n = 0; n <= 48; ++n) {
      const auto vals = f.values();
      for (std::size_t i = 0; i < vals.size(); ++i) {
        const double cf = free_probability_closed_form(f.offset_of(i), n);
        if (vals[i] == 0.0) {
          EXPECT_EQ(cf, 0.0);
        } else {
          EXPECT_NEAR(cf / vals[i], 1.0, 1e-11);
        }
      }
      f = f.stepped();
    }
  }
  EXPECT_EQ(log_free_probability_closed_form(LatticePoint{1, 0}, 2), -INFINITY);
}

TEST(FreeField, MarginalIsLazyWalk) {
  for (int d = 1; d <= 3; ++d) {
    const LazyWalk lazy(d);
    FreeField f = FreeField::point_mass(LatticePoint(d));
    for (int n = 0; n <= 20; ++n) {
      const auto marg = f.marginal(0);
      const auto want = oracle::lazy_distribution(d, n);
      const auto lib = lazy.distribution(n);
      ASSERT_EQ(marg.size(), want.size());
      ASSERT_EQ(lib.size(), want.size());
      for (std::size_t u = 0; u < want.size(); ++u) {
        EXPECT_NEAR(marg[u], want[u], 1e-14);
        EXPECT_NEAR(lib[u], want[u], 1e-14);
      }
      f = f.stepped();
    }
    EXPECT_DOUBLE_EQ(lazy.hold(), (d - 1.0) / d);
    EXPECT_DOUBLE_EQ(lazy.move(), 1.0 / (2.0 * d));
  }
}

TEST(KilledField, MatchesKilledPathEnumeration) {
  for (int d = 1; d <= 2; ++d) {
    const int R = 2;
    auto B = make_ball(LatticePoint(d), R);
    KilledField f = KilledField::point_mass(B, LatticePoint(d));
    for (int n = 0; n <= 7; ++n) {
      const auto paths = oracle::enumerate_paths(d, n, R);
      double total = 0.0;
      for (const auto& [p, w] : paths) total += w;
      EXPECT_NEAR(f.total(), total, 1e-15);
      EXPECT_NEAR(survival(LatticePoint(d), B, n), total, 1e-15);
      for (const auto& p : oracle::ball(d, R)) {
        const auto it = paths.find(p);
        EXPECT_NEAR(f.at(lp(p)), it == paths.end() ? 0.0 : it->second, 1e-15);
      }
      f.step_in_place();
    }
  }
}

TEST(KilledField, DominatedByFreeAndMonotone) {
  auto B = make_ball(LatticePoint{0, 0}, 3);
  const LatticePoint x{1, -1};
  KilledField k = KilledField::point_mass(B, x);
  double prev = 1.0;
  for (int n = 0; n <= 40; ++n) {
    for (std::size_t i = 0; i < B->size(); ++i) {
      EXPECT_LE(k.at_index(i), n_step(x, B->point(i), n) + 1e-16);
    }
    EXPECT_LE(k.total(), prev);
    prev = k.total();
    k = killed_step(k, *B);
  }
}

TEST(KilledField, RejectsStartOutside) {
  auto B = make_ball(LatticePoint{0}, 2);
  EXPECT_THROW(KilledField::point_mass(B, LatticePoint{3}), DomainError);
  EXPECT_THROW(survival(LatticePoint{5}, B, 1), DomainError);
}

TEST(KernelCache, MemoizesPerDimension) {
  KernelCache cache;
  EXPECT_EQ(cache.max_step(2), -1);
  const auto a = cache.free_field(2, 10);
  const auto b = cache.free_field(2, 10);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_GE(cache.max_step(2), 10);
  EXPECT_EQ(a->step(), 10);
  cache.clear();
  EXPECT_EQ(cache.max_step(2), -1);
}

TEST(NStep, TranslationInvariant) {
  EXPECT_DOUBLE_EQ(n_step(LatticePoint{3, 4}, LatticePoint{5, 4}, 6),
                   n_step(LatticePoint{0, 0}, LatticePoint{2, 0}, 6));
  EXPECT_EQ(n_step(LatticePoint{0, 0}, LatticePoint{1, 0}, 6), 0.0);
}

TEST(Audits, KernelAuditPasses) {
  const AuditReport rep = kernel_audit(2, 32);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.constants.at("p2_origin"), 0.25);
}
