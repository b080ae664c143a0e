#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "zdpot/bounds.hpp"
#include "zdpot/errors.hpp"
#include "zdpot/kernel.hpp"

using namespace zdpot;

TEST(GaussianForm, LcltConstants) {
  const GaussianForm g = GaussianForm::lclt(2);
  EXPECT_NEAR(g.A, 2.0 / std::numbers::pi, 1e-15);
  EXPECT_DOUBLE_EQ(g.B, 1.0);
  EXPECT_EQ(g.kind, DistanceKind::Euclidean);
  EXPECT_NEAR(g(LatticePoint{1, 1}, 4.0), (2.0 / std::numbers::pi) / 4.0 * std::exp(-0.5), 1e-15);
  const GaussianForm l1{1.0, 0.5, DistanceKind::Graph};
  EXPECT_NEAR(l1(LatticePoint{1, 1}, 4.0), 0.25 * std::exp(-0.5), 1e-15);
}

TEST(GaussianForm, LcltApproximatesCenterValue) {
  const double p = n_step(LatticePoint{0}, LatticePoint{0}, 100);
  EXPECT_NEAR(GaussianForm::lclt(1)(LatticePoint{0}, 100.0) / p, 1.0, 1e-2);
}

TEST(ChainCertificate, InfeasibleWindowThrows) {
  EXPECT_THROW(chain_certificate(LatticePoint{0, 0}, LatticePoint{8, 0}, 256, 0.5),
               InfeasibleCertificate);
  EXPECT_THROW(chain_certificate(LatticePoint{0, 0}, LatticePoint{8, 0}, 256, 1.5), UsageError);
  EXPECT_THROW(chain_certificate(LatticePoint{0, 0, 0}, LatticePoint{80, 0, 0}, 300, 0.5),
               UsageError);
}

TEST(ChainCertificate, AdmissibleInstanceIsBelowExact) {
  const double L = 0.9;
  const int n = 10000;
  const ChainCertificate c = chain_certificate(LatticePoint{0, 0}, LatticePoint{60, 40}, n, L);
  EXPECT_TRUE(c.valid);
  EXPECT_TRUE(c.side_conditions);
  EXPECT_LE(c.log_product, c.log_direct);
  EXPECT_GE(c.m, 1);
  EXPECT_EQ(static_cast<int>(c.waypoints.size()), c.m + 1);
  int total = 0;
  for (int s : c.times) total += s;
  EXPECT_EQ(total, n);
}

TEST(ChainCertificate, SingleBlockIsTheDirectValue) {
  const ChainCertificate c = chain_product(LatticePoint{0, 0}, LatticePoint{4, 2}, 30, 0.5, 1);
  EXPECT_NEAR(c.log_product, c.log_direct, 1e-12);
  const double direct = n_step(LatticePoint{0, 0}, LatticePoint{4, 2}, 30) +
                        n_step(LatticePoint{0, 0}, LatticePoint{4, 2}, 31);
  EXPECT_NEAR(std::exp(c.log_direct), direct, 1e-15);
}

TEST(Audits, LcltNearDiagonalAndFits) {
  const AuditReport lclt = lclt_error_scan(1, 16, 128);
  EXPECT_TRUE(lclt.pass);
  EXPECT_THROW(lclt_error_scan(1, 1, 64), UsageError);
  EXPECT_THROW(lclt_error_scan(1, 16, 200), UsageError);
  const AuditReport nd = near_diagonal_audit(2, 48, 0.5);
  EXPECT_TRUE(nd.pass);
  EXPECT_GT(nd.constants.at("N2"), 0.0);
  const AuditReport lo = gaussian_lower_audit(1, 48);
  const AuditReport up = gaussian_upper_audit(1, 48);
  EXPECT_TRUE(lo.pass);
  EXPECT_TRUE(up.pass);
  EXPECT_GT(lo.constants.at("L1"), 0.0);
  EXPECT_LE(lo.constants.at("L1"), up.constants.at("U1"));
}

TEST(Audits, CertificatesOnOneDimensionalInstances) {
  const AuditReport rep = chain_certificate_audit(1, 40, 3);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.constants.at("built"), 40.0);
}
