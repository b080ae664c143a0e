#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "zdpot/errors.hpp"
#include "zdpot/harmonic.hpp"

using namespace zdpot;

namespace {

Eigen::VectorXd random_boundary(const Domain& D, std::uint64_t seed) {
  PathStream rng(seed, 0);
  Eigen::VectorXd phi(static_cast<Eigen::Index>(D.outer_boundary().size()));
  for (auto& v : phi) v = rng.next_double();
  return phi;
}

}  // namespace

TEST(Dirichlet, OneDimensionalIsLinear) {
  const int R = 6;
  auto B = make_ball(LatticePoint{0}, R);
  Eigen::VectorXd phi(2);
  phi << 3.0, -1.0;  // at -(R+1) and R+1
  const LatticeField h = dirichlet_solve(B, phi);
  for (int x = -R; x <= R; ++x) {
    const double t = (x + R + 1.0) / (2.0 * R + 2.0);
    EXPECT_NEAR(h.at(LatticePoint{x}), 3.0 + t * (-4.0), 1e-13);
  }
  EXPECT_DOUBLE_EQ(h.at(LatticePoint{R + 1}), -1.0);
  EXPECT_THROW(h.at(LatticePoint{R + 2}), DomainError);
}

TEST(Dirichlet, SolveMatchesDenseOracle) {
  const int R = 4;
  const auto dense = oracle::dense_harmonic(2, R);
  auto B = make_ball(LatticePoint{0, 0}, R);
  const KilledOperator op(B);
  const Eigen::VectorXd phi = random_boundary(*B, 3);
  const LatticeField h = dirichlet_solve(op, phi);
  const Eigen::VectorXd want = dense.kernels * phi;
  for (std::size_t i = 0; i < dense.interior.size(); ++i) {
    const LatticePoint x(std::span<const int>(dense.interior[i]));
    EXPECT_NEAR(h.at(x), want[static_cast<Eigen::Index>(i)], 1e-12);
  }
}

TEST(Dirichlet, SolveIterateAndLaplacian) {
  for (int d = 1; d <= 3; ++d) {
    auto B = make_ball(LatticePoint(d), 4);
    const Eigen::VectorXd phi = random_boundary(*B, 10 + static_cast<std::uint64_t>(d));
    const LatticeField s = dirichlet_solve(B, phi);
    const LatticeField it = dirichlet_iterate(B, phi);
    EXPECT_LT((s.interior - it.interior).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(laplacian(s).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(laplacian(s, LatticePoint(d)), 0.0, 1e-12);
    EXPECT_THROW(laplacian(s, B->boundary_point(0)), DomainError);
  }
}

TEST(Dirichlet, MaximumPrincipleOnRandomData) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int d = 1 + static_cast<int>(seed % 3);
    auto B = make_ball(LatticePoint(d), 2 + static_cast<int>(seed % 4));
    const KilledOperator op(B);
    const LatticeField h = random_harmonic(op, seed);
    EXPECT_GE(h.interior.minCoeff(), h.boundary.minCoeff() - 1e-14);
    EXPECT_LE(h.interior.maxCoeff(), h.boundary.maxCoeff() + 1e-14);
  }
}

TEST(HarmonicMeasure, IsAProbabilityMatchingSolve) {
  auto B = make_ball(LatticePoint{0, 0}, 5);
  const KilledOperator op(B);
  const Eigen::VectorXd phi = random_boundary(*B, 4);
  const LatticeField h = dirichlet_solve(op, phi);
  for (const LatticePoint& x : {LatticePoint{0, 0}, LatticePoint{3, -2}, LatticePoint{0, 5}}) {
    const Eigen::VectorXd H = harmonic_measure(op, x);
    EXPECT_NEAR(H.sum(), 1.0, 1e-12);
    EXPECT_GE(H.minCoeff(), 0.0);
    EXPECT_NEAR(H.dot(phi), h.at(x), 1e-12);
  }
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  auto B = make_ball(LatticePoint{0, 0}, 4);
  const Eigen::VectorXd phi = random_boundary(*B, 8);
  const McEstimate a = dirichlet_mc(B, phi, LatticePoint{1, 1}, 5000, 77, 1);
  const McEstimate b = dirichlet_mc(B, phi, LatticePoint{1, 1}, 5000, 77, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  const LatticeField h = dirichlet_solve(B, phi);
  EXPECT_LT(std::abs(a.mean - h.at(LatticePoint{1, 1})), 4.0 * a.std_error);
}

TEST(Energy, IdentityHoldsForZeroBoundary) {
  auto B = make_ball(LatticePoint{0, 0}, 4);
  PathStream rng(5, 0);
  LatticeField h = LatticeField::zeros(B);
  for (auto& v : h.interior) v = rng.next_double() - 0.5;
  const EnergyCheck e = energy_identity(h);
  EXPECT_GT(e.dirichlet_form, 0.0);
  EXPECT_NEAR(e.dirichlet_form, e.minus_two_h_laplacian, 1e-12 * e.dirichlet_form);
  h.boundary[0] = 1.0;
  EXPECT_THROW(energy_identity(h), UsageError);
}

TEST(Balayage, RandomInstancesReconstruct) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int d = 1 + static_cast<int>(seed % 2);
    auto B = make_ball(LatticePoint(d), seed % 3 == 0 ? 4 : 6);
    const KilledOperator op(B);
    const LatticeField h = random_harmonic(op, seed);
    PathStream rng(seed, 1);
    const auto A = random_subset(*B, rng);
    const BalayageResult r = balayage(op, A, h);
    EXPECT_GE(r.min_charge, -1e-12);
    EXPECT_LT(r.max_reconstruction_rel_error, 1e-8);
    const auto inner = r.A->inner_boundary();
    EXPECT_EQ(r.charge_points, std::vector<LatticePoint>(inner.begin(), inner.end()));
    for (std::size_t k = 0; k < r.reconstruction.size(); ++k) {
      EXPECT_NEAR(r.reconstruction[k] / h.at(r.A->point(k)), 1.0, 1e-8);
    }
  }
}

TEST(Balayage, RejectsBadInput) {
  auto B = make_ball(LatticePoint{0, 0}, 3);
  const KilledOperator op(B);
  const LatticeField h = random_harmonic(op, 1);
  const std::vector<LatticePoint> all(B->interior().begin(), B->interior().end());
  EXPECT_THROW(balayage(op, all, h), BalayageError);
  EXPECT_THROW(balayage(op, {}, h), BalayageError);
  EXPECT_THROW(balayage(op, {LatticePoint{9, 9}}, h), BalayageError);
  LatticeField neg = h;
  neg.interior.array() -= 2.0;
  neg.boundary.array() -= 2.0;
  EXPECT_THROW(balayage(op, {LatticePoint{0, 0}}, neg), BalayageError);
  LatticeField bumped = h;
  bumped.interior[0] += 0.1;
  EXPECT_THROW(balayage(op, {LatticePoint{0, 0}}, bumped), BalayageError);
}

TEST(Balayage, RandomSubsetsAreStrictAndNonempty) {
  auto B = make_ball(LatticePoint{0, 0}, 5);
  for (std::uint64_t s = 0; s < 200; ++s) {
    PathStream rng(s, 1);
    const auto A = random_subset(*B, rng);
    EXPECT_FALSE(A.empty());
    EXPECT_LT(A.size(), B->size());
    for (const auto& p : A) EXPECT_TRUE(B->contains(p));
  }
}

TEST(Audits, DirichletAndBalayagePass) {
  EXPECT_TRUE(dirichlet_audit(1, 6, 20000, 3).pass);
  EXPECT_TRUE(balayage_audit(2, {4}, 20, 3).pass);
}
