#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "zdpot/ehi.hpp"
#include "zdpot/errors.hpp"
#include "zdpot/harmonic.hpp"

using namespace zdpot;

namespace {

// max_z max/min of the dense kernels over the half ball.
double dense_harnack(int dim, int R) {
  const auto dense = oracle::dense_harmonic(dim, R);
  double C = 0.0;
  for (Eigen::Index z = 0; z < dense.kernels.cols(); ++z) {
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < dense.interior.size(); ++i) {
      if (oracle::l1(dense.interior[i]) > R / 2) continue;
      const double v = dense.kernels(static_cast<Eigen::Index>(i), z);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    C = std::max(C, hi / lo);
  }
  return C;
}

}  // namespace

TEST(Harnack, OneDimensionalClosedForm) {
  for (int R = 1; R <= 40; ++R) {
    const HarnackRecord rec = harnack_constant_exact(1, R);
    EXPECT_NEAR(rec.C, d1_harnack_closed_form(R), 1e-12) << "R=" << R;
    EXPECT_LT(rec.C, 3.0);
  }
  EXPECT_EQ(d1_harnack_closed_form(1), 1.0);
  EXPECT_DOUBLE_EQ(d1_harnack_closed_form(4), 7.0 / 3.0);
}

TEST(Harnack, MatchesDenseOracle) {
  for (int d = 2; d <= 3; ++d) {
    for (int R : {2, 4, 6}) {
      const HarnackRecord rec = harnack_constant_exact(d, R);
      EXPECT_NEAR(rec.C / dense_harnack(d, R), 1.0, 1e-10) << "d=" << d << " R=" << R;
      EXPECT_NEAR(rec.h_max / rec.h_min, rec.C, 1e-12 * rec.C);
      EXPECT_LE(l1_norm(rec.x), R / 2);
      EXPECT_LE(l1_norm(rec.y), R / 2);
      EXPECT_EQ(l1_norm(rec.z), R + 1);
      EXPECT_EQ(rec.branch, "small_R");
    }
  }
}

TEST(Harnack, KernelsFormAPartitionOfUnity) {
  auto B = make_ball(LatticePoint{0, 0}, 6);
  const KilledOperator op(B);
  const Eigen::MatrixXd K = boundary_kernels(op, 2);
  EXPECT_LT((K.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_GT(K.minCoeff(), 0.0);
  const Eigen::VectorXd H = harmonic_measure(op, LatticePoint{2, 1});
  const Eigen::Index i = *B->index_of(LatticePoint{2, 1});
  EXPECT_LT((K.row(i).transpose() - H).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Harnack, RandomMixturesNeverExceedTheKernelConstant) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int d = 1 + static_cast<int>(seed % 2);
    const int R = 4 + 2 * static_cast<int>(seed % 4);
    auto B = make_ball(LatticePoint(d), R);
    const KilledOperator op(B);
    const double C = harnack_constant_exact(d, R).C;
    const LatticeField h = random_harmonic(op, seed);
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < B->size(); ++i) {
      if (l1_norm(B->point(i)) > R / 2) continue;
      lo = std::min(lo, h.interior[static_cast<Eigen::Index>(i)]);
      hi = std::max(hi, h.interior[static_cast<Eigen::Index>(i)]);
    }
    EXPECT_LE(hi / lo, C * (1.0 + 1e-12));
  }
}

TEST(Harnack, TrivialAndInvalidRadii) {
  EXPECT_EQ(harnack_constant_exact(2, 1).C, 1.0);
  EXPECT_THROW(harnack_constant_exact(2, 0), UsageError);
  EXPECT_THROW(chained_harnack_audit(2, {32}), DomainError);
  EXPECT_THROW(small_r_bound_audit(2, {33}), UsageError);
  EXPECT_THROW(harnack_scale_audit(2, {}, 1, 1, 1.5), UsageError);
}

TEST(Audits, SmallRadiusScaleOscillation) {
  const AuditReport small = small_r_bound_audit(2, {2, 4, 8});
  EXPECT_TRUE(small.pass);
  EXPECT_GE(small.constants.at("min_one_step_ratio"), 1.0 - 1e-12);
  const AuditReport scale = harnack_scale_audit(1, {4, 8, 16}, 6, 3, 3.0);
  EXPECT_TRUE(scale.pass);
  EXPECT_LT(scale.constants.at("closed_form_max_abs_error"), 1e-12);
  const AuditReport osc = oscillation_audit(1, {8, 16}, 10, 3);
  EXPECT_TRUE(osc.pass);
  EXPECT_GT(osc.constants.at("delta_min_observed"), 0.45);
}

TEST(Audits, ChainedBoundInOneDimension) {
  const AuditReport rep = chained_harnack_audit(1, {40});
  EXPECT_TRUE(rep.pass);
  const Json& row = rep.details["per_radius"][0];
  EXPECT_LE(std::log(row["C"].get<double>()), row["log_certified"].get<double>());
}
