#include "zdpot/killed_operator.hpp"

#include <vector>

#include "zdpot/errors.hpp"

namespace zdpot {

KilledOperator::KilledOperator(DomainPtr domain) : domain_(std::move(domain)) {
  const auto n = static_cast<Eigen::Index>(domain_->size());
  const int d = domain_->dim();
  const double w = 1.0 / (2.0 * d);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(2 * d + 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    trip.emplace_back(i, i, 1.0);
    for (int nb : domain_->neighbors(static_cast<std::size_t>(i))) {
      if (nb >= 0) trip.emplace_back(i, nb, -w);
    }
  }
  matrix_.resize(n, n);
  matrix_.setFromTriplets(trip.begin(), trip.end());
  ldlt_.compute(matrix_);
  if (ldlt_.info() != Eigen::Success) {
    throw SolverError("I - P_D factorization failed", -1.0);
  }
}

Eigen::VectorXd KilledOperator::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = ldlt_.solve(rhs);
  // One step of iterative refinement keeps residuals near machine precision
  // on the larger balls.
  const Eigen::VectorXd r = rhs - matrix_ * x;
  x += ldlt_.solve(r);
  return x;
}

Eigen::VectorXd KilledOperator::green_column(std::size_t y) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  e[static_cast<Eigen::Index>(y)] = 1.0;
  return solve(e);
}

Eigen::VectorXd KilledOperator::apply(const Eigen::VectorXd& x) const { return matrix_ * x; }

double KilledOperator::residual(const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) const {
  return (matrix_ * x - rhs).lpNorm<Eigen::Infinity>();
}

Eigen::VectorXd KilledOperator::boundary_load(const Eigen::VectorXd& boundary_values) const {
  const int d = domain_->dim();
  const double w = 1.0 / (2.0 * d);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) {
    double acc = 0.0;
    for (int nb : domain_->neighbors(i)) {
      if (nb < 0) acc += boundary_values[-(nb + 1)];
    }
    load[static_cast<Eigen::Index>(i)] = w * acc;
  }
  return load;
}

}  // namespace zdpot
