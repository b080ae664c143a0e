#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "zdpot/lattice.hpp"

namespace zdpot {

// The symmetric positive definite operator I - P_D on a finite domain D (the
// walk is killed on stepping outside D). Factorized once with a sparse LDLT;
// solves are const and may be called concurrently.
class KilledOperator {
 public:
  explicit KilledOperator(DomainPtr domain);

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::size_t size() const { return domain_->size(); }

  // Solves (I - P_D) x = rhs.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  // Column g_D(., y) for interior index y.
  Eigen::VectorXd green_column(std::size_t y) const;

  // (I - P_D) x.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  // max_i |((I - P_D) x - rhs)_i|
  double residual(const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) const;

  // P_{D,dD} phi: the one-step contribution of boundary data.
  Eigen::VectorXd boundary_load(const Eigen::VectorXd& boundary_values) const;

 private:
  DomainPtr domain_;
  Eigen::SparseMatrix<double> matrix_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

}  // namespace zdpot
