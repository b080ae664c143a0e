#pragma once

#include <span>
#include <vector>

#include "zdpot/killed_operator.hpp"
#include "zdpot/lattice.hpp"
#include "zdpot/report.hpp"

namespace zdpot {

enum class GreenMethod { Series, Solve };

// One row g_B(x, .) of the Green function from partial sums of killed kernels.
struct GreenRow {
  LatticePoint x;
  std::vector<double> values;  // indexed by the domain
  int steps = 0;               // last kernel index included in the sum
  double tail_bound = 0.0;     // geometric estimate of sum_{n > steps} P^x(tau > n)
};

// Sums p_n^B(x, .) for n = 0..N and stops once s_N lambda/(1 - lambda) < tol,
// with s_n the survival probability and lambda the larger of the last two
// survival ratios.
// Throws DomainError if x is not in B and TruncationError past max_steps.
GreenRow green_series(DomainPtr B, const LatticePoint& x, double tol, int max_steps = 10'000'000);

// Symmetric |B| x |B| table of g_B values.
class GreenTable {
 public:
  GreenTable(DomainPtr domain, std::vector<double> values, GreenMethod method);

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::size_t size() const { return domain_->size(); }
  GreenMethod method() const { return method_; }
  std::span<const double> values() const { return values_; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  // Throws DomainError when x or y is outside the domain.
  double at(const LatticePoint& x, const LatticePoint& y) const;

  // max |g(x,y) - g(y,x)| / max(|g(x,y)|, |g(y,x)|)
  double symmetry_error() const;

  // Solve: max residual of (I - P^B) G - I. Series: largest row tail bound.
  double residual = 0.0;
  int max_steps = 0;

 private:
  DomainPtr domain_;
  std::vector<double> values_;
  GreenMethod method_;
};

// (I - P^B) G = I, one sparse LDLT factorization and |B| column solves.
// Throws SolverError if the max residual exceeds 1e-10.
GreenTable green_solve(DomainPtr B, unsigned threads = 0);

// Every row by green_series.
GreenTable green_series_table(DomainPtr B, double tol, unsigned threads = 0);

// Columns g_B(., y) for the given interior indices, as a |B| x cols matrix.
Eigen::MatrixXd green_columns(const KilledOperator& op, std::span<const int> cols,
                              unsigned threads = 0);

// Series-vs-solve equivalence on every entry of B(0, R).
AuditReport green_oracle_audit(int dim, int R, double rel_tol = 1e-8, unsigned threads = 0);

struct UgiOptions {
  double ratio_limit = 10.0;  // acceptance bound on G2/G1 per radius
  unsigned threads = 0;
};

// Uniform Green inequality windows over x, y in B(0, floor(R/2)) with
// r = max{1, d(x,y)} <= R/2. d = 2 fits g/log(R/r); d >= 3 fits g r^{d-2}.
// Also reports the Green comparability ratio across the quarter ball.
AuditReport ugi_audit(int dim, const std::vector<int>& radii, const UgiOptions& opts = {});

// max over y in d_i B(0, floor(R/2)) and x1, x2 in B(0, floor(R/4)) of
// g_B(x1,y)/g_B(x2,y), for B = B(0, R).
double green_comparability_ratio(int dim, int R);

// Log-spaced grid of `count` values in [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);

// Killed Gaussian lower bound fit over x, y in B(0, floor(R/2)) and
// max{1, d(x,y)} <= n <= R^2, with the free-kernel fit on the same grid.
AuditReport killed_lower_audit(int dim, const std::vector<int>& radii, unsigned threads = 0);

}  // namespace zdpot
