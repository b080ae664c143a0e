#pragma once

#include <cstdint>
#include <vector>

#include "zdpot/killed_operator.hpp"
#include "zdpot/lattice.hpp"
#include "zdpot/report.hpp"
#include "zdpot/rng.hpp"

namespace zdpot {

// A function on the closure of a domain: one value per interior index and one
// per outer-boundary index.
struct LatticeField {
  DomainPtr domain;
  Eigen::VectorXd interior;
  Eigen::VectorXd boundary;

  static LatticeField zeros(DomainPtr domain);

  // Throws DomainError outside the closure.
  double at(const LatticePoint& p) const;
  double min() const;
  double max() const;
};

// Delta h(x) = (1/2d) sum_{y ~ x} h(y) - h(x), i.e. P - I, at an interior
// point x.
double laplacian(const LatticeField& h, const LatticePoint& x);
// All interior values of Delta h.
Eigen::VectorXd laplacian(const LatticeField& h);

// Harmonic extension of boundary data phi (indexed by outer-boundary index)
// by one sparse solve. Throws SolverError if max |Delta h| on D exceeds 1e-10.
LatticeField dirichlet_solve(const KilledOperator& op, const Eigen::VectorXd& phi);
LatticeField dirichlet_solve(DomainPtr D, const Eigen::VectorXd& phi);

// Fixed-point iteration h <- P h with the boundary clamped to phi, started from
// zero, until the largest update is below `tol`. Throws TruncationError past
// max_iter sweeps.
LatticeField dirichlet_iterate(DomainPtr D, const Eigen::VectorXd& phi, double tol = 1e-14,
                               int max_iter = 10'000'000);

// Monte Carlo estimate of E^x[phi(X_tau)]. Path k draws its steps from the
// Philox stream (seed, k), so the estimate does not depend on `threads`.
McEstimate dirichlet_mc(DomainPtr D, const Eigen::VectorXd& phi, const LatticePoint& x,
                        std::uint64_t samples, std::uint64_t seed, unsigned threads = 0);

// z -> P^x(X_tau = z) over the outer boundary, from the single Green column
// g_D(., x): H(x, z) = (1/2d) sum over interior neighbors y of z of g_D(x, y).
Eigen::VectorXd harmonic_measure(const KilledOperator& op, const LatticePoint& x);

// Summation by parts for h vanishing on the boundary:
// sum_{x,y} p_1(x,y) (h(x)-h(y))^2 = -2 sum_x h(x) Delta h(x).
struct EnergyCheck {
  double dirichlet_form = 0.0;
  double minus_two_h_laplacian = 0.0;
  double defect = 0.0;  // absolute difference
};
// Throws UsageError when h is not zero on the boundary.
EnergyCheck energy_identity(const LatticeField& h);

// Uniform [0,1] boundary data from stream (seed, 0), extended harmonically.
LatticeField random_harmonic(const KilledOperator& op, std::uint64_t seed);

struct BalayageResult {
  DomainPtr A;
  std::vector<LatticePoint> charge_points;  // d_i A
  std::vector<double> charge;               // f on d_i A
  LatticeField swept;                       // h_A on the closure of B
  std::vector<double> reconstruction;       // sum_y g_B(x,y) f(y), x over A
  double max_reconstruction_rel_error = 0.0;
  double min_charge = 0.0;
  double max_offsupport_noise = 0.0;      // |f| off d_i A before zeroing
  double max_laplacian_on_support = 0.0;  // max Delta h_A over d_i A
  double max_abs_laplacian_elsewhere = 0.0;

  Json to_json() const;
};

// Sweeps h onto A ⊊ B: h_A solves the Dirichlet problem on B \ A with data h on
// A and 0 on dB, f = (I - P^B) h_A, and h is rebuilt on A from the Green
// columns over d_i A. Throws BalayageError if h is negative or not harmonic
// (tolerance 1e-10), if A is empty, not inside B or all of B, if structural
// noise off d_i A exceeds 1e-10, if f < -1e-12, or if the reconstruction
// misses h by more than 1e-8 relative.
BalayageResult balayage(const KilledOperator& opB, const std::vector<LatticePoint>& A,
                        const LatticeField& h);

// A random nonempty strict subset of B: a union of random sub-balls, or an
// independent coin flip per point.
std::vector<LatticePoint> random_subset(const Domain& B, PathStream& rng);

// Solve vs iteration vs Monte Carlo, harmonic-measure consistency, and the
// energy identity on B(0, R).
AuditReport dirichlet_audit(int dim, int R, std::uint64_t samples, std::uint64_t seed,
                            unsigned threads = 0);

// `instances` random (h, A) pairs per radius.
AuditReport balayage_audit(int dim, const std::vector<int>& radii, int instances,
                           std::uint64_t seed, unsigned threads = 0);

}  // namespace zdpot
