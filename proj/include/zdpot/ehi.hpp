#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zdpot/killed_operator.hpp"
#include "zdpot/lattice.hpp"
#include "zdpot/report.hpp"

namespace zdpot {

// Exact Harnack constant of B(0, R) over the half ball B(0, floor(R/2)):
// C(R) = max_z max_{x,y} h_z(x)/h_z(y) with h_z(.) = P^.(X_tau = z).
struct HarnackRecord {
  int dim = 0;
  int R = 0;
  double C = 1.0;
  LatticePoint z;  // boundary point of the extremal kernel
  LatticePoint x;  // argmax of h_z over the half ball
  LatticePoint y;  // argmin
  double h_max = 0.0;
  double h_min = 0.0;
  std::string branch;  // "small_R" for R <= 32, "chained" otherwise

  Json to_json() const;
};

// Throws DomainError if some kernel vanishes on the half ball.
HarnackRecord harnack_constant_exact(int dim, int R, unsigned threads = 0);

// (R + 1 + m)/(R + 1 - m), m = floor(R/2): the extremal gambler's-ruin ratio.
double d1_harnack_closed_form(int R);

// Harmonic-measure kernels h_z on the interior of B(0, R), one column per
// outer-boundary point.
Eigen::MatrixXd boundary_kernels(const KilledOperator& op, unsigned threads = 0);

// C(R) <= (2d)^32 for every radius, plus h(x) >= h(y)/(2d) for x ~ y over all
// kernels h_z.
AuditReport small_r_bound_audit(int dim, const std::vector<int>& radii, unsigned threads = 0);

// C(R) per radius, its spread max/min, the d = 1 closed form, and `mixtures`
// random nonnegative boundary data whose half-ball ratio must stay <= C(R).
AuditReport harnack_scale_audit(int dim, const std::vector<int>& radii, int mixtures,
                                std::uint64_t seed, double spread_limit, unsigned threads = 0);

// For R > 32: kappa = Green comparability ratio of B(., floor(R/2)) across its
// quarter ball, N = chain length for the widest half-ball pair, and the chained
// bound kappa^N against the exact C(R).
AuditReport chained_harnack_audit(int dim, const std::vector<int>& radii, unsigned threads = 0);

// delta(R) = 1 - max Osc(h, half ball)/Osc(h, closure) over the kernels h_z
// and `samples` random harmonic functions. Passes when delta >= delta_min for
// every R and delta >= 2/(C+1), the decay implied by the measured C(R).
AuditReport oscillation_audit(int dim, const std::vector<int>& radii, int samples,
                              std::uint64_t seed, double delta_min = 0.05, unsigned threads = 0);

}  // namespace zdpot
