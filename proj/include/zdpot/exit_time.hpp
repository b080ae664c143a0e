#pragma once

#include <cstdint>
#include <vector>

#include "zdpot/lattice.hpp"
#include "zdpot/report.hpp"
#include "zdpot/rng.hpp"

namespace zdpot {

// P^x(tau_B <= n) for n = 0..n_max, with survival[n] = P^x(tau_B > n) taken
// from the same killed-kernel totals (so cdf[n] + survival[n] == 1 exactly up
// to one rounding).
struct ExitCdf {
  DomainPtr domain;
  LatticePoint start;
  std::vector<double> cdf;
  std::vector<double> survival;
};

// Throws DomainError when x is not in B.
ExitCdf exact_exit_cdf(DomainPtr B, const LatticePoint& x, int n_max);

// P^0(tau <= n) <= d P(lazy walk leaves [-floor(R/d), floor(R/d)] by n)
//               <= 2d exp(-R^2/(4dn))
// for R in [r_lo, r_hi] and 1 <= n <= n_factor R^2. Rows with a bound >= 1 are
// flagged vacuous and excluded from pass/fail. The CSV sidecar carries
// (R, n, exact, bound, vacuous).
AuditReport chernoff_audit(int dim, int r_lo, int r_hi, int n_factor = 4, unsigned threads = 0);

// Survival from the origin of B(0, R) against the geometric envelope
// (1 - p)^floor(n/(3R)), p = (2d)^(-3R), up to the first n (found by
// doubling) with survival below `target`. Also counts where the literal
// exponent floor(R/n) fails.
AuditReport crude_tail_audit(int dim, int R, double target = 1e-6, int n_cap = 1 << 24);

// Per-n Monte Carlo exit CDF from x; path k uses the Philox stream (seed, k).
std::vector<McEstimate> mc_exit_sample(DomainPtr B, const LatticePoint& x, int n_max,
                                       std::uint64_t samples, std::uint64_t seed,
                                       unsigned threads = 0);

// MC against exact for every n <= n_max. The gap is measured in units of
// max(sample standard error, sqrt(q(1-q)/N)) with q the exact value.
AuditReport mc_exit_audit(int dim, int R, int n_max, std::uint64_t samples, std::uint64_t seed,
                          unsigned threads = 0);

}  // namespace zdpot
