#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "zdpot/lattice.hpp"
#include "zdpot/report.hpp"

namespace zdpot {

enum class DistanceKind { Graph, Euclidean };

// A n^{-d/2} exp(-B dist^2 / n).
struct GaussianForm {
  double A = 1.0;
  double B = 1.0;
  DistanceKind kind = DistanceKind::Graph;

  double operator()(const LatticePoint& offset, double n) const;

  // The sharp local CLT form of the simple walk on its parity class:
  // A = 2 (d/(2 pi))^{d/2}, B = d/2, euclidean distance.
  static GaussianForm lclt(int dim);
};

// sup over same-parity y with |y| <= radius_factor sqrt(n) of
// |p_n(0,y) - lclt(y,n)|, scaled by n^{d/2+1}, for n in [n_lo, n_hi] within
// [2, 128]. Passes when the top quartile of n never exceeds 1.25 times the
// maximum over the remaining n.
AuditReport lclt_error_scan(int dim, int n_lo, int n_hi,
                            double radius_factor = std::numeric_limits<double>::infinity());

// N1 = max p_n(0,y) max{n,1}^{d/2} over n <= n_max; N2 = min (p_n + p_{n+1}) n^{d/2}
// over n >= L^{-2} max{1, d(0,y)^2}.
AuditReport near_diagonal_audit(int dim, int n_max, double L);

// Decay grid shared by the two-parameter lower fits: 32 log-spaced values in [0.01, 10].
std::vector<double> lower_decay_grid();
// Upper fits search below the single-path decay rate log 2:
// 32 log-spaced values in [log(2)/1000, 0.99 log 2].
std::vector<double> upper_decay_grid();

// L1(L2) = min (p_n + p_{n+1}) n^{d/2} exp(L2 d^2/n) over 1 <= n <= n_max and
// d(0,y) <= n; reports the L2 maximizing L1.
AuditReport gaussian_lower_audit(int dim, int n_max);

// U1(U2) = max p_n max{n,1}^{d/2} exp(U2 d^2/max{n,1}) over 0 <= n <= n_max and
// the whole box (parity-mismatched points included); reports the pair with
// the smallest U1 and re-verifies it at every grid point.
AuditReport gaussian_upper_audit(int dim, int n_max);

// Waypoint chain lower bound for p_n(x,y) + p_{n+1}(x,y), d <= 2.
struct ChainCertificate {
  LatticePoint x, y;
  int n = 0;
  double L = 0.0;
  int R = 0;  // d(x,y)
  int m = 0;
  int r = 0;  // segment length floor(R/m)
  int s = 0;  // block length floor(n/m)
  double m_lo = 0.0, m_hi = 0.0;
  std::vector<LatticePoint> waypoints;  // z_0 = x, ..., z_m = y
  std::vector<int> times;               // s_1..s_m, summing to n
  bool side_conditions = false;         // 3r+1 <= L sqrt(s) <= 16r
  double log_product = 0.0;
  double log_direct = 0.0;
  bool valid = false;  // product <= direct

  Json to_json() const;
};

// The product over blocks of: the chance to land in B(z_1, r) from x; the
// worst-case chance to move from B(z_{i-1}, r) into B(z_i, r); and the
// worst-case chance to hit y at time s_m or s_m + 1 from B(z_{m-1}, r).
// No window check; m = 1 reduces to the direct value.
ChainCertificate chain_product(const LatticePoint& x, const LatticePoint& y, int n, double L, int m);

// Picks m = ceil(2^5 R^2/(L^2 n)) and requires m <= 2^6 R^2/(L^2 n).
// Throws InfeasibleCertificate outside 2^6 R/L^2 <= n <= R^2/L^2 or on an
// empty window, UsageError for d > 2 or L outside (0,1).
ChainCertificate chain_certificate(const LatticePoint& x, const LatticePoint& y, int n, double L);

// `instances` random admissible (x = 0, y, n, L) with L in [0.3, 0.95],
// d(0,y) in [64, 160] and n uniform over the admissible range.
AuditReport chain_certificate_audit(int dim, int instances, std::uint64_t seed);

}  // namespace zdpot
