#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "zdpot/lattice.hpp"

namespace zdpot {

// p_n(origin, .) of the simple symmetric walk, stored densely over the cube of
// side 2n+1 centered at the origin (row-major, last axis fastest).
//
// Each step sums the two neighbors along an axis first and then accumulates
// axes in order, so the field is bitwise symmetric under every coordinate
// reflection and entries off the parity class stay exactly 0.0.
class FreeField {
 public:
  static FreeField point_mass(const LatticePoint& origin);

  int dim() const { return origin_.dim(); }
  int step() const { return step_; }
  int extent() const { return step_; }  // box half-side
  std::size_t side() const { return static_cast<std::size_t>(2 * step_ + 1); }
  const LatticePoint& origin() const { return origin_; }
  std::span<const double> values() const { return values_; }

  // p_n(origin, y); zero outside the box.
  double at(const LatticePoint& y) const;
  // Same, addressed by the offset y - origin.
  double at_offset(const LatticePoint& offset) const;
  // Point at linear index i of the box.
  LatticePoint offset_of(std::size_t i) const;

  double total() const;
  FreeField stepped() const;

  // Marginal distribution of coordinate `axis`, indexed by value + n.
  std::vector<double> marginal(int axis) const;

  static FreeField from_values(const LatticePoint& origin, int step, std::vector<double> values);

 private:
  FreeField(LatticePoint origin, int step, std::vector<double> values)
      : origin_(origin), step_(step), values_(std::move(values)) {}

  LatticePoint origin_;
  int step_ = 0;
  std::vector<double> values_;
};

inline FreeField step(const FreeField& field) { return field.stepped(); }

// p_n^B(start, .): walk killed on leaving the domain, stored over its index.
class KilledField {
 public:
  // Throws DomainError when start is not in the domain.
  static KilledField point_mass(DomainPtr domain, const LatticePoint& start);

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  const LatticePoint& start() const { return start_; }
  int step() const { return step_; }
  std::span<const double> values() const { return values_; }

  double at(const LatticePoint& y) const;
  double at_index(std::size_t i) const { return values_[i]; }
  // P^start(tau_B > n).
  double total() const;

  KilledField stepped() const;
  void step_in_place();

  static KilledField from_values(DomainPtr domain, const LatticePoint& start, int step,
                                 std::vector<double> values);

 private:
  KilledField(DomainPtr domain, LatticePoint start, int step, std::vector<double> values)
      : domain_(std::move(domain)), start_(start), step_(step), values_(std::move(values)) {}

  DomainPtr domain_;
  LatticePoint start_;
  int step_ = 0;
  std::vector<double> values_;
  std::vector<double> scratch_;
};

// One killed step; `domain` must be the field's own domain.
KilledField killed_step(const KilledField& field, const Domain& domain);

// In-place killed step over a raw value vector indexed by `domain`.
void killed_step_values(const Domain& domain, std::span<const double> in, std::span<double> out);

// Thread-safe memo of free fields p_n(0, .) per dimension, grown on demand.
class KernelCache {
 public:
  std::shared_ptr<const FreeField> free_field(int dim, int n);
  void clear();
  // Largest memoized step for `dim`, or -1.
  int max_step(int dim) const;

 private:
  mutable std::mutex mutex_;
  std::map<int, std::vector<std::shared_ptr<const FreeField>>> chains_;
};

KernelCache& default_kernel_cache();

// Exact p_n(x, y) by dynamic programming (memoized in the default cache).
double n_step(const LatticePoint& x, const LatticePoint& y, int n);

// P^x(tau_B > n). Throws DomainError when x is not in B.
double survival(const LatticePoint& x, DomainPtr B, int n);

// Independent closed form for d <= 2. In d = 1, p_n(0,k) = C(n,(n+k)/2)/2^n;
// in d = 2 the rotated coordinates x+y and x-y perform independent +/-1 walks,
// so p_n(0,(a,b)) = q_n(a+b) q_n(a-b). Evaluated in log space through lgamma.
// Returns -inf on the wrong parity class or beyond distance n.
double log_free_probability_closed_form(const LatticePoint& offset, int n);
double free_probability_closed_form(const LatticePoint& offset, int n);

// Lazy one-dimensional walk of a single coordinate in Z^d:
// q(u,u+-1) = 1/(2d), q(u,u) = (d-1)/d.
class LazyWalk {
 public:
  explicit LazyWalk(int dim);

  int dim() const { return dim_; }
  double hold() const { return hold_; }
  double move() const { return move_; }

  // Distribution of Y_n from 0, indexed by value + n.
  std::vector<double> distribution(int n) const;
  double n_step(int s, int n) const;
  // P(tau_S <= k) for k = 0..n_max, tau_S the first exit time of [-S, S].
  std::vector<double> exit_cdf(int S, int n_max) const;

 private:
  int dim_;
  double hold_;
  double move_;
};

double lazy1d_n_step(int dim, int s, int n);
double lazy1d_exit_cdf(int dim, int S, int n);

// Normalization, parity and projection checks over n <= n_max.
AuditReport kernel_audit(int dim, int n_max);

}  // namespace zdpot
