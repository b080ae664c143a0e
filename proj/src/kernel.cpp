#include "zdpot/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "zdpot/errors.hpp"

namespace zdpot {

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

double log_binomial_half(int n, int k) {
  // log P(simple +-1 walk at k after n steps)
  if (std::abs(k) > n || ((n + k) % 2) != 0) return -std::numeric_limits<double>::infinity();
  const int up = (n + k) / 2;
  return std::lgamma(n + 1.0) - std::lgamma(up + 1.0) - std::lgamma(n - up + 1.0) -
         n * std::log(2.0);
}

}  // namespace

// ---------------------------------------------------------------- FreeField

FreeField FreeField::point_mass(const LatticePoint& origin) {
  return FreeField(origin, 0, std::vector<double>{1.0});
}

FreeField FreeField::from_values(const LatticePoint& origin, int step, std::vector<double> values) {
  if (step < 0) throw UsageError("FreeField: negative step");
  if (values.size() != ipow(static_cast<std::size_t>(2 * step + 1), origin.dim())) {
    throw UsageError("FreeField: value count does not match box size");
  }
  return FreeField(origin, step, std::move(values));
}

double FreeField::at_offset(const LatticePoint& offset) const {
  if (offset.dim() != dim()) throw UsageError("FreeField::at: dimension mismatch");
  const std::size_t s = side();
  std::size_t idx = 0;
  for (int k = 0; k < dim(); ++k) {
    const int c = offset[k] + step_;
    if (c < 0 || c >= static_cast<int>(s)) return 0.0;
    idx = idx * s + static_cast<std::size_t>(c);
  }
  return values_[idx];
}

double FreeField::at(const LatticePoint& y) const { return at_offset(y - origin_); }

LatticePoint FreeField::offset_of(std::size_t i) const {
  const std::size_t s = side();
  LatticePoint p(dim());
  for (int k = dim() - 1; k >= 0; --k) {
    p[k] = static_cast<int>(i % s) - step_;
    i /= s;
  }
  return p;
}

double FreeField::total() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

FreeField FreeField::stepped() const {
  const int d = dim();
  const std::size_t in_side = side();
  const std::size_t out_side = in_side + 2;
  const std::size_t pad_side = out_side + 2;

  // Input embedded at offset 2 in a zero-padded box, so every neighbor read of
  // an output cell stays in range.
  std::vector<std::size_t> pstride(static_cast<std::size_t>(d));
  for (int k = d - 1; k >= 0; --k) {
    pstride[static_cast<std::size_t>(k)] =
        (k == d - 1) ? 1 : pstride[static_cast<std::size_t>(k + 1)] * pad_side;
  }
  std::vector<double> pad(ipow(pad_side, d), 0.0);
  {
    const std::size_t rows = values_.size() / in_side;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t base = 0;
      std::size_t rem = r;
      for (int k = d - 2; k >= 0; --k) {
        idx[static_cast<std::size_t>(k)] = rem % in_side;
        rem /= in_side;
      }
      for (int k = 0; k < d - 1; ++k) {
        base += (idx[static_cast<std::size_t>(k)] + 2) * pstride[static_cast<std::size_t>(k)];
      }
      base += 2;
      std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(r * in_side), in_side,
                  pad.begin() + static_cast<std::ptrdiff_t>(base));
    }
  }

  const double inv = 1.0 / (2.0 * d);
  std::vector<double> out(ipow(out_side, d), 0.0);
  const std::size_t rows = out.size() / out_side;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t rem = r;
    for (int k = d - 2; k >= 0; --k) {
      idx[static_cast<std::size_t>(k)] = rem % out_side;
      rem /= out_side;
    }
    std::size_t base = 1;
    for (int k = 0; k < d - 1; ++k) {
      base += (idx[static_cast<std::size_t>(k)] + 1) * pstride[static_cast<std::size_t>(k)];
    }
    double* dst = out.data() + r * out_side;
    const double* src = pad.data() + base;
    for (std::size_t j = 0; j < out_side; ++j) {
      const double* c = src + j;
      double acc = c[1] + c[-1];
      for (int k = d - 2; k >= 0; --k) {
        const std::size_t s = pstride[static_cast<std::size_t>(k)];
        acc += c[s] + c[-static_cast<std::ptrdiff_t>(s)];
      }
      dst[j] = acc * inv;
    }
  }
  return FreeField(origin_, step_ + 1, std::move(out));
}

std::vector<double> FreeField::marginal(int axis) const {
  if (axis < 0 || axis >= dim()) throw UsageError("FreeField::marginal: bad axis");
  const std::size_t s = side();
  std::vector<double> m(s, 0.0);
  const std::size_t stride = ipow(s, dim() - 1 - axis);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    m[(i / stride) % s] += values_[i];
  }
  return m;
}

// -------------------------------------------------------------- KilledField

KilledField KilledField::point_mass(DomainPtr domain, const LatticePoint& start) {
  const auto idx = domain->index_of(start);
  if (!idx) throw DomainError("killed kernel: start point is not in the domain");
  std::vector<double> v(domain->size(), 0.0);
  v[static_cast<std::size_t>(*idx)] = 1.0;
  return KilledField(std::move(domain), start, 0, std::move(v));
}

KilledField KilledField::from_values(DomainPtr domain, const LatticePoint& start, int step,
                                     std::vector<double> values) {
  if (values.size() != domain->size()) throw UsageError("KilledField: value count mismatch");
  if (!domain->contains(start)) throw DomainError("killed kernel: start point is not in the domain");
  return KilledField(std::move(domain), start, step, std::move(values));
}

double KilledField::at(const LatticePoint& y) const {
  const auto idx = domain_->index_of(y);
  return idx ? values_[static_cast<std::size_t>(*idx)] : 0.0;
}

double KilledField::total() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

void killed_step_values(const Domain& domain, std::span<const double> in, std::span<double> out) {
  const int d = domain.dim();
  const double inv = 1.0 / (2.0 * d);
  const std::size_t n = domain.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = domain.neighbors(i);
    double acc = 0.0;
    for (int k = 0; k < d; ++k) {
      const int a = nb[static_cast<std::size_t>(2 * k)];
      const int b = nb[static_cast<std::size_t>(2 * k + 1)];
      const double va = a >= 0 ? in[static_cast<std::size_t>(a)] : 0.0;
      const double vb = b >= 0 ? in[static_cast<std::size_t>(b)] : 0.0;
      acc += va + vb;
    }
    out[i] = acc * inv;
  }
}

void KilledField::step_in_place() {
  scratch_.resize(values_.size());
  killed_step_values(*domain_, values_, scratch_);
  values_.swap(scratch_);
  ++step_;
}

KilledField KilledField::stepped() const {
  KilledField next(domain_, start_, step_, values_);
  next.step_in_place();
  return next;
}

KilledField killed_step(const KilledField& field, const Domain& domain) {
  if (&field.domain() != &domain && field.domain().interior().size() != domain.size()) {
    throw DomainError("killed_step: field belongs to a different domain");
  }
  return field.stepped();
}

// -------------------------------------------------------------- KernelCache

std::shared_ptr<const FreeField> KernelCache::free_field(int dim, int n) {
  if (n < 0) throw UsageError("n_step: n must be nonnegative");
  std::lock_guard lock(mutex_);
  auto& chain = chains_[dim];
  if (chain.empty()) {
    chain.push_back(std::make_shared<const FreeField>(FreeField::point_mass(LatticePoint(dim))));
  }
  while (static_cast<int>(chain.size()) <= n) {
    chain.push_back(std::make_shared<const FreeField>(chain.back()->stepped()));
  }
  return chain[static_cast<std::size_t>(n)];
}

void KernelCache::clear() {
  std::lock_guard lock(mutex_);
  chains_.clear();
}

int KernelCache::max_step(int dim) const {
  std::lock_guard lock(mutex_);
  auto it = chains_.find(dim);
  return it == chains_.end() ? -1 : static_cast<int>(it->second.size()) - 1;
}

KernelCache& default_kernel_cache() {
  static KernelCache cache;
  return cache;
}

double n_step(const LatticePoint& x, const LatticePoint& y, int n) {
  if (x.dim() != y.dim()) throw UsageError("n_step: dimension mismatch");
  if (n < 0) throw UsageError("n_step: n must be nonnegative");
  const LatticePoint off = y - x;
  if (l1_norm(off) > n || !same_parity(n, off)) return 0.0;
  return default_kernel_cache().free_field(x.dim(), n)->at_offset(off);
}

double survival(const LatticePoint& x, DomainPtr B, int n) {
  if (n < 0) throw UsageError("survival: n must be nonnegative");
  auto f = KilledField::point_mass(std::move(B), x);
  for (int k = 0; k < n; ++k) f.step_in_place();
  return f.total();
}

double log_free_probability_closed_form(const LatticePoint& offset, int n) {
  if (n < 0) throw UsageError("closed form: n must be nonnegative");
  switch (offset.dim()) {
    case 1:
      return log_binomial_half(n, offset[0]);
    case 2:
      return log_binomial_half(n, offset[0] + offset[1]) +
             log_binomial_half(n, offset[0] - offset[1]);
    default:
      throw UsageError("closed-form kernel is available for d <= 2 only");
  }
}

double free_probability_closed_form(const LatticePoint& offset, int n) {
  return std::exp(log_free_probability_closed_form(offset, n));
}

// ----------------------------------------------------------------- LazyWalk

LazyWalk::LazyWalk(int dim) : dim_(dim) {
  if (dim < 1) throw UsageError("LazyWalk: dimension must be >= 1");
  hold_ = static_cast<double>(dim - 1) / dim;
  move_ = 1.0 / (2.0 * dim);
}

std::vector<double> LazyWalk::distribution(int n) const {
  if (n < 0) throw UsageError("lazy walk: n must be nonnegative");
  const std::size_t side = static_cast<std::size_t>(2 * n + 1);
  std::vector<double> cur(side, 0.0), next(side, 0.0);
  cur[static_cast<std::size_t>(n)] = 1.0;
  for (int k = 0; k < n; ++k) {
    for (std::size_t u = 0; u < side; ++u) {
      const double l = u > 0 ? cur[u - 1] : 0.0;
      const double r = u + 1 < side ? cur[u + 1] : 0.0;
      next[u] = hold_ * cur[u] + move_ * (l + r);
    }
    cur.swap(next);
  }
  return cur;
}

double LazyWalk::n_step(int s, int n) const {
  if (std::abs(s) > n) return 0.0;
  return distribution(n)[static_cast<std::size_t>(s + n)];
}

std::vector<double> LazyWalk::exit_cdf(int S, int n_max) const {
  if (S < 0) throw UsageError("lazy exit: S must be >= 0");
  if (n_max < 0) throw UsageError("lazy exit: n must be nonnegative");
  const std::size_t side = static_cast<std::size_t>(2 * S + 1);
  std::vector<double> cur(side, 0.0), next(side, 0.0);
  cur[static_cast<std::size_t>(S)] = 1.0;
  std::vector<double> cdf;
  cdf.reserve(static_cast<std::size_t>(n_max) + 1);
  cdf.push_back(0.0);
  for (int k = 1; k <= n_max; ++k) {
    for (std::size_t u = 0; u < side; ++u) {
      const double l = u > 0 ? cur[u - 1] : 0.0;
      const double r = u + 1 < side ? cur[u + 1] : 0.0;
      next[u] = hold_ * cur[u] + move_ * (l + r);
    }
    cur.swap(next);
    cdf.push_back(1.0 - std::accumulate(cur.begin(), cur.end(), 0.0));
  }
  return cdf;
}

double lazy1d_n_step(int dim, int s, int n) { return LazyWalk(dim).n_step(s, n); }

double lazy1d_exit_cdf(int dim, int S, int n) { return LazyWalk(dim).exit_cdf(S, n).back(); }

// --------------------------------------------------------------- the audit

AuditReport kernel_audit(int dim, int n_max) {
  if (dim < 1 || dim > kMaxDim) throw UsageError("kernel_audit: bad dimension");
  if (n_max < 2) throw UsageError("kernel_audit: n_max must be >= 2");
  AuditReport rep;
  rep.id = "kernel";
  rep.grid = {{"dim", dim}, {"n_max", n_max}};

  const LazyWalk lazy(dim);
  std::vector<double> lazy_dist{1.0};
  std::vector<double> lazy_next;

  double max_norm_err = 0.0;
  double max_proj_err = 0.0;
  long parity_violations = 0;
  long pairing_violations = 0;
  long reflection_mismatches = 0;
  int worst_norm_n = 0;
  double p2_origin = -1.0;

  FreeField cur = FreeField::point_mass(LatticePoint(dim));
  for (int n = 0; n <= n_max; ++n) {
    const double err = std::abs(cur.total() - 1.0);
    if (err > max_norm_err) {
      max_norm_err = err;
      worst_norm_n = n;
    }
    const auto vals = cur.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const LatticePoint off = cur.offset_of(i);
      const bool reachable = l1_norm(off) <= n && same_parity(n, off);
      if (!reachable && vals[i] != 0.0) ++parity_violations;
      if (reachable && !(vals[i] > 0.0)) ++parity_violations;
      if (cur.at_offset(-off) != vals[i]) ++reflection_mismatches;
    }
    if (n == 2) p2_origin = cur.at_offset(LatticePoint(dim));

    // Projection onto the first coordinate against the lazy chain.
    const auto marg = cur.marginal(0);
    for (std::size_t u = 0; u < marg.size(); ++u) {
      max_proj_err = std::max(max_proj_err, std::abs(marg[u] - lazy_dist[u]));
    }

    FreeField next = cur.stepped();
    // Exactly one of p_n(0,y), p_{n+1}(0,y) is nonzero for d(0,y) <= n.
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const LatticePoint off = cur.offset_of(i);
      if (l1_norm(off) > n) continue;
      const bool a = vals[i] != 0.0;
      const bool b = next.at_offset(off) != 0.0;
      if (a == b) ++pairing_violations;
    }

    lazy_next.assign(lazy_dist.size() + 2, 0.0);
    for (std::size_t u = 0; u < lazy_next.size(); ++u) {
      const auto at = [&](std::ptrdiff_t j) {
        return (j >= 0 && j < static_cast<std::ptrdiff_t>(lazy_dist.size()))
                   ? lazy_dist[static_cast<std::size_t>(j)]
                   : 0.0;
      };
      const auto j = static_cast<std::ptrdiff_t>(u) - 1;
      lazy_next[u] = lazy.hold() * at(j) + lazy.move() * (at(j - 1) + at(j + 1));
    }
    lazy_dist.swap(lazy_next);
    cur = std::move(next);
  }

  rep.constants["max_normalization_error"] = max_norm_err;
  rep.constants["max_projection_error"] = max_proj_err;
  rep.constants["p2_origin"] = p2_origin;
  rep.details["parity_violations"] = parity_violations;
  rep.details["pairing_violations"] = pairing_violations;
  rep.details["reflection_mismatches"] = reflection_mismatches;
  rep.witness = {{"n", worst_norm_n}, {"normalization_error", max_norm_err}};
  rep.pass = max_norm_err < 1e-12 && max_proj_err < 1e-12 && parity_violations == 0 &&
             pairing_violations == 0 && reflection_mismatches == 0 &&
             p2_origin == 1.0 / (2.0 * dim);
  return rep;
}

}  // namespace zdpot
