#include "zdpot/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "zdpot/errors.hpp"
#include "zdpot/rng.hpp"

namespace zdpot {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw UsageError("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                     std::to_string(dim));
  }
}

void require_same_dim(const LatticePoint& x, const LatticePoint& y) {
  if (x.dim() != y.dim()) {
    throw UsageError("dimension mismatch: " + std::to_string(x.dim()) + " vs " +
                     std::to_string(y.dim()));
  }
}

void enumerate_rec(LatticePoint& cur, int axis, int budget, std::vector<LatticePoint>& out,
                   const LatticePoint& center) {
  if (axis == cur.dim()) {
    out.push_back(cur);
    return;
  }
  for (int k = -budget; k <= budget; ++k) {
    cur[axis] = center[axis] + k;
    enumerate_rec(cur, axis + 1, budget - std::abs(k), out, center);
  }
}

}  // namespace

LatticePoint::LatticePoint(int dim) : dim_(dim) { check_dim(dim); }

LatticePoint::LatticePoint(std::initializer_list<int> coords)
    : dim_(static_cast<int>(coords.size())) {
  check_dim(dim_);
  std::copy(coords.begin(), coords.end(), c_.begin());
}

LatticePoint::LatticePoint(std::span<const int> coords) : dim_(static_cast<int>(coords.size())) {
  check_dim(dim_);
  std::copy(coords.begin(), coords.end(), c_.begin());
}

LatticePoint LatticePoint::unit(int dim, int axis, int sign) {
  LatticePoint p(dim);
  p[axis] = sign;
  return p;
}

LatticePoint LatticePoint::operator+(const LatticePoint& o) const {
  require_same_dim(*this, o);
  LatticePoint r = *this;
  for (int i = 0; i < dim_; ++i) r[i] += o[i];
  return r;
}

LatticePoint LatticePoint::operator-(const LatticePoint& o) const {
  require_same_dim(*this, o);
  LatticePoint r = *this;
  for (int i = 0; i < dim_; ++i) r[i] -= o[i];
  return r;
}

LatticePoint LatticePoint::operator-() const {
  LatticePoint r = *this;
  for (int i = 0; i < dim_; ++i) r[i] = -r[i];
  return r;
}

std::strong_ordering operator<=>(const LatticePoint& a, const LatticePoint& b) {
  if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
  for (int i = 0; i < a.dim_; ++i) {
    if (auto c = a[i] <=> b[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::size_t LatticePointHash::operator()(const LatticePoint& p) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(p.dim());
  for (int c : p.coords()) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)) + 0x9e3779b97f4a7c15ULL +
         (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

Json to_json(const LatticePoint& p) {
  return Json(std::vector<int>(p.coords().begin(), p.coords().end()));
}

int graph_distance(const LatticePoint& x, const LatticePoint& y) {
  require_same_dim(x, y);
  int s = 0;
  for (int i = 0; i < x.dim(); ++i) s += std::abs(x[i] - y[i]);
  return s;
}

int l1_norm(const LatticePoint& x) {
  int s = 0;
  for (int c : x.coords()) s += std::abs(c);
  return s;
}

std::int64_t euclidean_norm_sq(const LatticePoint& x) {
  std::int64_t s = 0;
  for (int c : x.coords()) s += static_cast<std::int64_t>(c) * c;
  return s;
}

bool same_parity(long n, const LatticePoint& z) {
  if (n < 0) throw UsageError("same_parity: n must be nonnegative");
  return ((n + l1_norm(z)) % 2) == 0;
}

std::vector<LatticePoint> enumerate_ball(const LatticePoint& center, int radius) {
  if (radius < 0) throw UsageError("ball radius must be nonnegative");
  std::vector<LatticePoint> out;
  LatticePoint cur = center;
  enumerate_rec(cur, 0, radius, out, center);
  return out;
}

Domain Domain::ball(const LatticePoint& center, int radius) {
  Domain d;
  d.center_ = center;
  d.radius_ = radius;
  d.build(enumerate_ball(center, radius));
  return d;
}

Domain Domain::from_points(std::vector<LatticePoint> points) {
  if (points.empty()) throw UsageError("domain must be nonempty");
  const int dim = points.front().dim();
  for (const auto& p : points) {
    if (p.dim() != dim) throw UsageError("domain points have mixed dimensions");
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  Domain d;
  d.center_ = LatticePoint(dim);
  d.build(std::move(points));
  return d;
}

void Domain::build(std::vector<LatticePoint> points) {
  interior_ = std::move(points);
  dim_ = interior_.front().dim();
  index_.reserve(interior_.size());
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    index_.emplace(interior_[i], static_cast<int>(i));
  }

  std::vector<LatticePoint> outer;
  std::vector<char> is_inner(interior_.size(), 0);
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    for (int axis = 0; axis < dim_; ++axis) {
      for (int sign : {1, -1}) {
        LatticePoint q = interior_[i];
        q[axis] += sign;
        if (!index_.contains(q)) {
          outer.push_back(q);
          is_inner[i] = 1;
        }
      }
    }
  }
  std::sort(outer.begin(), outer.end());
  outer.erase(std::unique(outer.begin(), outer.end()), outer.end());
  outer_ = std::move(outer);
  for (std::size_t b = 0; b < outer_.size(); ++b) {
    boundary_index_.emplace(outer_[b], static_cast<int>(b));
  }
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    if (is_inner[i]) inner_.push_back(interior_[i]);
  }

  const std::size_t deg = static_cast<std::size_t>(2 * dim_);
  neighbors_.assign(interior_.size() * deg, 0);
  std::vector<std::vector<int>> feeders(outer_.size());
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    for (int axis = 0; axis < dim_; ++axis) {
      for (int s = 0; s < 2; ++s) {
        LatticePoint q = interior_[i];
        q[axis] += (s == 0 ? 1 : -1);
        const std::size_t slot = i * deg + static_cast<std::size_t>(2 * axis + s);
        if (auto it = index_.find(q); it != index_.end()) {
          neighbors_[slot] = it->second;
        } else {
          const int b = boundary_index_.at(q);
          neighbors_[slot] = -(b + 1);
          feeders[static_cast<std::size_t>(b)].push_back(static_cast<int>(i));
        }
      }
    }
  }
  feeder_offsets_.assign(outer_.size() + 1, 0);
  for (std::size_t b = 0; b < outer_.size(); ++b) {
    feeder_offsets_[b + 1] = feeder_offsets_[b] + static_cast<int>(feeders[b].size());
    feeders_.insert(feeders_.end(), feeders[b].begin(), feeders[b].end());
  }
}

std::optional<int> Domain::index_of(const LatticePoint& p) const {
  if (auto it = index_.find(p); it != index_.end()) return it->second;
  return std::nullopt;
}

std::optional<int> Domain::boundary_index_of(const LatticePoint& p) const {
  if (auto it = boundary_index_.find(p); it != boundary_index_.end()) return it->second;
  return std::nullopt;
}

std::span<const int> Domain::boundary_feeders(std::size_t b) const {
  const auto lo = static_cast<std::size_t>(feeder_offsets_[b]);
  const auto hi = static_cast<std::size_t>(feeder_offsets_[b + 1]);
  return {feeders_.data() + lo, hi - lo};
}

Json Domain::descriptor() const {
  Json j;
  j["dim"] = dim_;
  j["size"] = interior_.size();
  j["boundary_size"] = outer_.size();
  j["inner_boundary_size"] = inner_.size();
  if (radius_) {
    j["kind"] = "ball";
    j["center"] = to_json(center_);
    j["radius"] = *radius_;
  } else {
    j["kind"] = "set";
  }
  return j;
}

std::int64_t ball_volume(int dim, int radius) {
  check_dim(dim);
  if (radius < 0) throw UsageError("ball radius must be nonnegative");
  // sum_k 2^k C(d,k) C(r,k)
  std::int64_t total = 0;
  std::int64_t cdk = 1;  // C(d,k)
  std::int64_t crk = 1;  // C(r,k)
  std::int64_t pow2 = 1;
  for (int k = 0; k <= std::min(dim, radius); ++k) {
    total += pow2 * cdk * crk;
    cdk = cdk * (dim - k) / (k + 1);
    crk = crk * (radius - k) / (k + 1);
    pow2 *= 2;
  }
  return total;
}

AuditReport volume_audit(int dim, int r_max) {
  check_dim(dim);
  if (r_max < 1) throw UsageError("volume_audit: r_max must be >= 1");
  AuditReport rep;
  rep.id = "volume";
  rep.grid = {{"dim", dim}, {"r_min", 1}, {"r_max", r_max}};
  double best = std::numeric_limits<double>::infinity();
  int best_r = 1;
  Json rows = Json::array();
  for (int r = 1; r <= r_max; ++r) {
    const double ratio =
        static_cast<double>(ball_volume(dim, r)) / std::pow(static_cast<double>(r), dim);
    rows.push_back({{"r", r}, {"ratio", ratio}});
    if (ratio < best) {
      best = ratio;
      best_r = r;
    }
  }
  rep.constants["V1"] = best;
  rep.witness = {{"r", best_r}, {"ratio", best}};
  rep.details["rows"] = rows;
  rep.details["V1_le_2d"] = best <= 2.0 * dim;
  rep.notes.push_back("V1 is the empirical infimum over the audited radii; the side condition "
                      "V1 <= 2d is reported, not asserted");
  rep.pass = best > 0.0;
  return rep;
}

std::vector<LatticePoint> anchored_geodesic(const LatticePoint& u, const LatticePoint& v,
                                            const LatticePoint& anchor) {
  require_same_dim(u, v);
  require_same_dim(u, anchor);
  const int dim = u.dim();
  // Turning point: per coordinate, the value in [min(u,v), max(u,v)] closest to anchor.
  LatticePoint turn(dim);
  for (int i = 0; i < dim; ++i) {
    const int lo = std::min(u[i], v[i]);
    const int hi = std::max(u[i], v[i]);
    turn[i] = std::clamp(anchor[i], lo, hi);
  }
  std::vector<LatticePoint> path{u};
  LatticePoint cur = u;
  auto walk_to = [&](const LatticePoint& target) {
    for (int i = 0; i < dim; ++i) {
      while (cur[i] != target[i]) {
        cur[i] += (target[i] > cur[i]) ? 1 : -1;
        path.push_back(cur);
      }
    }
  };
  walk_to(turn);
  walk_to(v);
  return path;
}

int chain_length_for_distance(int R, int dist) {
  const int spacing = std::max(1, R / 8);
  if (dist == 0) return 1;
  return (dist + spacing - 1) / spacing + 1;
}

BallChain build_ball_chain(const LatticePoint& x0, int R, const LatticePoint& u,
                           const LatticePoint& v) {
  if (R <= 32) {
    throw DomainError("build_ball_chain requires R > 32; use the small-R bound instead");
  }
  const int half = R / 2;
  if (graph_distance(u, x0) > half || graph_distance(v, x0) > half) {
    throw UsageError("build_ball_chain: u and v must lie in B(x0, floor(R/2))");
  }
  BallChain chain;
  chain.x0 = x0;
  chain.radius = R;
  chain.small_radius = R / 8;
  chain.half_radius = half;
  if (u == v) {
    chain.centers.push_back(u);
    return chain;
  }
  const auto path = anchored_geodesic(u, v, x0);
  const int dist = static_cast<int>(path.size()) - 1;
  const int spacing = std::max(1, chain.small_radius);
  for (int t = 0; t < dist; t += spacing) {
    chain.centers.push_back(path[static_cast<std::size_t>(t)]);
  }
  chain.centers.push_back(v);
  // Overlap point: geodesic midpoint between consecutive centers.
  int t_prev = 0;
  for (std::size_t j = 1; j < chain.centers.size(); ++j) {
    const int t_next = (j + 1 == chain.centers.size()) ? dist : t_prev + spacing;
    chain.overlap_points.push_back(path[static_cast<std::size_t>((t_prev + t_next) / 2)]);
    t_prev = t_next;
  }
  return chain;
}

bool verify_ball_chain(const BallChain& chain, const LatticePoint& u, const LatticePoint& v) {
  if (chain.centers.empty()) return false;
  const int r = chain.small_radius;
  if (graph_distance(u, chain.centers.front()) > r) return false;
  if (graph_distance(v, chain.centers.back()) > r) return false;
  for (const auto& z : chain.centers) {
    // B(z, floor(R/2)) inside B(x0, R) iff d(z, x0) + floor(R/2) <= R.
    if (graph_distance(z, chain.x0) + chain.half_radius > chain.radius) return false;
    if (graph_distance(z, chain.x0) > chain.half_radius) return false;
  }
  if (chain.overlap_points.size() + 1 != chain.centers.size()) return false;
  for (std::size_t j = 0; j + 1 < chain.centers.size(); ++j) {
    const auto& x = chain.overlap_points[j];
    if (graph_distance(x, chain.centers[j]) > r) return false;
    if (graph_distance(x, chain.centers[j + 1]) > r) return false;
  }
  return true;
}

AuditReport ball_chain_audit(int dim, int instances, std::uint64_t seed, int r_max) {
  check_dim(dim);
  if (instances < 1 || r_max <= 32) throw UsageError("ball_chain_audit: bad grid");
  AuditReport rep;
  rep.id = "ball_chain";
  rep.grid = {{"dim", dim}, {"instances", instances}, {"R", {33, r_max}}, {"seed", seed}};
  int cap = 0;
  for (int R = 33; R <= r_max; ++R) cap = std::max(cap, chain_length_for_distance(R, 2 * (R / 2)));
  int worst_n = 0;
  int failures = 0;
  Json first_failure;
  Json longest;
  for (int k = 0; k < instances; ++k) {
    PathStream rng(seed, static_cast<std::uint64_t>(k));
    const int R = 33 + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(r_max - 32)));
    const LatticePoint x0(dim);
    const LatticePoint u = random_ball_point(x0, R / 2, rng);
    const LatticePoint v = random_ball_point(x0, R / 2, rng);
    const BallChain chain = build_ball_chain(x0, R, u, v);
    const int n = static_cast<int>(chain.length());
    const bool ok = verify_ball_chain(chain, u, v) && n <= cap;
    if (n > worst_n) {
      worst_n = n;
      longest = {{"R", R}, {"u", to_json(u)}, {"v", to_json(v)}, {"N", n}};
    }
    if (!ok && failures++ == 0) {
      first_failure = {{"R", R}, {"u", to_json(u)}, {"v", to_json(v)}, {"N", n}};
    }
  }
  rep.constants["N_max_observed"] = worst_n;
  rep.constants["N_cap"] = cap;
  rep.constants["failures"] = failures;
  rep.witness = failures ? first_failure : longest;
  rep.pass = failures == 0;
  return rep;
}

}  // namespace zdpot
