#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "zdpot/report.hpp"

namespace zdpot {

inline constexpr int kMaxDim = 8;

// A point of Z^d with 1 <= d <= kMaxDim, stored inline.
class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(int dim);
  LatticePoint(std::initializer_list<int> coords);
  explicit LatticePoint(std::span<const int> coords);

  static LatticePoint origin(int dim) { return LatticePoint(dim); }
  // +e_axis or -e_axis.
  static LatticePoint unit(int dim, int axis, int sign);

  int dim() const { return dim_; }
  int operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  std::span<const int> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  LatticePoint operator+(const LatticePoint& o) const;
  LatticePoint operator-(const LatticePoint& o) const;
  LatticePoint operator-() const;

  friend bool operator==(const LatticePoint& a, const LatticePoint& b) {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }
  // Lexicographic on coordinates (dimension first).
  friend std::strong_ordering operator<=>(const LatticePoint& a, const LatticePoint& b);

 private:
  std::array<int, kMaxDim> c_{};
  int dim_ = 0;
};

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const noexcept;
};

Json to_json(const LatticePoint& p);

// l1 (graph) distance. Throws UsageError on dimension mismatch.
int graph_distance(const LatticePoint& x, const LatticePoint& y);
int l1_norm(const LatticePoint& x);
std::int64_t euclidean_norm_sq(const LatticePoint& x);

// True iff n + |z_1| + ... + |z_d| is even.
bool same_parity(long n, const LatticePoint& z);

// Finite subset D of Z^d with its outer boundary dD and inner boundary d_i D.
//
// Interior and boundary points are stored in lexicographic order and indexed
// densely. For every interior index i and direction k in [0, 2d) (k = 2*axis
// for +e_axis, 2*axis+1 for -e_axis) the neighbor table holds either the
// interior index of x_i +/- e_axis, or -(b+1) where b is its boundary index.
class Domain {
 public:
  static Domain ball(const LatticePoint& center, int radius);
  // Deduplicates and sorts. Throws UsageError on empty input or mixed dims.
  static Domain from_points(std::vector<LatticePoint> points);

  int dim() const { return dim_; }
  std::size_t size() const { return interior_.size(); }
  std::span<const LatticePoint> interior() const { return interior_; }
  std::span<const LatticePoint> outer_boundary() const { return outer_; }
  std::span<const LatticePoint> inner_boundary() const { return inner_; }
  const LatticePoint& point(std::size_t i) const { return interior_[i]; }
  const LatticePoint& boundary_point(std::size_t b) const { return outer_[b]; }

  std::optional<int> index_of(const LatticePoint& p) const;
  std::optional<int> boundary_index_of(const LatticePoint& p) const;
  bool contains(const LatticePoint& p) const { return index_of(p).has_value(); }
  bool on_boundary(const LatticePoint& p) const { return boundary_index_of(p).has_value(); }

  int neighbor(std::size_t i, int dir) const {
    return neighbors_[i * static_cast<std::size_t>(2 * dim_) + static_cast<std::size_t>(dir)];
  }
  std::span<const int> neighbors(std::size_t i) const {
    return {neighbors_.data() + i * static_cast<std::size_t>(2 * dim_),
            static_cast<std::size_t>(2 * dim_)};
  }

  // Interior neighbors of boundary point b (the points that step onto it).
  std::span<const int> boundary_feeders(std::size_t b) const;

  bool is_ball() const { return radius_.has_value(); }
  const LatticePoint& center() const { return center_; }
  int radius() const { return radius_.value_or(-1); }

  Json descriptor() const;

 private:
  Domain() = default;
  void build(std::vector<LatticePoint> points);

  int dim_ = 0;
  LatticePoint center_;
  std::optional<int> radius_;
  std::vector<LatticePoint> interior_;
  std::vector<LatticePoint> outer_;
  std::vector<LatticePoint> inner_;
  std::unordered_map<LatticePoint, int, LatticePointHash> index_;
  std::unordered_map<LatticePoint, int, LatticePointHash> boundary_index_;
  std::vector<int> neighbors_;
  std::vector<int> feeder_offsets_;
  std::vector<int> feeders_;
};

using DomainPtr = std::shared_ptr<const Domain>;

inline DomainPtr make_ball(const LatticePoint& center, int radius) {
  return std::make_shared<const Domain>(Domain::ball(center, radius));
}

// All points with d(x, center) <= radius in lexicographic order.
std::vector<LatticePoint> enumerate_ball(const LatticePoint& center, int radius);

// |B(0, r)| in Z^d, counted combinatorially: sum_k 2^k C(d,k) C(r,k).
std::int64_t ball_volume(int dim, int radius);

// V1 = min over 1 <= r <= r_max of |B(0,r)| / r^d.
AuditReport volume_audit(int dim, int r_max);

// Overlapping chain of small balls joining u to v inside B(x0, R).
struct BallChain {
  LatticePoint x0;
  int radius = 0;        // R
  int small_radius = 0;  // floor(R/8)
  int half_radius = 0;   // floor(R/2)
  std::vector<LatticePoint> centers;
  std::vector<LatticePoint> overlap_points;  // x_j in B(z_j) and B(z_{j+1})

  std::size_t length() const { return centers.size(); }
};

// Centers placed along an l1 geodesic from u to v at spacing floor(R/8). The
// geodesic first moves every coordinate toward x0 and then away from it, so it
// never leaves B(x0, max(d(u,x0), d(v,x0))). Throws DomainError for R <= 32 and
// UsageError when u or v lies outside B(x0, floor(R/2)).
BallChain build_ball_chain(const LatticePoint& x0, int R, const LatticePoint& u,
                           const LatticePoint& v);

// Checks the three chain invariants directly; returns false on any violation.
bool verify_ball_chain(const BallChain& chain, const LatticePoint& u, const LatticePoint& v);

// Chain length the constructor produces for a pair at l1 distance `dist`.
int chain_length_for_distance(int R, int dist);

// A monotone l1 geodesic from u to v (both endpoints included) that first
// moves toward `anchor` in every coordinate, then away.
std::vector<LatticePoint> anchored_geodesic(const LatticePoint& u, const LatticePoint& v,
                                            const LatticePoint& anchor);

// Random point of B(center, radius): uniform radius, then a uniform split of it
// across coordinates with random signs. Draws from `next_below`.
template <typename Stream>
LatticePoint random_ball_point(const LatticePoint& center, int radius, Stream& rng);

// Builds and verifies chains for `instances` random (R, u, v) with R in
// [33, r_max] and u, v in the half ball. Records the largest N seen against the
// cap max_R chain_length_for_distance(R, 2 floor(R/2)).
AuditReport ball_chain_audit(int dim, int instances, std::uint64_t seed, int r_max = 256);

template <typename Stream>
LatticePoint random_ball_point(const LatticePoint& center, int radius, Stream& rng) {
  const int dim = center.dim();
  const int rho = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(radius + 1)));
  // Stars and bars: dim - 1 cut points in [0, rho].
  std::array<int, kMaxDim + 1> cuts{};
  for (int i = 0; i + 1 < dim; ++i) {
    cuts[static_cast<std::size_t>(i)] =
        static_cast<int>(rng.next_below(static_cast<std::uint32_t>(rho + 1)));
  }
  cuts[static_cast<std::size_t>(dim - 1)] = rho;
  std::sort(cuts.begin(), cuts.begin() + dim - 1);
  LatticePoint p = center;
  int prev = 0;
  for (int i = 0; i < dim; ++i) {
    const int part = cuts[static_cast<std::size_t>(i)] - prev;
    prev = cuts[static_cast<std::size_t>(i)];
    p[i] += rng.next_below(2) ? part : -part;
  }
  return p;
}

}  // namespace zdpot
