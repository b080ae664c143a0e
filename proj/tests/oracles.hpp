#pragma once

// Independent reference computations for the unit and acceptance tests. None
// of these touch the library's kernels, domains or solvers; they enumerate
// paths, count points, or solve dense systems built from coordinates.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

using Point = std::vector<int>;

inline int l1(const Point& p) {
  int s = 0;
  for (int c : p) s += std::abs(c);
  return s;
}

// All points of the cube [-r, r]^d with |p|_1 <= r, lexicographic.
inline std::vector<Point> ball(int dim, int r) {
  std::vector<Point> out;
  Point p(static_cast<std::size_t>(dim), -r);
  while (true) {
    if (l1(p) <= r) out.push_back(p);
    int k = dim - 1;
    while (k >= 0 && p[static_cast<std::size_t>(k)] == r) {
      p[static_cast<std::size_t>(k)] = -r;
      --k;
    }
    if (k < 0) break;
    ++p[static_cast<std::size_t>(k)];
  }
  return out;
}

// p_n(0, .) by enumerating all (2d)^n paths; optionally killed outside
// |p|_1 <= kill_radius.
inline std::map<Point, double> enumerate_paths(int dim, int n, int kill_radius = -1) {
  std::map<Point, double> out;
  const double w = std::pow(1.0 / (2.0 * dim), n);
  Point p(static_cast<std::size_t>(dim), 0);
  std::function<void(int)> rec = [&](int left) {
    if (kill_radius >= 0 && l1(p) > kill_radius) return;
    if (left == 0) {
      out[p] += w;
      return;
    }
    for (int a = 0; a < dim; ++a) {
      for (int s : {1, -1}) {
        p[static_cast<std::size_t>(a)] += s;
        rec(left - 1);
        p[static_cast<std::size_t>(a)] -= s;
      }
    }
  };
  rec(n);
  return out;
}

// Distribution of the lazy chain with hold (d-1)/d after n steps, indexed by
// value + n, by repeated convolution.
inline std::vector<double> lazy_distribution(int dim, int n) {
  std::vector<double> cur{1.0};
  const double hold = (dim - 1.0) / dim, move = 1.0 / (2.0 * dim);
  for (int k = 0; k < n; ++k) {
    std::vector<double> next(cur.size() + 2, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      next[i] += move * cur[i];
      next[i + 1] += hold * cur[i];
      next[i + 2] += move * cur[i];
    }
    cur.swap(next);
  }
  return cur;
}

// Green function of the simple walk on {-R..R} killed at +-(R+1):
// g(x, y) = 2 (x+R+1)(R+1-y)/(2R+2) for x <= y.
inline double green_1d(int R, int x, int y) {
  if (x > y) std::swap(x, y);
  const double N = 2.0 * R + 2.0;
  return 2.0 * (x + R + 1.0) * (R + 1.0 - y) / N;
}

// Dense harmonic measure of B(0, R): column z holds P^x(X_tau = z) for every
// interior x, with boundary points ordered lexicographically.
struct DenseHarmonic {
  std::vector<Point> interior;
  std::vector<Point> boundary;
  Eigen::MatrixXd kernels;  // |interior| x |boundary|
};

inline DenseHarmonic dense_harmonic(int dim, int R) {
  DenseHarmonic out;
  out.interior = ball(dim, R);
  for (const Point& p : ball(dim, R + 1)) {
    if (l1(p) == R + 1) out.boundary.push_back(p);
  }
  std::map<Point, int> in_idx, bd_idx;
  for (std::size_t i = 0; i < out.interior.size(); ++i) in_idx[out.interior[i]] = static_cast<int>(i);
  for (std::size_t b = 0; b < out.boundary.size(); ++b) bd_idx[out.boundary[b]] = static_cast<int>(b);
  const auto n = static_cast<Eigen::Index>(out.interior.size());
  const auto m = static_cast<Eigen::Index>(out.boundary.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, m);
  const double w = 1.0 / (2.0 * dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    Point p = out.interior[static_cast<std::size_t>(i)];
    for (int a = 0; a < dim; ++a) {
      for (int s : {1, -1}) {
        p[static_cast<std::size_t>(a)] += s;
        if (auto it = in_idx.find(p); it != in_idx.end()) {
          A(i, it->second) -= w;
        } else {
          rhs(i, bd_idx.at(p)) += w;
        }
        p[static_cast<std::size_t>(a)] -= s;
      }
    }
  }
  out.kernels = A.partialPivLu().solve(rhs);
  return out;
}

}  // namespace oracle
