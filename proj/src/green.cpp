#include "zdpot/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "zdpot/errors.hpp"
#include "zdpot/kernel.hpp"
#include "zdpot/parallel.hpp"

namespace zdpot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw UsageError("bad dimension " + std::to_string(dim));
}

std::vector<int> half_ball_indices(const Domain& B, int half) {
  std::vector<int> out;
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (graph_distance(B.point(i), B.center()) <= half) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

// ----------------------------------------------------------------- series

GreenRow green_series(DomainPtr B, const LatticePoint& x, double tol, int max_steps) {
  if (!(tol > 0.0)) throw UsageError("green_series: tol must be positive");
  KilledField field = KilledField::point_mass(B, x);
  GreenRow row;
  row.x = x;
  row.values.assign(B->size(), 0.0);
  double s_prev2 = 1.0;
  double s_prev = 1.0;
  for (int n = 0;; ++n) {
    const auto vals = field.values();
    for (std::size_t i = 0; i < vals.size(); ++i) row.values[i] += vals[i];
    const double s = field.total();
    if (s == 0.0) {
      row.steps = n;
      row.tail_bound = 0.0;
      return row;
    }
    if (n >= 2) {
      const double lambda = std::max(s / s_prev, s_prev / s_prev2);
      if (lambda < 1.0) {
        const double tail = s * lambda / (1.0 - lambda);
        if (tail < tol) {
          row.steps = n;
          row.tail_bound = tail;
          return row;
        }
      }
    }
    if (n >= max_steps) {
      throw TruncationError("green_series: no convergence after " + std::to_string(max_steps) +
                            " steps (survival " + std::to_string(s) + ")");
    }
    s_prev2 = s_prev;
    s_prev = s;
    field.step_in_place();
  }
}

// ------------------------------------------------------------- GreenTable

GreenTable::GreenTable(DomainPtr domain, std::vector<double> values, GreenMethod method)
    : domain_(std::move(domain)), values_(std::move(values)), method_(method) {
  if (values_.size() != domain_->size() * domain_->size()) {
    throw UsageError("GreenTable: value count does not match |B|^2");
  }
}

double GreenTable::at(const LatticePoint& x, const LatticePoint& y) const {
  const auto i = domain_->index_of(x);
  const auto j = domain_->index_of(y);
  if (!i || !j) throw DomainError("GreenTable::at: point outside the domain");
  return (*this)(static_cast<std::size_t>(*i), static_cast<std::size_t>(*j));
}

double GreenTable::symmetry_error() const {
  double worst = 0.0;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = (*this)(i, j);
      const double b = (*this)(j, i);
      const double scale = std::max(std::abs(a), std::abs(b));
      if (scale > 0.0) worst = std::max(worst, std::abs(a - b) / scale);
    }
  }
  return worst;
}

Eigen::MatrixXd green_columns(const KilledOperator& op, std::span<const int> cols,
                              unsigned threads) {
  const auto n = static_cast<Eigen::Index>(op.size());
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(cols.size()));
  parallel_for(cols.size(), threads, [&](std::size_t j) {
    out.col(static_cast<Eigen::Index>(j)) = op.green_column(static_cast<std::size_t>(cols[j]));
  });
  return out;
}

GreenTable green_solve(DomainPtr B, unsigned threads) {
  const KilledOperator op(B);
  const std::size_t n = B->size();
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  const Eigen::MatrixXd G = green_columns(op, all, threads);

  double residual = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    e[static_cast<Eigen::Index>(j)] = 1.0;
    residual = std::max(residual, op.residual(G.col(static_cast<Eigen::Index>(j)), e));
  }
  if (residual > 1e-10) {
    throw SolverError("green_solve: residual " + std::to_string(residual) + " above 1e-10",
                      residual);
  }
  std::vector<double> values(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      values[i * n + j] = G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  GreenTable table(std::move(B), std::move(values), GreenMethod::Solve);
  table.residual = residual;
  return table;
}

GreenTable green_series_table(DomainPtr B, double tol, unsigned threads) {
  const std::size_t n = B->size();
  std::vector<double> values(n * n);
  std::vector<int> steps(n);
  std::vector<double> tails(n);
  parallel_for(n, threads, [&](std::size_t i) {
    GreenRow row = green_series(B, B->point(i), tol);
    std::copy(row.values.begin(), row.values.end(),
              values.begin() + static_cast<std::ptrdiff_t>(i * n));
    steps[i] = row.steps;
    tails[i] = row.tail_bound;
  });
  GreenTable table(std::move(B), std::move(values), GreenMethod::Series);
  table.max_steps = *std::max_element(steps.begin(), steps.end());
  table.residual = *std::max_element(tails.begin(), tails.end());
  return table;
}

// ------------------------------------------------------------------ audits

AuditReport green_oracle_audit(int dim, int R, double rel_tol, unsigned threads) {
  require_dim(dim);
  if (R < 1) throw UsageError("green_oracle_audit: R must be >= 1");
  auto B = make_ball(LatticePoint(dim), R);
  const GreenTable solved = green_solve(B, threads);
  const GreenTable series = green_series_table(B, 1e-15, threads);

  AuditReport rep;
  rep.id = "green_oracle";
  rep.grid = {{"dim", dim}, {"R", R}, {"size", B->size()}};
  double worst = 0.0;
  std::size_t wi = 0, wj = 0;
  double min_diag = kInf;
  double min_entry = kInf;
  const std::size_t n = B->size();
  for (std::size_t i = 0; i < n; ++i) {
    min_diag = std::min(min_diag, solved(i, i));
    for (std::size_t j = 0; j < n; ++j) {
      const double a = solved(i, j);
      const double b = series(i, j);
      min_entry = std::min(min_entry, a);
      const double rel = std::abs(a - b) / std::max(std::abs(a), std::abs(b));
      if (rel > worst) {
        worst = rel;
        wi = i;
        wj = j;
      }
    }
  }
  rep.constants["max_relative_difference"] = worst;
  rep.constants["solve_residual"] = solved.residual;
  rep.constants["series_tail_bound"] = series.residual;
  rep.constants["series_max_steps"] = series.max_steps;
  rep.constants["solve_symmetry_error"] = solved.symmetry_error();
  rep.constants["min_diagonal"] = min_diag;
  rep.constants["min_entry"] = min_entry;
  rep.witness = {{"x", to_json(B->point(wi))}, {"y", to_json(B->point(wj))},
                 {"solve", solved(wi, wj)}, {"series", series(wi, wj)}};
  rep.pass = worst <= rel_tol && solved.symmetry_error() <= 1e-10 && min_diag >= 1.0 &&
             min_entry >= 0.0;
  return rep;
}

namespace {

struct Window {
  double lo = kInf;
  double hi = -kInf;
  LatticePoint lo_x, lo_y, hi_x, hi_y;

  void add(double v, const LatticePoint& x, const LatticePoint& y) {
    if (v < lo) {
      lo = v;
      lo_x = x;
      lo_y = y;
    }
    if (v > hi) {
      hi = v;
      hi_x = x;
      hi_y = y;
    }
  }
};

double comparability_from_columns(const Domain& B, const Eigen::MatrixXd& G,
                                  const std::vector<int>& cols, int R) {
  const int half = R / 2;
  const int quarter = R / 4;
  std::vector<int> quarter_rows;
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (graph_distance(B.point(i), B.center()) <= quarter) {
      quarter_rows.push_back(static_cast<int>(i));
    }
  }
  double worst = 1.0;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto& y = B.point(static_cast<std::size_t>(cols[j]));
    if (graph_distance(y, B.center()) != half) continue;  // inner boundary of the half ball
    double mx = -kInf, mn = kInf;
    for (int i : quarter_rows) {
      const double g = G(i, static_cast<Eigen::Index>(j));
      mx = std::max(mx, g);
      mn = std::min(mn, g);
    }
    worst = std::max(worst, mx / mn);
  }
  return worst;
}

}  // namespace

double green_comparability_ratio(int dim, int R) {
  require_dim(dim);
  if (R < 2) throw UsageError("green_comparability_ratio: R must be >= 2");
  auto B = make_ball(LatticePoint(dim), R);
  const KilledOperator op(B);
  const auto cols = half_ball_indices(*B, R / 2);
  const Eigen::MatrixXd G = green_columns(op, cols);
  return comparability_from_columns(*B, G, cols, R);
}

AuditReport ugi_audit(int dim, const std::vector<int>& radii, const UgiOptions& opts) {
  require_dim(dim);
  if (dim < 2) throw UsageError("ugi_audit: the uniform Green inequality is stated for d >= 2");
  if (radii.empty()) throw UsageError("ugi_audit: empty radius grid");
  AuditReport rep;
  rep.id = "ugi";
  rep.grid = {{"dim", dim}, {"radii", radii}, {"pair_restriction", "r <= R/2"}};
  rep.details["normalization"] = dim == 2 ? "g / log(R/r)" : "g * r^(d-2)";

  bool ok = true;
  double max_lo = -kInf, min_hi = kInf;
  Json per_r = Json::array();
  for (int R : radii) {
    if (R < 2) throw UsageError("ugi_audit: R must be >= 2");
    auto B = make_ball(LatticePoint(dim), R);
    const KilledOperator op(B);
    const auto cols = half_ball_indices(*B, R / 2);
    const Eigen::MatrixXd G = green_columns(op, cols, opts.threads);

    Window w, unrestricted;
    for (std::size_t a = 0; a < cols.size(); ++a) {
      const auto& x = B->point(static_cast<std::size_t>(cols[a]));
      for (std::size_t b = 0; b < cols.size(); ++b) {
        const auto& y = B->point(static_cast<std::size_t>(cols[b]));
        const int r = std::max(1, graph_distance(x, y));
        const double g = G(cols[a], static_cast<Eigen::Index>(b));
        double v;
        if (dim == 2) {
          if (r >= R) continue;
          v = g / std::log(static_cast<double>(R) / r);
        } else {
          v = g * std::pow(static_cast<double>(r), dim - 2);
        }
        unrestricted.add(v, x, y);
        if (2 * r <= R) w.add(v, x, y);
      }
    }
    const double comp = comparability_from_columns(*B, G, cols, R);
    const double ratio = w.hi / w.lo;
    const bool r_ok = w.lo > 0.0 && w.lo <= w.hi && std::isfinite(w.hi) &&
                      ratio <= opts.ratio_limit;
    ok = ok && r_ok;
    max_lo = std::max(max_lo, w.lo);
    min_hi = std::min(min_hi, w.hi);
    per_r.push_back({{"R", R},
                     {"G1", w.lo},
                     {"G2", w.hi},
                     {"ratio", ratio},
                     {"G1_witness", {to_json(w.lo_x), to_json(w.lo_y)}},
                     {"G2_witness", {to_json(w.hi_x), to_json(w.hi_y)}},
                     {"unrestricted_G1", unrestricted.lo},
                     {"unrestricted_G2", unrestricted.hi},
                     {"unrestricted_ratio", unrestricted.hi / unrestricted.lo},
                     {"comparability_ratio", comp},
                     {"symbolic_3^(d-2)G1/G2", std::pow(3.0, dim - 2) * w.lo / w.hi},
                     {"symbolic_3^(d-2)G2/G1", std::pow(3.0, dim - 2) * w.hi / w.lo},
                     {"pass", r_ok}});
  }
  const bool overlap = max_lo <= min_hi;
  rep.details["per_radius"] = per_r;
  rep.details["windows_overlap"] = overlap;
  rep.constants["G1_max_over_R"] = max_lo;
  rep.constants["G2_min_over_R"] = min_hi;
  rep.constants["ratio_limit"] = opts.ratio_limit;
  rep.witness = per_r.back();
  rep.pass = ok && overlap;
  return rep;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw UsageError("log_grid: bad range");
  std::vector<double> g(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) {
    g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  }
  return g;
}

AuditReport killed_lower_audit(int dim, const std::vector<int>& radii, unsigned threads) {
  require_dim(dim);
  if (radii.empty()) throw UsageError("killed_lower_audit: empty radius grid");
  const auto decays = log_grid(0.01, 10.0, 32);
  const std::size_t nc = decays.size();

  AuditReport rep;
  rep.id = "killed_lower";
  rep.grid = {{"dim", dim}, {"radii", radii}, {"decay_grid", decays}};
  bool ok = true;
  Json per_r = Json::array();
  for (int R : radii) {
    if (R < 2) throw UsageError("killed_lower_audit: R must be >= 2");
    auto B = make_ball(LatticePoint(dim), R);
    const auto H = half_ball_indices(*B, R / 2);
    const std::size_t nb = B->size();
    const std::size_t nh = H.size();
    const int n_top = R * R;

    // Killed fields for every start in the half ball, advanced together.
    std::vector<double> cur(nh * nb, 0.0), next(nh * nb, 0.0);
    for (std::size_t s = 0; s < nh; ++s) cur[s * nb + static_cast<std::size_t>(H[s])] = 1.0;
    auto advance = [&](const std::vector<double>& in, std::vector<double>& out) {
      parallel_for(nh, threads, [&](std::size_t s) {
        killed_step_values(*B, std::span<const double>(in.data() + s * nb, nb),
                           std::span<double>(out.data() + s * nb, nb));
      });
    };
    advance(cur, next);
    FreeField f_cur = FreeField::point_mass(LatticePoint(dim));
    FreeField f_next = f_cur.stepped();

    std::vector<double> kmin(nc, kInf), fmin(nc, kInf);
    struct Arg {
      int x = -1, y = -1, n = 0;
    };
    std::vector<Arg> karg(nc);
    for (int n = 0; n <= n_top; ++n) {
      if (n >= 1) {
        const double lognd = 0.5 * dim * std::log(static_cast<double>(n));
        for (std::size_t s = 0; s < nh; ++s) {
          const auto& x = B->point(static_cast<std::size_t>(H[s]));
          for (std::size_t t = 0; t < nh; ++t) {
            const auto yi = static_cast<std::size_t>(H[t]);
            const auto& y = B->point(yi);
            const int dist = graph_distance(x, y);
            if (std::max(1, dist) > n) continue;
            const double kv = cur[s * nb + yi] + next[s * nb + yi];
            const LatticePoint off = y - x;
            const double fv = f_cur.at_offset(off) + f_next.at_offset(off);
            const double lk = std::log(kv) + lognd;
            const double lf = std::log(fv) + lognd;
            const double q = static_cast<double>(dist) * dist / n;
            for (std::size_t c = 0; c < nc; ++c) {
              const double a = lk + decays[c] * q;
              if (a < kmin[c]) {
                kmin[c] = a;
                karg[c] = {H[s], H[t], n};
              }
              fmin[c] = std::min(fmin[c], lf + decays[c] * q);
            }
          }
        }
      }
      if (n == n_top) break;
      cur.swap(next);
      advance(cur, next);
      f_cur = std::move(f_next);
      f_next = f_cur.stepped();
    }

    std::size_t best = 0;
    for (std::size_t c = 1; c < nc; ++c) {
      if (kmin[c] > kmin[best]) best = c;
    }
    bool dominated = true;
    for (std::size_t c = 0; c < nc; ++c) dominated = dominated && kmin[c] <= fmin[c];
    const double A = std::exp(kmin[best]);
    const bool r_ok = A > 0.0 && dominated;
    ok = ok && r_ok;
    const auto& arg = karg[best];
    per_r.push_back({{"R", R},
                     {"A", A},
                     {"C", decays[best]},
                     {"free_L1_at_C", std::exp(fmin[best])},
                     {"killed_le_free_all_decays", dominated},
                     {"witness",
                      {{"x", to_json(B->point(static_cast<std::size_t>(arg.x)))},
                       {"y", to_json(B->point(static_cast<std::size_t>(arg.y)))},
                       {"n", arg.n}}},
                     {"pass", r_ok}});
    rep.constants["A_R" + std::to_string(R)] = A;
    rep.constants["C_R" + std::to_string(R)] = decays[best];
  }
  rep.details["per_radius"] = per_r;
  rep.witness = per_r.back()["witness"];
  rep.pass = ok;
  return rep;
}

}  // namespace zdpot
