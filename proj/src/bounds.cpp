#include "zdpot/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "zdpot/errors.hpp"
#include "zdpot/green.hpp"
#include "zdpot/kernel.hpp"
#include "zdpot/rng.hpp"

namespace zdpot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw UsageError("bad dimension " + std::to_string(dim));
}

// Calls f(p_n, p_{n+1}) for n = 0..n_last, streaming the free fields.
template <typename F>
void for_each_pair(int dim, int n_last, F&& f) {
  FreeField cur = FreeField::point_mass(LatticePoint(dim));
  FreeField next = cur.stepped();
  for (int n = 0; n <= n_last; ++n) {
    f(n, cur, next);
    if (n == n_last) break;
    cur = std::move(next);
    next = cur.stepped();
  }
}

double log_sum(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Random point at l1 distance exactly R from the origin.
LatticePoint point_at_distance(int dim, int R, PathStream& rng) {
  std::vector<int> cuts(static_cast<std::size_t>(dim - 1));
  for (auto& c : cuts) c = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(R + 1)));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(R);
  LatticePoint p(dim);
  int prev = 0;
  for (int i = 0; i < dim; ++i) {
    const int part = cuts[static_cast<std::size_t>(i)] - prev;
    prev = cuts[static_cast<std::size_t>(i)];
    p[i] = rng.next_below(2) ? part : -part;
  }
  return p;
}

}  // namespace

double GaussianForm::operator()(const LatticePoint& offset, double n) const {
  const double dist2 = kind == DistanceKind::Graph
                           ? static_cast<double>(l1_norm(offset)) * l1_norm(offset)
                           : static_cast<double>(euclidean_norm_sq(offset));
  return A * std::pow(n, -0.5 * offset.dim()) * std::exp(-B * dist2 / n);
}

GaussianForm GaussianForm::lclt(int dim) {
  return {2.0 * std::pow(dim / (2.0 * std::numbers::pi), 0.5 * dim), 0.5 * dim,
          DistanceKind::Euclidean};
}

AuditReport lclt_error_scan(int dim, int n_lo, int n_hi, double radius_factor) {
  require_dim(dim);
  if (n_lo < 2 || n_hi > 128 || n_lo > n_hi) {
    throw UsageError("lclt_error_scan: n range must lie in [2, 128]");
  }
  if (!(radius_factor > 0.0)) throw UsageError("lclt_error_scan: radius_factor must be positive");
  const GaussianForm g = GaussianForm::lclt(dim);
  std::vector<double> scaled;
  AuditReport rep;
  rep.id = "lclt";
  rep.grid = {{"dim", dim}, {"n", {n_lo, n_hi}},
              {"radius_factor", std::isfinite(radius_factor) ? Json(radius_factor) : Json("inf")}};
  rep.table.header = {"n", "error", "scaled_error"};
  Json witness;
  double worst_scaled = 0.0;
  for_each_pair(dim, n_hi, [&](int n, const FreeField& p, const FreeField&) {
    if (n < n_lo) return;
    const double r2 = radius_factor * radius_factor * n;
    double e = 0.0;
    LatticePoint arg(dim);
    const auto vals = p.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const LatticePoint y = p.offset_of(i);
      if (!same_parity(n, y) || static_cast<double>(euclidean_norm_sq(y)) > r2) continue;
      const double err = std::abs(vals[i] - g(y, n));
      if (err > e) {
        e = err;
        arg = y;
      }
    }
    const double s = e * std::pow(static_cast<double>(n), 0.5 * dim + 1.0);
    scaled.push_back(s);
    rep.table.rows.push_back({std::to_string(n), format_double(e), format_double(s)});
    if (s > worst_scaled) {
      worst_scaled = s;
      witness = {{"n", n}, {"y", to_json(arg)}, {"error", e}, {"scaled_error", s}};
    }
  });
  const std::size_t count = scaled.size();
  const std::size_t q = std::max<std::size_t>(1, count / 4);
  const double top = *std::max_element(scaled.end() - static_cast<std::ptrdiff_t>(q), scaled.end());
  const double rest = count > q ? *std::max_element(scaled.begin(), scaled.end() - static_cast<std::ptrdiff_t>(q))
                                : top;
  rep.constants["A"] = g.A;
  rep.constants["B"] = g.B;
  rep.constants["scaled_error_at_n_lo"] = scaled.front();
  rep.constants["scaled_error_max"] = worst_scaled;
  rep.constants["max_over_first"] = worst_scaled / scaled.front();
  rep.constants["top_quartile_max"] = top;
  rep.constants["rest_max"] = rest;
  if (4 * n_lo <= n_hi) {
    rep.constants["ratio_4n_over_n"] =
        scaled[static_cast<std::size_t>(3 * n_lo)] / scaled.front();
  }
  rep.witness = witness;
  rep.pass = top <= 1.25 * rest;
  return rep;
}

AuditReport near_diagonal_audit(int dim, int n_max, double L) {
  require_dim(dim);
  if (n_max < 1 || n_max > 128) throw UsageError("near_diagonal_audit: n_max must be in [1, 128]");
  if (!(L > 0.0 && L < 1.0)) throw UsageError("near_diagonal_audit: L must be in (0,1)");
  double n1 = 0.0, n2 = kInf;
  Json w1, w2;
  std::size_t admissible = 0;
  for_each_pair(dim, n_max, [&](int n, const FreeField& p, const FreeField& q) {
    const auto pv = p.values();
    const double scale = std::pow(static_cast<double>(std::max(n, 1)), 0.5 * dim);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      if (pv[i] * scale > n1) {
        n1 = pv[i] * scale;
        w1 = {{"n", n}, {"y", to_json(p.offset_of(i))}};
      }
    }
    if (n == 0 || n == n_max) return;
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const LatticePoint y = p.offset_of(i);
      const double d = l1_norm(y);
      if (n < std::max(1.0, d * d) / (L * L)) continue;
      ++admissible;
      const double v = (pv[i] + q.at_offset(y)) * scale;
      if (v < n2) {
        n2 = v;
        w2 = {{"n", n}, {"y", to_json(y)}};
      }
    }
  });
  AuditReport rep;
  rep.id = "near_diagonal";
  rep.grid = {{"dim", dim}, {"n_max", n_max}, {"L", L}};
  rep.constants["N1"] = n1;
  rep.constants["N2"] = n2;
  rep.constants["admissible_points"] = static_cast<double>(admissible);
  rep.witness = {{"N1", w1}, {"N2", w2}};
  rep.pass = admissible > 0 && n2 > 0.0 && std::isfinite(n1);
  return rep;
}

std::vector<double> lower_decay_grid() { return log_grid(0.01, 10.0, 32); }

std::vector<double> upper_decay_grid() {
  return log_grid(std::numbers::ln2 / 1000.0, 0.99 * std::numbers::ln2, 32);
}

AuditReport gaussian_lower_audit(int dim, int n_max) {
  require_dim(dim);
  if (n_max < 1 || n_max > 128) throw UsageError("gaussian_lower_audit: n_max must be in [1, 128]");
  const auto grid = lower_decay_grid();
  std::vector<double> best(grid.size(), kInf);
  std::vector<Json> arg(grid.size());
  for_each_pair(dim, n_max, [&](int n, const FreeField& p, const FreeField& q) {
    if (n == 0) return;
    const auto pv = p.values();
    const double log_scale = 0.5 * dim * std::log(static_cast<double>(n));
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const LatticePoint y = p.offset_of(i);
      const int d = l1_norm(y);
      if (d > n) continue;
      const double lv = std::log(pv[i] + q.at_offset(y)) + log_scale;
      const double t = static_cast<double>(d) * d / n;
      for (std::size_t c = 0; c < grid.size(); ++c) {
        const double v = lv + grid[c] * t;
        if (v < best[c]) {
          best[c] = v;
          arg[c] = {{"n", n}, {"y", to_json(y)}};
        }
      }
    }
  });
  std::size_t pick = 0;
  for (std::size_t c = 1; c < grid.size(); ++c) {
    if (best[c] > best[pick]) pick = c;
  }
  AuditReport rep;
  rep.id = "gaussian_lower";
  rep.grid = {{"dim", dim}, {"n", {1, n_max}}, {"L2_grid", grid}};
  rep.table.header = {"L2", "L1"};
  for (std::size_t c = 0; c < grid.size(); ++c) {
    rep.table.rows.push_back({format_double(grid[c]), format_double(std::exp(best[c]))});
  }
  rep.constants["L1"] = std::exp(best[pick]);
  rep.constants["L2"] = grid[pick];
  rep.witness = arg[pick];
  rep.pass = std::exp(best[pick]) > 0.0;
  return rep;
}

AuditReport gaussian_upper_audit(int dim, int n_max) {
  require_dim(dim);
  if (n_max < 0 || n_max > 128) throw UsageError("gaussian_upper_audit: n_max must be in [0, 128]");
  const auto grid = upper_decay_grid();
  std::vector<double> best(grid.size(), -kInf);
  std::vector<Json> arg(grid.size());
  auto scan = [&](auto&& visit) {
    for_each_pair(dim, n_max, [&](int n, const FreeField& p, const FreeField&) {
      const auto pv = p.values();
      const double m = std::max(n, 1);
      for (std::size_t i = 0; i < pv.size(); ++i) {
        if (pv[i] == 0.0) continue;  // the bound holds trivially
        const LatticePoint y = p.offset_of(i);
        const double d = l1_norm(y);
        visit(n, y, pv[i], m, d * d / m);
      }
    });
  };
  scan([&](int n, const LatticePoint& y, double p, double m, double t) {
    const double lv = std::log(p) + 0.5 * dim * std::log(m);
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const double v = lv + grid[c] * t;
      if (v > best[c]) {
        best[c] = v;
        arg[c] = {{"n", n}, {"y", to_json(y)}};
      }
    }
  });
  std::size_t pick = 0;
  for (std::size_t c = 1; c < grid.size(); ++c) {
    if (best[c] <= best[pick]) pick = c;  // ties go to the larger decay
  }
  const double U1 = std::exp(best[pick]);
  const double U2 = grid[pick];
  std::size_t violations = 0;
  scan([&](int, const LatticePoint&, double p, double m, double t) {
    const double bound = U1 * std::pow(m, -0.5 * dim) * std::exp(-U2 * t);
    if (p > bound * (1.0 + 1e-12)) ++violations;
  });
  AuditReport rep;
  rep.id = "gaussian_upper";
  rep.grid = {{"dim", dim}, {"n", {0, n_max}}, {"U2_grid", grid}};
  rep.table.header = {"U2", "U1"};
  for (std::size_t c = 0; c < grid.size(); ++c) {
    rep.table.rows.push_back({format_double(grid[c]), format_double(std::exp(best[c]))});
  }
  rep.constants["U1"] = U1;
  rep.constants["U2"] = U2;
  rep.constants["violations"] = static_cast<double>(violations);
  rep.witness = arg[pick];
  rep.pass = violations == 0 && U1 >= 1.0 && std::isfinite(U1);
  return rep;
}

Json ChainCertificate::to_json() const {
  Json wp = Json::array();
  for (const auto& z : waypoints) wp.push_back(zdpot::to_json(z));
  return {{"x", zdpot::to_json(x)}, {"y", zdpot::to_json(y)}, {"n", n},  {"L", L},
          {"R", R},  {"m", m},  {"r", r},  {"s", s},  {"m_window", {m_lo, m_hi}},
          {"waypoints", wp}, {"times", times}, {"side_conditions", side_conditions},
          {"log_product", log_product}, {"log_direct", log_direct}, {"valid", valid}};
}

ChainCertificate chain_product(const LatticePoint& x, const LatticePoint& y, int n, double L,
                               int m) {
  const int dim = x.dim();
  if (dim > 2) throw UsageError("chain certificates use the closed-form kernel (d <= 2)");
  ChainCertificate c;
  c.x = x;
  c.y = y;
  c.n = n;
  c.L = L;
  c.R = graph_distance(x, y);
  if (m < 1 || m > std::max(1, c.R) || m > n) throw UsageError("chain_product: bad block count");
  c.m = m;
  c.r = c.R / m;
  c.s = n / m;
  const int seg_extra = c.R - m * c.r;
  const int time_extra = n - m * c.s;
  const auto path = anchored_geodesic(x, y, x);
  c.waypoints.push_back(x);
  int pos = 0;
  for (int i = 0; i < m; ++i) {
    pos += c.r + (i < seg_extra ? 1 : 0);
    c.waypoints.push_back(path[static_cast<std::size_t>(pos)]);
    c.times.push_back(c.s + (i < time_extra ? 1 : 0));
  }
  const double ls = L * std::sqrt(static_cast<double>(c.s));
  c.side_conditions = 3.0 * c.r + 1.0 <= ls && ls <= 16.0 * c.r;

  const auto ball = enumerate_ball(LatticePoint(dim), c.r);
  const std::vector<LatticePoint> origin_only{LatticePoint(dim)};
  std::map<std::tuple<LatticePoint, int, bool, bool>, double> memo;
  // log of min over start offsets a of the block probability.
  auto factor = [&](const LatticePoint& delta, int t, bool from_point, bool last) {
    const auto key = std::make_tuple(delta, t, from_point, last);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const auto& starts = from_point ? origin_only : ball;
    double worst = kInf;
    for (const auto& a : starts) {
      double lv;
      if (last) {
        const LatticePoint off = delta - a;
        lv = log_sum(log_free_probability_closed_form(off, t),
                     log_free_probability_closed_form(off, t + 1));
      } else {
        double acc = 0.0;
        for (const auto& b : ball) acc += free_probability_closed_form(delta + b - a, t);
        lv = std::log(acc);
      }
      worst = std::min(worst, lv);
    }
    memo.emplace(key, worst);
    return worst;
  };
  c.log_product = 0.0;
  for (int i = 1; i <= m; ++i) {
    const LatticePoint delta = c.waypoints[static_cast<std::size_t>(i)] -
                               c.waypoints[static_cast<std::size_t>(i - 1)];
    c.log_product += factor(delta, c.times[static_cast<std::size_t>(i - 1)], i == 1, i == m);
  }
  const LatticePoint off = y - x;
  c.log_direct = log_sum(log_free_probability_closed_form(off, n),
                         log_free_probability_closed_form(off, n + 1));
  c.valid = c.log_product <= c.log_direct;
  return c;
}

ChainCertificate chain_certificate(const LatticePoint& x, const LatticePoint& y, int n, double L) {
  if (x.dim() > 2) throw UsageError("chain certificates use the closed-form kernel (d <= 2)");
  if (!(L > 0.0 && L < 1.0)) throw UsageError("chain_certificate: L must be in (0,1)");
  const double R = graph_distance(x, y);
  const double L2 = L * L;
  if (!(64.0 * R / L2 <= n && n <= R * R / L2)) {
    throw InfeasibleCertificate("need 2^6 d(x,y)/L^2 <= n <= d(x,y)^2/L^2; got d(x,y)=" +
                                std::to_string(static_cast<int>(R)) + ", n=" + std::to_string(n) +
                                ", L=" + format_double(L));
  }
  const double lo = 32.0 * R * R / (L2 * n);
  const double hi = 64.0 * R * R / (L2 * n);
  const int m = static_cast<int>(std::ceil(lo));
  if (m > hi || m > R) throw InfeasibleCertificate("no integer m in the window");
  ChainCertificate c = chain_product(x, y, n, L, m);
  c.m_lo = lo;
  c.m_hi = hi;
  return c;
}

AuditReport chain_certificate_audit(int dim, int instances, std::uint64_t seed) {
  if (dim > 2) throw UsageError("chain certificates use the closed-form kernel (d <= 2)");
  if (instances < 1) throw UsageError("chain_certificate_audit: instances must be >= 1");
  AuditReport rep;
  rep.id = "chain_certificate";
  rep.grid = {{"dim", dim}, {"instances", instances}, {"seed", seed}, {"L", {0.3, 0.95}},
              {"R", {64, 160}}};
  int built = 0, invalid = 0, side_ok = 0, infeasible = 0;
  int m_min = 1 << 30, m_max = 0;
  double min_margin = kInf;
  for (int k = 0; k < instances; ++k) {
    PathStream rng(seed, static_cast<std::uint64_t>(k));
    double L;
    int R, n_lo, n_hi;
    do {  // at R = 64 the admissible n-range can round to empty
      L = 0.3 + 0.65 * rng.next_double();
      R = 64 + static_cast<int>(rng.next_below(97));
      n_lo = static_cast<int>(std::ceil(64.0 * R / (L * L)));
      n_hi = static_cast<int>(std::floor(static_cast<double>(R) * R / (L * L)));
    } while (n_lo > n_hi);
    const LatticePoint y = point_at_distance(dim, R, rng);
    const int n = n_lo + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n_hi - n_lo + 1)));
    try {
      const ChainCertificate c = chain_certificate(LatticePoint(dim), y, n, L);
      ++built;
      side_ok += c.side_conditions ? 1 : 0;
      m_min = std::min(m_min, c.m);
      m_max = std::max(m_max, c.m);
      const double margin = c.log_direct - c.log_product;
      if (!c.valid) ++invalid;
      if (margin < min_margin) {
        min_margin = margin;
        rep.witness = {{"instance", k}, {"L", L}, {"R", R}, {"n", n}, {"y", to_json(y)},
                       {"m", c.m}, {"log_product", c.log_product}, {"log_direct", c.log_direct}};
      }
    } catch (const InfeasibleCertificate&) {
      ++infeasible;
    }
  }
  rep.constants["built"] = built;
  rep.constants["invalid"] = invalid;
  rep.constants["infeasible"] = infeasible;
  rep.constants["side_conditions_met"] = side_ok;
  rep.constants["m_min"] = m_min;
  rep.constants["m_max"] = m_max;
  rep.constants["min_log_margin"] = min_margin;
  rep.pass = built == instances && invalid == 0;
  return rep;
}

}  // namespace zdpot
