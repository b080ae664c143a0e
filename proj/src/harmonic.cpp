#include "zdpot/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zdpot/errors.hpp"
#include "zdpot/parallel.hpp"

namespace zdpot {

namespace {

double neighbor_sum(const Domain& D, std::size_t i, const Eigen::VectorXd& interior,
                    const Eigen::VectorXd& boundary) {
  double acc = 0.0;
  for (int nb : D.neighbors(i)) acc += nb >= 0 ? interior[nb] : boundary[-(nb + 1)];
  return acc;
}

void require_boundary_size(const Domain& D, const Eigen::VectorXd& phi) {
  if (static_cast<std::size_t>(phi.size()) != D.outer_boundary().size()) {
    throw UsageError("boundary data has " + std::to_string(phi.size()) + " values, domain has " +
                     std::to_string(D.outer_boundary().size()) + " boundary points");
  }
}

Eigen::VectorXd uniform_boundary(const Domain& D, PathStream& rng) {
  Eigen::VectorXd phi(static_cast<Eigen::Index>(D.outer_boundary().size()));
  for (auto& v : phi) v = rng.next_double();
  return phi;
}

}  // namespace

LatticeField LatticeField::zeros(DomainPtr domain) {
  LatticeField f;
  f.interior = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain->size()));
  f.boundary = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain->outer_boundary().size()));
  f.domain = std::move(domain);
  return f;
}

double LatticeField::at(const LatticePoint& p) const {
  if (auto i = domain->index_of(p)) return interior[*i];
  if (auto b = domain->boundary_index_of(p)) return boundary[*b];
  throw DomainError("LatticeField::at: point outside the closure");
}

double LatticeField::min() const {
  double m = interior.size() ? interior.minCoeff() : std::numeric_limits<double>::infinity();
  if (boundary.size()) m = std::min(m, boundary.minCoeff());
  return m;
}

double LatticeField::max() const {
  double m = interior.size() ? interior.maxCoeff() : -std::numeric_limits<double>::infinity();
  if (boundary.size()) m = std::max(m, boundary.maxCoeff());
  return m;
}

double laplacian(const LatticeField& h, const LatticePoint& x) {
  const auto i = h.domain->index_of(x);
  if (!i) throw DomainError("laplacian: x has neighbors outside the field's closure");
  const Domain& D = *h.domain;
  const double w = 1.0 / (2.0 * D.dim());
  return w * neighbor_sum(D, static_cast<std::size_t>(*i), h.interior, h.boundary) - h.interior[*i];
}

Eigen::VectorXd laplacian(const LatticeField& h) {
  const Domain& D = *h.domain;
  const double w = 1.0 / (2.0 * D.dim());
  Eigen::VectorXd out(h.interior.size());
  for (std::size_t i = 0; i < D.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[k] = w * neighbor_sum(D, i, h.interior, h.boundary) - h.interior[k];
  }
  return out;
}

LatticeField dirichlet_solve(const KilledOperator& op, const Eigen::VectorXd& phi) {
  require_boundary_size(op.domain(), phi);
  const Eigen::VectorXd load = op.boundary_load(phi);
  LatticeField h;
  h.domain = op.domain_ptr();
  h.interior = op.solve(load);
  h.boundary = phi;
  const double res = op.residual(h.interior, load);
  if (res > 1e-10) {
    throw SolverError("dirichlet_solve: residual " + std::to_string(res) + " above 1e-10", res);
  }
  return h;
}

LatticeField dirichlet_solve(DomainPtr D, const Eigen::VectorXd& phi) {
  return dirichlet_solve(KilledOperator(std::move(D)), phi);
}

LatticeField dirichlet_iterate(DomainPtr D, const Eigen::VectorXd& phi, double tol, int max_iter) {
  require_boundary_size(*D, phi);
  const double w = 1.0 / (2.0 * D->dim());
  LatticeField h = LatticeField::zeros(D);
  h.boundary = phi;
  Eigen::VectorXd next(h.interior.size());
  for (int it = 0; it < max_iter; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < D->size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      next[k] = w * neighbor_sum(*D, i, h.interior, h.boundary);
      change = std::max(change, std::abs(next[k] - h.interior[k]));
    }
    h.interior.swap(next);
    if (change < tol) return h;
  }
  throw TruncationError("dirichlet_iterate: no convergence after " + std::to_string(max_iter) +
                        " sweeps");
}

McEstimate dirichlet_mc(DomainPtr D, const Eigen::VectorXd& phi, const LatticePoint& x,
                        std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  require_boundary_size(*D, phi);
  if (samples < 1) throw UsageError("dirichlet_mc: samples must be >= 1");
  const auto start = D->index_of(x);
  if (!start) throw DomainError("dirichlet_mc: x is not in D");
  const auto k2d = static_cast<std::uint32_t>(2 * D->dim());
  std::vector<double> values(samples);
  parallel_for(samples, threads, [&](std::size_t p) {
    PathStream rng(seed, p);
    int cur = *start;
    while (cur >= 0) cur = D->neighbor(static_cast<std::size_t>(cur), static_cast<int>(rng.next_below(k2d)));
    values[p] = phi[-(cur + 1)];
  });
  return summarize_samples(values, seed);
}

Eigen::VectorXd harmonic_measure(const KilledOperator& op, const LatticePoint& x) {
  const Domain& D = op.domain();
  const auto ix = D.index_of(x);
  if (!ix) throw DomainError("harmonic_measure: x is not in D");
  const Eigen::VectorXd g = op.green_column(static_cast<std::size_t>(*ix));
  const double w = 1.0 / (2.0 * D.dim());
  Eigen::VectorXd H(static_cast<Eigen::Index>(D.outer_boundary().size()));
  for (std::size_t b = 0; b < D.outer_boundary().size(); ++b) {
    double acc = 0.0;
    for (int f : D.boundary_feeders(b)) acc += g[f];
    H[static_cast<Eigen::Index>(b)] = w * acc;
  }
  return H;
}

EnergyCheck energy_identity(const LatticeField& h) {
  if (h.boundary.size() && h.boundary.cwiseAbs().maxCoeff() != 0.0) {
    throw UsageError("energy_identity: h must vanish on the boundary");
  }
  const Domain& D = *h.domain;
  const double w = 1.0 / (2.0 * D.dim());
  const Eigen::VectorXd lap = laplacian(h);
  EnergyCheck e;
  for (std::size_t i = 0; i < D.size(); ++i) {
    const double hx = h.interior[static_cast<Eigen::Index>(i)];
    for (int nb : D.neighbors(i)) {
      const double hy = nb >= 0 ? h.interior[nb] : 0.0;
      e.dirichlet_form += w * (hx - hy) * (hx - hy);
      // Ordered pair (boundary point, x) contributes the same square again.
      if (nb < 0) e.dirichlet_form += w * hx * hx;
    }
    e.minus_two_h_laplacian -= 2.0 * hx * lap[static_cast<Eigen::Index>(i)];
  }
  e.defect = std::abs(e.dirichlet_form - e.minus_two_h_laplacian);
  return e;
}

LatticeField random_harmonic(const KilledOperator& op, std::uint64_t seed) {
  PathStream rng(seed, 0);
  return dirichlet_solve(op, uniform_boundary(op.domain(), rng));
}

Json BalayageResult::to_json() const {
  Json f = Json::array();
  for (std::size_t k = 0; k < charge_points.size(); ++k) {
    f.push_back({{"point", zdpot::to_json(charge_points[k])}, {"f", charge[k]}});
  }
  return {{"A", A->descriptor()},
          {"B", swept.domain->descriptor()},
          {"charge", f},
          {"max_reconstruction_rel_error", max_reconstruction_rel_error},
          {"min_charge", min_charge},
          {"max_offsupport_noise", max_offsupport_noise},
          {"max_laplacian_on_support", max_laplacian_on_support},
          {"max_abs_laplacian_elsewhere", max_abs_laplacian_elsewhere}};
}

BalayageResult balayage(const KilledOperator& opB, const std::vector<LatticePoint>& A,
                        const LatticeField& h) {
  const Domain& B = opB.domain();
  if (h.domain->size() != B.size() || h.domain->outer_boundary().size() != B.outer_boundary().size()) {
    throw BalayageError("balayage: h is not defined on the closure of B");
  }
  if (A.empty()) throw BalayageError("balayage: A is empty");
  for (const auto& a : A) {
    if (!B.contains(a)) throw BalayageError("balayage: A is not contained in B");
  }
  BalayageResult res;
  res.A = std::make_shared<const Domain>(Domain::from_points(A));
  const Domain& dA = *res.A;
  if (dA.size() >= B.size()) throw BalayageError("balayage: A must be a strict subset of B");
  if (h.min() < -1e-12) throw BalayageError("balayage: h is negative");
  const double lap_h = laplacian(h).cwiseAbs().maxCoeff();
  if (lap_h > 1e-10) {
    throw BalayageError("balayage: h is not harmonic (max |Delta h| = " + std::to_string(lap_h) + ")");
  }

  // h_A: Dirichlet problem on B \ A, data h on A and 0 on dB.
  std::vector<LatticePoint> rest;
  for (const auto& p : B.interior()) {
    if (!dA.contains(p)) rest.push_back(p);
  }
  auto D = std::make_shared<const Domain>(Domain::from_points(std::move(rest)));
  Eigen::VectorXd data(static_cast<Eigen::Index>(D->outer_boundary().size()));
  for (std::size_t b = 0; b < D->outer_boundary().size(); ++b) {
    const auto& p = D->boundary_point(b);
    data[static_cast<Eigen::Index>(b)] = dA.contains(p) ? h.at(p) : 0.0;
  }
  const LatticeField inner = dirichlet_solve(D, data);
  res.swept = LatticeField::zeros(opB.domain_ptr());
  for (std::size_t i = 0; i < B.size(); ++i) {
    const auto& p = B.point(i);
    const auto k = static_cast<Eigen::Index>(i);
    res.swept.interior[k] = dA.contains(p) ? h.interior[k] : inner.at(p);
  }

  // f = (I - P^B) h_A = -Delta h_A, since h_A vanishes on dB.
  const Eigen::VectorXd f = opB.apply(res.swept.interior);
  res.min_charge = std::numeric_limits<double>::infinity();
  res.max_laplacian_on_support = -std::numeric_limits<double>::infinity();
  std::vector<int> support;
  for (std::size_t i = 0; i < B.size(); ++i) {
    const auto& p = B.point(i);
    const double v = f[static_cast<Eigen::Index>(i)];
    if (std::binary_search(dA.inner_boundary().begin(), dA.inner_boundary().end(), p)) {
      res.charge_points.push_back(p);
      res.charge.push_back(v);
      support.push_back(static_cast<int>(i));
      res.min_charge = std::min(res.min_charge, v);
      res.max_laplacian_on_support = std::max(res.max_laplacian_on_support, -v);
    } else {
      res.max_offsupport_noise = std::max(res.max_offsupport_noise, std::abs(v));
    }
  }
  res.max_abs_laplacian_elsewhere = res.max_offsupport_noise;
  if (res.max_offsupport_noise > 1e-10) {
    throw BalayageError("balayage: charge off the inner boundary of A is " +
                        std::to_string(res.max_offsupport_noise));
  }
  if (res.min_charge < -1e-12) {
    throw BalayageError("balayage: negative charge " + std::to_string(res.min_charge));
  }

  // Rebuild h on A from the Green columns over d_i A.
  std::vector<Eigen::VectorXd> cols;
  cols.reserve(support.size());
  for (int y : support) cols.push_back(opB.green_column(static_cast<std::size_t>(y)));
  LatticePoint worst_point;
  for (const auto& x : dA.interior()) {
    const int ix = *B.index_of(x);
    double u = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) u += cols[k][ix] * res.charge[k];
    res.reconstruction.push_back(u);
    const double target = h.interior[ix];
    const double err = target != 0.0 ? std::abs(u - target) / std::abs(target) : std::abs(u);
    if (err > res.max_reconstruction_rel_error) {
      res.max_reconstruction_rel_error = err;
      worst_point = x;
    }
  }
  if (res.max_reconstruction_rel_error > 1e-8) {
    std::string where;
    for (int i = 0; i < worst_point.dim(); ++i) where += (i ? "," : "") + std::to_string(worst_point[i]);
    throw BalayageError("balayage: reconstruction error " +
                        std::to_string(res.max_reconstruction_rel_error) + " at (" + where + ")");
  }
  return res;
}

std::vector<LatticePoint> random_subset(const Domain& B, PathStream& rng) {
  const auto n = static_cast<std::uint32_t>(B.size());
  std::vector<LatticePoint> A;
  if (rng.next_below(2) == 0) {
    const int r_cap = std::max(1, std::max(0, B.radius()) / 2);
    const int balls = 1 + static_cast<int>(rng.next_below(3));
    std::vector<LatticePoint> pts;
    for (int k = 0; k < balls; ++k) {
      const auto& c = B.point(rng.next_below(n));
      const int r = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(r_cap + 1)));
      for (const auto& p : enumerate_ball(c, r)) {
        if (B.contains(p)) pts.push_back(p);
      }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    A = std::move(pts);
  } else {
    const double keep = 0.1 + 0.8 * rng.next_double();
    for (const auto& p : B.interior()) {
      if (rng.next_double() < keep) A.push_back(p);
    }
  }
  if (A.empty()) A.push_back(B.point(rng.next_below(n)));
  if (A.size() == B.size()) A.erase(A.begin() + rng.next_below(n));
  return A;
}

AuditReport dirichlet_audit(int dim, int R, std::uint64_t samples, std::uint64_t seed,
                            unsigned threads) {
  if (R < 1) throw UsageError("dirichlet_audit: R must be >= 1");
  auto B = make_ball(LatticePoint(dim), R);
  const KilledOperator op(B);
  PathStream rng(seed, 0);
  const Eigen::VectorXd phi = uniform_boundary(*B, rng);

  const LatticeField solved = dirichlet_solve(op, phi);
  const LatticeField iterated = dirichlet_iterate(B, phi);
  const double solve_iterate = (solved.interior - iterated.interior).cwiseAbs().maxCoeff();
  const bool max_principle = solved.interior.minCoeff() >= phi.minCoeff() - 1e-12 &&
                             solved.interior.maxCoeff() <= phi.maxCoeff() + 1e-12;

  // Start points: center, half radius, and the inner boundary along axis 0.
  std::vector<LatticePoint> starts;
  for (int r : {0, R / 2, R}) {
    LatticePoint x(dim);
    x[0] = r;
    if (starts.empty() || starts.back() != x) starts.push_back(x);
  }
  double hm_consistency = 0.0;
  double hm_mass = 0.0;
  double worst_z = 0.0;
  Json mc_rows = Json::array();
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const auto& x = starts[k];
    const Eigen::VectorXd H = harmonic_measure(op, x);
    const double exact = solved.at(x);
    hm_consistency = std::max(hm_consistency, std::abs(H.dot(phi) - exact));
    hm_mass = std::max(hm_mass, std::abs(H.sum() - 1.0));
    const McEstimate mc = dirichlet_mc(B, phi, x, samples, seed + 1 + k, threads);
    const double gap = std::abs(mc.mean - exact);
    const double z = mc.std_error > 0.0 ? gap / mc.std_error
                                        : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    worst_z = std::max(worst_z, z);
    mc_rows.push_back({{"x", to_json(x)},
                       {"exact", exact},
                       {"mc", mc.mean},
                       {"std_error", mc.std_error},
                       {"z", z},
                       {"seed", mc.seed}});
  }

  // Energy identity on a random field with zero boundary data, and on the
  // (harmonic) difference of the two solutions.
  LatticeField noise = LatticeField::zeros(B);
  PathStream rng2(seed, 1);
  for (auto& v : noise.interior) v = 2.0 * rng2.next_double() - 1.0;
  const EnergyCheck e_noise = energy_identity(noise);
  LatticeField diff = LatticeField::zeros(B);
  diff.interior = solved.interior - iterated.interior;
  const EnergyCheck e_diff = energy_identity(diff);
  const double energy_rel = e_noise.defect / std::max(1.0, e_noise.dirichlet_form);

  AuditReport rep;
  rep.id = "dirichlet";
  rep.grid = {{"dim", dim}, {"R", R}, {"samples", samples}, {"seed", seed}};
  rep.constants["solve_vs_iterate_max_abs"] = solve_iterate;
  rep.constants["harmonic_measure_vs_solve_max_abs"] = hm_consistency;
  rep.constants["harmonic_measure_mass_error"] = hm_mass;
  rep.constants["mc_max_standard_errors"] = worst_z;
  rep.constants["energy_identity_rel_defect"] = energy_rel;
  rep.constants["energy_of_solution_difference"] = e_diff.dirichlet_form;
  rep.details["monte_carlo"] = mc_rows;
  rep.details["maximum_principle"] = max_principle;
  rep.witness = mc_rows[0];
  rep.pass = solve_iterate <= 1e-8 && hm_consistency <= 1e-10 && hm_mass <= 1e-10 &&
             worst_z <= 4.0 && energy_rel <= 1e-10 && e_diff.defect <= 1e-10 && max_principle;
  return rep;
}

AuditReport balayage_audit(int dim, const std::vector<int>& radii, int instances,
                           std::uint64_t seed, unsigned threads) {
  if (radii.empty() || instances < 1) throw UsageError("balayage_audit: empty grid");
  AuditReport rep;
  rep.id = "balayage";
  rep.grid = {{"dim", dim}, {"radii", radii}, {"instances", instances}, {"seed", seed}};
  double worst_err = 0.0;
  double min_charge = std::numeric_limits<double>::infinity();
  double worst_noise = 0.0;
  double worst_lap_support = -std::numeric_limits<double>::infinity();
  int failures = 0;
  Json failure_rows = Json::array();
  Json worst;
  for (int R : radii) {
    auto B = make_ball(LatticePoint(dim), R);
    const KilledOperator op(B);
    std::vector<BalayageResult> results(static_cast<std::size_t>(instances));
    std::vector<std::string> errors(static_cast<std::size_t>(instances));
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(instances));
    parallel_for(static_cast<std::size_t>(instances), threads, [&](std::size_t i) {
      const std::uint64_t s = seed ^ (static_cast<std::uint64_t>(R) << 32) ^ i;
      seeds[i] = s;
      try {
        const LatticeField h = random_harmonic(op, s);
        PathStream rng(s, 1);
        results[i] = balayage(op, random_subset(*B, rng), h);
      } catch (const BalayageError& e) {
        errors[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (!errors[i].empty()) {
        ++failures;
        failure_rows.push_back({{"R", R}, {"instance", i}, {"seed", seeds[i]}, {"error", errors[i]}});
        continue;
      }
      const auto& r = results[i];
      min_charge = std::min(min_charge, r.min_charge);
      worst_noise = std::max(worst_noise, r.max_offsupport_noise);
      worst_lap_support = std::max(worst_lap_support, r.max_laplacian_on_support);
      if (r.max_reconstruction_rel_error >= worst_err) {
        worst_err = r.max_reconstruction_rel_error;
        worst = {{"R", R}, {"instance", i}, {"seed", seeds[i]}, {"A_size", r.A->size()},
                 {"rel_error", worst_err}};
      }
    }
  }
  rep.constants["max_reconstruction_rel_error"] = worst_err;
  rep.constants["min_charge"] = min_charge;
  rep.constants["max_offsupport_noise"] = worst_noise;
  rep.constants["max_laplacian_hA_on_support"] = worst_lap_support;
  rep.constants["failures"] = failures;
  rep.details["failures"] = failure_rows;
  rep.witness = worst;
  rep.pass = failures == 0 && worst_err < 1e-8 && min_charge >= -1e-12 &&
             worst_lap_support <= 1e-12 && worst_noise <= 1e-12;
  return rep;
}

}  // namespace zdpot
