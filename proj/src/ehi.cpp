#include "zdpot/ehi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zdpot/errors.hpp"
#include "zdpot/green.hpp"
#include "zdpot/harmonic.hpp"
#include "zdpot/parallel.hpp"
#include "zdpot/rng.hpp"

namespace zdpot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> half_ball(const Domain& B) {
  std::vector<int> out;
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (graph_distance(B.point(i), B.center()) <= B.radius() / 2) out.push_back(static_cast<int>(i));
  }
  return out;
}

struct Extremes {
  double lo = kInf, hi = -kInf;
  int arg_lo = -1, arg_hi = -1;
};

template <typename V>
Extremes extremes_over(const V& values, const std::vector<int>& idx) {
  Extremes e;
  for (int i : idx) {
    const double v = values[i];
    if (v < e.lo) {
      e.lo = v;
      e.arg_lo = i;
    }
    if (v > e.hi) {
      e.hi = v;
      e.arg_hi = i;
    }
  }
  return e;
}

HarnackRecord record_from_kernels(const Domain& B, const Eigen::MatrixXd& K) {
  const auto H = half_ball(B);
  HarnackRecord rec;
  rec.dim = B.dim();
  rec.R = B.radius();
  rec.branch = rec.R <= 32 ? "small_R" : "chained";
  rec.C = 0.0;
  for (Eigen::Index z = 0; z < K.cols(); ++z) {
    const Extremes e = extremes_over(K.col(z), H);
    if (!(e.lo > 0.0)) {
      throw DomainError("harmonic measure kernel vanishes on the half ball (R = " +
                        std::to_string(rec.R) + ")");
    }
    const double ratio = e.hi / e.lo;
    if (ratio > rec.C) {
      rec.C = ratio;
      rec.z = B.boundary_point(static_cast<std::size_t>(z));
      rec.x = B.point(static_cast<std::size_t>(e.arg_hi));
      rec.y = B.point(static_cast<std::size_t>(e.arg_lo));
      rec.h_max = e.hi;
      rec.h_min = e.lo;
    }
  }
  return rec;
}

}  // namespace

Json HarnackRecord::to_json() const {
  return {{"dim", dim},
          {"R", R},
          {"C", C},
          {"z", zdpot::to_json(z)},
          {"x", zdpot::to_json(x)},
          {"y", zdpot::to_json(y)},
          {"h_max", h_max},
          {"h_min", h_min},
          {"log_h_max", std::log(h_max)},
          {"log_h_min", std::log(h_min)},
          {"branch", branch}};
}

Eigen::MatrixXd boundary_kernels(const KilledOperator& op, unsigned threads) {
  const Domain& B = op.domain();
  const auto nb = static_cast<Eigen::Index>(B.outer_boundary().size());
  Eigen::MatrixXd K(static_cast<Eigen::Index>(B.size()), nb);
  parallel_for(static_cast<std::size_t>(nb), threads, [&](std::size_t z) {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(nb);
    phi[static_cast<Eigen::Index>(z)] = 1.0;
    K.col(static_cast<Eigen::Index>(z)) = op.solve(op.boundary_load(phi));
  });
  return K;
}

HarnackRecord harnack_constant_exact(int dim, int R, unsigned threads) {
  if (R < 1) throw UsageError("harnack_constant_exact: R must be >= 1");
  auto B = make_ball(LatticePoint(dim), R);
  const KilledOperator op(B);
  return record_from_kernels(*B, boundary_kernels(op, threads));
}

double d1_harnack_closed_form(int R) {
  const double m = R / 2;
  return (R + 1.0 + m) / (R + 1.0 - m);
}

AuditReport small_r_bound_audit(int dim, const std::vector<int>& radii, unsigned threads) {
  if (radii.empty()) throw UsageError("small_r_bound_audit: empty radius grid");
  AuditReport rep;
  rep.id = "ehi_small_r";
  rep.grid = {{"dim", dim}, {"radii", radii}};
  const double log_cap = 32.0 * std::log(2.0 * dim);
  bool ok = true;
  double worst_step = kInf;
  Json rows = Json::array();
  for (int R : radii) {
    if (R < 1 || R > 32) throw UsageError("small_r_bound_audit: radii must lie in [1, 32]");
    auto B = make_ball(LatticePoint(dim), R);
    const KilledOperator op(B);
    const Eigen::MatrixXd K = boundary_kernels(op, threads);
    const HarnackRecord rec = record_from_kernels(*B, K);
    // One-step bound 2d h(x) >= h(y) for x in B, y ~ x, over every kernel.
    double step = kInf;
    for (Eigen::Index z = 0; z < K.cols(); ++z) {
      for (std::size_t i = 0; i < B->size(); ++i) {
        const double hx = K(static_cast<Eigen::Index>(i), z);
        for (int nb : B->neighbors(i)) {
          const double hy = nb >= 0 ? K(nb, z) : (-(nb + 1) == z ? 1.0 : 0.0);
          if (hy > 0.0) step = std::min(step, 2.0 * dim * hx / hy);
        }
      }
    }
    worst_step = std::min(worst_step, step);
    const bool r_ok = std::log(rec.C) <= log_cap && step >= 1.0 - 1e-12;
    ok = ok && r_ok;
    rows.push_back({{"R", R}, {"C", rec.C}, {"log_C", std::log(rec.C)}, {"log_cap", log_cap},
                    {"min_one_step_ratio", step}, {"record", rec.to_json()}, {"pass", r_ok}});
  }
  rep.details["per_radius"] = rows;
  rep.constants["log_cap"] = log_cap;
  rep.constants["min_one_step_ratio"] = worst_step;
  rep.witness = rows.back()["record"];
  rep.pass = ok;
  return rep;
}

AuditReport harnack_scale_audit(int dim, const std::vector<int>& radii, int mixtures,
                                std::uint64_t seed, double spread_limit, unsigned threads) {
  if (radii.empty()) throw UsageError("harnack_scale_audit: empty radius grid");
  AuditReport rep;
  rep.id = "ehi_scale";
  rep.grid = {{"dim", dim}, {"radii", radii}, {"mixtures", mixtures}, {"seed", seed},
              {"spread_limit", spread_limit}};
  double c_min = kInf, c_max = 0.0;
  double closed_form_err = 0.0;
  double worst_mixture_slack = kInf;  // C(R) / mixture ratio
  bool ok = true;
  Json rows = Json::array();
  rep.table.header = {"R", "C", "z", "x", "y"};
  for (int R : radii) {
    auto B = make_ball(LatticePoint(dim), R);
    const KilledOperator op(B);
    const Eigen::MatrixXd K = boundary_kernels(op, threads);
    const HarnackRecord rec = record_from_kernels(*B, K);
    c_min = std::min(c_min, rec.C);
    c_max = std::max(c_max, rec.C);
    Json row = {{"R", R}, {"record", rec.to_json()}};
    if (dim == 1) {
      const double err = std::abs(rec.C - d1_harnack_closed_form(R));
      closed_form_err = std::max(closed_form_err, err);
      row["closed_form"] = d1_harnack_closed_form(R);
      ok = ok && rec.C < 3.0;
    }
    const auto H = half_ball(*B);
    const auto nb = static_cast<Eigen::Index>(B->outer_boundary().size());
    for (int k = 0; k < mixtures; ++k) {
      PathStream rng(seed ^ (static_cast<std::uint64_t>(R) << 32), static_cast<std::uint64_t>(k));
      Eigen::VectorXd phi = Eigen::VectorXd::Zero(nb);
      if (k % 2 == 0) {
        for (auto& v : phi) v = rng.next_double();
      } else {  // a few heavy atoms
        const int atoms = 1 + static_cast<int>(rng.next_below(4));
        for (int a = 0; a < atoms; ++a) {
          phi[rng.next_below(static_cast<std::uint32_t>(nb))] += rng.next_double();
        }
      }
      if (phi.maxCoeff() == 0.0) continue;
      const Eigen::VectorXd h = K * phi;
      const Extremes e = extremes_over(h, H);
      worst_mixture_slack = std::min(worst_mixture_slack, rec.C / (e.hi / e.lo));
    }
    rows.push_back(row);
    rep.table.rows.push_back({std::to_string(R), format_double(rec.C), to_json(rec.z).dump(),
                              to_json(rec.x).dump(), to_json(rec.y).dump()});
  }
  const double spread = c_max / c_min;
  rep.details["per_radius"] = rows;
  rep.constants["C_min"] = c_min;
  rep.constants["C_max"] = c_max;
  rep.constants["spread"] = spread;
  rep.constants["min_C_over_mixture_ratio"] = worst_mixture_slack;
  if (dim == 1) rep.constants["closed_form_max_abs_error"] = closed_form_err;
  rep.witness = rows.back()["record"];
  ok = ok && spread <= spread_limit && worst_mixture_slack >= 1.0 - 1e-12;
  if (dim == 1) ok = ok && closed_form_err <= 1e-12;
  rep.pass = ok;
  return rep;
}

AuditReport chained_harnack_audit(int dim, const std::vector<int>& radii, unsigned threads) {
  if (radii.empty()) throw UsageError("chained_harnack_audit: empty radius grid");
  AuditReport rep;
  rep.id = "ehi_chained";
  rep.grid = {{"dim", dim}, {"radii", radii}};
  bool ok = true;
  Json rows = Json::array();
  for (int R : radii) {
    if (R <= 32) throw DomainError("chained_harnack_audit: R must exceed 32");
    const int half = R / 2;
    const double kappa = green_comparability_ratio(dim, half);
    const int N = chain_length_for_distance(R, 2 * half);
    const HarnackRecord rec = harnack_constant_exact(dim, R, threads);
    const LatticePoint x0(dim);
    const BallChain chain = build_ball_chain(x0, R, rec.x, rec.y);
    const bool chain_ok = verify_ball_chain(chain, rec.x, rec.y) &&
                          static_cast<int>(chain.length()) <= N;
    const double log_certified = N * std::log(kappa);
    const bool r_ok = chain_ok && std::log(rec.C) <= log_certified;
    ok = ok && r_ok;
    Json row = {{"R", R},
                {"kappa", kappa},
                {"N", N},
                {"witness_chain_length", chain.length()},
                {"log_certified", log_certified},
                {"C", rec.C},
                {"record", rec.to_json()},
                {"pass", r_ok}};
    if (dim >= 2) {
      const AuditReport ugi = ugi_audit(dim, {half}, UgiOptions{1e300, threads});
      const Json& u = ugi.details["per_radius"][0];
      row["symbolic_3^(d-2)G1/G2"] = u["symbolic_3^(d-2)G1/G2"];
      row["symbolic_3^(d-2)G2/G1"] = u["symbolic_3^(d-2)G2/G1"];
    }
    rows.push_back(row);
  }
  rep.details["per_radius"] = rows;
  rep.witness = rows.back();
  rep.pass = ok;
  return rep;
}

AuditReport oscillation_audit(int dim, const std::vector<int>& radii, int samples,
                              std::uint64_t seed, double delta_min, unsigned threads) {
  if (radii.empty()) throw UsageError("oscillation_audit: empty radius grid");
  AuditReport rep;
  rep.id = "oscillation";
  rep.grid = {{"dim", dim}, {"radii", radii}, {"samples", samples}, {"seed", seed},
              {"delta_min", delta_min}};
  bool ok = true;
  double delta_all = kInf;
  Json rows = Json::array();
  for (int R : radii) {
    auto B = make_ball(LatticePoint(dim), R);
    const KilledOperator op(B);
    const Eigen::MatrixXd K = boundary_kernels(op, threads);
    const HarnackRecord rec = record_from_kernels(*B, K);
    const auto H = half_ball(*B);
    const auto nb = static_cast<Eigen::Index>(B->outer_boundary().size());
    double worst = 0.0;
    Json arg;
    auto consider = [&](const Eigen::VectorXd& h, const Eigen::VectorXd& phi, Json tag) {
      const double osc_full = std::max(h.maxCoeff(), phi.maxCoeff()) -
                              std::min(h.minCoeff(), phi.minCoeff());
      if (osc_full == 0.0) return;  // constant h
      const Extremes e = extremes_over(h, H);
      const double ratio = (e.hi - e.lo) / osc_full;
      if (ratio > worst) {
        worst = ratio;
        arg = std::move(tag);
      }
    };
    for (Eigen::Index z = 0; z < nb; ++z) {
      Eigen::VectorXd phi = Eigen::VectorXd::Zero(nb);
      phi[z] = 1.0;
      consider(K.col(z), phi, {{"kernel", to_json(B->boundary_point(static_cast<std::size_t>(z)))}});
    }
    for (int k = 0; k < samples; ++k) {
      PathStream rng(seed ^ (static_cast<std::uint64_t>(R) << 32), static_cast<std::uint64_t>(k));
      Eigen::VectorXd phi(nb);
      for (auto& v : phi) v = rng.next_double();
      consider(K * phi, phi, {{"sample", k}});
    }
    const double delta = 1.0 - worst;
    const double implied = 2.0 / (rec.C + 1.0);
    const bool r_ok = delta >= delta_min && delta > 0.0 && delta <= 1.0 && delta >= implied - 1e-12;
    ok = ok && r_ok;
    delta_all = std::min(delta_all, delta);
    rows.push_back({{"R", R}, {"delta", delta}, {"C", rec.C}, {"one_over_C", 1.0 / rec.C},
                    {"two_over_C_plus_1", implied}, {"witness", arg}, {"pass", r_ok}});
  }
  rep.details["per_radius"] = rows;
  rep.constants["delta_min_observed"] = delta_all;
  rep.constants["delta_min_required"] = delta_min;
  rep.witness = rows.back();
  rep.pass = ok;
  return rep;
}

}  // namespace zdpot
