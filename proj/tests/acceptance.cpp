// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "zdpot/bounds.hpp"
#include "zdpot/ehi.hpp"
#include "zdpot/exit_time.hpp"
#include "zdpot/green.hpp"
#include "zdpot/harmonic.hpp"
#include "zdpot/kernel.hpp"

using namespace zdpot;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s,
               const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < budget_s, "runtime budget " + std::to_string(budget_s) + " s");
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s (%.2f s):%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs,
              o.detail.str().c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  criterion(1, "kernel exactness d=1,2,3", 60.0, [](Outcome& o) {
    for (int d = 1; d <= 3; ++d) {
      const AuditReport r = kernel_audit(d, d == 3 ? 64 : 128);
      o.detail << " d" << d << " norm_err=" << r.constants.at("max_normalization_error")
               << " p2=" << r.constants.at("p2_origin");
      o.require(r.constants.at("max_normalization_error") <= 1e-12, "normalization d" + std::to_string(d));
      o.require(r.details["parity_violations"] == 0, "parity zeros d" + std::to_string(d));
      o.require(r.constants.at("p2_origin") == 1.0 / (2.0 * d), "p2(0,0) d" + std::to_string(d));
    }
  });

  criterion(2, "projection law d=2 onto coordinate 1, n<=64", 30.0, [](Outcome& o) {
    FreeField f = FreeField::point_mass(LatticePoint(2));
    double worst = 0.0;
    for (int n = 0; n <= 64; ++n) {
      const auto marg = f.marginal(0);
      const auto want = oracle::lazy_distribution(2, n);
      o.require(marg.size() == want.size(), "marginal support n=" + std::to_string(n));
      for (std::size_t u = 0; u < want.size() && u < marg.size(); ++u) {
        worst = std::max(worst, std::abs(marg[u] - want[u]));
      }
      f = f.stepped();
    }
    o.detail << " max_abs_diff=" << worst;
    o.require(worst <= 1e-12, "projection within 1e-12");
  });

  criterion(3, "Chernoff exit bound d=1,2, R=4..32, n<=4R^2", 120.0, [](Outcome& o) {
    for (int d = 1; d <= 2; ++d) {
      const AuditReport r = chernoff_audit(d, 4, 32, 4);
      o.detail << " d" << d << " rows=" << r.constants.at("rows")
               << " vacuous=" << r.constants.at("vacuous_rows")
               << " max_exact/bound=" << r.constants.at("max_exact_over_bound");
      o.require(r.constants.at("bound_violations") == 0.0, "violations d" + std::to_string(d));
      o.require(r.pass, "chernoff audit d" + std::to_string(d));
    }
  });

  criterion(4, "Green oracle series vs solve, rel 1e-8", 300.0, [](Outcome& o) {
    auto B = make_ball(LatticePoint{0}, 1);
    const GreenTable g = green_solve(B);
    const double want[3][3] = {{1.5, 1.0, 0.5}, {1.0, 2.0, 1.0}, {0.5, 1.0, 1.5}};
    double table_err = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) table_err = std::max(table_err, std::abs(g(i, j) - want[i][j]));
    }
    o.detail << " d1_B1_table_err=" << table_err;
    o.require(table_err <= 1e-12, "d=1 B(0,1) table");
    double worst = 0.0;
    for (int d = 1; d <= 3; ++d) {
      for (int R : d == 3 ? std::vector<int>{2, 4, 8} : std::vector<int>{2, 4, 8, 16}) {
        const AuditReport r = green_oracle_audit(d, R, 1e-8);
        worst = std::max(worst, r.constants.at("max_relative_difference"));
        o.require(r.pass, "d" + std::to_string(d) + " R" + std::to_string(R));
      }
    }
    o.detail << " max_rel_diff=" << worst;
  });

  criterion(5, "UGI windows ratio <= 10 and overlap", 600.0, [](Outcome& o) {
    const AuditReport d2 = ugi_audit(2, {8, 16, 32}, UgiOptions{10.0, 0});
    const AuditReport d3 = ugi_audit(3, {6, 8, 12}, UgiOptions{10.0, 0});
    for (const auto* r : {&d2, &d3}) {
      o.detail << " [G1max=" << r->constants.at("G1_max_over_R")
               << " G2min=" << r->constants.at("G2_min_over_R") << "]";
    }
    o.require(d2.pass, "d=2 windows");
    o.require(d3.pass, "d=3 windows");
  });

  criterion(6, "balayage exactness, 100 instances, d=1,2, R=4,8", 300.0, [](Outcome& o) {
    for (int d = 1; d <= 2; ++d) {
      const AuditReport r = balayage_audit(d, {4, 8}, 100, 2024);
      o.detail << " d" << d << " min_f=" << r.constants.at("min_charge")
               << " rel_err=" << r.constants.at("max_reconstruction_rel_error")
               << " offsupport=" << r.constants.at("max_offsupport_noise");
      o.require(r.constants.at("min_charge") >= -1e-12, "charge >= -1e-12 d" + std::to_string(d));
      o.require(r.constants.at("max_reconstruction_rel_error") < 1e-8, "reconstruction d" + std::to_string(d));
      o.require(r.constants.at("failures") == 0.0, "instance failures d" + std::to_string(d));
      o.require(r.pass, "balayage audit d" + std::to_string(d));
    }
  });

  criterion(7, "Dirichlet solve/iterate/MC, d=1,2, R=8, 1e5 samples", 120.0, [](Outcome& o) {
    for (int d = 1; d <= 2; ++d) {
      const AuditReport r = dirichlet_audit(d, 8, 100000, 99);
      o.detail << " d" << d << " solve-iter=" << r.constants.at("solve_vs_iterate_max_abs")
               << " mc_z=" << r.constants.at("mc_max_standard_errors");
      o.require(r.constants.at("solve_vs_iterate_max_abs") <= 1e-8, "solve vs iterate d" + std::to_string(d));
      o.require(r.constants.at("mc_max_standard_errors") <= 4.0, "MC within 4 SE d" + std::to_string(d));
      o.require(r.pass, "dirichlet audit d" + std::to_string(d));
    }
  });

  criterion(8, "EHI d=1: C(R) < 3 and gambler's-ruin form, R<=128", 120.0, [](Outcome& o) {
    double worst_err = 0.0, c_max = 0.0;
    for (int R = 1; R <= 128; ++R) {
      const double C = harnack_constant_exact(1, R).C;
      const double m = R / 2;
      const double closed = (R + 1.0 + m) / (R + 1.0 - m);
      worst_err = std::max(worst_err, std::abs(C - closed));
      c_max = std::max(c_max, C);
      o.require(C < 3.0, "C(" + std::to_string(R) + ") < 3");
    }
    o.detail << " C_max=" << c_max << " max_abs_err=" << worst_err;
    o.require(worst_err <= 1e-12, "closed form within 1e-12");
  });

  criterion(9, "EHI d=2: spread over R=8,16,24,32 <= 1.5; C <= 4^32 for R<=32", 900.0,
            [](Outcome& o) {
              double lo = INFINITY, hi = 0.0;
              for (int R : {8, 16, 24, 32}) {
                const double C = harnack_constant_exact(2, R).C;
                o.detail << " C(" << R << ")=" << C;
                lo = std::min(lo, C);
                hi = std::max(hi, C);
              }
              o.detail << " spread=" << hi / lo;
              o.require(hi / lo <= 1.5, "max/min <= 1.5");
              std::vector<int> all;
              for (int R = 1; R <= 32; ++R) all.push_back(R);
              const AuditReport small = small_r_bound_audit(2, all);
              o.require(small.pass, "C(R) <= (2d)^32 and one-step bound");
            });

  criterion(10, "Gaussian fits d=2 n<=64 and 200 chain certificates", 300.0, [](Outcome& o) {
    const AuditReport lo = gaussian_lower_audit(2, 64);
    const AuditReport up = gaussian_upper_audit(2, 64);
    const AuditReport cert = chain_certificate_audit(2, 200, 7);
    o.detail << " L1=" << lo.constants.at("L1") << " L2=" << lo.constants.at("L2")
             << " U1=" << up.constants.at("U1") << " U2=" << up.constants.at("U2")
             << " certificates=" << cert.constants.at("built") << " invalid=" << cert.constants.at("invalid");
    o.require(lo.constants.at("L1") > 0.0 && lo.pass, "L1 > 0");
    o.require(up.constants.at("U1") > 0.0 && up.pass, "U1 > 0");
    o.require(cert.constants.at("built") == 200.0, "200 certificates built");
    o.require(cert.constants.at("invalid") == 0.0, "every certificate <= exact");
  });

  criterion(11, "LCLT scan d=2 n in [16,128]: max <= 2x value at n=16", 120.0, [](Outcome& o) {
    const AuditReport r = lclt_error_scan(2, 16, 128);
    const double first = r.constants.at("scaled_error_at_n_lo");
    const double mx = r.constants.at("scaled_error_max");
    o.detail << " e16=" << first << " max=" << mx << " ratio=" << mx / first;
    o.require(mx <= 2.0 * first, "max <= 2 e_16");
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
