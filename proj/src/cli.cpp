#include "zdpot/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "zdpot/bounds.hpp"
#include "zdpot/cache.hpp"
#include "zdpot/ehi.hpp"
#include "zdpot/errors.hpp"
#include "zdpot/exit_time.hpp"
#include "zdpot/green.hpp"
#include "zdpot/harmonic.hpp"
#include "zdpot/kernel.hpp"
#include "zdpot/lattice.hpp"

namespace zdpot {

namespace {

const std::vector<std::string> kCommands = {"kernel",    "bounds",   "exit", "green",
                                            "dirichlet", "balayage", "ehi",  "all"};

std::vector<int> range(int lo, int hi) {
  std::vector<int> out;
  for (int r = lo; r <= hi; ++r) out.push_back(r);
  return out;
}

// Default grid restricted to [r_min, r_max] when either bound is given.
std::vector<int> radii(const RunConfig& cfg, std::vector<int> defaults) {
  const int lo = cfg.r_min.value_or(1);
  const int hi = cfg.r_max.value_or(std::numeric_limits<int>::max());
  std::erase_if(defaults, [&](int r) { return r < lo || r > hi; });
  return defaults;
}

std::vector<int> require_nonempty(std::vector<int> grid, const std::string& what) {
  if (grid.empty()) throw UsageError(what + ": radius range selects no grid point");
  return grid;
}

int default_n(int dim) { return dim <= 2 ? 128 : 64; }

class Runner {
 public:
  explicit Runner(const RunConfig& cfg) : cfg_(cfg) {}

  AuditRun take() { return std::move(run_); }

  void add(const std::string& id, const std::function<AuditReport()>& audit) {
    const auto t0 = std::chrono::steady_clock::now();
    AuditReport rep = audit();
    run_.seconds[id] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.id = id;
    run_.reports.push_back(std::move(rep));
  }

  void skip(const std::string& id, const std::string& reason) { run_.skipped.emplace_back(id, reason); }

  void kernel() {
    const int d = cfg_.dim;
    const int n = cfg_.n_max.value_or(default_n(d));
    add("kernel", [&] { return kernel_audit(d, n); });
    add("volume", [&] { return volume_audit(d, cfg_.r_max.value_or(32)); });
    const int chain_r = cfg_.r_max && *cfg_.r_max > 32 ? *cfg_.r_max : 256;
    add("ball_chain", [&] { return ball_chain_audit(d, 100, cfg_.seed, chain_r); });
  }

  void bounds() {
    const int d = cfg_.dim;
    const int n = std::min(cfg_.n_max.value_or(default_n(d)), 128);
    if (n < 16) throw UsageError("bounds: --n-max must be >= 16");
    add("lclt", [&] { return lclt_error_scan(d, 16, n); });
    add("near_diagonal", [&] { return near_diagonal_audit(d, n, 0.5); });
    const int ng = std::min(n, 64);
    add("gaussian_lower", [&] { return gaussian_lower_audit(d, ng); });
    add("gaussian_upper", [&] { return gaussian_upper_audit(d, ng); });
    if (d <= 2) {
      add("chain_certificate", [&] { return chain_certificate_audit(d, 200, cfg_.seed); });
    } else {
      skip("chain_certificate", "waypoint certificates are implemented for d <= 2");
    }
  }

  void exit() {
    const int d = cfg_.dim;
    const int lo = std::max(cfg_.r_min.value_or(4), d);
    const int hi = cfg_.r_max.value_or(d <= 2 ? 32 : 12);
    if (hi < lo) throw UsageError("exit: radius range selects no grid point");
    add("chernoff", [&] { return chernoff_audit(d, lo, hi, 4, cfg_.threads); });
    add("crude_tail", [&] { return crude_tail_audit(d, lo); });
    add("mc_exit", [&] { return mc_exit_audit(d, 8, 256, 100000, cfg_.seed, cfg_.threads); });
  }

  void green() {
    const int d = cfg_.dim;
    const auto oracle = require_nonempty(
        radii(cfg_, d <= 2 ? std::vector<int>{2, 4, 8, 16} : std::vector<int>{2, 4, 8}), "green");
    for (int R : oracle) {
      add("green_oracle_R" + std::to_string(R),
          [&] { return green_oracle_audit(d, R, cfg_.tol, cfg_.threads); });
    }
    if (d >= 2) {
      const auto ugi = radii(cfg_, d == 2 ? std::vector<int>{8, 16, 32} : std::vector<int>{6, 8, 12});
      if (ugi.empty()) {
        skip("ugi", "radius range selects no grid point");
      } else {
        add("ugi", [&] { return ugi_audit(d, ugi, UgiOptions{10.0, cfg_.threads}); });
      }
    } else {
      skip("ugi", "uniform Green windows are defined for d >= 2");
    }
    const auto kl = radii(cfg_, d <= 2 ? std::vector<int>{4, 8, 16} : std::vector<int>{4, 6, 8});
    if (kl.empty()) {
      skip("killed_lower", "radius range selects no grid point");
    } else {
      add("killed_lower", [&] { return killed_lower_audit(d, kl, cfg_.threads); });
    }
  }

  void dirichlet() {
    const int R = cfg_.r_max.value_or(8);
    add("dirichlet", [&] { return dirichlet_audit(cfg_.dim, R, 100000, cfg_.seed, cfg_.threads); });
  }

  void balayage() {
    const auto grid = require_nonempty(radii(cfg_, {4, 8}), "balayage");
    add("balayage", [&] { return balayage_audit(cfg_.dim, grid, 100, cfg_.seed, cfg_.threads); });
  }

  void ehi() {
    const int d = cfg_.dim;
    std::vector<int> scale;
    std::vector<int> chained;
    if (d == 1) {
      scale = radii(cfg_, range(1, 128));
      chained = radii(cfg_, {40, 64, 128});
    } else if (d == 2) {
      scale = radii(cfg_, {8, 16, 24, 32});
      chained = radii(cfg_, {40, 48});
    } else {
      scale = radii(cfg_, {8, 12, 16, 20});
    }
    require_nonempty(scale, "ehi");
    std::vector<int> small = scale;
    std::erase_if(small, [](int r) { return r > 32; });
    const double spread = d == 1 ? 3.0 : 1.5;
    if (!small.empty()) add("ehi_small_r", [&] { return small_r_bound_audit(d, small, cfg_.threads); });
    add("ehi_scale", [&] { return harnack_scale_audit(d, scale, 16, cfg_.seed, spread, cfg_.threads); });
    if (d >= 3) {
      skip("ehi_chained", "exact C(R) for R > 32 needs one solve per boundary point; too large for d >= 3");
    } else if (chained.empty()) {
      skip("ehi_chained", "radius range selects no R > 32");
    } else {
      add("ehi_chained", [&] { return chained_harnack_audit(d, chained, cfg_.threads); });
    }
    add("oscillation", [&] { return oscillation_audit(d, small.empty() ? scale : small, 20, cfg_.seed,
                                                      0.05, cfg_.threads); });
  }

  void spill() {
    const DiskCache cache(cfg_.cache_dir);
    const int d = cfg_.dim;
    cache.store(cache_entry(*default_kernel_cache().free_field(d, 32)));
    cache.store(cache_entry(green_solve(make_ball(LatticePoint(d), 4), cfg_.threads)));
    KilledField field = KilledField::point_mass(make_ball(LatticePoint(d), 8), LatticePoint(d));
    for (int k = 0; k < 12; ++k) field.step_in_place();
    cache.store(cache_entry(field));
  }

 private:
  const RunConfig& cfg_;
  AuditRun run_;
};

Json cache_listing_json(const std::vector<CacheListing>& listing) {
  Json rows = Json::array();
  for (const auto& l : listing) {
    Json row = {{"file", l.file}, {"readable", l.readable}};
    if (l.readable) row["header"] = l.header.to_json();
    if (!l.error.empty()) row["error"] = l.error;
    rows.push_back(row);
  }
  return rows;
}

int run_cache(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.cache_dir.empty()) throw UsageError("cache: --cache-dir is required");
  const DiskCache cache(cfg.cache_dir);
  Json body = {{"schema", kReportSchema}, {"tool", kToolName}, {"version", kToolVersion},
               {"action", cfg.cache_action}, {"cache_dir", cfg.cache_dir}};
  CsvTable table;
  int status = kExitPass;
  if (cfg.cache_action == "list") {
    const auto listing = cache.list();
    body["entries"] = cache_listing_json(listing);
    table.header = {"file", "kind", "dim", "count", "readable"};
    for (const auto& l : listing) {
      table.rows.push_back({l.file, l.readable ? to_string(l.header.kind) : "",
                            l.readable ? std::to_string(l.header.dim) : "",
                            l.readable ? std::to_string(l.header.count) : "", l.readable ? "1" : "0"});
    }
  } else if (cfg.cache_action == "clear") {
    body["removed"] = cache.clear();
    table.header = {"removed"};
    table.rows.push_back({std::to_string(body["removed"].get<std::size_t>())});
  } else {
    const CacheVerifyResult v = cache.verify(cfg.threads);
    Json failures = Json::array();
    table.header = {"file", "reason"};
    for (const auto& [file, reason] : v.failures) {
      failures.push_back({{"file", file}, {"reason", reason}});
      table.rows.push_back({file, reason});
      err << "cache verify failed: " << file << ": " << reason << '\n';
    }
    body["files"] = v.files;
    body["entries_checked"] = v.entries_checked;
    body["failures"] = failures;
    body["pass"] = v.ok();
    if (!v.ok()) status = kExitFail;
  }
  const std::string text = cfg.format == "csv" ? table.render() : body.dump(2) + "\n";
  if (cfg.out.empty()) {
    out << text;
  } else {
    write_file_atomic(cfg.out, text);
  }
  return status;
}

}  // namespace

void RunConfig::validate() const {
  if (dim < 1 || dim > 3) throw UsageError("--dim must be 1, 2 or 3, got " + std::to_string(dim));
  if (!(tol > 0.0)) throw UsageError("--tol must be > 0");
  if (r_min && *r_min < 1) throw UsageError("--r-min must be >= 1");
  if (r_max && *r_max < 1) throw UsageError("--r-max must be >= 1");
  if (r_min && r_max && *r_min > *r_max) throw UsageError("--r-min exceeds --r-max");
  if (n_max && *n_max < 1) throw UsageError("--n-max must be >= 1");
  if (format != "json" && format != "csv") throw UsageError("--format must be json or csv");
  if (command == "cache") {
    if (cache_action != "list" && cache_action != "clear" && cache_action != "verify") {
      throw UsageError("cache: action must be list, clear or verify");
    }
  } else if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    throw UsageError("unknown subcommand '" + command + "'");
  }
}

Json RunConfig::to_json() const {
  Json j = {{"command", command}, {"dim", dim}, {"tol", tol}, {"seed", seed}, {"format", format}};
  j["r_min"] = r_min ? Json(*r_min) : Json(nullptr);
  j["r_max"] = r_max ? Json(*r_max) : Json(nullptr);
  j["n_max"] = n_max ? Json(*n_max) : Json(nullptr);
  return j;
}

bool AuditRun::pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const AuditReport& r) { return r.pass; });
}

std::vector<std::string> AuditRun::failing() const {
  std::vector<std::string> ids;
  for (const auto& r : reports) {
    if (!r.pass) ids.push_back(r.id);
  }
  return ids;
}

AuditRun run_audits(const RunConfig& cfg) {
  cfg.validate();
  Runner runner(cfg);
  const std::string& c = cfg.command;
  const bool all = c == "all";
  if (all || c == "kernel") runner.kernel();
  if (all || c == "bounds") runner.bounds();
  if (all || c == "exit") runner.exit();
  if (all || c == "green") runner.green();
  if (all || c == "dirichlet") runner.dirichlet();
  if (all || c == "balayage") runner.balayage();
  if (all || c == "ehi") runner.ehi();
  if (!cfg.cache_dir.empty()) runner.spill();
  return runner.take();
}

Json report_envelope(const RunConfig& cfg, const AuditRun& run, bool with_timings) {
  Json audits = Json::array();
  for (const auto& r : run.reports) audits.push_back(r.to_json());
  Json skipped = Json::array();
  for (const auto& [id, reason] : run.skipped) skipped.push_back({{"id", id}, {"reason", reason}});
  Json j = {{"schema", kReportSchema},
            {"tool", kToolName},
            {"version", kToolVersion},
            {"config", cfg.to_json()},
            {"audits", audits},
            {"skipped", skipped},
            {"pass", run.pass()},
            {"failing", run.failing()}};
  if (with_timings) {
    j["runtime"] = {{"seconds", run.seconds},
                    {"threads", cfg.threads},
                    {"cache_dir", cfg.cache_dir},
                    {"out", cfg.out}};
  }
  return j;
}

std::string summary_csv(const AuditRun& run) {
  CsvTable t;
  t.header = {"audit", "key", "value"};
  for (const auto& r : run.reports) {
    t.rows.push_back({r.id, "pass", r.pass ? "1" : "0"});
    for (const auto& [k, v] : r.constants) t.rows.push_back({r.id, k, format_double(v)});
  }
  return t.render();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Exact random-walk potential theory audits on balls of Z^d", kToolName};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  int r_min = 0, r_max = 0, n_max = 0;
  app.add_option("--dim", cfg.dim, "lattice dimension d")->envname("ZDPOT_DIM");
  auto* o_rmin = app.add_option("--r-min", r_min, "smallest radius")->envname("ZDPOT_R_MIN");
  auto* o_rmax = app.add_option("--r-max", r_max, "largest radius")->envname("ZDPOT_R_MAX");
  auto* o_nmax = app.add_option("--n-max", n_max, "largest step count")->envname("ZDPOT_N_MAX");
  app.add_option("--tol", cfg.tol, "relative tolerance of the Green oracle")->envname("ZDPOT_TOL");
  app.add_option("--seed", cfg.seed, "seed for random instances")->envname("ZDPOT_SEED");
  app.add_option("--format", cfg.format, "json or csv")->envname("ZDPOT_FORMAT");
  app.add_option("--cache-dir", cfg.cache_dir, "kernel cache directory")->envname("ZDPOT_CACHE_DIR");
  app.add_option("--threads", cfg.threads, "worker threads, 0 = all cores")->envname("ZDPOT_THREADS");
  app.add_option("--out", cfg.out, "report path; stdout when absent")->envname("ZDPOT_OUT");

  for (const auto& name : kCommands) {
    app.add_subcommand(name, name == "all" ? "every audit" : name + " audits")->fallthrough();
  }
  auto* cache_cmd = app.add_subcommand("cache", "list, clear or verify the kernel cache");
  cache_cmd->fallthrough();
  cache_cmd->add_option("action", cfg.cache_action, "list | clear | verify")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (o_rmin->count() > 0) cfg.r_min = r_min;
  if (o_rmax->count() > 0) cfg.r_max = r_max;
  if (o_nmax->count() > 0) cfg.n_max = n_max;
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    cfg.validate();
    if (cfg.command == "cache") return run_cache(cfg, out, err);
    const AuditRun result = run_audits(cfg);
    const std::string text = cfg.format == "csv" ? summary_csv(result)
                                                 : report_envelope(cfg, result).dump(2) + "\n";
    if (cfg.out.empty()) {
      out << text;
    } else {
      write_file_atomic(cfg.out, text);
      for (const auto& r : result.reports) {
        if (!r.table.empty()) write_file_atomic(cfg.out + "." + r.id + ".csv", r.table.render());
      }
    }
    if (!result.pass()) {
      for (const auto& id : result.failing()) err << "audit failed: " << id << '\n';
      return kExitFail;
    }
    return kExitPass;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace zdpot
