// Command-line front end: integrate, constants, superpose, verify, limit-scan.
// Exit codes: 0 success, 1 check or run failures, 2 usage or config errors.

#include <CLI11.hpp>
#include <fnmatch.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "lhdeform/config.hpp"
#include "lhdeform/verify.hpp"

namespace fs = std::filesystem;
using namespace lhdeform;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

struct Options {
  std::string config;
  std::string out = ".";
  std::string branch = "auto";
  std::optional<double> z;
  std::string suite = "all";
  std::string points;
  std::string trajectory;
  std::optional<std::size_t> samples;
  std::string family = "*";
  std::vector<double> z_grid{1e-2, 1e-3, 1e-4};
  std::optional<std::uint64_t> seed;
};

void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json finite(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

ExperimentConfig require_config(const Options& o) {
  if (o.config.empty()) throw UsageError("--config is required");
  ExperimentConfig cfg = load_config(o.config);
  if (o.z) cfg.flow.z = *o.z;
  if (o.samples) cfg.samples = *o.samples;
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

Trajectory run(const ExperimentConfig& cfg) {
  return integrate(make_flow(cfg.flow), cfg.initial, cfg.t0, cfg.t1, cfg.integrator);
}

int cmd_integrate(const Options& o) {
  const ExperimentConfig cfg = require_config(o);
  const Trajectory traj = run(cfg);
  std::ostringstream csv;
  write_csv(csv, traj);
  write_atomic(fs::path(o.out) / "trajectory.csv", csv.str());
  Json summary{{"system", cfg.flow.system},
               {"steps", traj.stats().accepted},
               {"rejected", traj.stats().rejected},
               {"evaluations", traj.stats().evaluations},
               {"t1", traj.t1()},
               {"final_state", traj.final_state().values()}};
  std::cout << summary.dump() << "\n";
  return kOk;
}

std::string three_copy(const std::string& system) {
  if (system_copies(system) == 3) return system;
  if (system == "h4" || system == "b2") return "h4-prolonged";
  if (system == "h4-deformed" || system == "b2-deformed") return "h4-deformed-prolonged";
  if (system == "bernoulli") return "bernoulli-prolonged";
  if (system == "bernoulli-deformed") return "bernoulli-deformed-prolonged";
  throw UsageError("system '" + system + "' has no constants of three copies");
}

int cmd_constants(const Options& o) {
  if (!o.points.empty() && !o.trajectory.empty()) throw UsageError("--points and --trajectory are exclusive");
  FlowSpec flow;
  std::optional<ExperimentConfig> cfg;
  if (!o.config.empty()) {
    cfg = require_config(o);
    flow = cfg->flow;
  } else {
    if (o.points.empty()) throw UsageError("--config is required unless --points is given");
    flow.z = o.z.value_or(0.0);
    flow.system = flow.z == 0.0 ? "h4-prolonged" : "h4-deformed-prolonged";
  }
  flow.system = three_copy(flow.system);

  std::vector<std::optional<double>> times;
  std::vector<PhasePoint> states;
  if (!o.points.empty()) {
    Json pts;
    try {
      pts = Json::parse(o.points);
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError(std::string("--points is not valid JSON: ") + e.what());
    }
    if (!pts.is_array()) throw UsageError("--points must be a JSON array of states");
    for (const auto& p : pts) {
      std::vector<double> v;
      for (const auto& c : p) {
        if (c.is_array() && c.size() == 2) {
          v.push_back(c[0].get<double>());
          v.push_back(c[1].get<double>());
        } else if (c.is_number()) {
          v.push_back(c.get<double>());
        } else {
          throw UsageError("--points entries must be numbers or (x, y) pairs");
        }
      }
      if (v.size() != 6) throw UsageError("each state needs three copies (6 coordinates)");
      times.push_back(std::nullopt);
      states.emplace_back(std::move(v));
    }
  } else if (!o.trajectory.empty()) {
    std::ifstream in(o.trajectory);
    if (!in) throw UsageError("cannot open trajectory '" + o.trajectory + "'");
    const TrajectoryTable table = read_csv(in);
    if (table.header.size() != 7) throw UsageError("trajectory must have three copies");
    for (std::size_t i = 0; i < table.times.size(); ++i) {
      times.push_back(table.times[i]);
      states.emplace_back(table.states[i]);
    }
  } else {
    if (system_copies(cfg->flow.system) != 3) throw UsageError("integrating for constants needs a three-copy system");
    const Trajectory traj = run(*cfg);
    for (double t : uniform_times(cfg->t0, cfg->t1, cfg->samples)) {
      times.push_back(t);
      states.push_back(traj.sample(t));
    }
  }

  const auto names = constant_names(flow);
  Json rows = Json::array();
  std::map<std::string, std::vector<double>> series;
  for (std::size_t i = 0; i < states.size(); ++i) {
    Json row;
    if (times[i]) row["t"] = *times[i];
    row["state"] = states[i].values();
    Json values;
    for (const auto& n : names) {
      const double v = eval_constant(flow, n, states[i]);
      values[n] = v;
      series[n].push_back(v);
    }
    row["values"] = std::move(values);
    rows.push_back(std::move(row));
  }
  Json out{{"system", flow.system}, {"z", flow.z}, {"constants", names}, {"rows", rows}};
  if (!times.empty() && times.front()) {
    Json drift;
    for (const auto& n : names) drift[n] = relative_drift(series[n]);
    out["drift"] = std::move(drift);
  }
  write_atomic(fs::path(o.out) / "constants.json", dump(out));
  std::cout << out.dump() << "\n";
  return kOk;
}

int cmd_superpose(const Options& o) {
  const ExperimentConfig cfg = require_config(o);
  if (!has_superposition(cfg.flow.system)) throw UsageError("system '" + cfg.flow.system + "' has no superposition rule");
  std::optional<Branch> branch;
  if (o.branch == "plus") branch = Branch::plus;
  else if (o.branch == "minus") branch = Branch::minus;
  const Trajectory traj = run(cfg);
  const Reconstruction rec = reconstruct(cfg.flow, traj, branch, cfg.samples);
  std::ostringstream csv;
  write_csv(csv, rec);
  Json failures = Json::array();
  for (const auto& s : rec.samples)
    if (!s.failure.empty()) failures.push_back({{"t", s.t}, {"error", s.failure}});
  Json summary{{"system", cfg.flow.system},
               {"z", cfg.flow.z},
               {"branch", rec.branch == Branch::plus ? "plus" : "minus"},
               {"branch_source", branch ? "flag" : "calibrated"},
               {"k1", rec.k1},
               {"k", rec.k},
               {"samples", rec.samples.size()},
               {"max_error", finite(rec.max_error)},
               {"failures", rec.failures},
               {"ambiguous", rec.ambiguous},
               {"failure_records", failures}};
  write_atomic(fs::path(o.out) / "superposition.csv", csv.str());
  write_atomic(fs::path(o.out) / "superposition.json", dump(summary));
  std::cout << summary.dump() << "\n";
  return rec.failures == 0 ? kOk : kFailed;
}

void print_reports(const std::vector<verify::CheckReport>& reports) {
  for (const auto& r : reports)
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.check_id << "  measured=" << r.measured
              << (r.lower_bound() ? " >= " : " <= ") << r.tolerance << "\n";
}

int cmd_verify(const Options& o) {
  const std::uint64_t seed = o.seed.value_or(20240601);
  try {
    verify::select(o.suite);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto start = std::chrono::steady_clock::now();
  const auto reports = verify::run_suite(o.suite, seed);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_atomic(fs::path(o.out) / "verify.json", dump(verify::suite_report(reports, o.suite, seed)));
  print_reports(reports);
  const std::size_t failed = verify::failures(reports);
  std::cerr << reports.size() << " checks, " << failed << " failed, " << std::fixed << std::setprecision(2) << secs
            << " s\n";
  return failed == 0 ? kOk : kFailed;
}

int cmd_limit_scan(const Options& o) {
  const std::uint64_t seed = o.seed.value_or(20240601);
  std::vector<std::string> chosen;
  for (const auto& f : verify::limit_families()) {
    std::stringstream ss(o.family);
    std::string g;
    while (std::getline(ss, g, ','))
      if (g == "all" || fnmatch(g.c_str(), f.c_str(), 0) == 0) {
        chosen.push_back(f);
        break;
      }
  }
  if (chosen.empty()) throw UsageError("--family '" + o.family + "' matches no limit family");
  if (o.z_grid.size() < 2) throw UsageError("--z-grid needs at least two values");
  for (std::size_t i = 0; i < o.z_grid.size(); ++i)
    if (!(o.z_grid[i] > 0.0) || (i > 0 && !(o.z_grid[i] < o.z_grid[i - 1])))
      throw UsageError("--z-grid must be positive and decreasing");
  std::vector<verify::CheckReport> reports;
  for (const auto& f : chosen)
    reports.push_back(verify::check_limit(f, o.z_grid, verify::check_seed(seed, "limit." + f)));
  Json j = verify::suite_report(reports, o.family, seed);
  write_atomic(fs::path(o.out) / "limit_scan.json", dump(j));
  print_reports(reports);
  return verify::failures(reports) == 0 ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deformed oscillator Lie-Hamilton systems: integration, constants, superposition, verification"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--out", o.out, "Output directory")->capture_default_str();

  auto add_config = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--config", o.config, "Experiment config (JSON)");
    if (required) opt->required();
    sub->add_option("--z", o.z, "Deformation parameter (overrides the config)");
    sub->add_option("--out", o.out, "Output directory");
  };

  auto* integ = app.add_subcommand("integrate", "Integrate a system and write trajectory.csv");
  add_config(integ, true);

  auto* cons = app.add_subcommand("constants", "Evaluate constants of motion and write constants.json");
  add_config(cons, false);
  cons->add_option("--points", o.points, "Inline JSON array of three-copy states");
  cons->add_option("--trajectory", o.trajectory, "Trajectory CSV of a three-copy system");
  cons->add_option("--samples", o.samples, "Sample count when integrating")->check(CLI::Range(2, 1000000));

  auto* sup = app.add_subcommand("superpose", "Reconstruct copy 1 and write superposition.csv/.json");
  add_config(sup, true);
  sup->add_option("--branch", o.branch, "Branch of the rule")->check(CLI::IsMember({"plus", "minus", "auto"}));
  sup->add_option("--samples", o.samples, "Reconstruction samples")->check(CLI::Range(2, 1000000));

  auto* ver = app.add_subcommand("verify", "Run verification checks and write verify.json");
  ver->add_option("--suite", o.suite, "Comma-separated check id globs, or 'all'")->capture_default_str();
  ver->add_option("--seed", o.seed, "Suite seed");
  ver->add_option("--out", o.out, "Output directory");

  auto* lim = app.add_subcommand("limit-scan", "Measure z -> 0 convergence orders and write limit_scan.json");
  lim->add_option("--family", o.family, "Comma-separated family globs, or 'all'")->capture_default_str();
  lim->add_option("--z-grid", o.z_grid, "Decreasing positive z values")->delimiter(',');
  lim->add_option("--seed", o.seed, "Seed");
  lim->add_option("--out", o.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*integ) return cmd_integrate(o);
    if (*cons) return cmd_constants(o);
    if (*sup) return cmd_superpose(o);
    if (*ver) return cmd_verify(o);
    return cmd_limit_scan(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IntegrationError& e) {
    std::cerr << "integration failed: " << e.what() << "\n";
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
}
