// wpmec command line: solve one instance, run a figure-style sweep, or
// compare the stochastic search against the exhaustive oracle.
//
// Exit codes: 0 success, 1 solver/runtime failure, 2 usage/config error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpmec/wpmec.hpp"

namespace {

using namespace wpmec;

std::string resolve_config_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (fs::path(path).is_relative()) {
    if (const char* dir = std::getenv("WPMEC_CONFIG_DIR")) {
      const fs::path alt = fs::path(dir) / path;
      if (fs::exists(alt)) return alt.string();
    }
  }
  return path;  // let load_config produce the error with the original name
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string g17(double v) { return detail::fmt_g17(v); }

void write_report_file(const std::string& path, const InstanceConfig& cfg,
                       const std::vector<Device>& devices, const SolveReport& rep,
                       const std::string& header) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "# " << header << "\n";
  out << "seed = " << rep.seed << "\n";
  out << format_params(cfg.params);
  std::vector<double> d;
  for (const auto& dev : devices) d.push_back(dev.distance);
  out << "distances = " << format_list(d) << "\n";
  out << "n_devices = " << devices.size() << "\n";
  out << "modes = " << rep.best.modes.str() << "\n";
  out << "alpha = " << g17(rep.best.alpha) << "\n";
  out << "objective_bps = " << g17(rep.best.objective) << "\n";
  out << "sls_iterations = " << rep.sls_trace.size() << "\n";
  out << "candidate_evals = " << rep.candidate_evals << "\n";
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const std::string s = std::to_string(i + 1);
    out << "mode_" << s << " = " << int(rep.best.modes.bits[i]) << "\n";
    out << "power_" << s << " = " << g17(rep.best.powers[i]) << "\n";
    out << "pmax_" << s << " = " << g17(max_power(devices[i], rep.best.alpha, cfg.params)) << "\n";
    out << "rate_" << s << " = " << g17(rep.best.rates[i]) << "\n";
  }
}

void print_solution(const SystemParams& params, const std::vector<Device>& devices,
                    const SolveReport& rep) {
  std::printf("objective    %.6g bit/s (weighted)\n", rep.best.objective);
  std::printf("modes        %s\n", rep.best.modes.str().c_str());
  std::printf("alpha        %.6f\n", rep.best.alpha);
  std::printf("iterations   %zu   candidate evals %ld   wall %.3f s\n", rep.sls_trace.size(),
              rep.candidate_evals, rep.wall_time);
  std::printf("%4s %9s %6s %14s %14s %14s\n", "dev", "dist[m]", "mode", "power[W]", "pmax[W]",
              "rate[bit/s]");
  for (std::size_t i = 0; i < devices.size(); ++i) {
    std::printf("%4d %9.3f %6d %14.6g %14.6g %14.6g\n", devices[i].index, devices[i].distance,
                int(rep.best.modes.bits[i]), rep.best.powers[i],
                max_power(devices[i], rep.best.alpha, params), rep.best.rates[i]);
  }
}

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  CLI::Option* seed_opt = nullptr;
};

int cmd_solve(const CommonArgs& args) {
  const InstanceConfig cfg = load_config(resolve_config_path(args.config_path));
  const auto devices = build_devices(cfg);
  SlsOptions sls;
  sls.seed = args.seed_given ? args.seed : entropy_seed();
  const SolveReport rep = stochastic_local_search(cfg.params, devices, sls, FpOptions{}, 1e-4);
  print_solution(cfg.params, devices, rep);
  write_report_file(args.out_path, cfg, devices, rep, "wpmec solve report");
  std::printf("report       %s\n", args.out_path.c_str());
  return 0;
}

int cmd_oracle(const CommonArgs& args) {
  const InstanceConfig cfg = load_config(resolve_config_path(args.config_path));
  const auto devices = build_devices(cfg);
  SlsOptions sls;
  sls.seed = args.seed_given ? args.seed : entropy_seed();
  const SolveReport oracle = exhaustive_optimal(cfg.params, devices, FpOptions{}, 1e-4);
  const SolveReport search = stochastic_local_search(cfg.params, devices, sls, FpOptions{}, 1e-4);
  const double ratio = search.best.objective / oracle.best.objective;
  std::printf("exhaustive   %.10g bit/s  modes %s\n", oracle.best.objective,
              oracle.best.modes.str().c_str());
  std::printf("sls          %.10g bit/s  modes %s (seed %llu)\n", search.best.objective,
              search.best.modes.str().c_str(), static_cast<unsigned long long>(sls.seed));
  std::printf("ratio        %.8f\n", ratio);

  std::ofstream out(args.out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + args.out_path + "'");
  out << "# wpmec oracle report\n";
  out << "seed = " << sls.seed << "\n";
  out << format_params(cfg.params);
  out << "exhaustive_objective_bps = " << g17(oracle.best.objective) << "\n";
  out << "exhaustive_modes = " << oracle.best.modes.str() << "\n";
  out << "exhaustive_evals = " << oracle.candidate_evals << "\n";
  out << "sls_objective_bps = " << g17(search.best.objective) << "\n";
  out << "sls_modes = " << search.best.modes.str() << "\n";
  out << "ratio = " << g17(ratio) << "\n";
  return 0;
}

struct SweepArgs {
  CommonArgs common;
  std::string kind = "fig3";
  double lambda_from = 2.6, lambda_to = 3.4, lambda_step = 0.2;
  std::string n_list = "5,10,15,20";
  int placements = 20;
  unsigned jobs = 0;
};

int cmd_sweep(const SweepArgs& args) {
  const InstanceConfig cfg = load_config(resolve_config_path(args.common.config_path));
  const auto devices = build_devices(cfg);

  SweepSpec spec;
  if (args.kind == "fig3") spec.kind = SweepKind::Fig3Study;
  else if (args.kind == "lambda") spec.kind = SweepKind::LambdaSweep;
  else if (args.kind == "schemes") spec.kind = SweepKind::SchemeComparison;
  else if (args.kind == "size") spec.kind = SweepKind::SizeSweep;
  else spec.kind = SweepKind::IterationProfile;

  spec.lambda_values.clear();
  for (double l = args.lambda_from; l <= args.lambda_to + 1e-12; l += args.lambda_step)
    spec.lambda_values.push_back(l);
  spec.n_values.clear();
  for (double v : detail::parse_list(args.n_list, "--n-list"))
    spec.n_values.push_back(static_cast<int>(v));
  spec.placements_per_point = args.placements;
  spec.seed = args.common.seed_given ? args.common.seed : entropy_seed();
  spec.jobs = args.jobs ? args.jobs : default_jobs();

  const std::string& out_path = args.common.out_path;
  const std::vector<ResultRow> old_rows = read_rows_csv(out_path);
  std::set<std::string> done;
  for (const auto& r : old_rows) done.insert(row_key(r));
  if (!old_rows.empty())
    std::printf("resuming: %zu rows already in %s\n", old_rows.size(), out_path.c_str());

  std::ofstream append(out_path, std::ios::app);
  if (!append) throw std::runtime_error("cannot write '" + out_path + "'");
  if (old_rows.empty()) {
    append.seekp(0, std::ios::end);
    if (append.tellp() == 0)
      append << csv_header(spec.kind,
                           spec.kind == SweepKind::Fig3Study ? int(devices.size()) : 0)
             << "\n";
  }
  auto on_row = [&](const ResultRow& row) {
    append << csv_line(row) << "\n";
    append.flush();
  };

  auto rows = run_sweep(spec, cfg.params, devices, SlsOptions{}, FpOptions{}, 1e-4, &done, on_row);
  append.close();
  rows.insert(rows.end(), old_rows.begin(), old_rows.end());
  write_rows_csv(out_path, spec.kind, rows);
  write_sweep_metadata(out_path + ".meta", spec, cfg.params, devices, SlsOptions{}, FpOptions{},
                       1e-4);

  std::printf("%zu result rows -> %s (seed %llu)\n", rows.size(), out_path.c_str(),
              static_cast<unsigned long long>(spec.seed));
  // quick per-point digest on stdout; the CSV is the artifact
  double var = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    if (r.sweep_var != var) {
      var = r.sweep_var;
      std::printf("  %s = %g:\n", spec.kind == SweepKind::SizeSweep ||
                                          spec.kind == SweepKind::IterationProfile
                                      ? "n"
                                      : "lambda",
                  var);
    }
    if (r.placement == 0)
      std::printf("    %-14s %.6g bit/s%s\n", r.scheme.c_str(), r.objective_bps,
                  r.error ? "  [error]" : "");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted sum computation rate solver for wireless-powered MEC over DS-CDMA"};
  app.require_subcommand(1);

  CommonArgs solve_args, oracle_args;
  SweepArgs sweep_args;

  auto add_common = [](CLI::App* cmd, CommonArgs& c, const char* default_out) {
    cmd->add_option("--config", c.config_path, "instance config file")->required();
    cmd->add_option("--out", c.out_path, "output file")->default_val(default_out);
    c.seed_opt = cmd->add_option("--seed", c.seed, "RNG seed (default: drawn from entropy)");
  };

  auto* solve = app.add_subcommand("solve", "optimize one configured instance");
  add_common(solve, solve_args, "wpmec_solve.txt");

  auto* sweep = app.add_subcommand("sweep", "run a simulation campaign, write CSV");
  add_common(sweep, sweep_args.common, "wpmec_sweep.csv");
  sweep->add_option("--sweep", sweep_args.kind, "campaign kind")
      ->required()
      ->check(CLI::IsMember({"fig3", "lambda", "size", "iters", "schemes"}));
  sweep->add_option("--lambda-from", sweep_args.lambda_from, "path-loss sweep start");
  sweep->add_option("--lambda-to", sweep_args.lambda_to, "path-loss sweep end");
  sweep->add_option("--lambda-step", sweep_args.lambda_step, "path-loss sweep step");
  sweep->add_option("--n-list", sweep_args.n_list, "comma list of network sizes");
  sweep->add_option("--placements", sweep_args.placements, "random placements per point");
  sweep->add_option("--jobs", sweep_args.jobs, "worker threads (default: hardware)");

  auto* oracle = app.add_subcommand("oracle", "compare SLS against 2^N enumeration");
  add_common(oracle, oracle_args, "wpmec_oracle.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  solve_args.seed_given = solve_args.seed_opt->count() > 0;
  sweep_args.common.seed_given = sweep_args.common.seed_opt->count() > 0;
  oracle_args.seed_given = oracle_args.seed_opt->count() > 0;

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    return cmd_oracle(oracle_args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
