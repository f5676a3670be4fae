#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wpmec/config.hpp"
#include "wpmec/mode_search.hpp"
#include "wpmec/parallel.hpp"

namespace wpmec {

enum class SweepKind { Fig3Study, LambdaSweep, SchemeComparison, SizeSweep, IterationProfile };

inline const char* sweep_kind_name(SweepKind k) {
  switch (k) {
    case SweepKind::Fig3Study: return "fig3";
    case SweepKind::LambdaSweep: return "lambda";
    case SweepKind::SchemeComparison: return "schemes";
    case SweepKind::SizeSweep: return "size";
    case SweepKind::IterationProfile: return "iters";
  }
  return "?";
}

struct SweepSpec {
  SweepKind kind = SweepKind::Fig3Study;
  std::vector<double> lambda_values{2.6, 2.8, 3.0, 3.2, 3.4};
  std::vector<int> n_values{5, 10, 15, 20};
  int placements_per_point = 20;
  std::pair<double, double> distance_range{2.5, 10.0};
  std::uint64_t seed = 0;
  int n_limit = 14;      // exhaustive oracle joins rows for instances up to this size
  unsigned jobs = 1;

  void validate() const {
    if (lambda_values.empty()) throw ValidationError("SweepSpec: lambda_values empty");
    if (n_values.empty()) throw ValidationError("SweepSpec: n_values empty");
    if (placements_per_point < 1) throw ValidationError("SweepSpec: placements_per_point < 1");
    if (!(distance_range.first < distance_range.second))
      throw ValidationError("SweepSpec: distance_range low must be < high");
  }
};

struct DeviceCell {
  int mode = 0;
  double power = 0.0;   // [W]
  double pmax = 0.0;    // [W]
  double rate = 0.0;    // [bit/s]
};

struct ResultRow {
  std::string sweep_kind;
  double sweep_var = 0.0;
  int placement = 0;
  std::string scheme;
  int n_devices = 0;
  double objective_bps = 0.0;
  double alpha = 0.0;
  long sls_iters = 0;
  long candidate_evals = 0;
  double wall_time_s = 0.0;
  std::vector<DeviceCell> per_device;  // populated for fig3 rows only
  bool error = false;
};

inline std::string row_key(const ResultRow& r) {
  return r.sweep_kind + "|" + detail::fmt_g17(r.sweep_var) + "|" + std::to_string(r.placement) +
         "|" + r.scheme;
}

/// n independent draws from U(low, high); deterministic in (seed, n, range).
inline std::vector<double> generate_placements(std::uint64_t seed, int n,
                                               std::pair<double, double> range) {
  if (n < 1) throw std::invalid_argument("generate_placements: n must be >= 1");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& d : out) d = rng.uniform(range.first, range.second);
  return out;
}

namespace detail {

inline std::uint64_t bits_of(double v) { return std::bit_cast<std::uint64_t>(v); }

struct UnitTask {
  double sweep_var = 0.0;
  int placement = 0;
  std::vector<double> distances;
  SystemParams params;
  std::uint64_t sls_seed = 0;
};

inline ResultRow report_to_row(const SweepSpec& spec, const UnitTask& task,
                               const std::string& scheme, const SolveReport& rep,
                               const SystemParams& params, const std::vector<Device>& devices,
                               bool with_device_cells) {
  ResultRow row;
  row.sweep_kind = sweep_kind_name(spec.kind);
  row.sweep_var = task.sweep_var;
  row.placement = task.placement;
  row.scheme = scheme;
  row.n_devices = static_cast<int>(devices.size());
  row.objective_bps = rep.best.objective;
  row.alpha = rep.best.alpha;
  row.sls_iters = static_cast<long>(rep.sls_trace.size());
  row.candidate_evals = rep.candidate_evals;
  row.wall_time_s = rep.wall_time;
  if (with_device_cells) {
    row.per_device.resize(devices.size());
    for (std::size_t i = 0; i < devices.size(); ++i) {
      row.per_device[i].mode = rep.best.modes.bits[i];
      row.per_device[i].power = rep.best.powers[i];
      row.per_device[i].pmax = max_power(devices[i], rep.best.alpha, params);
      row.per_device[i].rate = rep.best.rates[i];
    }
  }
  return row;
}

}  // namespace detail

/// Runs one sweep campaign. Each (sweep point, placement) unit runs the
/// proposed SLS scheme plus the applicable benchmarks; units execute on up
/// to spec.jobs threads. Keys listed in `skip` are not recomputed (resume).
/// `on_row` is invoked as rows complete, serialized; the returned table is
/// canonically sorted and independent of thread interleaving.
inline std::vector<ResultRow> run_sweep(
    const SweepSpec& spec, const SystemParams& params, const std::vector<Device>& base_devices,
    const SlsOptions& sls_opts, const FpOptions& fp_opts, double gs_tol,
    const std::set<std::string>* skip = nullptr,
    const std::function<void(const ResultRow&)>& on_row = {}) {
  spec.validate();
  params.validate();

  const bool sized = spec.kind == SweepKind::SizeSweep || spec.kind == SweepKind::IterationProfile;
  if (!sized && base_devices.empty())
    throw ValidationError("run_sweep: this sweep kind needs a configured instance");

  // Assemble the independent work units up front.
  std::vector<detail::UnitTask> units;
  if (sized) {
    for (int n : spec.n_values) {
      for (int p = 0; p < spec.placements_per_point; ++p) {
        detail::UnitTask u;
        u.sweep_var = n;
        u.placement = p;
        u.params = params;
        const std::uint64_t place_seed =
            mix_seed(spec.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p));
        u.distances = generate_placements(place_seed, n, spec.distance_range);
        u.sls_seed = mix_seed(place_seed, 0x534c53 /*"SLS"*/, 0);
        units.push_back(std::move(u));
      }
    }
  } else {
    std::vector<double> lambdas = spec.kind == SweepKind::LambdaSweep
                                      ? spec.lambda_values
                                      : std::vector<double>{params.path_loss_exp};
    for (double lam : lambdas) {
      detail::UnitTask u;
      u.sweep_var = lam;
      u.placement = 0;
      u.params = params;
      u.params.path_loss_exp = lam;
      for (const Device& d : base_devices) u.distances.push_back(d.distance);
      u.sls_seed = mix_seed(spec.seed, detail::bits_of(lam), 0x534c53);
      units.push_back(std::move(u));
    }
  }

  std::vector<ResultRow> rows;
  std::mutex rows_mutex;
  auto emit = [&](ResultRow row) {
    std::lock_guard lock(rows_mutex);
    if (on_row) on_row(row);
    rows.push_back(std::move(row));
  };

  const bool fig3_cells = spec.kind == SweepKind::Fig3Study;
  parallel_for(units.size(), spec.jobs, [&](std::size_t ui) {
    const auto& unit = units[ui];
    std::vector<Device> devices;
    if (sized) {
      devices = build_instance(unit.params, unit.distances);
    } else {
      std::vector<double> w, k, c, e;
      for (const Device& d : base_devices) {
        w.push_back(d.weight);
        k.push_back(d.k_eff);
        c.push_back(d.cycles_per_bit);
        e.push_back(d.residual_energy);
      }
      devices = build_instance(unit.params, unit.distances, w, k, c, e);
    }

    std::vector<std::string> schemes{"proposed"};
    if (spec.kind != SweepKind::IterationProfile) {
      schemes.push_back("offload_only");
      schemes.push_back("local_only");
      if (static_cast<int>(devices.size()) <= spec.n_limit) schemes.push_back("optimal");
    }

    for (const auto& scheme : schemes) {
      ResultRow probe;
      probe.sweep_kind = sweep_kind_name(spec.kind);
      probe.sweep_var = unit.sweep_var;
      probe.placement = unit.placement;
      probe.scheme = scheme;
      if (skip && skip->count(row_key(probe))) continue;
      try {
        SolveReport rep;
        if (scheme == "proposed") {
          SlsOptions local_opts = sls_opts;
          local_opts.seed = unit.sls_seed;
          local_opts.collect_fp_traces = false;  // rows keep counts, not traces
          rep = stochastic_local_search(unit.params, devices, local_opts, fp_opts, gs_tol);
        } else if (scheme == "offload_only") {
          rep = benchmark_scheme(BenchmarkKind::OffloadOnly, unit.params, devices, fp_opts, gs_tol);
        } else if (scheme == "local_only") {
          rep = benchmark_scheme(BenchmarkKind::LocalOnly, unit.params, devices, fp_opts, gs_tol);
        } else {
          rep = exhaustive_optimal(unit.params, devices, fp_opts, gs_tol, spec.n_limit);
        }
        emit(detail::report_to_row(spec, unit, scheme, rep, unit.params, devices, fig3_cells));
      } catch (const std::exception&) {
        probe.n_devices = static_cast<int>(devices.size());
        probe.objective_bps = std::numeric_limits<double>::quiet_NaN();
        probe.alpha = std::numeric_limits<double>::quiet_NaN();
        probe.error = true;
        emit(std::move(probe));
      }
    }
  });

  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.sweep_var != b.sweep_var) return a.sweep_var < b.sweep_var;
    if (a.placement != b.placement) return a.placement < b.placement;
    return a.scheme < b.scheme;
  });
  return rows;
}

// ---- CSV schema ----------------------------------------------------------

inline std::string csv_header(SweepKind kind, int n_devices) {
  std::string h = "sweep_kind,sweep_var,placement,scheme,n_devices,objective_bps,alpha,"
                  "sls_iters,candidate_evals,wall_time_s";
  if (kind == SweepKind::Fig3Study) {
    for (int i = 1; i <= n_devices; ++i) {
      const std::string s = std::to_string(i);
      h += ",mode_" + s + ",power_" + s + ",pmax_" + s + ",rate_" + s;
    }
  }
  return h;
}

inline std::string csv_line(const ResultRow& r) {
  std::string line = r.sweep_kind + "," + detail::fmt_g17(r.sweep_var) + "," +
                     std::to_string(r.placement) + "," + r.scheme + "," +
                     std::to_string(r.n_devices) + "," + detail::fmt_g17(r.objective_bps) + "," +
                     detail::fmt_g17(r.alpha) + "," + std::to_string(r.sls_iters) + "," +
                     std::to_string(r.candidate_evals) + ",";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", r.wall_time_s);
  line += buf;
  for (const auto& c : r.per_device)
    line += "," + std::to_string(c.mode) + "," + detail::fmt_g17(c.power) + "," +
            detail::fmt_g17(c.pmax) + "," + detail::fmt_g17(c.rate);
  return line;
}

/// Parses rows back from a sweep CSV (used for resume). Accepts files with
/// or without the per-device columns.
inline std::vector<ResultRow> read_rows_csv(const std::string& path) {
  std::ifstream in(path);
  std::vector<ResultRow> rows;
  if (!in) return rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 10) continue;  // truncated append from an interrupted run
    ResultRow r;
    r.sweep_kind = cells[0];
    r.sweep_var = std::strtod(cells[1].c_str(), nullptr);
    r.placement = std::atoi(cells[2].c_str());
    r.scheme = cells[3];
    r.n_devices = std::atoi(cells[4].c_str());
    r.objective_bps = std::strtod(cells[5].c_str(), nullptr);
    r.alpha = std::strtod(cells[6].c_str(), nullptr);
    r.sls_iters = std::atol(cells[7].c_str());
    r.candidate_evals = std::atol(cells[8].c_str());
    r.wall_time_s = std::strtod(cells[9].c_str(), nullptr);
    for (std::size_t c = 10; c + 3 < cells.size(); c += 4)
      r.per_device.push_back({std::atoi(cells[c].c_str()),
                              std::strtod(cells[c + 1].c_str(), nullptr),
                              std::strtod(cells[c + 2].c_str(), nullptr),
                              std::strtod(cells[c + 3].c_str(), nullptr)});
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Atomically (tmp + rename) rewrites the CSV in canonical row order.
inline void write_rows_csv(const std::string& path, SweepKind kind,
                           std::vector<ResultRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.sweep_var != b.sweep_var) return a.sweep_var < b.sweep_var;
    if (a.placement != b.placement) return a.placement < b.placement;
    return a.scheme < b.scheme;
  });
  const int n_dev = rows.empty() ? 0 : rows.front().n_devices;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << csv_header(kind, kind == SweepKind::Fig3Study ? n_dev : 0) << "\n";
    for (const auto& r : rows) out << csv_line(r) << "\n";
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move '" + tmp + "' over '" + path + "'");
}

/// Companion metadata: the fully resolved parameter set and seed, so any
/// run is reconstructible from its outputs alone.
inline void write_sweep_metadata(const std::string& path, const SweepSpec& spec,
                                 const SystemParams& params,
                                 const std::vector<Device>& base_devices,
                                 const SlsOptions& sls_opts, const FpOptions& fp_opts,
                                 double gs_tol) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "sweep_kind = " << sweep_kind_name(spec.kind) << "\n";
  out << "seed = " << spec.seed << "\n";
  std::vector<double> nv(spec.n_values.begin(), spec.n_values.end());
  out << "lambda_values = " << format_list(spec.lambda_values) << "\n";
  out << "n_values = " << format_list(nv) << "\n";
  out << "placements_per_point = " << spec.placements_per_point << "\n";
  out << "distance_range = " << detail::fmt_g17(spec.distance_range.first) << ","
      << detail::fmt_g17(spec.distance_range.second) << "\n";
  out << "n_limit = " << spec.n_limit << "\n";
  out << format_params(params);
  if (!base_devices.empty()) {
    std::vector<double> d;
    for (const auto& dev : base_devices) d.push_back(dev.distance);
    out << "distances = " << format_list(d) << "\n";
  }
  out << "sls_max_iters = " << sls_opts.max_iters << "\n";
  out << "sls_conv_tol = " << detail::fmt_g17(sls_opts.conv_tol) << "\n";
  out << "fp_max_iters = " << fp_opts.max_iters << "\n";
  out << "fp_rel_tol = " << detail::fmt_g17(fp_opts.rel_tol) << "\n";
  out << "gs_tol = " << detail::fmt_g17(gs_tol) << "\n";
}

}  // namespace wpmec
