#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "wpmec/rng.hpp"
#include "wpmec/time_alloc.hpp"

namespace wpmec {

struct SlsOptions {
  std::optional<double> beta0;   // initial temperature; empty = mean F of the first candidate set
  int max_iters = 500;
  double conv_tol = 1e-4;        // absolute difference of consecutive accepted objectives
  int conv_patience = 4;         // consecutive sub-conv_tol steps required; 1 = single difference
  std::uint64_t seed = 0;
  bool cache_enabled = true;     // memoize F(x) by mode vector; never changes results
  bool collect_fp_traces = true; // keep per-invocation FP traces in the report
};

/// The sampling set C(x): x itself followed by the N single-bit flips,
/// in bit-index order.
inline std::vector<ModeVector> candidate_set(const ModeVector& x) {
  std::vector<ModeVector> out;
  out.reserve(x.size() + 1);
  out.push_back(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ModeVector flipped = x;
    flipped.bits[i] ^= 1;
    out.push_back(std::move(flipped));
  }
  return out;
}

/// Acceptance distribution p_i = exp(-beta/F_i) / sum_j exp(-beta/F_j).
/// Computed with a max-shift so large beta degrades gracefully to the
/// argmax set instead of underflowing to 0/0.
inline std::vector<double> selection_probabilities(const std::vector<double>& values,
                                                   double beta) {
  if (values.empty()) throw std::invalid_argument("selection_probabilities: empty value list");
  if (!(beta >= 0)) throw std::invalid_argument("selection_probabilities: beta must be >= 0");
  double vmax = 0.0;
  for (double v : values) {
    if (!(v > 0))
      throw std::domain_error("selection_probabilities: objective values must be > 0");
    vmax = std::max(vmax, v);
  }
  const double shift = -beta / vmax;
  std::vector<double> p(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    p[i] = std::exp(-beta / values[i] - shift);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

namespace detail {

// Shared evaluation bookkeeping for the mode-space searches.
struct ModeEvaluator {
  const SystemParams& params;
  const std::vector<Device>& devices;
  const FpOptions& fp_opts;
  double gs_tol;
  bool use_cache;
  FpTraceSink* sink;

  std::unordered_map<std::string, ModeEval> cache;
  ModeEval scratch;  // holds the result when caching is off
  long logical_evals = 0;
  long misses = 0;

  ModeVector best_modes;
  ModeEval best;
  bool has_best = false;

  // Returned reference stays valid until the next evaluate() call.
  const ModeEval& evaluate(const ModeVector& x) {
    ++logical_evals;
    const std::string key = x.str();
    if (use_cache) {
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    ModeEval eval = evaluate_modes(x, params, devices, fp_opts, gs_tol, sink);
    ++misses;
    if (!has_best || eval.objective > best.objective) {
      best = eval;
      best_modes = x;
      has_best = true;
    }
    if (use_cache) return cache.emplace(key, std::move(eval)).first->second;
    scratch = std::move(eval);
    return scratch;
  }
};

inline SolveReport finish_report(const ModeEvaluator& ev, const SystemParams& params,
                                 const std::vector<Device>& devices) {
  SolveReport report;
  report.best =
      make_allocation(ev.best_modes, ev.best.alpha, ev.best.powers, params, devices);
  report.candidate_evals = ev.logical_evals;
  return report;
}

}  // namespace detail

/// Algorithm: stochastic local search over mode vectors. Starts from a
/// uniformly random x, repeatedly samples the next iterate from the
/// candidate set, and raises the temperature by beta *= ln(1+l) after
/// iteration l. The accepted objective is a stochastic sequence, so a
/// single sub-conv_tol step is a coincidence, not convergence: the search
/// stops once the difference stays below conv_tol for conv_patience
/// consecutive iterations (the chain has settled). The report carries the
/// best allocation ever evaluated, which the probabilistic walk may have
/// left again.
inline SolveReport stochastic_local_search(const SystemParams& params,
                                           const std::vector<Device>& devices,
                                           const SlsOptions& sls_opts, const FpOptions& fp_opts,
                                           double gs_tol) {
  if (devices.empty()) throw std::invalid_argument("stochastic_local_search: no devices");
  const auto t0 = std::chrono::steady_clock::now();

  Rng rng(sls_opts.seed);
  ModeVector x;
  x.bits.resize(devices.size());
  for (auto& b : x.bits) b = rng.coin() ? 1 : 0;

  FpTraceSink traces;
  detail::ModeEvaluator ev{params,  devices, fp_opts, gs_tol, sls_opts.cache_enabled,
                           sls_opts.collect_fp_traces ? &traces : nullptr};

  SolveReport report;
  double beta = sls_opts.beta0.value_or(-1.0);
  bool beta_ready = sls_opts.beta0.has_value();
  double f_prev = 0.0;
  int settled = 0;

  for (int l = 1; l <= sls_opts.max_iters; ++l) {
    const auto cands = candidate_set(x);
    const long misses_before = ev.misses;
    std::vector<double> values(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) values[i] = ev.evaluate(cands[i]).objective;
    if (l == 1) f_prev = values[0];  // F(x^0)
    if (!beta_ready) {
      double mean = 0.0;
      for (double v : values) mean += v;
      beta = mean / static_cast<double>(values.size());
      beta_ready = true;
    }

    const auto probs = selection_probabilities(values, beta);
    const double u = rng.uniform01();
    std::size_t pick = probs.size() - 1;
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) {
        pick = i;
        break;
      }
    }

    const double f_curr = values[pick];
    report.sls_trace.push_back({l, f_curr, ev.best.objective, beta,
                                static_cast<int>(ev.misses - misses_before)});
    beta *= std::log(1.0 + static_cast<double>(l));

    settled = std::abs(f_curr - f_prev) < sls_opts.conv_tol ? settled + 1 : 0;
    x = cands[pick];
    f_prev = f_curr;
    if (settled >= sls_opts.conv_patience) break;
  }

  auto finished = detail::finish_report(ev, params, devices);
  report.best = std::move(finished.best);
  report.candidate_evals = finished.candidate_evals;
  report.fp_traces = std::move(traces);
  report.seed = sls_opts.seed;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

/// Brute-force benchmark: evaluates all 2^N mode vectors. Refuses above
/// n_limit, where enumeration stops being a desk-scale exercise.
inline SolveReport exhaustive_optimal(const SystemParams& params,
                                      const std::vector<Device>& devices,
                                      const FpOptions& fp_opts, double gs_tol, int n_limit = 14) {
  if (devices.empty()) throw std::invalid_argument("exhaustive_optimal: no devices");
  const int n = static_cast<int>(devices.size());
  if (n > n_limit)
    throw ValidationError("exhaustive_optimal: N=" + std::to_string(n) + " exceeds n_limit=" +
                          std::to_string(n_limit) + "; 2^N enumeration refused");
  const auto t0 = std::chrono::steady_clock::now();

  // FP traces are not collected here: 2^N evaluations of ~30 FP solves each
  // would dominate memory for a benchmark whose only output is the best point.
  detail::ModeEvaluator ev{params, devices, fp_opts, gs_tol, false, nullptr};
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    ModeVector x;
    x.bits.resize(n);
    for (int i = 0; i < n; ++i) x.bits[i] = (mask >> i) & 1u;
    ev.evaluate(x);
  }
  auto report = detail::finish_report(ev, params, devices);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

enum class BenchmarkKind { OffloadOnly, LocalOnly };

/// The all-offload / all-local reference schemes.
inline SolveReport benchmark_scheme(BenchmarkKind kind, const SystemParams& params,
                                    const std::vector<Device>& devices, const FpOptions& fp_opts,
                                    double gs_tol) {
  if (devices.empty()) throw std::invalid_argument("benchmark_scheme: no devices");
  const auto t0 = std::chrono::steady_clock::now();
  detail::ModeEvaluator ev{params, devices, fp_opts, gs_tol, false, nullptr};
  ev.evaluate(ModeVector::uniform(devices.size(), kind == BenchmarkKind::OffloadOnly));
  auto report = detail::finish_report(ev, params, devices);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace wpmec
