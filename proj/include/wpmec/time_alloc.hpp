#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wpmec/fp_power.hpp"

namespace wpmec {

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
  int evals = 0;
  bool converged = false;  // false when max_evals ran out first
};

/// Golden-section search for a maximum of f on [lo, hi]. Returns the best
/// evaluated point, which always lies inside the final bracket, so for a
/// unimodal f it is within tol of the true argmax. Uses at most
/// ceil(log((hi-lo)/tol)/log(phi)) + 2 evaluations.
template <class F>
GoldenResult golden_section_maximize(F&& f, double lo, double hi, double tol, int max_evals = 200) {
  if (!(lo < hi)) throw std::invalid_argument("golden_section_maximize: need lo < hi");
  if (!(tol > 0)) throw std::invalid_argument("golden_section_maximize: need tol > 0");
  constexpr double invphi = 0.6180339887498949;

  GoldenResult res;
  res.value = -std::numeric_limits<double>::infinity();
  auto eval = [&](double x) {
    const double v = f(x);
    ++res.evals;
    if (v > res.value) {
      res.value = v;
      res.x = x;
    }
    return v;
  };

  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  if (res.evals + 2 > max_evals) {
    res.x = 0.5 * (a + b);
    res.value = f(res.x);
    res.evals = max_evals;
    return res;
  }
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tol) {
    if (res.evals >= max_evals) return res;  // budget exhausted, best so far
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
  }
  res.converged = true;
  return res;
}

/// One evaluated point of F(x, alpha), with the powers that achieved it.
struct ModeEval {
  double alpha = 0.0;
  PowerVector powers;  // compact, mode-1 users only
  double objective = 0.0;
  long fp_invocations = 0;
};

// Optional collector for FP convergence traces produced while a mode vector
// is being evaluated.
using FpTraceSink = std::vector<std::vector<double>>;

/// F(x) = max_alpha F(x, alpha): weighted local rates of the mode-0 users
/// plus the FP-optimized offload sum, maximized over alpha by golden-section.
/// A coarse pre-scan (11 points, on by default) seeds the bracket so a
/// multi-modal F cannot trap the search in a poor basin.
inline ModeEval evaluate_modes(const ModeVector& modes, const SystemParams& params,
                               const std::vector<Device>& devices, const FpOptions& fp_opts,
                               double gs_tol, FpTraceSink* trace_sink = nullptr,
                               bool prescan = true, int gs_max_evals = 200) {
  modes.validate_for(devices.size());
  const auto m0 = modes.mode_zero();
  const bool any_offload = modes.count_ones() > 0;

  struct Point {
    double alpha;
    double objective;
    PowerVector powers;
  };
  std::vector<Point> seen;
  long fp_calls = 0;

  auto f_alpha = [&](double alpha) {
    double total = 0.0;
    for (std::size_t i : m0) total += devices[i].weight * local_rate(devices[i], alpha, params);
    PowerVector powers;
    if (any_offload) {
      auto fp = fp_power_control(modes, alpha, params, devices, fp_opts);
      total += fp.objective;
      powers = std::move(fp.powers);
      ++fp_calls;
      if (trace_sink) trace_sink->push_back(std::move(fp.trace));
    }
    seen.push_back({alpha, total, std::move(powers)});
    return total;
  };

  double lo = kAlphaMin, hi = kAlphaMax;
  if (prescan) {
    constexpr int kPrescanPoints = 11;
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    double pts[kPrescanPoints];
    for (int i = 0; i < kPrescanPoints; ++i) {
      pts[i] = kAlphaMin + (kAlphaMax - kAlphaMin) * i / (kPrescanPoints - 1);
      const double v = f_alpha(pts[i]);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    lo = pts[best > 0 ? best - 1 : 0];
    hi = pts[best < kPrescanPoints - 1 ? best + 1 : kPrescanPoints - 1];
  }
  golden_section_maximize(f_alpha, lo, hi, gs_tol, gs_max_evals);

  // Best over pre-scan and golden-section evaluations alike.
  const Point* best = &seen.front();
  for (const auto& p : seen)
    if (p.objective > best->objective) best = &p;
  return {best->alpha, best->powers, best->objective, fp_calls};
}

}  // namespace wpmec
