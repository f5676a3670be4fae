#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wpmec/rates.hpp"

namespace wpmec {

// Quadratic-transform auxiliaries y_i, one per mode-1 user.
using AuxiliaryVector = std::vector<double>;

enum class FpInit { FullPower, HalfPower };

struct FpOptions {
  int max_iters = 200;          // outer y/P alternations
  double rel_tol = 1e-6;        // relative change of R(P) per outer iteration
  int inner_max_iters = 500;    // projected-gradient steps per P update
  double inner_grad_tol = 1e-8; // scaled projected-gradient measure, dimensionless
  FpInit init_rule = FpInit::FullPower;
};

namespace detail {

// Compact view of the power-control problem over the mode-1 set.
struct FpProblem {
  std::vector<double> h;     // channel gains
  std::vector<double> w;     // weights
  std::vector<double> pmax;  // per-user caps at this alpha
  double gain = 0.0;         // spreading gain G
  double coef = 0.0;         // B(1-alpha)/G, per-second prefactor
  double noise = 0.0;        // N_0 * B

  static FpProblem gather(const ModeVector& modes, double alpha, const SystemParams& params,
                          const std::vector<Device>& devices) {
    check_alpha(alpha);
    modes.validate_for(devices.size());
    FpProblem p;
    for (std::size_t i : modes.mode_one()) {
      p.h.push_back(devices[i].channel_gain);
      p.w.push_back(devices[i].weight);
      p.pmax.push_back(max_power(devices[i], alpha, params));
    }
    p.gain = params.spreading_gain;
    p.coef = params.bandwidth * (1.0 - alpha) / params.spreading_gain;
    p.noise = params.noise_n0 * params.bandwidth;
    return p;
  }

  std::size_t size() const { return h.size(); }

  double received_sum(const std::vector<double>& P) const {
    double s = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) s += P[i] * h[i];
    return s;
  }

  // True weighted sum rate R(P).
  double sum_rate(const std::vector<double>& P) const {
    const double s = received_sum(P);
    double total = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
      const double denom = s - P[i] * h[i] + noise;
      total += w[i] * coef * std::log2(1.0 + gain * P[i] * h[i] / denom);
    }
    return total;
  }

  // Quadratic transform f(P,y); -inf when a log argument leaves its domain.
  double quad_value(const std::vector<double>& P, const std::vector<double>& y) const {
    const double s = received_sum(P);
    double total = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
      const double denom = s - P[i] * h[i] + noise;
      const double bracket =
          1.0 + 2.0 * y[i] * std::sqrt(gain * P[i] * h[i]) - y[i] * y[i] * denom;
      if (!(bracket > 0.0)) return -std::numeric_limits<double>::infinity();
      total += w[i] * coef * std::log2(bracket);
    }
    return total;
  }

  // Analytic gradient of f(.,y). The sqrt term is singular at P_j = 0; the
  // one-sided derivative there is +inf, so a floored surrogate keeps the
  // ascent direction valid.
  void quad_gradient(const std::vector<double>& P, const std::vector<double>& y,
                     std::vector<double>& g) const {
    static constexpr double kLn2 = 0.6931471805599453;
    const std::size_t n = P.size();
    const double s = received_sum(P);
    double q_sum = 0.0;
    thread_local std::vector<double> q;
    q.assign(n, 0.0);
    g.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double denom = s - P[i] * h[i] + noise;
      const double bracket =
          1.0 + 2.0 * y[i] * std::sqrt(gain * P[i] * h[i]) - y[i] * y[i] * denom;
      q[i] = w[i] * y[i] * y[i] / bracket;
      q_sum += q[i];
      const double p_floor = std::max(P[i], 1e-12 * pmax[i]);
      g[i] = w[i] * y[i] * std::sqrt(gain * h[i]) / (std::sqrt(p_floor) * bracket);
    }
    for (std::size_t i = 0; i < n; ++i) g[i] = coef / kLn2 * (g[i] - h[i] * (q_sum - q[i]));
  }

  // Closed-form maximizer of f(P,.) for fixed P.
  std::vector<double> best_y(const std::vector<double>& P) const {
    const double s = received_sum(P);
    std::vector<double> y(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) {
      const double denom = s - P[i] * h[i] + noise;
      y[i] = std::sqrt(gain * P[i] * h[i]) / denom;
    }
    return y;
  }
};

struct PgaResult {
  std::vector<double> powers;
  double value = 0.0;
  bool converged = false;
  int iters = 0;
};

// Projected gradient ascent with Armijo backtracking over the box
// [0, pmax]. Monotone: never returns a point below the warm start.
inline PgaResult pga_maximize(const FpProblem& prob, const std::vector<double>& y,
                              std::vector<double> P, const FpOptions& opts) {
  const std::size_t n = prob.size();
  for (std::size_t j = 0; j < n; ++j) P[j] = std::clamp(P[j], 0.0, prob.pmax[j]);
  double f0 = prob.quad_value(P, y);
  if (!std::isfinite(f0))
    throw std::domain_error("solve_inner_convex: warm start outside the log domain of (13)");

  PgaResult res;
  double step = 1.0;  // remembered across iterations, reset per solve
  std::vector<double> g(n), cand(n);
  while (res.iters < opts.inner_max_iters) {
    prob.quad_gradient(P, y, g);
    double measure = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double pg = g[j];
      if (P[j] <= 0.0 && pg < 0.0) pg = 0.0;
      if (P[j] >= prob.pmax[j] && pg > 0.0) pg = 0.0;
      measure = std::max(measure, std::abs(pg) * prob.pmax[j]);
    }
    if (measure <= opts.inner_grad_tol * std::max(std::abs(f0), 1e-300)) {
      res.converged = true;
      break;
    }
    double t = step, fc = 0.0;
    bool accepted = false;
    for (int half = 0; half < 80; ++half) {
      double linear = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        cand[j] = std::clamp(P[j] + t * g[j], 0.0, prob.pmax[j]);
        linear += g[j] * (cand[j] - P[j]);
      }
      if (linear > 0.0) {
        fc = prob.quad_value(cand, y);
        if (std::isfinite(fc) && fc >= f0 + 1e-4 * linear) {
          accepted = true;
          break;
        }
      } else if (linear == 0.0) {
        break;  // projection blocks every coordinate
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.converged = true;  // no improving step exists at this precision
      break;
    }
    P.swap(cand);
    f0 = fc;
    step = std::min(1.0, 2.0 * t);
    ++res.iters;
  }
  res.powers = std::move(P);
  res.value = f0;
  return res;
}

}  // namespace detail

/// Closed-form optimal auxiliaries for fixed powers (the y update).
inline AuxiliaryVector optimal_y(const PowerVector& powers, const ModeVector& modes, double alpha,
                                 const SystemParams& params, const std::vector<Device>& devices) {
  auto prob = detail::FpProblem::gather(modes, alpha, params, devices);
  if (powers.size() != prob.size())
    throw std::invalid_argument("optimal_y: power vector sized " + std::to_string(powers.size()) +
                                ", expected " + std::to_string(prob.size()));
  return prob.best_y(powers);
}

/// Quadratic-transform objective f(P,y), per second. Substituting
/// y = optimal_y(P) collapses every bracket to 1 + SINR_i, recovering R(P).
inline double transformed_objective(const PowerVector& powers, const AuxiliaryVector& y,
                                    const ModeVector& modes, double alpha,
                                    const SystemParams& params,
                                    const std::vector<Device>& devices) {
  auto prob = detail::FpProblem::gather(modes, alpha, params, devices);
  if (powers.size() != prob.size() || y.size() != prob.size())
    throw std::invalid_argument("transformed_objective: vector sizes must match the mode-1 set");
  const double v = prob.quad_value(powers, y);
  if (!std::isfinite(v))
    throw std::domain_error(
        "transformed_objective: non-positive log argument; (P, y) pair is infeasible");
  return v;
}

struct InnerResult {
  PowerVector powers;
  bool converged = false;
  int iters = 0;
};

/// Maximizes f(.,y) over the power box by projected gradient ascent,
/// warm-started from `warm` (the previous outer iterate).
inline InnerResult solve_inner_convex(const AuxiliaryVector& y, const ModeVector& modes,
                                      double alpha, const std::vector<double>& p_max,
                                      const SystemParams& params,
                                      const std::vector<Device>& devices, const FpOptions& opts,
                                      const PowerVector& warm) {
  auto prob = detail::FpProblem::gather(modes, alpha, params, devices);
  if (p_max.size() != prob.size() || y.size() != prob.size() || warm.size() != prob.size())
    throw std::invalid_argument("solve_inner_convex: vector sizes must match the mode-1 set");
  for (double p : p_max)
    if (!(p > 0)) throw std::invalid_argument("solve_inner_convex: p_max entries must be > 0");
  prob.pmax = p_max;
  auto r = detail::pga_maximize(prob, y, warm, opts);
  return {std::move(r.powers), r.converged, r.iters};
}

struct FpResult {
  PowerVector powers;
  double objective = 0.0;          // R(P) at the returned powers [bit/s]
  std::vector<double> trace;       // R(P) per outer iteration, starting at the init point
  bool converged = false;
};

/// Algorithm: alternate the closed-form y update with the inner convex solve
/// until the true objective R(P) stalls. Each update is non-decreasing, so
/// the trace is monotone up to rounding.
inline FpResult fp_power_control(const ModeVector& modes, double alpha,
                                 const SystemParams& params, const std::vector<Device>& devices,
                                 const FpOptions& opts) {
  auto prob = detail::FpProblem::gather(modes, alpha, params, devices);
  if (prob.size() == 0)
    throw std::invalid_argument("fp_power_control: the mode-1 set is empty");

  FpResult res;
  res.powers = prob.pmax;
  if (opts.init_rule == FpInit::HalfPower)
    for (double& p : res.powers) p *= 0.5;

  double r_prev = prob.sum_rate(res.powers);
  res.trace.push_back(r_prev);
  for (int outer = 0; outer < opts.max_iters; ++outer) {
    const auto y = prob.best_y(res.powers);
    auto inner = detail::pga_maximize(prob, y, res.powers, opts);
    res.powers = std::move(inner.powers);
    const double r = prob.sum_rate(res.powers);
    res.trace.push_back(r);
    if (std::abs(r - r_prev) <= opts.rel_tol * std::max(std::abs(r_prev), 1e-300)) {
      res.converged = true;
      break;
    }
    r_prev = r;
  }
  res.objective = res.trace.back();
  return res;
}

}  // namespace wpmec
