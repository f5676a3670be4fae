#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpmec/model.hpp"

namespace wpmec {

// Transmit powers of the mode-1 users, ordered by ascending device index.
using PowerVector = std::vector<double>;

// Absolute slack [W] absorbing solver round-off in feasibility checks.
inline constexpr double kPowerSlack = 1e-12;

inline void check_alpha(double alpha) {
  if (!(alpha >= kAlphaMin && alpha <= kAlphaMax))
    throw std::domain_error("alpha " + std::to_string(alpha) + " outside [" +
                            std::to_string(kAlphaMin) + ", " + std::to_string(kAlphaMax) + "]");
}

/// Energy harvested during the WPT phase: nu * h_i * P_0 * alpha * T.
inline double harvested_energy(const Device& device, double alpha, const SystemParams& params) {
  check_alpha(alpha);
  return params.nu * device.channel_gain * params.p0 * alpha * params.t_frame;
}

/// Per-user transmit cap. The energy-limited term spends the full budget
/// (harvested + residual) over the offload window (1-alpha)T; how it combines
/// with q_max is ruled by params.power_cap_rule.
inline double max_power(const Device& device, double alpha, const SystemParams& params) {
  check_alpha(alpha);
  const double budget = harvested_energy(device, alpha, params) + device.residual_energy;
  const double energy_limited = budget / ((1.0 - alpha) * params.t_frame);
  return params.power_cap_rule == PowerCapRule::PhysicalMin
             ? std::min(energy_limited, params.q_max)
             : std::max(energy_limited, params.q_max);
}

/// Caps for every mode-1 user, aligned with PowerVector ordering.
inline std::vector<double> max_power_vector(const ModeVector& modes,
                                            const std::vector<Device>& devices, double alpha,
                                            const SystemParams& params) {
  modes.validate_for(devices.size());
  std::vector<double> out;
  for (std::size_t i : modes.mode_one()) out.push_back(max_power(devices[i], alpha, params));
  return out;
}

/// Uplink offload rate of device i (0-based, must be mode-1) under DS-CDMA:
/// (B(1-alpha)/G) * log2(1 + G P_i h_i / (sum_{n!=i} P_n h_n + N_0 B)).
/// Already per second: the frame length cancels out of bits/T.
inline double offload_rate(std::size_t i, const PowerVector& powers, const ModeVector& modes,
                           double alpha, const SystemParams& params,
                           const std::vector<Device>& devices) {
  check_alpha(alpha);
  modes.validate_for(devices.size());
  if (i >= modes.size() || !modes.bits[i])
    throw std::invalid_argument("offload_rate: device " + std::to_string(i + 1) +
                                " is not in the mode-1 set");
  const auto m1 = modes.mode_one();
  if (powers.size() != m1.size())
    throw std::invalid_argument("offload_rate: power vector sized " +
                                std::to_string(powers.size()) + ", expected " +
                                std::to_string(m1.size()));
  double own = 0.0, interference = 0.0;
  for (std::size_t k = 0; k < m1.size(); ++k) {
    const double received = powers[k] * devices[m1[k]].channel_gain;
    if (m1[k] == i)
      own = received;
    else
      interference += received;
  }
  const double denom = interference + params.noise_n0 * params.bandwidth;
  const double sinr = params.spreading_gain * own / denom;
  return params.bandwidth * (1.0 - alpha) / params.spreading_gain * std::log2(1.0 + sinr);
}

/// Best local computing rate: the CPU runs the whole frame at the frequency
/// that exhausts the harvested energy, f* = (E_i/(k_i T))^(1/3), giving
/// (nu P_0)^(1/3)/C_i * (h_i/k_i)^(1/3) * alpha^(1/3) bits per second.
inline double local_rate(const Device& device, double alpha, const SystemParams& params) {
  check_alpha(alpha);
  return std::cbrt(params.nu * params.p0) / device.cycles_per_bit *
         std::cbrt(device.channel_gain / device.k_eff) * std::cbrt(alpha);
}

/// Weighted sum computation rate F(x, P, alpha) over all users.
/// Throws FeasibilityError naming the first user whose power exceeds its cap.
inline double weighted_objective(const ModeVector& modes, const PowerVector& powers, double alpha,
                                 const SystemParams& params, const std::vector<Device>& devices) {
  check_alpha(alpha);
  modes.validate_for(devices.size());
  const auto m1 = modes.mode_one();
  if (powers.size() != m1.size())
    throw std::invalid_argument("weighted_objective: power vector sized " +
                                std::to_string(powers.size()) + ", expected " +
                                std::to_string(m1.size()));
  for (std::size_t k = 0; k < m1.size(); ++k) {
    const double cap = max_power(devices[m1[k]], alpha, params);
    if (powers[k] < -kPowerSlack || powers[k] > cap + kPowerSlack)
      throw FeasibilityError("weighted_objective: power " + std::to_string(powers[k]) +
                             " W of device " + std::to_string(m1[k] + 1) +
                             " violates cap " + std::to_string(cap) + " W");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    if (modes.bits[i])
      total += devices[i].weight * offload_rate(i, powers, modes, alpha, params, devices);
    else
      total += devices[i].weight * local_rate(devices[i], alpha, params);
  }
  return total;
}

/// Assembles the full per-device view of a candidate solution; objective is
/// the recomputed weighted sum, so the Allocation is self-consistent by
/// construction.
inline Allocation make_allocation(const ModeVector& modes, double alpha,
                                  const PowerVector& powers, const SystemParams& params,
                                  const std::vector<Device>& devices) {
  check_alpha(alpha);
  modes.validate_for(devices.size());
  Allocation a;
  a.modes = modes;
  a.alpha = alpha;
  a.powers.assign(devices.size(), 0.0);
  a.rates.assign(devices.size(), 0.0);
  const auto m1 = modes.mode_one();
  if (powers.size() != m1.size())
    throw std::invalid_argument("make_allocation: power vector sized " +
                                std::to_string(powers.size()) + ", expected " +
                                std::to_string(m1.size()));
  for (std::size_t k = 0; k < m1.size(); ++k) a.powers[m1[k]] = powers[k];
  double total = 0.0;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    a.rates[i] = modes.bits[i] ? offload_rate(i, powers, modes, alpha, params, devices)
                               : local_rate(devices[i], alpha, params);
    total += devices[i].weight * a.rates[i];
  }
  a.objective = total;
  return a;
}

}  // namespace wpmec
