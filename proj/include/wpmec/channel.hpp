#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "wpmec/model.hpp"

namespace wpmec {

inline constexpr double kSpeedOfLight = 3e8;  // [m/s], free-space model convention

/// Free-space path-loss power gain: G_A * (c / (4 pi D f_c))^lambda.
/// Deterministic in distance; no fading.
inline double path_loss_gain(double distance, const SystemParams& params) {
  if (!(distance > 0)) throw std::domain_error("path_loss_gain: distance must be > 0");
  const double ratio = kSpeedOfLight / (4.0 * std::numbers::pi * distance * params.carrier_freq);
  return params.antenna_gain * std::pow(ratio, params.path_loss_exp);
}

/// Builds the device list for one instance; channel gains come from the
/// path-loss model, indices follow input order starting at 1.
inline std::vector<Device> build_instance(const SystemParams& params,
                                          const std::vector<double>& distances,
                                          const std::vector<double>& weights,
                                          const std::vector<double>& k_effs,
                                          const std::vector<double>& cycles_per_bit,
                                          const std::vector<double>& residual_energies) {
  params.validate();
  const std::size_t n = distances.size();
  if (n == 0) throw ValidationError("build_instance: need at least one device");
  if (weights.size() != n || k_effs.size() != n || cycles_per_bit.size() != n ||
      residual_energies.size() != n)
    throw ValidationError("build_instance: per-device lists must all have length " +
                          std::to_string(n));
  std::vector<Device> devices(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(distances[i] > 0))
      throw ValidationError("build_instance: distance of device " + std::to_string(i + 1) +
                            " must be > 0");
    Device& d = devices[i];
    d.index = static_cast<int>(i + 1);
    d.distance = distances[i];
    d.channel_gain = path_loss_gain(distances[i], params);
    d.weight = weights[i];
    d.k_eff = k_effs[i];
    d.cycles_per_bit = cycles_per_bit[i];
    d.residual_energy = residual_energies[i];
    d.validate();
  }
  return devices;
}

/// Same, with the homogeneous defaults (w=1, k=1e-26, C=100, e=0).
inline std::vector<Device> build_instance(const SystemParams& params,
                                          const std::vector<double>& distances) {
  const std::size_t n = distances.size();
  return build_instance(params, distances, std::vector<double>(n, 1.0),
                        std::vector<double>(n, 1e-26), std::vector<double>(n, 100.0),
                        std::vector<double>(n, 0.0));
}

}  // namespace wpmec
