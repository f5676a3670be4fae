#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpmec {

// Malformed config or instance construction input.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A power vector violates a per-user transmit cap.
struct FeasibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// How the per-user transmit cap combines the harvested-energy limit with the
// hardware cap q_max. PhysicalMin is the default: hardware upper-bounds the
// radio no matter how much energy was harvested. PaperLiteralMax keeps the
// printed max-combination reproducible.
enum class PowerCapRule {
  PhysicalMin,
  PaperLiteralMax,
};

// The WPT fraction is clamped away from {0,1}: at 1 the offload window
// (1-alpha)T collapses, at 0 nothing is harvested.
inline constexpr double kAlphaMin = 1e-6;
inline constexpr double kAlphaMax = 1.0 - 1e-6;

/// Global RF and compute constants shared by the whole network.
/// Defaults are the Powercast TX91501-3W / P2110 desk setup.
struct SystemParams {
  double p0 = 3.0;                // AP transmit power P_0 [W]
  double nu = 0.51;               // harvesting efficiency, in (0,1)
  double t_frame = 1.0;           // frame length T [s]
  double bandwidth = 10e6;        // uplink bandwidth B [Hz]
  double spreading_gain = 128.0;  // DS-CDMA processing gain G, >= 1
  double noise_n0 = 1e-17;        // receiver noise N_0 [W] (-140 dBm)
  double q_max = 1e-3;            // hardware transmit cap [W]
  double carrier_freq = 915e6;    // f_c [Hz]
  double antenna_gain = 4.11;     // dimensionless
  double path_loss_exp = 2.8;     // > 0
  PowerCapRule power_cap_rule = PowerCapRule::PhysicalMin;

  void validate() const {
    auto bad = [](const std::string& what) { throw ValidationError("SystemParams: " + what); };
    if (!(p0 > 0)) bad("p0 must be > 0");
    if (!(nu > 0 && nu < 1)) bad("nu must be in (0,1)");
    if (!(t_frame > 0)) bad("t_frame must be > 0");
    if (!(bandwidth > 0)) bad("bandwidth must be > 0");
    if (!(spreading_gain >= 1)) bad("spreading_gain must be >= 1");
    if (!(noise_n0 > 0)) bad("noise_n0 must be > 0");
    if (!(q_max > 0)) bad("q_max must be > 0");
    if (!(carrier_freq > 0)) bad("carrier_freq must be > 0");
    if (!(antenna_gain > 0)) bad("antenna_gain must be > 0");
    if (!(path_loss_exp > 0)) bad("path_loss_exp must be > 0");
  }
};

/// Per-user state. channel_gain serves both WPT downlink and offload uplink.
struct Device {
  int index = 0;                 // 1-based position in the instance
  double distance = 0.0;         // AP distance D_i [m]
  double channel_gain = 0.0;     // h_i, dimensionless
  double weight = 1.0;           // w_i > 0
  double k_eff = 1e-26;          // compute energy coefficient k_i [J*s^2/cycle^3]
  double cycles_per_bit = 100.0; // C_i
  double residual_energy = 0.0;  // e_i [J], left over from the previous frame

  void validate() const {
    auto bad = [this](const std::string& what) {
      throw ValidationError("Device " + std::to_string(index) + ": " + what);
    };
    if (!(channel_gain > 0)) bad("channel_gain must be > 0");
    if (!(weight > 0)) bad("weight must be > 0");
    if (!(k_eff > 0)) bad("k_eff must be > 0");
    if (!(cycles_per_bit > 0)) bad("cycles_per_bit must be > 0");
    if (!(residual_energy >= 0)) bad("residual_energy must be >= 0");
  }
};

/// Binary offloading decision per user: 1 = offload (mode 1), 0 = local.
struct ModeVector {
  std::vector<std::uint8_t> bits;

  ModeVector() = default;
  explicit ModeVector(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

  static ModeVector uniform(std::size_t n, bool offload) {
    return ModeVector(std::vector<std::uint8_t>(n, offload ? 1 : 0));
  }

  std::size_t size() const { return bits.size(); }

  std::size_t count_ones() const {
    std::size_t c = 0;
    for (auto b : bits) c += (b != 0);
    return c;
  }

  // 0-based positions of mode-1 users, ascending.
  std::vector<std::size_t> mode_one() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> mode_zero() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (!bits[i]) out.push_back(i);
    return out;
  }

  std::string str() const {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) s[i] = '1';
    return s;
  }

  void validate_for(std::size_t n_devices) const {
    if (bits.size() != n_devices)
      throw ValidationError("ModeVector length " + std::to_string(bits.size()) +
                            " does not match device count " + std::to_string(n_devices));
    for (auto b : bits)
      if (b > 1) throw ValidationError("ModeVector entries must be 0 or 1");
  }

  friend bool operator==(const ModeVector& a, const ModeVector& b) { return a.bits == b.bits; }
};

/// One full candidate solution. powers/rates are per-device (length N);
/// mode-0 users carry power 0 and their local rate.
struct Allocation {
  ModeVector modes;
  double alpha = 0.0;
  std::vector<double> powers;  // [W]
  std::vector<double> rates;   // [bit/s]
  double objective = 0.0;      // weighted sum rate [bit/s]
};

struct SlsTraceEntry {
  int iter = 0;
  double accepted_objective = 0.0;
  double best_objective = 0.0;
  double beta = 0.0;
  int evals_this_iter = 0;  // solver invocations (cache misses) this iteration
};

/// Best allocation plus convergence bookkeeping for one solver run.
struct SolveReport {
  Allocation best;
  std::vector<std::vector<double>> fp_traces;  // objective per FP outer iteration
  std::vector<SlsTraceEntry> sls_trace;
  long candidate_evals = 0;  // logical F(x) evaluations, cache hits included
  double wall_time = 0.0;    // [s], solver only; never serialized
  std::uint64_t seed = 0;
};

/// dBm -> watts.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace wpmec
