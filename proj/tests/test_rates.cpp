#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "wpmec/channel.hpp"
#include "wpmec/rates.hpp"
#include "wpmec/rng.hpp"

using namespace wpmec;
using Catch::Approx;

namespace {

Device reference_device() {
  Device d;
  d.index = 1;
  d.distance = 3.0;
  d.channel_gain = 6.99e-6;
  return d;
}

}  // namespace

TEST_CASE("harvested energy", "[rates]") {
  const SystemParams params;
  const Device dev = reference_device();

  // frozen: 0.51 * 6.99e-6 * 3 * 0.5 * 1
  CHECK(harvested_energy(dev, 0.5, params) == Approx(5.34735e-6).epsilon(1e-12));
  CHECK(harvested_energy(dev, kAlphaMin, params) < 1e-10);
  CHECK(harvested_energy(dev, 0.6, params) / harvested_energy(dev, 0.3, params) ==
        Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(harvested_energy(dev, 0.0, params), std::domain_error);
  CHECK_THROWS_AS(harvested_energy(dev, 1.0, params), std::domain_error);
}

TEST_CASE("per-user power cap", "[rates]") {
  SystemParams params;
  const Device dev = reference_device();

  SECTION("physical min takes the energy-limited value here") {
    // frozen energy term: 0.51 * 6.99e-6 * 0.5 * 3 / 0.5
    CHECK(max_power(dev, 0.5, params) == Approx(1.06947e-5).epsilon(1e-12));
  }

  SECTION("paper literal max picks q_max for the same inputs") {
    params.power_cap_rule = PowerCapRule::PaperLiteralMax;
    CHECK(max_power(dev, 0.5, params) == Approx(1e-3).epsilon(1e-12));
  }

  SECTION("no harvested energy at the lower alpha clamp") {
    CHECK(max_power(dev, kAlphaMin, params) < 1e-10);
  }

  SECTION("residual energy extends the budget") {
    Device carry = dev;
    carry.residual_energy = 1e-6;
    CHECK(max_power(carry, 0.5, params) ==
          Approx(1.06947e-5 + 1e-6 / 0.5).epsilon(1e-12));
  }
}

TEST_CASE("offload rate", "[rates]") {
  const SystemParams params;
  const auto devices = build_instance(params, {3, 4, 5, 6, 7, 8});

  SECTION("single offloader, frozen value") {
    std::vector<Device> one{reference_device()};
    ModeVector modes(std::vector<std::uint8_t>{1});
    // frozen: (1e7*0.5/128)*log2(1 + 128*1.07e-5*6.99e-6/1e-10)
    CHECK(offload_rate(0, {1.07e-5}, modes, 0.5, params, one) ==
          Approx(257654.94772301785).epsilon(1e-12));
  }

  SECTION("zero power, zero rate") {
    std::vector<Device> one{reference_device()};
    ModeVector modes(std::vector<std::uint8_t>{1});
    CHECK(offload_rate(0, {0.0}, modes, 0.5, params, one) == 0.0);
  }

  SECTION("a second offloader strictly lowers the rate") {
    ModeVector solo(std::vector<std::uint8_t>{1, 0, 0, 0, 0, 0});
    ModeVector pair(std::vector<std::uint8_t>{1, 1, 0, 0, 0, 0});
    const double alone = offload_rate(0, {1e-5}, solo, 0.5, params, devices);
    const double jammed = offload_rate(0, {1e-5, 2e-6}, pair, 0.5, params, devices);
    CHECK(jammed < alone);
  }

  SECTION("mode-0 device is a contract error") {
    ModeVector modes(std::vector<std::uint8_t>{1, 0, 0, 0, 0, 0});
    CHECK_THROWS_AS(offload_rate(1, {1e-5}, modes, 0.5, params, devices),
                    std::invalid_argument);
  }

  SECTION("monotone in own power, non-increasing in others'") {
    Rng rng(99);
    ModeVector modes(std::vector<std::uint8_t>{1, 1, 1, 1, 0, 0});
    for (int trial = 0; trial < 1000; ++trial) {
      PowerVector p(4);
      for (auto& v : p) v = rng.uniform(0.0, 1e-5);
      const std::size_t who = static_cast<std::size_t>(rng.uniform(0.0, 4.0));
      const double base = offload_rate(0, p, modes, 0.4, params, devices);
      PowerVector bumped = p;
      bumped[who] += rng.uniform(0.0, 1e-6);
      const double after = offload_rate(0, bumped, modes, 0.4, params, devices);
      if (who == 0)
        CHECK(after >= base);
      else
        CHECK(after <= base);
    }
  }
}

TEST_CASE("local computing rate", "[rates]") {
  const SystemParams params;
  const Device dev = reference_device();

  // frozen: (0.51*3)^(1/3)/100 * (6.99e-6/1e-26)^(1/3) * 0.5^(1/3)
  CHECK(local_rate(dev, 0.5, params) == Approx(81167.007959601607).epsilon(1e-12));
  CHECK(local_rate(dev, 0.8, params) / local_rate(dev, 0.1, params) ==
        Approx(2.0).epsilon(1e-12));
  // cube-root law: the alpha clamp leaves ~1% of the mid-range rate
  CHECK(local_rate(dev, kAlphaMin, params) < 0.02 * local_rate(dev, 0.5, params));

  SECTION("rate * alpha^(-1/3) is constant") {
    const double c = local_rate(dev, 0.3, params) / std::cbrt(0.3);
    for (double a : {0.05, 0.2, 0.45, 0.7, 0.95})
      CHECK(local_rate(dev, a, params) / std::cbrt(a) == Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("weighted objective", "[rates]") {
  const SystemParams params;
  const auto devices = build_instance(params, {3, 4, 5, 6, 7, 8});

  SECTION("all-local ignores powers and matches the closed form") {
    ModeVector modes = ModeVector::uniform(6, false);
    const double alpha = 0.37;
    const double f = weighted_objective(modes, {}, alpha, params, devices);
    const double eta = std::cbrt(params.nu * params.p0) / 100.0;
    double expect = 0.0;
    for (const auto& d : devices)
      expect += eta * std::cbrt(d.channel_gain / d.k_eff) * std::cbrt(alpha);
    CHECK(f == Approx(expect).epsilon(1e-12));
  }

  SECTION("single offloader reduces to one weighted term") {
    ModeVector modes(std::vector<std::uint8_t>{0, 0, 1, 0, 0, 0});
    const double alpha = 0.5;
    const PowerVector p{1e-6};
    double expect = devices[2].weight * offload_rate(2, p, modes, alpha, params, devices);
    for (std::size_t i : modes.mode_zero())
      expect += devices[i].weight * local_rate(devices[i], alpha, params);
    CHECK(weighted_objective(modes, p, alpha, params, devices) == Approx(expect).epsilon(1e-12));
  }

  SECTION("infeasible power names the violating user") {
    ModeVector modes(std::vector<std::uint8_t>{1, 1, 0, 0, 0, 0});
    const double alpha = 0.5;
    PowerVector p = max_power_vector(modes, devices, alpha, params);
    p[1] = p[1] * 2.0;
    try {
      weighted_objective(modes, p, alpha, params, devices);
      FAIL("expected FeasibilityError");
    } catch (const FeasibilityError& e) {
      CHECK(std::string(e.what()).find("device 2") != std::string::npos);
    }
  }

  SECTION("allocation objective recomputes consistently") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      ModeVector modes;
      modes.bits.resize(6);
      for (auto& b : modes.bits) b = rng.coin();
      const double alpha = rng.uniform(0.05, 0.95);
      const auto caps = max_power_vector(modes, devices, alpha, params);
      PowerVector p(caps.size());
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = caps[i] * rng.uniform01();
      const Allocation a = make_allocation(modes, alpha, p, params, devices);
      const double recomputed = weighted_objective(modes, p, alpha, params, devices);
      CHECK(a.objective == Approx(recomputed).epsilon(1e-9));
    }
  }
}
