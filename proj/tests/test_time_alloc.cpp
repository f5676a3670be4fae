#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wpmec/channel.hpp"
#include "wpmec/rng.hpp"
#include "wpmec/time_alloc.hpp"

using namespace wpmec;
using Catch::Approx;

TEST_CASE("golden section on analytic functions", "[time_alloc]") {
  SECTION("parabola peak at 0.3") {
    auto f = [](double x) { return 1.0 - (x - 0.3) * (x - 0.3); };
    const auto r = golden_section_maximize(f, 0.0, 1.0, 1e-6);
    CHECK(r.converged);
    CHECK(std::abs(r.x - 0.3) <= 1e-6);
    CHECK(r.value == Approx(1.0).margin(1e-9));
  }

  SECTION("constant function, any point works") {
    auto f = [](double) { return 4.2; };
    const auto r = golden_section_maximize(f, -1.0, 2.0, 1e-6);
    CHECK(r.converged);
    CHECK(r.value == 4.2);
    CHECK(r.x >= -1.0);
    CHECK(r.x <= 2.0);
  }

  SECTION("cube-root tradeoff peaks at 1/4") {
    // d/dx [x^(1/3)(1-x)] = 0  <=>  (1-x)/3 = x  <=>  x = 1/4
    auto f = [](double x) { return std::cbrt(x) * (1.0 - x); };
    const auto r = golden_section_maximize(f, 0.0, 1.0, 1e-6);
    CHECK(std::abs(r.x - 0.25) <= 1e-6);
    CHECK(r.value == Approx(0.47247039371057744).epsilon(1e-9));
  }

  SECTION("evaluation count stays within the golden-ratio bound") {
    int calls = 0;
    auto f = [&](double x) {
      ++calls;
      return -(x - 0.7) * (x - 0.7);
    };
    for (double tol : {1e-3, 1e-5, 1e-7}) {
      for (double hi : {1.0, 3.0}) {
        calls = 0;
        const auto r = golden_section_maximize(f, 0.0, hi, tol, 10000);
        const int bound = int(std::ceil(std::log(hi / tol) / std::log(1.0 / 0.6180339887498949))) + 2;
        CHECK(r.converged);
        CHECK(calls == r.evals);
        CHECK(r.evals <= bound);
      }
    }
  }

  SECTION("budget exhaustion returns best-so-far with the flag down") {
    auto f = [](double x) { return -(x - 0.5) * (x - 0.5); };
    const auto r = golden_section_maximize(f, 0.0, 1.0, 1e-12, 8);
    CHECK_FALSE(r.converged);
    CHECK(r.evals <= 8);
  }

  SECTION("degenerate inputs rejected") {
    auto f = [](double x) { return x; };
    CHECK_THROWS_AS(golden_section_maximize(f, 1.0, 1.0, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(golden_section_maximize(f, 0.0, 1.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("evaluate_modes over alpha", "[time_alloc]") {
  SystemParams params;
  const FpOptions fp_opts;
  const double gs_tol = 1e-4;

  SECTION("all-local pushes alpha to the upper clamp") {
    const auto devices = build_instance(params, {3, 4, 5});
    const auto eval = evaluate_modes(ModeVector::uniform(3, false), params, devices, fp_opts,
                                     gs_tol);
    CHECK(eval.alpha >= kAlphaMax - gs_tol);
    double expect = 0.0;
    for (const auto& d : devices) expect += local_rate(d, eval.alpha, params);
    CHECK(eval.objective == Approx(expect).epsilon(1e-12));
    CHECK(eval.powers.empty());
  }

  SECTION("all-offload lands strictly inside the interval") {
    const auto devices = build_instance(params, {3, 4, 5});
    const auto eval =
        evaluate_modes(ModeVector::uniform(3, true), params, devices, fp_opts, gs_tol);
    CHECK(eval.alpha > kAlphaMin + gs_tol);
    CHECK(eval.alpha < kAlphaMax - gs_tol);
    CHECK(eval.objective > 0.0);
    REQUIRE(eval.powers.size() == 3);
  }

  SECTION("returned value dominates 20 sampled alphas") {
    const auto devices = build_instance(params, {3, 5, 7, 9});
    Rng rng(61);
    for (int inst = 0; inst < 3; ++inst) {
      ModeVector modes;
      modes.bits.resize(4);
      for (auto& b : modes.bits) b = rng.coin();
      const auto eval = evaluate_modes(modes, params, devices, fp_opts, gs_tol);
      const auto m0 = modes.mode_zero();
      for (int s = 0; s < 20; ++s) {
        const double alpha = kAlphaMin + (kAlphaMax - kAlphaMin) * (s + 0.5) / 20.0;
        double f = 0.0;
        for (std::size_t i : m0) f += devices[i].weight * local_rate(devices[i], alpha, params);
        if (modes.count_ones() > 0)
          f += fp_power_control(modes, alpha, params, devices, fp_opts).objective;
        CHECK(eval.objective >= f * (1.0 - 5e-3));
      }
    }
  }

  SECTION("trace sink collects one trace per fp invocation") {
    const auto devices = build_instance(params, {3, 4});
    FpTraceSink sink;
    const auto eval = evaluate_modes(ModeVector::uniform(2, true), params, devices, fp_opts,
                                     gs_tol, &sink);
    CHECK(long(sink.size()) == eval.fp_invocations);
    CHECK(!sink.empty());
    for (const auto& trace : sink)
      for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] >= trace[k - 1] - 1e-9);
  }
}
