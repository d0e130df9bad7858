#include <cmath>
#include <random>

#include "doctest.h"
#include "superlin/attack_analysis.hpp"
#include "superlin/bb84_sim.hpp"
#include "superlin/error.hpp"
#include "test_support.hpp"

using namespace superlin;
using superlin::test::expect_error;

namespace {

SimConfig stub_config(double pf0, double pf1, double ph0, double ph1,
                      std::uint64_t trials, std::uint64_t seed) {
  SimConfig config;
  config.trials = trials;
  config.pulse = TriggerPulse{1.0, std::nullopt, PulseKind::coherent};
  config.seed = seed;
  config.detector0 = FixedResponseDetector(pf0, ph0);
  config.detector1 = FixedResponseDetector(pf1, ph1);
  return config;
}

}  // namespace

TEST_CASE("enumerate_exact reproduces the closed forms") {
  const auto perfect = enumerate_exact(1, 1, 0, 0);
  CHECK(perfect.qber == 0.0);
  CHECK(perfect.transmittance == 0.5);

  const auto flat = enumerate_exact(0.3, 0.3, 0.3, 0.3);
  CHECK(std::abs(flat.qber - qber_general(0.3, 0.3, 0.3, 0.3)) <= 1e-15);
  CHECK(std::abs(flat.transmittance - transmittance_general(0.3, 0.3, 0.3, 0.3)) <=
        1e-15);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = dist(rng), b = dist(rng), c = dist(rng), d = dist(rng);
    const auto e = enumerate_exact(a, b, c, d);
    CHECK(std::abs(e.qber - qber_general(a, b, c, d)) <= 1e-15);
    CHECK(std::abs(e.transmittance - transmittance_general(a, b, c, d)) <= 1e-15);
  }
  expect_error(ErrorCode::no_detections, [] { enumerate_exact(0, 0, 0, 0); });
  expect_error(ErrorCode::invalid_argument, [] { enumerate_exact(2, 0, 0, 0); });
}

TEST_CASE("perfect control: no errors, half the pulses detected") {
  const auto s = simulate_active(stub_config(1, 1, 0, 0, 100000, 1));
  REQUIRE(s.estimates_defined());
  CHECK(*s.qber_estimate == 0.0);
  CHECK(s.errors == 0);
  CHECK(s.double_clicks == 0);
  CHECK(s.wrong_basis_detections == 0);
  const double sigma = std::sqrt(0.25 / 100000.0);
  CHECK(std::abs(s.transmittance_estimate - 0.5) <= 3 * sigma);
}

TEST_CASE("anchor stub converges to the closed form") {
  const auto s = simulate_active(stub_config(0.0054, 0.0054, 0.00089, 0.00089,
                                             10'000'000, 2024));
  REQUIRE(s.estimates_defined());
  const double q = qber_equal(0.0054, 0.00089);
  const double t = transmittance_equal(0.0054, 0.00089);
  CHECK(std::abs(*s.qber_estimate - q) <= 3 * *s.qber_stderr);
  CHECK(std::abs(s.transmittance_estimate - t) <= 3 * s.transmittance_stderr);
}

TEST_CASE("active estimates converge across seeds") {
  const double pf0 = 0.6, pf1 = 0.45, ph0 = 0.25, ph1 = 0.15;
  const double q = qber_general(pf0, pf1, ph0, ph1);
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = simulate_active(stub_config(pf0, pf1, ph0, ph1, 20000, seed));
    if (std::abs(*s.qber_estimate - q) <= 4 * *s.qber_stderr) ++within;
  }
  CHECK(within >= 99);
}

TEST_CASE("simulation is deterministic and order independent") {
  auto config = stub_config(0.7, 0.5, 0.3, 0.2, 200000, 99);
  const auto a = simulate_active(config);
  const auto b = simulate_active(config);
  const auto c = simulate_active_serial(config);
  CHECK(a == b);
  CHECK(a == c);

  config.basis_mode = BasisMode::passive;
  config.detector0 = LinearDetector(0.3);
  config.detector1 = ParametricSuperlinearDetector(0.2, 0.05);
  config.pulse.mu = 3.0;
  const auto p = simulate_passive(config);
  CHECK(p == simulate_passive(config));
  CHECK(p == simulate_passive_serial(config));
  CHECK(p == simulate(config));

  config.seed = 100;
  CHECK(!(p == simulate_passive(config)));

  // One trial, replayed.
  const ClickProbabilities clicks{0.7, 0.5, 0.3, 0.2};
  const auto t1 = run_active_trial(clicks, 5, 0);
  const auto t2 = run_active_trial(clicks, 5, 0);
  CHECK(t1.basis_match == t2.basis_match);
  CHECK(t1.alice_bit == t2.alice_bit);
  CHECK(t1.click0 == t2.click0);
  CHECK(t1.click1 == t2.click1);
  CHECK(t1.bob_bit == t2.bob_bit);
}

TEST_CASE("active errors occur only on basis mismatch") {
  const ClickProbabilities clicks{0.8, 0.6, 0.5, 0.4};
  std::uint64_t mismatch_errors = 0;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const auto t = run_active_trial(clicks, 77, i);
    if (t.basis_match) {
      CHECK_FALSE(t.error);
      CHECK_FALSE((t.click0 && t.click1));
      CHECK(t.eve_bit == t.alice_bit);
    }
    if (!t.detected) CHECK_FALSE(t.error);
    if (t.error) ++mismatch_errors;
  }
  CHECK(mismatch_errors > 0);
}

TEST_CASE("tallies satisfy count invariants") {
  for (BasisMode mode : {BasisMode::active, BasisMode::passive}) {
    auto config = stub_config(0.5, 0.4, 0.3, 0.2, 50000, 8);
    config.detector0 = FixedResponseDetector(0.5, 0.3, 0.2);
    config.detector1 = FixedResponseDetector(0.4, 0.2, 0.1);
    config.basis_mode = mode;
    const auto s = simulate(config);
    CHECK(s.errors <= s.sifted_detections);
    CHECK(s.sifted_detections <= s.detections);
    CHECK(s.detections <= s.trials);
    CHECK(s.double_clicks <= s.detections);
    CHECK(s.wrong_basis_detections <= s.sifted_detections);
    const double q = double(s.errors) / double(s.sifted_detections);
    CHECK(*s.qber_estimate == q);
    CHECK(*s.qber_stderr == std::sqrt(q * (1 - q) / double(s.sifted_detections)));
    CHECK(s.transmittance_estimate == double(s.detections) / double(s.trials));
  }
}

TEST_CASE("zero-detection runs are flagged, not thrown") {
  for (BasisMode mode : {BasisMode::active, BasisMode::passive}) {
    auto config = stub_config(0, 0, 0, 0, 1000, 3);
    config.basis_mode = mode;
    const auto s = simulate(config);
    CHECK(s.detections == 0);
    CHECK_FALSE(s.estimates_defined());
    CHECK_FALSE(s.qber_stderr.has_value());
    CHECK(s.transmittance_estimate == 0.0);
  }
  SimConfig bad;
  bad.trials = 0;
  expect_error(ErrorCode::invalid_argument, [&] { simulate(bad); });
}

TEST_CASE("passive receiver with linear detectors stays at or above 25%") {
  SimConfig config;
  config.trials = 1'000'000;
  config.pulse = TriggerPulse{2.0, std::nullopt, PulseKind::coherent};
  config.basis_mode = BasisMode::passive;
  config.seed = 4;
  config.detector0 = LinearDetector(0.1);
  config.detector1 = LinearDetector(0.1);
  const auto s = simulate(config);
  REQUIRE(s.estimates_defined());
  CHECK(*s.qber_estimate >= 0.25 - 3 * *s.qber_stderr);

  // Closed form for equal linear detectors: a = 1 - exp(-mu eta / 2) is the
  // click probability of the loaded detector, the quarter arms click with
  // b = 1 - exp(-mu eta / 4) where 2b - b^2 = a.
  const double a = -std::expm1(-2.0 * 0.1 / 2.0);
  const auto exact = enumerate_exact_passive(passive_clicks(config));
  CHECK(std::abs(exact.qber - 1.0 / (2.0 * (2.0 - a))) < 1e-14);
  CHECK(std::abs(exact.transmittance - (2 * a - a * a)) < 1e-14);
  CHECK(std::abs(*s.qber_estimate - exact.qber) <= 4 * *s.qber_stderr);
  CHECK(std::abs(s.transmittance_estimate - exact.transmittance) <=
        4 * s.transmittance_stderr);
}

TEST_CASE("passive simulation converges to the passive event tree") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  for (int i = 0; i < 5; ++i) {
    const PassiveClicks c{dist(rng), dist(rng), dist(rng), dist(rng)};
    SimConfig config;
    config.trials = 200000;
    config.basis_mode = BasisMode::passive;
    config.seed = 1000 + i;
    config.detector0 = FixedResponseDetector(0.9, c.p_half0, c.p_quarter0);
    config.detector1 = FixedResponseDetector(0.9, c.p_half1, c.p_quarter1);
    const auto s = simulate(config);
    const auto exact = enumerate_exact_passive(c);
    CHECK(std::abs(*s.qber_estimate - exact.qber) <= 4 * *s.qber_stderr);
    CHECK(std::abs(s.transmittance_estimate - exact.transmittance) <=
          4 * s.transmittance_stderr);
  }
  expect_error(ErrorCode::no_detections,
               [] { enumerate_exact_passive({0, 0, 0, 0}); });
}

TEST_CASE("passive mode needs quarter-power data") {
  SimConfig config;
  config.basis_mode = BasisMode::passive;
  config.pulse = TriggerPulse{2.0, std::nullopt, PulseKind::fock};
  config.detector0 = WorstCaseDetector(0.1);
  config.detector1 = WorstCaseDetector(0.1);
  expect_error(ErrorCode::invalid_argument, [&] { simulate(config); });
}
