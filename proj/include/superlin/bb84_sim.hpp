#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "superlin/attack_analysis.hpp"
#include "superlin/detector_models.hpp"

namespace superlin {

enum class BasisMode { active, passive };

std::string_view to_string(BasisMode mode) noexcept;

struct SimConfig {
  std::uint64_t trials = 1;
  TriggerPulse pulse;
  BasisMode basis_mode = BasisMode::active;
  std::uint64_t seed = 0;
  Detector detector0 = LinearDetector(0.1);
  Detector detector1 = LinearDetector(0.1);
};

/// Monte Carlo tallies. Trials are sifted pulses (Alice and Bob share a
/// basis) in active mode and raw pulses in passive mode, where sifting
/// happens on Bob's reported basis.
struct SimStats {
  std::uint64_t trials = 0;
  std::uint64_t detections = 0;         // trials where any detector clicked
  std::uint64_t sifted_detections = 0;  // detections kept after sifting
  std::uint64_t errors = 0;             // sifted detections with a wrong bit
  std::uint64_t double_clicks = 0;      // trials with two or more clicks
  std::uint64_t wrong_basis_detections = 0;  // sifted, Eve in the wrong basis

  // errors / sifted_detections; nullopt when nothing was detected.
  std::optional<double> qber_estimate;
  std::optional<double> qber_stderr;
  double transmittance_estimate = 0.0;  // detections / trials
  double transmittance_stderr = 0.0;

  bool estimates_defined() const noexcept { return qber_estimate.has_value(); }

  friend bool operator==(const SimStats&, const SimStats&) = default;
};

/// One active-receiver trial, exposed for trace-level checks.
struct ActiveTrial {
  bool basis_match = false;  // Eve measured in Bob's basis
  int alice_bit = 0;
  int eve_bit = 0;
  bool click0 = false;
  bool click1 = false;
  bool detected = false;
  int bob_bit = 0;
  bool error = false;
};

ActiveTrial run_active_trial(const ClickProbabilities& clicks,
                             std::uint64_t seed, std::uint64_t index);

/// Click probabilities inside a passive receiver: the analyzer sharing Eve's
/// basis gets half the pulse on the detector for her bit; each detector of
/// the other analyzer gets a quarter.
struct PassiveClicks {
  double p_half0 = 0.0;
  double p_half1 = 0.0;
  double p_quarter0 = 0.0;
  double p_quarter1 = 0.0;
};

struct PassiveTrial {
  int alice_basis = 0;
  int alice_bit = 0;
  int eve_basis = 0;
  int eve_bit = 0;
  bool clicks[2][2] = {{false, false}, {false, false}};  // [basis][bit]
  bool detected = false;
  int bob_basis = 0;
  int bob_bit = 0;
  bool sifted = false;
  bool error = false;
};

PassiveTrial run_passive_trial(const PassiveClicks& clicks, std::uint64_t seed,
                               std::uint64_t index);

ClickProbabilities active_clicks(const SimConfig& config);
PassiveClicks passive_clicks(const SimConfig& config);

SimStats simulate_active(const SimConfig& config);
SimStats simulate_active_serial(const SimConfig& config);
SimStats simulate_passive(const SimConfig& config);
SimStats simulate_passive_serial(const SimConfig& config);

/// Dispatches on config.basis_mode.
SimStats simulate(const SimConfig& config);

struct ExactOutcome {
  double qber = 0.0;
  double transmittance = 0.0;
};

/// Exact expectation over the finite event tree of the active attack. An
/// oracle for qber_general and transmittance_general.
ExactOutcome enumerate_exact(double p_f0, double p_f1, double p_h0,
                             double p_h1);

/// Same for the passive receiver. transmittance counts any detection,
/// qber is over sifted detections.
ExactOutcome enumerate_exact_passive(const PassiveClicks& clicks);

}  // namespace superlin
