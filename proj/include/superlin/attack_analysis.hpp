#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "superlin/detector_models.hpp"

namespace superlin {

/// Click probabilities of Bob's two detectors under the trigger pulse: full
/// power (Eve guessed Bob's basis) and half power (she did not).
struct ClickProbabilities {
  double p_f0 = 0.0;
  double p_f1 = 0.0;
  double p_h0 = 0.0;
  double p_h1 = 0.0;
};

double qber_general(double p_f0, double p_f1, double p_h0, double p_h1);
double qber_equal(double p_f, double p_h);
double transmittance_general(double p_f0, double p_f1, double p_h0,
                             double p_h1);
double transmittance_equal(double p_f, double p_h);

/// -10 log10(T).
double loss_db(double transmittance);

/// Shannon entropy in bits, h(0) = h(1) = 0.
double binary_entropy(double x);

/// Secret key rate lower bound per detection for a detector whose smallest
/// non-vacuum detection probability is eta. Negative means no key.
double key_rate_bound(double eta, double qber);

/// QBER of the attack against the worst-case detector (two-photon trigger
/// pulses always click, single photons click with probability eta).
double worst_case_qber(double eta);

/// Smallest eta whose worst-case attack QBER reaches qber; nullopt above the
/// largest attainable worst-case QBER (1/4).
std::optional<double> worst_case_efficiency(double qber);

/// The QBER in [0, 1/2) where key_rate_bound(eta, Q) = 0, by bisection.
double bound_crossing_qber(double eta);

/// Smallest eta for which key_rate_bound(eta, qber) >= 0. Closed form
/// h/(1 - h); the inverse of bound_crossing_qber.
double min_efficiency_for_key(double qber);

enum class Region { extractable, attackable, assume_insecure };

std::string_view to_string(Region region) noexcept;

struct SecurityAssessment {
  double eta = 0.0;
  double qber = 0.0;
  double key_rate_lower_bound = 0.0;
  Region region = Region::assume_insecure;
  // Set when the pair satisfies both the key-rate and the attack condition;
  // only happens on region boundaries, and the pair is then extractable.
  bool boundary = false;
};

SecurityAssessment classify_region(double eta, double qber);

struct AttackPoint {
  double mu = 0.0;
  std::optional<double> t;
  ClickProbabilities clicks;
  double qber = 0.0;
  double transmittance = 0.0;
  double loss_db = 0.0;
};

/// Builds an AttackPoint from click probabilities, computing QBER,
/// transmittance and loss.
AttackPoint make_attack_point(double mu, std::optional<double> t,
                              const ClickProbabilities& clicks);

/// Recomputes QBER, transmittance and loss from the stored clicks and checks
/// them against the stored values to tol.
bool is_consistent(const AttackPoint& point, double tol = 1e-12);

ClickProbabilities attack_clicks(const Detector& detector0,
                                 const Detector& detector1,
                                 const TriggerPulse& pulse);

AttackPoint evaluate_attack(const Detector& detector0,
                            const Detector& detector1,
                            const TriggerPulse& pulse);

struct ScanObjective {
  enum class Kind { min_qber, min_qber_within_loss };
  Kind kind = Kind::min_qber;
  double loss_budget_db = 0.0;

  static ScanObjective min_qber() { return {}; }
  static ScanObjective within_loss(double budget_db) {
    return {Kind::min_qber_within_loss, budget_db};
  }
};

struct ScanRequest {
  std::vector<double> mu_grid;
  std::vector<double> t_grid;  // empty: time-independent detectors
  PulseKind kind = PulseKind::coherent;
  ScanObjective objective;
};

struct ScanResult {
  std::vector<AttackPoint> table;        // mu-major, in grid order
  std::vector<AttackPoint> min_per_mu;   // lowest QBER over t for each mu
  std::optional<AttackPoint> best;       // nullopt: no feasible attack
};

/// QBER values closer than this are treated as equal when selecting the best
/// scan point. Analytically tied points (linear detectors are all at 1/4)
/// otherwise differ by rounding noise.
inline constexpr double kQberTieTolerance = 1e-12;

/// Exhaustive grid scan. Grid points are evaluated in parallel; the selected
/// points depend only on values (lowest QBER up to kQberTieTolerance, then
/// smaller mu, then earlier t), so the result matches optimize_attack_serial
/// exactly.
ScanResult optimize_attack(const Detector& detector0, const Detector& detector1,
                           const ScanRequest& request);

/// Single-threaded reference for optimize_attack.
ScanResult optimize_attack_serial(const Detector& detector0,
                                  const Detector& detector1,
                                  const ScanRequest& request);

enum class Verdict {
  breaks_key,
  detectable_by_qber,
  detectable_by_loss,
  detectable_by_both
};

std::string_view to_string(Verdict verdict) noexcept;

Verdict feasibility_verdict(const AttackPoint& point, double qber_threshold,
                            double loss_budget_db);

}  // namespace superlin
