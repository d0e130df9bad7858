#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace superlin {

inline constexpr double kDefaultPoissonTol = 1e-12;

/// Independent-photon threshold detector: p(n) = 1 - (1 - eta)^n.
class LinearDetector {
 public:
  explicit LinearDetector(double eta);
  double eta() const noexcept { return eta_; }

 private:
  double eta_;
};

/// Synthetic superlinear law used for testing and fixtures, not a physical
/// APD model: p(n) = 1 - (1 - eta1)^n (1 - eta2)^(n(n-1)/2).
/// Every photon pair gets an extra, cooperative chance to trigger a click.
class ParametricSuperlinearDetector {
 public:
  ParametricSuperlinearDetector(double eta1, double eta2);
  double eta1() const noexcept { return eta1_; }
  double eta2() const noexcept { return eta2_; }

 private:
  double eta1_;
  double eta2_;
};

/// Extreme superlinearity: one photon clicks with probability eta, any two
/// or more photons always click.
class WorstCaseDetector {
 public:
  explicit WorstCaseDetector(double eta);
  double eta() const noexcept { return eta_; }

 private:
  double eta_;
};

/// Click probabilities fixed per power fraction, independent of the pulse
/// mean photon number. Decouples attack-formula checks from detector
/// modelling.
class FixedResponseDetector {
 public:
  FixedResponseDetector(double p_full, double p_half, double p_quarter = 0.0);
  double p_full() const noexcept { return p_full_; }
  double p_half() const noexcept { return p_half_; }
  double p_quarter() const noexcept { return p_quarter_; }

 private:
  double p_full_;
  double p_half_;
  double p_quarter_;
};

struct CurvePoint {
  double mu;
  double p;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Tabulated p(mu) measurements. Points are strictly increasing in mu,
/// mu > 0 and p in [0, 1]; at least two points.
class ResponseCurve {
 public:
  ResponseCurve(std::vector<CurvePoint> points, std::string label = {});

  const std::vector<CurvePoint>& points() const noexcept { return points_; }
  const std::string& label() const noexcept { return label_; }
  double mu_min() const noexcept { return points_.front().mu; }
  double mu_max() const noexcept { return points_.back().mu; }

 private:
  std::vector<CurvePoint> points_;
  std::string label_;
};

/// A scan of response curves across gate-relative time (ns). All curves share
/// one mu axis.
class TimeResolvedResponse {
 public:
  TimeResolvedResponse(std::vector<double> times,
                       std::vector<ResponseCurve> curves,
                       std::string label = {});

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<ResponseCurve>& curves() const noexcept { return curves_; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<double> times_;
  std::vector<ResponseCurve> curves_;
  std::string label_;
};

using Detector =
    std::variant<LinearDetector, ParametricSuperlinearDetector,
                 WorstCaseDetector, FixedResponseDetector, ResponseCurve,
                 TimeResolvedResponse>;

/// True for the models that define a Fock-state law.
bool has_fock_law(const Detector& model) noexcept;

std::string describe(const Detector& model);

double fock_detection_prob(const Detector& model, std::uint64_t n);

/// Detection probability of a coherent state. LinearDetector uses the closed
/// form; the other Fock-law models use poisson_series_detection_prob.
double coherent_detection_prob(const Detector& model, double mu,
                               double tol = kDefaultPoissonTol);

/// Sum over n of Poisson(n; mu) * p(n), always by series. The window grows
/// outward from the Poisson mode until a geometric bound on the two
/// remaining tails drops below tol relative to the result (or below tol^2
/// absolute when the result is that small).
double poisson_series_detection_prob(const Detector& model, double mu,
                                     double tol = kDefaultPoissonTol);

/// 1 - exp(-mu * eta).
double linear_coherent_detection_prob(double eta, double mu);

/// Inverts the linear coherent-state law: eta = -ln(1 - p) / mu.
double efficiency_from_coherent_point(double p, double mu);

/// Piecewise-linear in (ln mu, p). Never extrapolates.
double interpolate_response(const ResponseCurve& curve, double mu);

/// Nearest time slice (earlier slice on a tie), then interpolate in mu.
double time_resolved_lookup(const TimeResolvedResponse& grid, double t,
                            double mu);

/// Measured p(mu) over the linear prediction built from the efficiency
/// extracted at mu_ref. Values above 1 mean superlinear response at mu.
double superlinearity_ratio(const ResponseCurve& curve, double mu,
                            double mu_ref);

// Trigger pulses as seen by the detectors.

enum class PulseKind { coherent, fock };

/// Share of the trigger pulse reaching one detector: whole pulse, half (wrong
/// basis, active receiver) or quarter (wrong basis analyzer, passive
/// receiver).
enum class PowerFraction { full, half, quarter };

double fraction_value(PowerFraction fraction) noexcept;

struct TriggerPulse {
  double mu = 0.0;  // mean photon number, or photon count for Fock pulses
  std::optional<double> t;  // gate-relative time, ns
  PulseKind kind = PulseKind::coherent;
};

/// Click probability of one detector receiving the given fraction of a
/// trigger pulse.
///
/// Coherent pulses split into coherent pulses, so a fraction f of a pulse
/// with mean mu is evaluated at f * mu. A Fock pulse of n photons split in
/// half puts floor(n/2) or ceil(n/2) photons on a detector with equal
/// probability; quarter splits of Fock pulses are not modelled. Time-resolved
/// data requires pulse.t; other models ignore it.
double click_probability(const Detector& model, const TriggerPulse& pulse,
                         PowerFraction fraction);

}  // namespace superlin
