#include "superlin/detector_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "superlin/error.hpp"

namespace superlin {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::no_fock_law: return "no Fock law";
    case ErrorCode::saturated_measurement: return "saturated measurement";
    case ErrorCode::superunity_efficiency: return "superunity efficiency";
    case ErrorCode::extrapolation_refused: return "extrapolation refused";
    case ErrorCode::no_detections: return "no detections";
    case ErrorCode::infinite_loss: return "infinite loss";
    case ErrorCode::data_format: return "data format";
    case ErrorCode::io: return "i/o";
  }
  return "unknown";
}

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

void require_probability(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream os;
    os << name << " must lie in [0, 1], got " << value;
    throw Error(ErrorCode::invalid_argument, os.str());
  }
}

// 1 - prod (1 - eta)^count, computed without cancellation for small eta.
double one_minus_survival(
    std::initializer_list<std::pair<double, double>> eta_and_count) {
  double log_survival = 0.0;
  for (auto [eta, count] : eta_and_count) {
    if (count == 0.0) continue;
    if (eta >= 1.0) return 1.0;
    log_survival += count * std::log1p(-eta);
  }
  return -std::expm1(log_survival);
}

double fock_law(const Detector& model, std::uint64_t n) {
  if (n == 0) {
    if (!has_fock_law(model))
      throw Error(ErrorCode::no_fock_law, describe(model) + " has no Fock law");
    return 0.0;
  }
  const double photons = static_cast<double>(n);
  return std::visit(
      overloaded{
          [&](const LinearDetector& d) {
            return one_minus_survival({{d.eta(), photons}});
          },
          [&](const ParametricSuperlinearDetector& d) {
            const double pairs = photons * (photons - 1.0) / 2.0;
            return one_minus_survival({{d.eta1(), photons}, {d.eta2(), pairs}});
          },
          [&](const WorstCaseDetector& d) { return n == 1 ? d.eta() : 1.0; },
          [&](const auto&) -> double {
            throw Error(ErrorCode::no_fock_law,
                        describe(model) + " has no Fock law");
          },
      },
      model);
}

}  // namespace

LinearDetector::LinearDetector(double eta) : eta_(eta) {
  require_probability(eta, "eta");
}

ParametricSuperlinearDetector::ParametricSuperlinearDetector(double eta1,
                                                             double eta2)
    : eta1_(eta1), eta2_(eta2) {
  require_probability(eta1, "eta1");
  require_probability(eta2, "eta2");
}

WorstCaseDetector::WorstCaseDetector(double eta) : eta_(eta) {
  require_probability(eta, "eta");
}

FixedResponseDetector::FixedResponseDetector(double p_full, double p_half,
                                             double p_quarter)
    : p_full_(p_full), p_half_(p_half), p_quarter_(p_quarter) {
  require_probability(p_full, "p_full");
  require_probability(p_half, "p_half");
  require_probability(p_quarter, "p_quarter");
}

ResponseCurve::ResponseCurve(std::vector<CurvePoint> points, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {
  if (points_.size() < 2)
    throw Error(ErrorCode::invalid_argument,
                "response curve needs at least 2 points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& pt = points_[i];
    if (!(pt.mu > 0.0) || !std::isfinite(pt.mu)) {
      std::ostringstream os;
      os << "response curve point " << i << ": mu must be positive, got "
         << pt.mu;
      throw Error(ErrorCode::invalid_argument, os.str());
    }
    require_probability(pt.p, "response curve p");
    if (i > 0 && !(pt.mu > points_[i - 1].mu)) {
      std::ostringstream os;
      os << "response curve point " << i << ": mu values must be strictly "
         << "increasing (" << points_[i - 1].mu << " then " << pt.mu << ")";
      throw Error(ErrorCode::invalid_argument, os.str());
    }
  }
}

TimeResolvedResponse::TimeResolvedResponse(std::vector<double> times,
                                           std::vector<ResponseCurve> curves,
                                           std::string label)
    : times_(std::move(times)), curves_(std::move(curves)),
      label_(std::move(label)) {
  if (times_.empty() || times_.size() != curves_.size())
    throw Error(ErrorCode::invalid_argument,
                "time-resolved response needs one curve per time point");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1]))
      throw Error(ErrorCode::invalid_argument,
                  "time-resolved response: times must be strictly increasing");
  }
  const auto& axis = curves_.front().points();
  for (std::size_t i = 1; i < curves_.size(); ++i) {
    const auto& pts = curves_[i].points();
    const bool same_axis =
        pts.size() == axis.size() &&
        std::equal(pts.begin(), pts.end(), axis.begin(),
                   [](const CurvePoint& a, const CurvePoint& b) {
                     return a.mu == b.mu;
                   });
    if (!same_axis) {
      std::ostringstream os;
      os << "time-resolved response: curve at t=" << times_[i]
         << " does not share the mu axis of t=" << times_.front();
      throw Error(ErrorCode::invalid_argument, os.str());
    }
  }
}

bool has_fock_law(const Detector& model) noexcept {
  return std::holds_alternative<LinearDetector>(model) ||
         std::holds_alternative<ParametricSuperlinearDetector>(model) ||
         std::holds_alternative<WorstCaseDetector>(model);
}

std::string describe(const Detector& model) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const LinearDetector& d) {
                   os << "linear(eta=" << d.eta() << ")";
                 },
                 [&](const ParametricSuperlinearDetector& d) {
                   os << "superlinear(eta1=" << d.eta1()
                      << ", eta2=" << d.eta2() << ")";
                 },
                 [&](const WorstCaseDetector& d) {
                   os << "worst-case(eta=" << d.eta() << ")";
                 },
                 [&](const FixedResponseDetector& d) {
                   os << "fixed-response(p_f=" << d.p_full()
                      << ", p_h=" << d.p_half() << ", p_q=" << d.p_quarter()
                      << ")";
                 },
                 [&](const ResponseCurve& c) {
                   os << "response curve '" << c.label() << "'";
                 },
                 [&](const TimeResolvedResponse& g) {
                   os << "time-resolved response '" << g.label() << "'";
                 },
             },
             model);
  return os.str();
}

double fock_detection_prob(const Detector& model, std::uint64_t n) {
  return fock_law(model, n);
}

double linear_coherent_detection_prob(double eta, double mu) {
  return -std::expm1(-mu * eta);
}

double poisson_series_detection_prob(const Detector& model, double mu,
                                     double tol) {
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw Error(ErrorCode::invalid_argument, "mu must be finite and >= 0");
  if (!(tol > 0.0))
    throw Error(ErrorCode::invalid_argument, "tol must be positive");
  if (!has_fock_law(model))
    throw Error(ErrorCode::no_fock_law, describe(model) + " has no Fock law");
  if (mu == 0.0) return 0.0;

  // Weights are Poisson probabilities relative to the mode; the common
  // normalisation cancels in the final ratio, which keeps the sum accurate
  // for very large mu where exp(-mu) underflows.
  const auto mode = static_cast<std::uint64_t>(std::floor(mu));
  long double mass = 1.0L;
  long double weighted = fock_law(model, mode);

  std::uint64_t lo = mode;  // lowest index included
  std::uint64_t hi = mode;  // highest index included
  long double w_lo = 1.0L;
  long double w_hi = 1.0L;
  const long double lmu = mu;

  for (;;) {
    // Weight of the next term outside each edge.
    const long double next_hi = w_hi * lmu / static_cast<long double>(hi + 1);
    const long double next_lo =
        lo == 0 ? 0.0L : w_lo * static_cast<long double>(lo) / lmu;
    // Beyond hi the term ratios are at most mu/(hi+2) < 1; below lo they are
    // at most (lo-1)/mu < 1. Geometric series bound both tails.
    const long double ratio_hi = lmu / static_cast<long double>(hi + 2);
    const long double tail_hi = next_hi / (1.0L - ratio_hi);
    long double tail_lo = 0.0L;
    if (lo > 0) {
      const long double ratio_lo = static_cast<long double>(lo - 1) / lmu;
      tail_lo = next_lo / (1.0L - ratio_lo);
    }
    // The tails add at most their weight to the sum, so this bounds the
    // relative error; tol^2 is the floor for vanishing probabilities.
    const long double ltol = tol;
    if (tail_hi + tail_lo < ltol * std::max(weighted, ltol * mass)) break;

    if (next_hi >= next_lo) {
      ++hi;
      w_hi = next_hi;
      mass += w_hi;
      weighted += w_hi * fock_law(model, hi);
    } else {
      --lo;
      w_lo = next_lo;
      mass += w_lo;
      weighted += w_lo * fock_law(model, lo);
    }
  }
  return std::clamp(static_cast<double>(weighted / mass), 0.0, 1.0);
}

double coherent_detection_prob(const Detector& model, double mu, double tol) {
  if (const auto* lin = std::get_if<LinearDetector>(&model)) {
    if (!(mu >= 0.0))
      throw Error(ErrorCode::invalid_argument, "mu must be >= 0");
    return linear_coherent_detection_prob(lin->eta(), mu);
  }
  return poisson_series_detection_prob(model, mu, tol);
}

double efficiency_from_coherent_point(double p, double mu) {
  if (!(mu > 0.0))
    throw Error(ErrorCode::invalid_argument, "mu must be positive");
  require_probability(p, "p");
  if (p == 1.0)
    throw Error(ErrorCode::saturated_measurement,
                "p = 1 carries no efficiency information");
  const double eta = -std::log1p(-p) / mu;
  if (eta > 1.0) {
    std::ostringstream os;
    os << "efficiency " << eta << " > 1 from p=" << p << " at mu=" << mu
       << "; calibration data is inconsistent";
    throw Error(ErrorCode::superunity_efficiency, os.str());
  }
  return eta;
}

double interpolate_response(const ResponseCurve& curve, double mu) {
  const auto& pts = curve.points();
  if (!(mu >= curve.mu_min() && mu <= curve.mu_max())) {
    std::ostringstream os;
    os << "mu=" << mu << " outside tabulated range [" << curve.mu_min() << ", "
       << curve.mu_max() << "] of " << describe(curve);
    throw Error(ErrorCode::extrapolation_refused, os.str());
  }
  auto upper = std::lower_bound(
      pts.begin(), pts.end(), mu,
      [](const CurvePoint& pt, double value) { return pt.mu < value; });
  if (upper->mu == mu) return upper->p;
  const auto lower = std::prev(upper);
  const double w = (std::log(mu) - std::log(lower->mu)) /
                   (std::log(upper->mu) - std::log(lower->mu));
  return std::clamp(lower->p + w * (upper->p - lower->p), 0.0, 1.0);
}

double time_resolved_lookup(const TimeResolvedResponse& grid, double t,
                            double mu) {
  const auto& times = grid.times();
  if (!(t >= times.front() && t <= times.back())) {
    std::ostringstream os;
    os << "t=" << t << " ns outside scanned range [" << times.front() << ", "
       << times.back() << "] of " << describe(grid);
    throw Error(ErrorCode::extrapolation_refused, os.str());
  }
  auto it = std::lower_bound(times.begin(), times.end(), t);
  auto idx = static_cast<std::size_t>(it - times.begin());
  if (*it != t && idx > 0 && t - times[idx - 1] <= *it - t) --idx;
  return interpolate_response(grid.curves()[idx], mu);
}

double superlinearity_ratio(const ResponseCurve& curve, double mu,
                            double mu_ref) {
  const double p_ref = interpolate_response(curve, mu_ref);
  const double eta_ref = efficiency_from_coherent_point(p_ref, mu_ref);
  const double predicted = linear_coherent_detection_prob(eta_ref, mu);
  if (predicted == 0.0)
    throw Error(ErrorCode::invalid_argument,
                "reference efficiency is zero; ratio undefined");
  return interpolate_response(curve, mu) / predicted;
}

double fraction_value(PowerFraction fraction) noexcept {
  switch (fraction) {
    case PowerFraction::full: return 1.0;
    case PowerFraction::half: return 0.5;
    case PowerFraction::quarter: return 0.25;
  }
  return 1.0;
}

namespace {

double fock_pulse_click(const Detector& model, double photons,
                        PowerFraction fraction) {
  if (!(photons >= 0.0) || std::floor(photons) != photons)
    throw Error(ErrorCode::invalid_argument,
                "Fock trigger pulses need a whole photon count");
  const auto n = static_cast<std::uint64_t>(photons);
  switch (fraction) {
    case PowerFraction::full:
      return fock_law(model, n);
    case PowerFraction::half:
      return 0.5 * (fock_law(model, n / 2) + fock_law(model, n - n / 2));
    case PowerFraction::quarter:
      break;
  }
  throw Error(ErrorCode::invalid_argument,
              "quarter splits of Fock pulses are not modelled");
}

}  // namespace

double click_probability(const Detector& model, const TriggerPulse& pulse,
                         PowerFraction fraction) {
  if (const auto* fixed = std::get_if<FixedResponseDetector>(&model)) {
    switch (fraction) {
      case PowerFraction::full: return fixed->p_full();
      case PowerFraction::half: return fixed->p_half();
      case PowerFraction::quarter: return fixed->p_quarter();
    }
  }
  if (pulse.kind == PulseKind::fock)
    return fock_pulse_click(model, pulse.mu, fraction);

  const double mu = pulse.mu * fraction_value(fraction);
  if (const auto* curve = std::get_if<ResponseCurve>(&model))
    return interpolate_response(*curve, mu);
  if (const auto* grid = std::get_if<TimeResolvedResponse>(&model)) {
    if (!pulse.t)
      throw Error(ErrorCode::invalid_argument,
                  describe(model) + " needs a trigger time");
    return time_resolved_lookup(*grid, *pulse.t, mu);
  }
  return coherent_detection_prob(model, mu);
}

}  // namespace superlin
