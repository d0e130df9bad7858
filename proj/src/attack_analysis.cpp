#include "superlin/attack_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <span>
#include <sstream>

#include "superlin/error.hpp"

namespace superlin {

namespace {

void require_probability(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream os;
    os << name << " must lie in [0, 1], got " << value;
    throw Error(ErrorCode::invalid_argument, os.str());
  }
}

// Probability that at least one of two independent detectors clicks.
double either(double a, double b) { return a + b - a * b; }

}  // namespace

double qber_general(double p_f0, double p_f1, double p_h0, double p_h1) {
  require_probability(p_f0, "p_f0");
  require_probability(p_f1, "p_f1");
  require_probability(p_h0, "p_h0");
  require_probability(p_h1, "p_h1");
  const double wrong_basis = either(p_h0, p_h1);
  const double denominator = p_f0 + p_f1 + 2.0 * wrong_basis;
  if (denominator == 0.0)
    throw Error(ErrorCode::no_detections,
                "trigger pulse is never detected; QBER undefined");
  return wrong_basis / denominator;
}

double qber_equal(double p_f, double p_h) {
  require_probability(p_f, "p_f");
  require_probability(p_h, "p_h");
  const double wrong_basis = 2.0 * p_h - p_h * p_h;
  const double denominator = 2.0 * p_f + 2.0 * wrong_basis;
  if (denominator == 0.0)
    throw Error(ErrorCode::no_detections,
                "trigger pulse is never detected; QBER undefined");
  return wrong_basis / denominator;
}

double transmittance_general(double p_f0, double p_f1, double p_h0,
                             double p_h1) {
  require_probability(p_f0, "p_f0");
  require_probability(p_f1, "p_f1");
  require_probability(p_h0, "p_h0");
  require_probability(p_h1, "p_h1");
  return 0.25 * (p_f0 + p_f1) + 0.5 * either(p_h0, p_h1);
}

double transmittance_equal(double p_f, double p_h) {
  require_probability(p_f, "p_f");
  require_probability(p_h, "p_h");
  return 0.5 * p_f + 0.5 * (2.0 * p_h - p_h * p_h);
}

double loss_db(double transmittance) {
  if (transmittance == 0.0)
    throw Error(ErrorCode::infinite_loss, "zero transmittance");
  if (!(transmittance > 0.0 && transmittance <= 1.0)) {
    std::ostringstream os;
    os << "transmittance must lie in (0, 1], got " << transmittance;
    throw Error(ErrorCode::invalid_argument, os.str());
  }
  return -10.0 * std::log10(transmittance);
}

double binary_entropy(double x) {
  require_probability(x, "x");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double key_rate_bound(double eta, double qber) {
  require_probability(eta, "eta");
  if (!(qber >= 0.0 && qber <= 0.5))
    throw Error(ErrorCode::invalid_argument, "qber must lie in [0, 0.5]");
  const double h = binary_entropy(qber);
  return -h + eta * (1.0 - h);
}

double worst_case_qber(double eta) {
  require_probability(eta, "eta");
  const double single = 2.0 * eta - eta * eta;
  return single / (2.0 + 2.0 * single);
}

std::optional<double> worst_case_efficiency(double qber) {
  if (!(qber >= 0.0 && qber <= 0.5))
    throw Error(ErrorCode::invalid_argument, "qber must lie in [0, 0.5]");
  if (qber > 0.25) return std::nullopt;
  // Q = X / (2 + 2X) with X = 2 eta - eta^2.
  const double x = 2.0 * qber / (1.0 - 2.0 * qber);
  return 1.0 - std::sqrt(std::max(0.0, 1.0 - x));
}

double bound_crossing_qber(double eta) {
  require_probability(eta, "eta");
  if (eta == 0.0) return 0.0;
  // R(eta, Q) = eta - (1 + eta) h(Q) decreases on [0, 1/2].
  double lo = 0.0;
  double hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (key_rate_bound(eta, mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double min_efficiency_for_key(double qber) {
  const double h = binary_entropy(qber);
  if (h >= 1.0) return 1.0;
  return std::min(1.0, h / (1.0 - h));
}

std::string_view to_string(Region region) noexcept {
  switch (region) {
    case Region::extractable: return "extractable";
    case Region::attackable: return "attackable";
    case Region::assume_insecure: return "assume_insecure";
  }
  return "unknown";
}

SecurityAssessment classify_region(double eta, double qber) {
  SecurityAssessment out;
  out.eta = eta;
  out.qber = qber;
  out.key_rate_lower_bound = key_rate_bound(eta, qber);
  const bool extractable = out.key_rate_lower_bound >= 0.0;
  const bool attackable = qber >= worst_case_qber(eta);
  out.boundary = extractable && attackable;
  if (extractable)
    out.region = Region::extractable;
  else if (attackable)
    out.region = Region::attackable;
  else
    out.region = Region::assume_insecure;
  return out;
}

AttackPoint make_attack_point(double mu, std::optional<double> t,
                              const ClickProbabilities& c) {
  AttackPoint point;
  point.mu = mu;
  point.t = t;
  point.clicks = c;
  point.qber = qber_general(c.p_f0, c.p_f1, c.p_h0, c.p_h1);
  point.transmittance = transmittance_general(c.p_f0, c.p_f1, c.p_h0, c.p_h1);
  point.loss_db = loss_db(point.transmittance);
  return point;
}

bool is_consistent(const AttackPoint& point, double tol) {
  const auto& c = point.clicks;
  for (double p : {c.p_f0, c.p_f1, c.p_h0, c.p_h1})
    if (!(p >= 0.0 && p <= 1.0)) return false;
  if (!(point.qber >= 0.0 && point.qber <= 0.5)) return false;
  const double q = qber_general(c.p_f0, c.p_f1, c.p_h0, c.p_h1);
  const double t = transmittance_general(c.p_f0, c.p_f1, c.p_h0, c.p_h1);
  return std::abs(q - point.qber) <= tol &&
         std::abs(t - point.transmittance) <= tol &&
         std::abs(loss_db(t) - point.loss_db) <= tol;
}

ClickProbabilities attack_clicks(const Detector& detector0,
                                 const Detector& detector1,
                                 const TriggerPulse& pulse) {
  ClickProbabilities c;
  c.p_f0 = click_probability(detector0, pulse, PowerFraction::full);
  c.p_f1 = click_probability(detector1, pulse, PowerFraction::full);
  c.p_h0 = click_probability(detector0, pulse, PowerFraction::half);
  c.p_h1 = click_probability(detector1, pulse, PowerFraction::half);
  return c;
}

AttackPoint evaluate_attack(const Detector& detector0,
                            const Detector& detector1,
                            const TriggerPulse& pulse) {
  return make_attack_point(pulse.mu, pulse.t,
                           attack_clicks(detector0, detector1, pulse));
}

namespace {

// Order on (mu, t) used to break QBER ties.
bool earlier(const AttackPoint& a, const AttackPoint& b) {
  if (a.mu != b.mu) return a.mu < b.mu;
  return a.t.value_or(0.0) < b.t.value_or(0.0);
}

// Lowest QBER; points within kQberTieTolerance of it count as tied and the
// smallest (mu, t) among them wins. Depends only on the set of candidates.
template <class Range, class Keep>
std::optional<AttackPoint> select_best(const Range& points, Keep keep) {
  std::optional<double> lowest;
  for (const auto& p : points)
    if (keep(p) && (!lowest || p.qber < *lowest)) lowest = p.qber;
  if (!lowest) return std::nullopt;
  std::optional<AttackPoint> best;
  for (const auto& p : points) {
    if (!keep(p) || p.qber > *lowest + kQberTieTolerance) continue;
    if (!best || earlier(p, *best)) best = p;
  }
  return best;
}

void validate(const ScanRequest& request) {
  if (request.mu_grid.empty())
    throw Error(ErrorCode::invalid_argument, "mu grid is empty");
  if (request.objective.kind == ScanObjective::Kind::min_qber_within_loss &&
      !(request.objective.loss_budget_db > 0.0))
    throw Error(ErrorCode::invalid_argument, "loss budget must be positive");
}

TriggerPulse pulse_at(const ScanRequest& request, std::size_t index) {
  const std::size_t n_t = request.t_grid.empty() ? 1 : request.t_grid.size();
  TriggerPulse pulse;
  pulse.mu = request.mu_grid[index / n_t];
  if (!request.t_grid.empty()) pulse.t = request.t_grid[index % n_t];
  pulse.kind = request.kind;
  return pulse;
}

ScanResult reduce(std::vector<AttackPoint> table, const ScanRequest& request) {
  ScanResult result;
  const std::size_t n_t = request.t_grid.empty() ? 1 : request.t_grid.size();
  const auto all = [](const AttackPoint&) { return true; };
  for (std::size_t m = 0; m < request.mu_grid.size(); ++m) {
    const std::span<const AttackPoint> row(table.data() + m * n_t, n_t);
    result.min_per_mu.push_back(*select_best(row, all));
  }
  if (request.objective.kind == ScanObjective::Kind::min_qber_within_loss) {
    const double budget = request.objective.loss_budget_db;
    result.best = select_best(table, [budget](const AttackPoint& p) {
      return p.loss_db <= budget;
    });
  } else {
    result.best = select_best(table, all);
  }
  result.table = std::move(table);
  return result;
}

}  // namespace

ScanResult optimize_attack_serial(const Detector& detector0,
                                  const Detector& detector1,
                                  const ScanRequest& request) {
  validate(request);
  const std::size_t n_t = request.t_grid.empty() ? 1 : request.t_grid.size();
  const std::size_t total = request.mu_grid.size() * n_t;
  std::vector<AttackPoint> table;
  table.reserve(total);
  for (std::size_t i = 0; i < total; ++i)
    table.push_back(evaluate_attack(detector0, detector1, pulse_at(request, i)));
  return reduce(std::move(table), request);
}

ScanResult optimize_attack(const Detector& detector0, const Detector& detector1,
                           const ScanRequest& request) {
  validate(request);
  const std::size_t n_t = request.t_grid.empty() ? 1 : request.t_grid.size();
  const auto total = static_cast<std::int64_t>(request.mu_grid.size() * n_t);
  std::vector<AttackPoint> table(static_cast<std::size_t>(total));
  // Exceptions cannot cross the parallel region; keep the one raised at the
  // lowest grid index so the reported error matches the serial scan.
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < total; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      table[idx] = evaluate_attack(detector0, detector1, pulse_at(request, idx));
    } catch (...) {
      failures[idx] = std::current_exception();
    }
  }
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);
  return reduce(std::move(table), request);
}

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::breaks_key: return "breaks_key";
    case Verdict::detectable_by_qber: return "detectable_by_qber";
    case Verdict::detectable_by_loss: return "detectable_by_loss";
    case Verdict::detectable_by_both: return "detectable_by_both";
  }
  return "unknown";
}

Verdict feasibility_verdict(const AttackPoint& point, double qber_threshold,
                            double loss_budget_db) {
  if (!(qber_threshold > 0.0) || !(loss_budget_db > 0.0))
    throw Error(ErrorCode::invalid_argument, "thresholds must be positive");
  const bool qber_ok = point.qber <= qber_threshold;
  const bool loss_ok = point.loss_db <= loss_budget_db;
  if (qber_ok && loss_ok) return Verdict::breaks_key;
  if (!qber_ok && !loss_ok) return Verdict::detectable_by_both;
  return qber_ok ? Verdict::detectable_by_loss : Verdict::detectable_by_qber;
}

}  // namespace superlin
