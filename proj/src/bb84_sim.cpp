#include "superlin/bb84_sim.hpp"

#include <cmath>

#include "superlin/error.hpp"
#include "superlin/rng.hpp"

namespace superlin {

std::string_view to_string(BasisMode mode) noexcept {
  return mode == BasisMode::active ? "active" : "passive";
}

ActiveTrial run_active_trial(const ClickProbabilities& c, std::uint64_t seed,
                             std::uint64_t index) {
  TrialStream stream(seed, index);
  const std::uint64_t bits = stream.next();
  const double u0 = stream.uniform();
  const double u1 = stream.uniform();

  ActiveTrial trial;
  trial.basis_match = (bits & 1U) != 0;
  trial.alice_bit = static_cast<int>((bits >> 1) & 1U);
  trial.eve_bit =
      trial.basis_match ? trial.alice_bit : static_cast<int>((bits >> 2) & 1U);
  const int tie_bit = static_cast<int>((bits >> 3) & 1U);

  if (trial.basis_match) {
    // The whole pulse lands on the detector for Eve's bit.
    if (trial.eve_bit == 0)
      trial.click0 = u0 < c.p_f0;
    else
      trial.click1 = u0 < c.p_f1;
  } else {
    // Wrong basis: half the pulse on each detector.
    trial.click0 = u0 < c.p_h0;
    trial.click1 = u1 < c.p_h1;
  }
  trial.detected = trial.click0 || trial.click1;
  if (trial.detected) {
    trial.bob_bit = trial.click0 && trial.click1 ? tie_bit : (trial.click1 ? 1 : 0);
    trial.error = trial.bob_bit != trial.alice_bit;
  }
  return trial;
}

PassiveTrial run_passive_trial(const PassiveClicks& c, std::uint64_t seed,
                               std::uint64_t index) {
  TrialStream stream(seed, index);
  const std::uint64_t bits = stream.next();
  double u[2][2];
  for (auto& row : u)
    for (double& v : row) v = stream.uniform();

  PassiveTrial trial;
  trial.alice_basis = static_cast<int>(bits & 1U);
  trial.alice_bit = static_cast<int>((bits >> 1) & 1U);
  trial.eve_basis = static_cast<int>((bits >> 2) & 1U);
  trial.eve_bit = trial.eve_basis == trial.alice_basis
                      ? trial.alice_bit
                      : static_cast<int>((bits >> 3) & 1U);
  const int tie_basis = static_cast<int>((bits >> 4) & 1U);
  const int tie_bit = static_cast<int>((bits >> 5) & 1U);

  const int same = trial.eve_basis;
  const int other = 1 - same;
  const double p_half = trial.eve_bit == 0 ? c.p_half0 : c.p_half1;
  trial.clicks[same][trial.eve_bit] = u[same][trial.eve_bit] < p_half;
  trial.clicks[other][0] = u[other][0] < c.p_quarter0;
  trial.clicks[other][1] = u[other][1] < c.p_quarter1;

  const bool basis_hit[2] = {trial.clicks[0][0] || trial.clicks[0][1],
                             trial.clicks[1][0] || trial.clicks[1][1]};
  trial.detected = basis_hit[0] || basis_hit[1];
  if (!trial.detected) return trial;

  if (basis_hit[0] && basis_hit[1]) {
    trial.bob_basis = tie_basis;
    trial.bob_bit = tie_bit;
  } else {
    const int b = basis_hit[0] ? 0 : 1;
    trial.bob_basis = b;
    trial.bob_bit = trial.clicks[b][0] && trial.clicks[b][1]
                        ? tie_bit
                        : (trial.clicks[b][1] ? 1 : 0);
  }
  trial.sifted = trial.bob_basis == trial.alice_basis;
  trial.error = trial.sifted && trial.bob_bit != trial.alice_bit;
  return trial;
}

ClickProbabilities active_clicks(const SimConfig& config) {
  return attack_clicks(config.detector0, config.detector1, config.pulse);
}

PassiveClicks passive_clicks(const SimConfig& config) {
  PassiveClicks c;
  c.p_half0 = click_probability(config.detector0, config.pulse, PowerFraction::half);
  c.p_half1 = click_probability(config.detector1, config.pulse, PowerFraction::half);
  c.p_quarter0 =
      click_probability(config.detector0, config.pulse, PowerFraction::quarter);
  c.p_quarter1 =
      click_probability(config.detector1, config.pulse, PowerFraction::quarter);
  return c;
}

namespace {

struct Tally {
  std::uint64_t detections = 0;
  std::uint64_t sifted = 0;
  std::uint64_t errors = 0;
  std::uint64_t double_clicks = 0;
  std::uint64_t wrong_basis = 0;
};

void require_trials(const SimConfig& config) {
  if (config.trials < 1)
    throw Error(ErrorCode::invalid_argument, "trials must be >= 1");
}

SimStats finish(std::uint64_t trials, const Tally& tally) {
  SimStats s;
  s.trials = trials;
  s.detections = tally.detections;
  s.sifted_detections = tally.sifted;
  s.errors = tally.errors;
  s.double_clicks = tally.double_clicks;
  s.wrong_basis_detections = tally.wrong_basis;
  const auto n = static_cast<double>(trials);
  s.transmittance_estimate = static_cast<double>(tally.detections) / n;
  s.transmittance_stderr = std::sqrt(
      s.transmittance_estimate * (1.0 - s.transmittance_estimate) / n);
  if (tally.sifted > 0) {
    const auto k = static_cast<double>(tally.sifted);
    const double q = static_cast<double>(tally.errors) / k;
    s.qber_estimate = q;
    s.qber_stderr = std::sqrt(q * (1.0 - q) / k);
  }
  return s;
}

void count(Tally& t, const ActiveTrial& trial) {
  if (!trial.detected) return;
  ++t.detections;
  ++t.sifted;
  if (trial.error) ++t.errors;
  if (trial.click0 && trial.click1) ++t.double_clicks;
  if (!trial.basis_match) ++t.wrong_basis;
}

void count(Tally& t, const PassiveTrial& trial) {
  if (!trial.detected) return;
  ++t.detections;
  const int clicks = trial.clicks[0][0] + trial.clicks[0][1] +
                     trial.clicks[1][0] + trial.clicks[1][1];
  if (clicks >= 2) ++t.double_clicks;
  if (!trial.sifted) return;
  ++t.sifted;
  if (trial.error) ++t.errors;
  if (trial.eve_basis != trial.alice_basis) ++t.wrong_basis;
}

// Integer tallies make the reduction order-independent, so the parallel and
// serial kernels agree bit for bit.
template <class Clicks, class RunTrial>
Tally run_parallel(const Clicks& clicks, std::uint64_t seed,
                   std::uint64_t trials, RunTrial run_trial) {
  std::uint64_t detections = 0, sifted = 0, errors = 0, doubles = 0,
                wrong = 0;
  const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(static) \
    reduction(+ : detections, sifted, errors, doubles, wrong)
  for (std::int64_t i = 0; i < n; ++i) {
    Tally local;
    count(local, run_trial(clicks, seed, static_cast<std::uint64_t>(i)));
    detections += local.detections;
    sifted += local.sifted;
    errors += local.errors;
    doubles += local.double_clicks;
    wrong += local.wrong_basis;
  }
  return {detections, sifted, errors, doubles, wrong};
}

template <class Clicks, class RunTrial>
Tally run_serial(const Clicks& clicks, std::uint64_t seed,
                 std::uint64_t trials, RunTrial run_trial) {
  Tally tally;
  for (std::uint64_t i = 0; i < trials; ++i)
    count(tally, run_trial(clicks, seed, i));
  return tally;
}

}  // namespace

SimStats simulate_active(const SimConfig& config) {
  require_trials(config);
  const auto clicks = active_clicks(config);
  return finish(config.trials, run_parallel(clicks, config.seed, config.trials,
                                            run_active_trial));
}

SimStats simulate_active_serial(const SimConfig& config) {
  require_trials(config);
  const auto clicks = active_clicks(config);
  return finish(config.trials, run_serial(clicks, config.seed, config.trials,
                                          run_active_trial));
}

SimStats simulate_passive(const SimConfig& config) {
  require_trials(config);
  const auto clicks = passive_clicks(config);
  return finish(config.trials, run_parallel(clicks, config.seed, config.trials,
                                            run_passive_trial));
}

SimStats simulate_passive_serial(const SimConfig& config) {
  require_trials(config);
  const auto clicks = passive_clicks(config);
  return finish(config.trials, run_serial(clicks, config.seed, config.trials,
                                          run_passive_trial));
}

SimStats simulate(const SimConfig& config) {
  return config.basis_mode == BasisMode::active ? simulate_active(config)
                                                : simulate_passive(config);
}

namespace {

double bernoulli_weight(bool outcome, double p) { return outcome ? p : 1.0 - p; }

void require_probabilities(std::initializer_list<double> ps) {
  for (double p : ps)
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(ErrorCode::invalid_argument,
                  "click probabilities must lie in [0, 1]");
}

}  // namespace

ExactOutcome enumerate_exact(double p_f0, double p_f1, double p_h0,
                             double p_h1) {
  require_probabilities({p_f0, p_f1, p_h0, p_h1});
  const double p_full[2] = {p_f0, p_f1};
  double detect = 0.0;
  double error = 0.0;
  for (int match = 0; match < 2; ++match) {
    for (int alice = 0; alice < 2; ++alice) {
      for (int eve = 0; eve < 2; ++eve) {
        if (match && eve != alice) continue;
        // Eve's bit equals Alice's on a basis match, is uniform otherwise.
        const double w_branch = 0.25 * (match ? 1.0 : 0.5);
        for (int c0 = 0; c0 < 2; ++c0) {
          for (int c1 = 0; c1 < 2; ++c1) {
            double w;
            if (match) {
              const double p0 = eve == 0 ? p_full[0] : 0.0;
              const double p1 = eve == 1 ? p_full[1] : 0.0;
              w = bernoulli_weight(c0, p0) * bernoulli_weight(c1, p1);
            } else {
              w = bernoulli_weight(c0, p_h0) * bernoulli_weight(c1, p_h1);
            }
            w *= w_branch;
            if (w == 0.0 || (!c0 && !c1)) continue;
            detect += w;
            for (int tie = 0; tie < 2; ++tie) {
              const bool both = c0 && c1;
              if (!both && tie == 1) continue;
              const double w_tie = both ? 0.5 : 1.0;
              const int bob = both ? tie : c1;
              if (bob != alice) error += w * w_tie;
            }
          }
        }
      }
    }
  }
  if (detect == 0.0)
    throw Error(ErrorCode::no_detections, "no detections in event tree");
  return {error / detect, detect};
}

ExactOutcome enumerate_exact_passive(const PassiveClicks& c) {
  require_probabilities({c.p_half0, c.p_half1, c.p_quarter0, c.p_quarter1});
  double detect = 0.0;
  double sifted = 0.0;
  double error = 0.0;
  for (int a_basis = 0; a_basis < 2; ++a_basis) {
    for (int a_bit = 0; a_bit < 2; ++a_bit) {
      for (int e_basis = 0; e_basis < 2; ++e_basis) {
        for (int e_bit = 0; e_bit < 2; ++e_bit) {
          const bool match = e_basis == a_basis;
          if (match && e_bit != a_bit) continue;
          const double w_branch = 0.125 * (match ? 1.0 : 0.5);
          double p[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
          p[e_basis][e_bit] = e_bit == 0 ? c.p_half0 : c.p_half1;
          p[1 - e_basis][0] = c.p_quarter0;
          p[1 - e_basis][1] = c.p_quarter1;
          for (int pattern = 1; pattern < 16; ++pattern) {
            bool k[2][2];
            double w = w_branch;
            for (int b = 0; b < 2; ++b)
              for (int i = 0; i < 2; ++i) {
                k[b][i] = (pattern >> (2 * b + i)) & 1;
                w *= bernoulli_weight(k[b][i], p[b][i]);
              }
            if (w == 0.0) continue;
            detect += w;
            const bool hit[2] = {k[0][0] || k[0][1], k[1][0] || k[1][1]};
            if (hit[0] && hit[1]) {
              // Random basis, then random bit.
              sifted += 0.5 * w;
              error += 0.25 * w;
              continue;
            }
            const int b = hit[0] ? 0 : 1;
            if (b != a_basis) continue;
            sifted += w;
            if (k[b][0] && k[b][1])
              error += 0.5 * w;
            else if ((k[b][1] ? 1 : 0) != a_bit)
              error += w;
          }
        }
      }
    }
  }
  if (sifted == 0.0)
    throw Error(ErrorCode::no_detections, "no sifted detections in event tree");
  return {error / sifted, detect};
}

}  // namespace superlin
