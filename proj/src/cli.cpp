#include "superlin/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "superlin/attack_analysis.hpp"
#include "superlin/bb84_sim.hpp"
#include "superlin/data_io.hpp"
#include "superlin/error.hpp"

namespace superlin::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value))
    throw UsageError(what + ": not a number: '" + text + "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

// Records everything needed to reproduce a run. No timestamps or host data,
// so identical invocations produce identical manifests.
class Manifest {
 public:
  explicit Manifest(std::string subcommand) {
    doc_["tool"] = "superlin";
    doc_["version"] = std::string(kToolVersion);
    doc_["subcommand"] = std::move(subcommand);
    doc_["parameters"] = json::object();
    doc_["inputs"] = json::array();
    doc_["seed"] = nullptr;
    doc_["seed_source"] = nullptr;
    doc_["outputs"] = json::array();
  }

  void param(const std::string& key, json value) {
    doc_["parameters"][key] = std::move(value);
  }
  void input(const std::string& path) {
    doc_["inputs"].push_back({{"path", path}, {"sha256", sha256_file(path)}});
  }
  void seed(std::uint64_t value, const std::string& source) {
    doc_["seed"] = value;
    doc_["seed_source"] = source;
  }
  void output(const std::string& name) { doc_["outputs"].push_back(name); }
  std::string render() const { return doc_.dump(2) + "\n"; }

 private:
  json doc_;
};

struct Common {
  std::string out_dir = ".";
  bool json_tables = false;
};

class Session {
 public:
  Session(const Common& common, std::string subcommand)
      : common_(common), name_(subcommand), manifest_(std::move(subcommand)) {
    fs::create_directories(common_.out_dir);
  }

  Manifest& manifest() { return manifest_; }
  TableFormat table_format() const {
    return common_.json_tables ? TableFormat::json : TableFormat::csv;
  }
  std::string table_ext() const { return common_.json_tables ? ".json" : ".csv"; }

  void emit(const std::string& file, const std::string& text) {
    write_text(fs::path(common_.out_dir) / file, text);
    manifest_.output(file);
  }
  void emit_table(const std::string& stem, const Table& table) {
    emit(stem + table_ext(), render_table(table, table_format()));
  }
  void finish() {
    const std::string file = name_ + "_manifest.json";
    manifest_.output(file);
    write_text(fs::path(common_.out_dir) / file, manifest_.render());
  }

 private:
  Common common_;
  std::string name_;
  Manifest manifest_;
};

struct DetectorOptions {
  std::string model, curve, grid;
  std::string model1, curve1, grid1;
  std::string pulse = "coherent";
};

void add_detector_options(CLI::App* app, DetectorOptions& o) {
  app->add_option("--model", o.model, "Inline model spec for detector 0")
      ->group("Detectors");
  app->add_option("--curve", o.curve, "Response curve file for detector 0")
      ->group("Detectors");
  app->add_option("--grid", o.grid, "Time-resolved grid file for detector 0")
      ->group("Detectors");
  app->add_option("--model1", o.model1, "Model spec for detector 1")
      ->group("Detectors");
  app->add_option("--curve1", o.curve1, "Curve file for detector 1")
      ->group("Detectors");
  app->add_option("--grid1", o.grid1, "Grid file for detector 1")
      ->group("Detectors");
  app->add_option("--pulse", o.pulse, "Trigger pulse kind")
      ->check(CLI::IsMember({"coherent", "fock"}))
      ->capture_default_str();
}

std::optional<LoadedDetector> pick_detector(const std::string& model,
                                            const std::string& curve,
                                            const std::string& grid,
                                            const std::string& which) {
  const int given = !model.empty() + !curve.empty() + !grid.empty();
  if (given > 1)
    throw UsageError("give at most one of --model/--curve/--grid for " + which);
  if (!model.empty()) return parse_detector_spec(model);
  if (!curve.empty()) return LoadedDetector{load_curve(curve), curve};
  if (!grid.empty()) return LoadedDetector{load_grid(grid), grid};
  return std::nullopt;
}

// Detector 1 mirrors detector 0 unless given separately.
std::pair<Detector, Detector> resolve_detectors(const DetectorOptions& o,
                                                Manifest& manifest) {
  auto d0 = pick_detector(o.model, o.curve, o.grid, "detector 0");
  if (!d0) throw UsageError("detector 0 needs --model, --curve or --grid");
  auto d1 = pick_detector(o.model1, o.curve1, o.grid1, "detector 1");
  manifest.param("detector0", describe(d0->model));
  if (!d0->input_path.empty()) manifest.input(d0->input_path);
  if (d1) {
    manifest.param("detector1", describe(d1->model));
    if (!d1->input_path.empty()) manifest.input(d1->input_path);
    return {d0->model, d1->model};
  }
  manifest.param("detector1", "same as detector0");
  return {d0->model, d0->model};
}

PulseKind pulse_kind(const std::string& text) {
  return text == "fock" ? PulseKind::fock : PulseKind::coherent;
}

json point_json(const AttackPoint& p) {
  json j;
  j["mu"] = p.mu;
  j["t"] = p.t ? json(*p.t) : json(nullptr);
  j["p_f0"] = p.clicks.p_f0;
  j["p_f1"] = p.clicks.p_f1;
  j["p_h0"] = p.clicks.p_h0;
  j["p_h1"] = p.clicks.p_h1;
  j["qber"] = p.qber;
  j["transmittance"] = p.transmittance;
  j["loss_db"] = p.loss_db;
  return j;
}

// ---- calibrate -----------------------------------------------------------

struct CalibrateOptions {
  std::string curve;
  double mu_ref = 1.0;
};

void cmd_calibrate(const Common& common, const CalibrateOptions& o,
                   std::ostream& out) {
  Session session(common, "calibrate");
  auto& manifest = session.manifest();
  manifest.param("curve", o.curve);
  manifest.param("mu_ref", o.mu_ref);
  manifest.input(o.curve);
  const auto curve = load_curve(o.curve);

  const double p_ref = interpolate_response(curve, o.mu_ref);
  const double eta = efficiency_from_coherent_point(p_ref, o.mu_ref);

  Table table;
  table.columns = {"mu", "p", "predicted_p", "superlinearity_ratio"};
  double max_ratio = 0.0;
  double mu_at_max = 0.0;
  for (const auto& pt : curve.points()) {
    const double ratio = superlinearity_ratio(curve, pt.mu, o.mu_ref);
    table.rows.push_back(
        {pt.mu, pt.p, linear_coherent_detection_prob(eta, pt.mu), ratio});
    if (ratio > max_ratio) {
      max_ratio = ratio;
      mu_at_max = pt.mu;
    }
  }
  session.emit_table("calibrate", table);
  session.finish();

  out << "eta=" << format_double(eta) << "\n"
      << "mu_ref=" << format_double(o.mu_ref) << "\n"
      << "max_superlinearity_ratio=" << format_double(max_ratio) << "\n"
      << "mu_at_max_ratio=" << format_double(mu_at_max) << "\n";
}

// ---- attack --------------------------------------------------------------

struct AttackOptions {
  DetectorOptions detectors;
  std::string mu_grid;
  std::string t_grid;
  double qber_threshold = 0.11;
  double loss_budget_db = 20.0;
  std::string objective = "min-qber";
};

void cmd_attack(const Common& common, const AttackOptions& o,
                std::ostream& out) {
  Session session(common, "attack");
  auto& manifest = session.manifest();
  const auto [d0, d1] = resolve_detectors(o.detectors, manifest);

  ScanRequest request;
  request.mu_grid = parse_number_list(o.mu_grid);
  if (!o.t_grid.empty()) request.t_grid = parse_number_list(o.t_grid);
  request.kind = pulse_kind(o.detectors.pulse);
  request.objective = o.objective == "min-qber-within-loss"
                          ? ScanObjective::within_loss(o.loss_budget_db)
                          : ScanObjective::min_qber();
  manifest.param("pulse", o.detectors.pulse);
  manifest.param("mu_grid", request.mu_grid);
  manifest.param("t_grid", request.t_grid);
  manifest.param("objective", o.objective);
  manifest.param("qber_threshold", o.qber_threshold);
  manifest.param("loss_budget_db", o.loss_budget_db);

  const auto result = optimize_attack(d0, d1, request);
  session.emit_table("attack_scan", scan_table(result.table));
  session.emit_table("attack_min_qber", scan_table(result.min_per_mu));

  json summary;
  if (result.best) {
    const auto verdict =
        feasibility_verdict(*result.best, o.qber_threshold, o.loss_budget_db);
    summary["best"] = point_json(*result.best);
    summary["verdict"] = std::string(to_string(verdict));
  } else {
    summary["best"] = nullptr;
    summary["verdict"] = "no_feasible_attack";
  }
  summary["qber_threshold"] = o.qber_threshold;
  summary["loss_budget_db"] = o.loss_budget_db;
  summary["points_evaluated"] = result.table.size();
  session.emit("attack_summary.json", summary.dump(2) + "\n");
  session.finish();

  out << "points=" << result.table.size() << "\n";
  if (result.best) {
    const auto& b = *result.best;
    out << "best_mu=" << format_double(b.mu) << "\n";
    if (b.t) out << "best_t=" << format_double(*b.t) << "\n";
    out << "best_qber=" << format_double(b.qber) << "\n"
        << "best_transmittance=" << format_double(b.transmittance) << "\n"
        << "best_loss_db=" << format_double(b.loss_db) << "\n";
  }
  out << "verdict=" << summary["verdict"].get<std::string>() << "\n";
}

// ---- bound ---------------------------------------------------------------

struct BoundOptions {
  std::string eta_grid;
  std::string qber_grid;
};

void cmd_bound(const Common& common, const BoundOptions& o, std::ostream& out) {
  if (o.eta_grid.empty() && o.qber_grid.empty())
    throw UsageError("bound needs --eta-grid and/or --qber-grid");
  Session session(common, "bound");
  auto& manifest = session.manifest();
  std::vector<double> etas, qbers;
  if (!o.eta_grid.empty()) etas = parse_number_list(o.eta_grid);
  if (!o.qber_grid.empty()) qbers = parse_number_list(o.qber_grid);
  manifest.param("eta_grid", etas);
  manifest.param("qber_grid", qbers);

  Table table;
  if (!etas.empty() && !qbers.empty()) {
    table.columns = {"eta", "qber", "key_rate_bound", "region", "boundary"};
    for (double eta : etas)
      for (double q : qbers) {
        const auto a = classify_region(eta, q);
        table.rows.push_back({eta, q, a.key_rate_lower_bound,
                              std::string(to_string(a.region)),
                              std::int64_t{a.boundary}});
      }
  } else if (!etas.empty()) {
    table.columns = {"eta", "bound_qber", "worst_case_qber"};
    for (double eta : etas)
      table.rows.push_back(
          {eta, bound_crossing_qber(eta), worst_case_qber(eta)});
  } else {
    table.columns = {"qber", "min_eta_for_key", "worst_case_eta"};
    for (double q : qbers) {
      const auto attack_eta = worst_case_efficiency(q);
      table.rows.push_back({q, min_efficiency_for_key(q),
                            attack_eta ? Cell{*attack_eta} : Cell{}});
    }
  }
  session.emit_table("bound", table);
  session.finish();
  out << "rows=" << table.rows.size() << "\n";
}

// ---- simulate ------------------------------------------------------------

struct SimulateOptions {
  DetectorOptions detectors;
  double mu = 0.0;
  std::optional<double> t;
  std::uint64_t trials = 1'000'000;
  std::optional<std::uint64_t> seed;
  std::string basis_mode = "active";
};

std::pair<std::uint64_t, std::string> resolve_seed(
    const std::optional<std::uint64_t>& flag) {
  if (flag) return {*flag, "flag"};
  if (const char* env = std::getenv(kSeedEnvVar)) {
    const std::string text = env;
    std::uint64_t value = 0;
    std::size_t used = 0;
    try {
      value = std::stoull(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size())
      throw UsageError(std::string(kSeedEnvVar) + " is not an integer: '" +
                       text + "'");
    return {value, std::string("env:") + kSeedEnvVar};
  }
  return {1, "default"};
}

void cmd_simulate(const Common& common, const SimulateOptions& o,
                  std::ostream& out) {
  Session session(common, "simulate");
  auto& manifest = session.manifest();
  auto [d0, d1] = resolve_detectors(o.detectors, manifest);
  const auto [seed, seed_source] = resolve_seed(o.seed);
  manifest.seed(seed, seed_source);

  SimConfig config;
  config.trials = o.trials;
  config.pulse.mu = o.mu;
  config.pulse.t = o.t;
  config.pulse.kind = pulse_kind(o.detectors.pulse);
  config.basis_mode =
      o.basis_mode == "passive" ? BasisMode::passive : BasisMode::active;
  config.seed = seed;
  config.detector0 = std::move(d0);
  config.detector1 = std::move(d1);
  manifest.param("pulse", o.detectors.pulse);
  manifest.param("mu", o.mu);
  manifest.param("t", o.t ? json(*o.t) : json(nullptr));
  manifest.param("trials", o.trials);
  manifest.param("basis_mode", o.basis_mode);

  const auto stats = simulate(config);

  // Analytic counterpart for the same click probabilities.
  std::optional<ExactOutcome> exact;
  try {
    if (config.basis_mode == BasisMode::active) {
      const auto c = active_clicks(config);
      exact = ExactOutcome{qber_general(c.p_f0, c.p_f1, c.p_h0, c.p_h1),
                           transmittance_general(c.p_f0, c.p_f1, c.p_h0, c.p_h1)};
    } else {
      exact = enumerate_exact_passive(passive_clicks(config));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_detections) throw;
  }

  auto opt = [](const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; };
  std::optional<double> z;
  if (exact && stats.qber_stderr && *stats.qber_stderr > 0.0)
    z = (*stats.qber_estimate - exact->qber) / *stats.qber_stderr;

  Table table;
  table.columns = {"basis_mode",
                   "trials",
                   "detections",
                   "sifted_detections",
                   "errors",
                   "double_clicks",
                   "wrong_basis_detections",
                   "qber_estimate",
                   "qber_stderr",
                   "transmittance_estimate",
                   "transmittance_stderr",
                   "analytic_qber",
                   "analytic_transmittance",
                   "qber_z"};
  auto as_int = [](std::uint64_t v) { return static_cast<std::int64_t>(v); };
  table.rows.push_back({std::string(to_string(config.basis_mode)),
                        as_int(stats.trials), as_int(stats.detections),
                        as_int(stats.sifted_detections), as_int(stats.errors),
                        as_int(stats.double_clicks),
                        as_int(stats.wrong_basis_detections),
                        opt(stats.qber_estimate), opt(stats.qber_stderr),
                        stats.transmittance_estimate, stats.transmittance_stderr,
                        exact ? Cell{exact->qber} : Cell{},
                        exact ? Cell{exact->transmittance} : Cell{}, opt(z)});
  session.emit_table("simulate", table);
  session.finish();

  out << "trials=" << stats.trials << "\n"
      << "detections=" << stats.detections << "\n"
      << "errors=" << stats.errors << "\n";
  if (stats.estimates_defined())
    out << "qber_estimate=" << format_double(*stats.qber_estimate) << "\n"
        << "qber_stderr=" << format_double(*stats.qber_stderr) << "\n";
  else
    out << "qber_estimate=undefined (no detections)\n";
  out << "transmittance_estimate=" << format_double(stats.transmittance_estimate)
      << "\n";
  if (exact)
    out << "analytic_qber=" << format_double(exact->qber) << "\n"
        << "analytic_transmittance=" << format_double(exact->transmittance)
        << "\n";
}

// ---- synth ---------------------------------------------------------------

struct SynthOptions {
  std::string model;
  std::vector<std::string> slices;  // "T@SPEC"
  std::string mu_grid;
  std::string label;
  std::string output;
};

ResponseCurve sample_curve(const Detector& model,
                           const std::vector<double>& mus,
                           const std::string& label) {
  if (!has_fock_law(model))
    throw UsageError("synth needs an analytic model (linear, superlinear, "
                     "worst-case)");
  std::vector<CurvePoint> points;
  for (double mu : mus) points.push_back({mu, coherent_detection_prob(model, mu)});
  return ResponseCurve(std::move(points), label);
}

void cmd_synth(const Common& common, const SynthOptions& o, std::ostream& out) {
  if (o.model.empty() == o.slices.empty())
    throw UsageError("synth needs either --model or --slice");
  Session session(common, "synth");
  auto& manifest = session.manifest();
  const auto mus = parse_number_list(o.mu_grid);
  manifest.param("mu_grid", mus);
  manifest.param("label", o.label);
  manifest.param("output", o.output);

  if (!o.model.empty()) {
    const auto model = parse_detector_spec(o.model).model;
    manifest.param("model", describe(model));
    write_curve(sample_curve(model, mus, o.label), o.output);
  } else {
    std::vector<double> times;
    std::vector<ResponseCurve> curves;
    json slices = json::array();
    for (const auto& slice : o.slices) {
      const auto at = slice.find('@');
      if (at == std::string::npos)
        throw UsageError("--slice expects T@SPEC, got '" + slice + "'");
      const double t = parse_double(slice.substr(0, at), "--slice time");
      const auto model = parse_detector_spec(slice.substr(at + 1)).model;
      times.push_back(t);
      curves.push_back(sample_curve(model, mus, o.label));
      slices.push_back({{"t", t}, {"model", describe(model)}});
    }
    manifest.param("slices", slices);
    write_grid(TimeResolvedResponse(std::move(times), std::move(curves), o.label),
               o.output);
  }
  session.finish();
  out << "wrote=" << o.output << "\n";
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  const auto parts = split(text, ':');
  if (parts.size() == 4 && (parts[0] == "lin" || parts[0] == "log")) {
    const double start = parse_double(parts[1], "range start");
    const double stop = parse_double(parts[2], "range stop");
    const double count = parse_double(parts[3], "range count");
    if (count < 1 || std::floor(count) != count)
      throw UsageError("range count must be a positive integer");
    const auto n = static_cast<std::size_t>(count);
    if (parts[0] == "log" && !(start > 0.0 && stop > 0.0))
      throw UsageError("log range needs positive bounds");
    for (std::size_t i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      double v = parts[0] == "lin" ? start + f * (stop - start)
                                   : start * std::pow(stop / start, f);
      if (i == 0) v = start;
      if (i + 1 == n && n > 1) v = stop;
      values.push_back(v);
    }
    return values;
  }
  for (const auto& item : split(text, ','))
    values.push_back(parse_double(item, "list entry"));
  if (values.empty()) throw UsageError("empty number list");
  return values;
}

LoadedDetector parse_detector_spec(const std::string& spec) {
  std::map<std::string, std::string> kv;
  for (const auto& item : split(spec, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw UsageError("model spec entry lacks '=': '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto take = [&](const std::string& key) -> std::string {
    const auto it = kv.find(key);
    if (it == kv.end())
      throw UsageError("model spec '" + spec + "' lacks '" + key + "'");
    std::string value = it->second;
    kv.erase(it);
    return value;
  };
  auto number = [&](const std::string& key) {
    return parse_double(take(key), key);
  };
  const std::string kind = take("kind");
  LoadedDetector out{LinearDetector(0.0), {}};
  if (kind == "linear") {
    out.model = LinearDetector(number("eta"));
  } else if (kind == "superlinear") {
    const double eta1 = number("eta1");
    out.model = ParametricSuperlinearDetector(eta1, number("eta2"));
  } else if (kind == "worst-case") {
    out.model = WorstCaseDetector(number("eta"));
  } else if (kind == "fixed") {
    const double p_f = number("p_f");
    const double p_h = number("p_h");
    const double p_q = kv.count("p_q") ? number("p_q") : 0.0;
    out.model = FixedResponseDetector(p_f, p_h, p_q);
  } else if (kind == "curve") {
    out.input_path = take("path");
    out.model = load_curve(out.input_path);
  } else if (kind == "grid") {
    out.input_path = take("path");
    out.model = load_grid(out.input_path);
  } else {
    throw UsageError("unknown model kind '" + kind + "'");
  }
  if (!kv.empty())
    throw UsageError("model spec '" + spec + "' has unknown key '" +
                     kv.begin()->first + "'");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Superlinear detector control attack analysis", "superlin"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out-dir", common.out_dir, "Directory for output files")
        ->capture_default_str();
    sub->add_flag("--json", common.json_tables, "Write tables as JSON");
  };

  CalibrateOptions cal;
  auto* calibrate = app.add_subcommand(
      "calibrate", "Extract efficiency and superlinearity from a curve");
  calibrate->add_option("--curve", cal.curve, "Response curve file")->required();
  calibrate->add_option("--mu-ref", cal.mu_ref, "Reference mean photon number")
      ->capture_default_str();
  add_common(calibrate);

  AttackOptions atk;
  auto* attack = app.add_subcommand(
      "attack", "Scan trigger pulses and report the best attack");
  add_detector_options(attack, atk.detectors);
  attack->add_option("--mu-grid", atk.mu_grid, "Trigger mean photon numbers")
      ->required();
  attack->add_option("--t-grid", atk.t_grid, "Trigger times (ns)");
  attack->add_option("--qber-threshold", atk.qber_threshold)
      ->capture_default_str();
  attack->add_option("--loss-budget-db", atk.loss_budget_db)
      ->capture_default_str();
  attack->add_option("--objective", atk.objective)
      ->check(CLI::IsMember({"min-qber", "min-qber-within-loss"}))
      ->capture_default_str();
  add_common(attack);

  BoundOptions bnd;
  auto* bound = app.add_subcommand(
      "bound", "Key-rate bound versus worst-case attack table");
  bound->add_option("--eta-grid", bnd.eta_grid, "Detection efficiencies");
  bound->add_option("--qber-grid", bnd.qber_grid, "QBER values");
  add_common(bound);

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Monte Carlo simulation of the attack");
  add_detector_options(simulate_cmd, sim.detectors);
  simulate_cmd->add_option("--mu", sim.mu, "Trigger mean photon number")
      ->required();
  simulate_cmd->add_option("--t", sim.t, "Trigger time (ns)");
  simulate_cmd->add_option("--trials", sim.trials)->capture_default_str();
  simulate_cmd->add_option("--seed", sim.seed,
                           std::string("RNG seed (default: $") + kSeedEnvVar +
                               " or 1)");
  simulate_cmd->add_option("--basis-mode", sim.basis_mode)
      ->check(CLI::IsMember({"active", "passive"}))
      ->capture_default_str();
  add_common(simulate_cmd);

  SynthOptions syn;
  auto* synth = app.add_subcommand(
      "synth", "Write a synthetic curve or grid file from analytic models");
  synth->add_option("--model", syn.model, "Model spec (curve output)");
  synth->add_option("--slice", syn.slices, "T@SPEC per time slice (grid output)");
  synth->add_option("--mu-grid", syn.mu_grid)->required();
  synth->add_option("--label", syn.label);
  synth->add_option("--output", syn.output)->required();
  add_common(synth);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every other parse failure is a usage error.
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*calibrate)
      cmd_calibrate(common, cal, out);
    else if (*attack)
      cmd_attack(common, atk, out);
    else if (*bound)
      cmd_bound(common, bnd, out);
    else if (*simulate_cmd)
      cmd_simulate(common, sim, out);
    else if (*synth)
      cmd_synth(common, syn, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace superlin::cli
