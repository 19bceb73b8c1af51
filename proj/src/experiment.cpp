#include "wmsim/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

#include "wmsim/error.hpp"
#include "wmsim/lg.hpp"

namespace wmsim::cli {
namespace {

const char* kMod = "cli";

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, kMod, msg); }

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const io::json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) config_error("'" + name_ + "' must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) config_error("unknown key '" + name_ + "." + k + "'");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_[key].is_null()) return;
    try {
      out = j_[key].get<T>();
    } catch (const io::json::exception&) {
      config_error("'" + name_ + "." + key + "' has the wrong type");
    }
  }

  const io::json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) && !j_[key].is_null() ? &j_[key] : nullptr;
  }

 private:
  const io::json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

Kind kind_from(const std::string& s) {
  if (s == "quantum") return Kind::Quantum;
  if (s == "classical") return Kind::Classical;
  if (s == "calibration") return Kind::Calibration;
  if (s == "lg-report") return Kind::LgReport;
  config_error("unknown kind '" + s + "'");
}

const char* polarization_name(protocol::Polarization p) {
  return p == protocol::Polarization::SelfPolarized ? "self-polarized" : "prepolarized";
}

const char* back_action_name(protocol::BackAction b) {
  return b == protocol::BackAction::Conditioned ? "conditioned" : "ensemble";
}

const char* centering_name(calib::Centering c) {
  return c == calib::Centering::SampleMean ? "sample-mean" : "calibrated";
}

io::json base_summary(const ExperimentSpec& spec) {
  io::json s;
  s["schema"] = kSchema;
  s["kind"] = to_string(spec.kind);
  s["seed"] = spec.protocol.seed;
  s["runs"] = spec.runs;
  s["alpha_fit"] = nullptr;
  s["alpha_stderr"] = nullptr;
  s["violation_count"] = nullptr;
  s["max_lg"] = nullptr;
  return s;
}

void add_lg_summary(io::json& s, const lg::LgSeries& l) {
  s["violation_count"] = l.violations.size();
  s["violations"] = l.violations;
  if (l.taus.empty()) return;
  std::size_t best = 0;
  for (std::size_t i = 1; i < l.taus.size(); ++i)
    if (l.lg_values[i] > l.lg_values[best]) best = i;
  s["max_lg"] = l.lg_values[best];
  s["max_lg_tau"] = l.taus[best];
  s["max_lg_stderr"] = l.errors[best];
  s["verdict"] = l.violations.empty() ? "no violation" : "violation";
}

readout::ReadoutModel per_measurement(const readout::ReadoutModel& m) {
  readout::ReadoutModel out = m;
  out.n_a = m.n_a * m.scale();
  out.n_b = m.n_b * m.scale();
  out.n_nv0 = m.nv0_mean() * m.scale();
  out.repetitions = 200;
  return out;
}

double contrast_stderr(const calib::FitResult& f) {
  if (!f.covariance || f.covariance->rows() < 2) return 0;
  const auto& c = *f.covariance;
  return std::sqrt(std::max(0.0, c(0, 0) + c(1, 1) - 2 * c(0, 1)));
}

// Quantum-kind stages shared by run() and correlate().
void quantum_analysis(const ExperimentSpec& spec, const readout::PhotonTrace& trace,
                      const readout::ReadoutModel& model, double contrast_se, Outputs& o) {
  const auto& a = spec.analysis;
  auto c_sz = calib::reconstruct_Sz_corr(trace, model, a.max_lag, a.centering, contrast_se);
  calib::Weighting w;
  if (a.boxcar) {
    w.boxcar = true;
    w.fraction = *a.boxcar;
  }
  const auto fit = calib::fit_alpha(c_sz, spec.protocol.omega, spec.protocol.t_f, w);
  const double alpha = fit.at("alpha");
  auto c_ix = calib::reconstruct_Ix_corr(c_sz, alpha, a.undo_decay, spec.protocol.omega, spec.protocol.t_f);
  auto l = lg::lg_function(c_ix);

  if (!o.fit) o.fit = io::json::object();
  (*o.fit)["alpha"] = io::fit_to_json(fit);
  o.summary["alpha_fit"] = alpha;
  o.summary["alpha_stderr"] = fit.errors.at("alpha");
  o.summary["alpha_boundary"] = fit.boundary;
  o.summary["n_a"] = model.n_a;
  o.summary["n_b"] = model.n_b;
  add_lg_summary(o.summary, l);
  o.corr_sz = std::move(c_sz);
  o.corr_ix = std::move(c_ix);
  o.lg = std::move(l);
}

Outputs run_quantum(const ExperimentSpec& spec) {
  Outputs o;
  o.summary = base_summary(spec);
  o.summary["alpha_config"] = spec.protocol.alpha;
  readout::ReadoutModel model = per_measurement(spec.readout);
  double cse = 0;
  if (spec.analysis.calibrate) {
    auto [cf, m] = calibrate_readout(spec);
    o.fit = io::json::object();
    (*o.fit)["readout"] = io::fit_to_json(cf);
    model = m;
    cse = contrast_stderr(cf);
  }
  o.trace = simulate_quantum_trace(spec);
  o.summary["n_measurements"] = o.trace->counts.size();
  quantum_analysis(spec, *o.trace, model, cse, o);
  return o;
}

Outputs run_classical(const ExperimentSpec& spec) {
  Outputs o;
  o.summary = base_summary(spec);
  const auto& cp = spec.classical;
  o.summary["alpha_config"] = cp.alpha;
  readout::ReadoutModel model = per_measurement(spec.readout);
  double cse = 0;
  o.fit = io::json::object();
  if (spec.analysis.calibrate) {
    auto [cf, m] = calibrate_readout(spec);
    (*o.fit)["readout"] = io::fit_to_json(cf);
    model = m;
    cse = contrast_stderr(cf);
  }
  o.trace = simulate_classical_trace(spec);
  o.summary["n_measurements"] = o.trace->counts.size();
  const int L = spec.analysis.max_lag;
  auto c = calib::reconstruct_Sz_corr(*o.trace, model, L, spec.analysis.centering, cse);

  calib::FitResult fit;
  if (cp.modulated) {
    fit = calib::fit_modulated(*o.trace, cp.phi_s, L, model);
  } else {
    // <z z>(N) = alpha^2 / 2 cos(w N t_s): linear in alpha^2
    double num = 0, den = 0;
    std::vector<double> basis;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c.lags[i] < 1) continue;
      const double b = 0.5 * std::cos(cp.omega_ac * c.lags[i] * cp.t_s);
      num += c.values[i] * b;
      den += b * b;
    }
    if (!(den > 0)) throw Error(ErrorKind::FitFailure, kMod, "no lags to fit the classical amplitude");
    const double a2 = num / den;
    double var = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c.lags[i] < 1) continue;
      const double b = 0.5 * std::cos(cp.omega_ac * c.lags[i] * cp.t_s);
      var += b * b * c.errors[i] * c.errors[i];
    }
    const double a = std::sqrt(std::max(a2, 0.0));
    fit.names = {"alpha"};
    fit.parameters["alpha"] = a;
    fit.parameters["alpha_squared"] = a2;
    fit.errors["alpha_squared"] = std::sqrt(var) / den;
    fit.errors["alpha"] = a > 0 ? fit.errors["alpha_squared"] / (2 * a) : 0.0;
    fit.converged = true;
    fit.boundary = a2 <= 0;
  }
  (*o.fit)["alpha"] = io::fit_to_json(fit);
  o.summary["alpha_fit"] = fit.at("alpha");
  o.summary["alpha_stderr"] = fit.errors.count("alpha") ? fit.errors.at("alpha") : 0.0;

  // alpha^2 normalization: the random-phase target is cos(w tau) / 2
  const double a2 = cp.alpha * cp.alpha;
  if (a2 < 1e-6) throw Error(ErrorKind::Amplification, kMod, "classical alpha too small to normalize");
  auto cn = c;
  double max_z = 0;
  for (std::size_t i = 0; i < cn.size(); ++i) {
    cn.values[i] /= a2;
    cn.errors[i] /= a2;
    if (cn.lags[i] >= 1 && cn.errors[i] > 0) {
      const double target = 0.5 * std::cos(cp.omega_ac * cn.lags[i] * cp.t_s);
      max_z = std::max(max_z, std::abs(cn.values[i] - target) / cn.errors[i]);
    }
  }
  if (!cp.modulated) o.summary["max_z_vs_half_cos"] = max_z;
  auto l = lg::lg_function(cn);
  add_lg_summary(o.summary, l);
  o.summary["n_a"] = model.n_a;
  o.summary["n_b"] = model.n_b;
  o.corr_sz = std::move(c);
  o.corr_ix = std::move(cn);
  o.lg = std::move(l);
  return o;
}

Outputs run_calibration(const ExperimentSpec& spec) {
  Outputs o;
  o.summary = base_summary(spec);
  readout::PhotonTrace t;
  auto [cf, m] = calibrate_readout(spec, &t);
  o.trace = std::move(t);
  o.fit = io::json::object();
  (*o.fit)["readout"] = io::fit_to_json(cf);
  o.summary["n_a"] = m.n_a;
  o.summary["n_b"] = m.n_b;
  o.summary["phi_0"] = m.phi_0;
  o.summary["n_a_stderr"] = cf.errors.at("n_a");
  o.summary["n_b_stderr"] = cf.errors.at("n_b");
  return o;
}

Outputs run_lg_report(const ExperimentSpec& spec) {
  Outputs o;
  o.summary = base_summary(spec);
  const auto& p = spec.protocol;
  auto c_sz = corr::analytic_series(corr::SeriesKind::AnalyticSz, spec.analysis.max_lag, p.alpha, p.omega, p.t_f);
  auto c_ix = calib::reconstruct_Ix_corr(c_sz, p.alpha, spec.analysis.undo_decay, p.omega, p.t_f);
  auto l = lg::lg_function(c_ix);
  o.summary["alpha_fit"] = p.alpha;
  o.summary["alpha_stderr"] = 0.0;
  add_lg_summary(o.summary, l);
  o.corr_sz = std::move(c_sz);
  o.corr_ix = std::move(c_ix);
  o.lg = std::move(l);
  return o;
}

}  // namespace

const char* to_string(Kind k) {
  switch (k) {
    case Kind::Quantum: return "quantum";
    case Kind::Classical: return "classical";
    case Kind::Calibration: return "calibration";
    case Kind::LgReport: return "lg-report";
  }
  return "quantum";
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigError: return 2;
    case ErrorKind::FitFailure: return 3;
    case ErrorKind::DegenerateContrast: return 4;
    default: return 1;
  }
}

void ExperimentSpec::validate() const {
  try {
    protocol.validate();
    physical.validate();
    readout.validate();
    charge.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (runs < 1) config_error("runs must be >= 1");
  if (workers < 1) config_error("workers must be >= 1");
  if (analysis.max_lag < 1) config_error("max_lag must be >= 1");
  if (analysis.boxcar && !(*analysis.boxcar > 0)) config_error("boxcar fraction must be > 0");
  if (modulation.reps_per_angle < 1 || modulation.reps_at_90 < 1) config_error("modulation reps must be >= 1");
  if (!(classical.t_s > 0)) config_error("classical.t_s must be > 0");
  if (!(classical.alpha >= 0)) config_error("classical.alpha must be >= 0");
  if ((kind == Kind::Quantum || kind == Kind::Classical) && protocol.n_steps < 2 * analysis.max_lag + 1)
    config_error("protocol.n_steps must exceed 2 * max_lag");
}

ExperimentSpec spec_from_json(const io::json& j) {
  ExperimentSpec s;
  Section top(j, "config");
  std::string schema;
  top.get("schema", schema);
  if (schema != kSchema) config_error("schema must be '" + std::string(kSchema) + "'");
  std::string kind = "quantum";
  top.get("kind", kind);
  s.kind = kind_from(kind);
  top.get("seed", s.protocol.seed);
  top.get("runs", s.runs);
  top.get("output_dir", s.output_dir);
  top.get("workers", s.workers);

  if (const auto* p = top.sub("protocol")) {
    Section sec(*p, "protocol");
    sec.get("alpha", s.protocol.alpha);
    sec.get("omega", s.protocol.omega);
    sec.get("t_f", s.protocol.t_f);
    sec.get("n_steps", s.protocol.n_steps);
    std::string pol = polarization_name(s.protocol.polarization);
    sec.get("polarization", pol);
    if (pol == "self-polarized")
      s.protocol.polarization = protocol::Polarization::SelfPolarized;
    else if (pol == "prepolarized")
      s.protocol.polarization = protocol::Polarization::Prepolarized;
    else
      config_error("unknown polarization '" + pol + "'");
    std::string ba = back_action_name(s.back_action);
    sec.get("back_action", ba);
    if (ba == "conditioned")
      s.back_action = protocol::BackAction::Conditioned;
    else if (ba == "ensemble")
      s.back_action = protocol::BackAction::Ensemble;
    else
      config_error("unknown back_action '" + ba + "'");
  }
  if (const auto* p = top.sub("physical")) {
    Section sec(*p, "physical");
    sec.get("A_par", s.physical.A_par);
    sec.get("A_perp", s.physical.A_perp);
    sec.get("B_z", s.physical.B_z);
    sec.get("gamma_C", s.physical.gamma_C);
    sec.get("N_p", s.physical.N_p);
    sec.get("tau", s.physical.tau);
    sec.get("t_l", s.physical.t_l);
    sec.get("t_s", s.physical.t_s);
  }
  if (const auto* p = top.sub("readout")) {
    Section sec(*p, "readout");
    sec.get("n_a", s.readout.n_a);
    sec.get("n_b", s.readout.n_b);
    sec.get("phi_0", s.readout.phi_0);
    sec.get("repetitions", s.readout.repetitions);
    sec.get("n_nv0", s.readout.n_nv0);
  }
  if (const auto* p = top.sub("charge")) {
    Section sec(*p, "charge");
    sec.get("p_minus", s.charge.p_minus);
  }
  if (const auto* p = top.sub("classical")) {
    Section sec(*p, "classical");
    sec.get("alpha", s.classical.alpha);
    sec.get("omega_ac", s.classical.omega_ac);
    sec.get("t_s", s.classical.t_s);
    sec.get("modulated", s.classical.modulated);
    sec.get("phi_s", s.classical.phi_s);
  }
  if (const auto* p = top.sub("analysis")) {
    Section sec(*p, "analysis");
    sec.get("max_lag", s.analysis.max_lag);
    sec.get("undo_decay", s.analysis.undo_decay);
    double box = -1;
    sec.get("boxcar", box);
    if (box >= 0) s.analysis.boxcar = box;
    std::string c = centering_name(s.analysis.centering);
    sec.get("centering", c);
    if (c == "sample-mean")
      s.analysis.centering = calib::Centering::SampleMean;
    else if (c == "calibrated")
      s.analysis.centering = calib::Centering::Calibrated;
    else
      config_error("unknown centering '" + c + "'");
    sec.get("calibrate", s.analysis.calibrate);
  }
  if (const auto* p = top.sub("modulation")) {
    Section sec(*p, "modulation");
    sec.get("reps_per_angle", s.modulation.reps_per_angle);
    sec.get("reps_at_90", s.modulation.reps_at_90);
  }
  s.validate();
  return s;
}

io::json spec_to_json(const ExperimentSpec& s) {
  io::json j;
  j["schema"] = kSchema;
  j["kind"] = to_string(s.kind);
  j["seed"] = s.protocol.seed;
  j["runs"] = s.runs;
  j["protocol"] = {{"alpha", s.protocol.alpha},
                   {"omega", s.protocol.omega},
                   {"t_f", s.protocol.t_f},
                   {"n_steps", s.protocol.n_steps},
                   {"polarization", polarization_name(s.protocol.polarization)},
                   {"back_action", back_action_name(s.back_action)}};
  j["physical"] = {{"A_par", s.physical.A_par}, {"A_perp", s.physical.A_perp}, {"B_z", s.physical.B_z},
                   {"gamma_C", s.physical.gamma_C}, {"N_p", s.physical.N_p},   {"tau", s.physical.tau},
                   {"t_l", s.physical.t_l},     {"t_s", s.physical.t_s}};
  j["readout"] = {{"n_a", s.readout.n_a},
                  {"n_b", s.readout.n_b},
                  {"phi_0", s.readout.phi_0},
                  {"repetitions", s.readout.repetitions},
                  {"n_nv0", s.readout.n_nv0 < 0 ? io::json(nullptr) : io::json(s.readout.n_nv0)}};
  j["charge"] = {{"p_minus", s.charge.p_minus}};
  j["classical"] = {{"alpha", s.classical.alpha},
                    {"omega_ac", s.classical.omega_ac},
                    {"t_s", s.classical.t_s},
                    {"modulated", s.classical.modulated},
                    {"phi_s", s.classical.phi_s}};
  j["analysis"] = {{"max_lag", s.analysis.max_lag},
                   {"undo_decay", s.analysis.undo_decay},
                   {"boxcar", s.analysis.boxcar ? io::json(*s.analysis.boxcar) : io::json(nullptr)},
                   {"centering", centering_name(s.analysis.centering)},
                   {"calibrate", s.analysis.calibrate}};
  j["modulation"] = {{"reps_per_angle", s.modulation.reps_per_angle},
                     {"reps_at_90", s.modulation.reps_at_90}};
  return j;
}

std::pair<calib::FitResult, readout::ReadoutModel> calibrate_readout(const ExperimentSpec& spec,
                                                                    readout::PhotonTrace* trace_out) {
  Rng rng = make_rng(spec.protocol.seed, 0);
  auto t = readout::modulation_trace(spec.readout, readout::default_modulation_angles(),
                                     spec.modulation.reps_per_angle, rng, spec.modulation.reps_at_90);
  t.seed = spec.protocol.seed;
  t.config = spec_to_json(spec).dump();
  auto fit = calib::fit_na_nb(t);
  readout::ReadoutModel m;
  m.n_a = fit.at("n_a");
  m.n_b = fit.at("n_b");
  m.phi_0 = fit.at("phi_0");
  m.repetitions = 200;
  m.n_nv0 = spec.readout.nv0_mean() * spec.readout.scale();
  if (trace_out) *trace_out = std::move(t);
  return {std::move(fit), m};
}

readout::PhotonTrace simulate_quantum_trace(const ExperimentSpec& spec) {
  auto runs = parallel_map<readout::PhotonTrace>(spec.runs, spec.workers, [&](int r) {
    Rng rng = make_rng(spec.protocol.seed, r + 1);
    return readout::run_quantum_experiment(spec.protocol, spec.readout, spec.charge, rng, spec.back_action);
  });
  readout::PhotonTrace t;
  t.kind = readout::TraceKind::Quantum;
  for (const auto& r : runs) t.append_run(r);
  t.seed = spec.protocol.seed;
  t.config = spec_to_json(spec).dump();
  return t;
}

readout::PhotonTrace simulate_classical_trace(const ExperimentSpec& spec) {
  auto runs = parallel_map<readout::PhotonTrace>(spec.runs, spec.workers, [&](int r) {
    Rng rng = make_rng(spec.protocol.seed, r + 1);
    return readout::run_classical_experiment(spec.classical, spec.readout, rng, spec.protocol.n_steps);
  });
  readout::PhotonTrace t;
  t.kind = readout::TraceKind::Classical;
  for (const auto& r : runs) t.append_run(r);
  t.seed = spec.protocol.seed;
  t.config = spec_to_json(spec).dump();
  return t;
}

Outputs run(const ExperimentSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case Kind::Quantum: return run_quantum(spec);
    case Kind::Classical: return run_classical(spec);
    case Kind::Calibration: return run_calibration(spec);
    case Kind::LgReport: return run_lg_report(spec);
  }
  config_error("unknown kind");
}

Outputs correlate(const ExperimentSpec& spec, const readout::PhotonTrace& trace) {
  Outputs o;
  o.summary = base_summary(spec);
  o.summary["n_measurements"] = trace.counts.size();
  quantum_analysis(spec, trace, per_measurement(spec.readout), 0.0, o);
  return o;
}

Outputs lgtest(const corr::CorrelationSeries& c_ix) {
  Outputs o;
  o.summary["schema"] = kSchema;
  o.summary["kind"] = "lgtest";
  o.summary["alpha_fit"] = nullptr;
  o.summary["alpha_stderr"] = nullptr;
  auto l = lg::lg_function(c_ix);
  add_lg_summary(o.summary, l);
  o.lg = std::move(l);
  return o;
}

void write_outputs(const Outputs& o, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
  if (o.trace) io::write_file(path("trace.csv"), io::trace_to_csv(*o.trace));
  if (o.corr_sz) io::write_file(path("corr_sz.csv"), io::corr_to_csv(*o.corr_sz));
  if (o.corr_ix) io::write_file(path("corr_ix.csv"), io::corr_to_csv(*o.corr_ix));
  if (o.lg) io::write_file(path("lg.csv"), io::lg_to_csv(*o.lg));
  if (o.fit) io::write_file(path("fit.json"), o.fit->dump(2) + "\n");
  io::write_file(path("summary.json"), o.summary.dump(2) + "\n");
}

}  // namespace wmsim::cli
