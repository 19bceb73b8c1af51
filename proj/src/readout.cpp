#include "wmsim/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wmsim/error.hpp"

namespace wmsim::readout {
namespace {

const char* kMod = "readout-sim";

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, kMod, msg); }

constexpr double kDeg = std::numbers::pi / 180;

}  // namespace

void ReadoutModel::validate() const {
  if (!(n_a > n_b) || !(n_b >= 0)) bad("readout model needs n_a > n_b >= 0");
  if (repetitions < 1) bad("repetitions must be >= 1");
}

void ChargeModel::validate() const {
  if (!(p_minus >= 0 && p_minus <= 1)) bad("p_minus must lie in [0, 1]");
}

const char* to_string(TraceKind k) {
  switch (k) {
    case TraceKind::Quantum: return "quantum";
    case TraceKind::Classical: return "classical";
    case TraceKind::ModulationCalibration: return "modulation-calibration";
  }
  return "quantum";
}

TraceKind trace_kind_from_string(const std::string& s) {
  if (s == "quantum") return TraceKind::Quantum;
  if (s == "classical") return TraceKind::Classical;
  if (s == "modulation-calibration") return TraceKind::ModulationCalibration;
  bad("unknown trace kind '" + s + "'");
}

std::vector<std::vector<double>> PhotonTrace::runs() const {
  std::vector<std::vector<double>> out;
  if (run_lengths.empty()) {
    out.emplace_back(counts.begin(), counts.end());
    return out;
  }
  std::size_t pos = 0;
  for (std::size_t len : run_lengths) {
    if (pos + len > counts.size()) bad("run lengths exceed the trace");
    out.emplace_back(counts.begin() + pos, counts.begin() + pos + len);
    pos += len;
  }
  if (pos != counts.size()) bad("run lengths do not cover the trace");
  return out;
}

void PhotonTrace::append_run(const PhotonTrace& run) {
  if (run_lengths.empty() && !counts.empty()) run_lengths.push_back(counts.size());
  counts.insert(counts.end(), run.counts.begin(), run.counts.end());
  angles_deg.insert(angles_deg.end(), run.angles_deg.begin(), run.angles_deg.end());
  run_lengths.push_back(run.counts.size());
}

std::int64_t sample_poisson(double mean, Rng& rng) {
  if (mean <= 0) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

std::int64_t sample_readout(double p_bright, const ReadoutModel& model, Rng& rng) {
  if (!(p_bright >= 0 && p_bright <= 1)) bad("p_bright outside [0, 1]");
  const bool bright = std::bernoulli_distribution(p_bright)(rng);
  return sample_poisson((bright ? model.n_a : model.n_b) * model.scale(), rng);
}

double modulation_mean(double phi_deg, double n_a, double n_b, double phi_0) {
  const double s = std::sin(phi_deg * kDeg / 2 + phi_0);
  return 0.5 * (n_a + n_b) + 0.5 * (n_a - n_b) * s * s;
}

PhotonTrace run_quantum_experiment(const protocol::ProtocolConfig& cfg, const ReadoutModel& model,
                                   const ChargeModel& charge, Rng& rng, protocol::BackAction mode) {
  cfg.validate();
  model.validate();
  charge.validate();
  PhotonTrace t;
  t.kind = TraceKind::Quantum;
  t.seed = cfg.seed;
  t.counts.reserve(cfg.n_steps);

  quantum::BlochVector w{1, 0, 0};
  if (cfg.polarization == protocol::Polarization::SelfPolarized)
    w = protocol::generate_initial_state(cfg.alpha, rng).w;
  const double phi = cfg.phi(), c = std::cos(phi), s = std::sin(phi);
  std::bernoulli_distribution nv_minus(charge.p_minus);
  for (int n = 0; n < cfg.n_steps; ++n) {
    if (nv_minus(rng)) {
      const int o = protocol::sample_cycle(w, cfg.alpha, phi, rng, mode);
      t.counts.push_back(sample_poisson((o > 0 ? model.n_a : model.n_b) * model.scale(), rng));
    } else {
      w = {c * w.x - s * w.y, s * w.x + c * w.y, w.z};
      t.counts.push_back(sample_poisson(model.nv0_mean() * model.scale(), rng));
    }
  }
  return t;
}

std::vector<double> default_modulation_angles() {
  std::vector<double> a;
  for (int d = 0; d <= 360; d += 30) a.push_back(d);
  return a;
}

PhotonTrace modulation_trace(const ReadoutModel& model, const std::vector<double>& angles_deg,
                             int reps_per_angle, Rng& rng, int reps_at_90) {
  model.validate();
  if (reps_per_angle < 1) bad("reps_per_angle must be >= 1");
  PhotonTrace t;
  t.kind = TraceKind::ModulationCalibration;
  for (double a : angles_deg) {
    const int reps = a == 90.0 ? reps_at_90 : reps_per_angle;
    const double mean = modulation_mean(a, model.n_a, model.n_b, model.phi_0);
    const double p = (mean - model.n_b) / (model.n_a - model.n_b);
    std::binomial_distribution<int> bright(model.repetitions, p);
    for (int r = 0; r < reps; ++r) {
      const int m = bright(rng);
      const double mu = (m * model.n_a + (model.repetitions - m) * model.n_b) / 200.0;
      t.counts.push_back(sample_poisson(mu, rng));
      t.angles_deg.push_back(a);
    }
  }
  return t;
}

double modulated_amplitude(int k, double alpha, double phi_s) {
  return std::sin(std::numbers::pi / 2 * std::sin(2 * std::numbers::pi * k / 8) +
                  alpha * std::cos(k * phi_s * std::numbers::pi / 4));
}

PhotonTrace run_classical_experiment(const ClassicalParams& p, const ReadoutModel& model, Rng& rng,
                                     int n_measurements) {
  model.validate();
  if (n_measurements < 1) bad("n_measurements must be >= 1");
  PhotonTrace t;
  t.kind = TraceKind::Classical;
  t.counts.reserve(n_measurements);
  const double phase = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(rng);
  for (int k = 0; k < n_measurements; ++k) {
    const double z = p.modulated ? modulated_amplitude(k, p.alpha, p.phi_s)
                                 : std::sin(p.alpha * std::sin(p.omega_ac * k * p.t_s + phase));
    t.counts.push_back(sample_readout(std::clamp(0.5 * (1 + z), 0.0, 1.0), model, rng));
  }
  return t;
}

ChargeAmplitudes charge_amplitudes(double alpha, double phi, const ChargeModel& charge, int runs, int n,
                                   std::uint64_t seed) {
  charge.validate();
  if (runs < 1 || n < 1) bad("runs and n must be >= 1");
  ChargeAmplitudes out;
  out.zeta_mean.assign(n, 0.0);
  out.sign_corr.assign(n, 0.0);
  const double c = std::cos(phi), s = std::sin(phi), sa = std::sin(alpha), ca = std::cos(alpha);

  // One pass of n cycles from w; acc[N-1] += weight * zeta_N.
  auto pass = [&](quantum::BlochVector w, double weight, std::bernoulli_distribution& nvm, Rng& rng,
                  std::vector<double>& acc) {
    for (int k = 0; k < n; ++k) {
      const double x = c * w.x - s * w.y, y = s * w.x + c * w.y;
      if (nvm(rng)) {
        acc[k] += weight * x * sa;
        w = {x, y * ca, w.z};
      } else {
        w = {x, y, w.z};
      }
    }
  };

  for (int r = 0; r < runs; ++r) {
    Rng rng = make_rng(seed, r);
    std::bernoulli_distribution nvm(charge.p_minus);
    pass({1, 0, 0}, 1.0, nvm, rng, out.zeta_mean);
    const int sign = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
    if (nvm(rng))
      pass({sign * sa, 0, 0}, sign, nvm, rng, out.sign_corr);
    else
      pass({0, 0, 0}, 0.0, nvm, rng, out.sign_corr);
  }
  for (int k = 0; k < n; ++k) {
    out.zeta_mean[k] /= runs;
    out.sign_corr[k] /= runs;
  }
  return out;
}

}  // namespace wmsim::readout
