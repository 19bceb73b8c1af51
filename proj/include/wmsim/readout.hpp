#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmsim/protocol.hpp"
#include "wmsim/rng.hpp"

namespace wmsim::readout {

/// Photon means refer to a measurement of 200 repetitive readouts; a
/// measurement with `repetitions` readouts scales them by repetitions / 200.
struct ReadoutModel {
  double n_a = 1200;
  double n_b = 600;
  double phi_0 = 0;
  int repetitions = 200;
  double n_nv0 = -1;  // NV0 mean; negative means n_b

  double scale() const { return repetitions / 200.0; }
  double nv0_mean() const { return n_nv0 < 0 ? n_b : n_nv0; }
  void validate() const;
};

struct ChargeModel {
  double p_minus = 1.0;
  void validate() const;
};

enum class TraceKind { Quantum, Classical, ModulationCalibration };
const char* to_string(TraceKind k);
TraceKind trace_kind_from_string(const std::string& s);

struct PhotonTrace {
  std::vector<std::int64_t> counts;
  std::vector<double> angles_deg;  // modulation traces only, one per count
  std::vector<std::size_t> run_lengths;  // consecutive runs; empty means one run
  TraceKind kind = TraceKind::Quantum;
  std::uint64_t seed = 0;
  std::string config;  // JSON snapshot of the producing configuration

  /// Counts split into runs.
  std::vector<std::vector<double>> runs() const;
  void append_run(const PhotonTrace& run);
};

/// One measurement with a single projective outcome: bright with probability p_bright.
std::int64_t sample_readout(double p_bright, const ReadoutModel& model, Rng& rng);
std::int64_t sample_poisson(double mean, Rng& rng);

/// n(k) = (n_a + n_b)/2 + (n_a - n_b)/2 sin^2(phi_k/2 + phi_0), phi in degrees.
double modulation_mean(double phi_deg, double n_a, double n_b, double phi_0);

/// Self-polarized (or prepolarized) run of cfg.n_steps measurements with
/// per-pulse charge sampling. NV0 pulses leave the nucleus unmeasured.
PhotonTrace run_quantum_experiment(const protocol::ProtocolConfig& cfg, const ReadoutModel& model,
                                   const ChargeModel& charge, Rng& rng,
                                   protocol::BackAction mode = protocol::BackAction::Conditioned);

std::vector<double> default_modulation_angles();  // 0, 30, ..., 360

/// `reps_per_angle` measurements per angle, `reps_at_90` at 90 degrees.
/// Each of the model's repetitions is projected independently.
PhotonTrace modulation_trace(const ReadoutModel& model, const std::vector<double>& angles_deg,
                             int reps_per_angle, Rng& rng, int reps_at_90 = 500);

struct ClassicalParams {
  double alpha = 0.3;
  double omega_ac = 1.0;  // rad/s
  double t_s = 1.0;       // s between measurements
  bool modulated = false;
  double phi_s = 1.0;
};

/// Modulated amplitude sin(pi/2 sin(2 pi k / 8) + alpha cos(k phi_s pi / 4)).
double modulated_amplitude(int k, double alpha, double phi_s);

/// One run with a fresh uniform random phase.
PhotonTrace run_classical_experiment(const ClassicalParams& p, const ReadoutModel& model, Rng& rng,
                                     int n_measurements);

/// Charge study on sensor amplitudes zeta (no photon noise).
struct ChargeAmplitudes {
  std::vector<double> zeta_mean;  // run-averaged zeta_N, prepolarized start, N = 1..n
  std::vector<double> sign_corr;  // run-averaged s_0 zeta_N, self-polarized start (s_0 = 0 on NV0)
};
ChargeAmplitudes charge_amplitudes(double alpha, double phi, const ChargeModel& charge, int runs, int n,
                                   std::uint64_t seed);

}  // namespace wmsim::readout
