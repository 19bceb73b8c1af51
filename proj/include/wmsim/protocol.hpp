#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wmsim/quantum.hpp"
#include "wmsim/rng.hpp"

namespace wmsim::protocol {

using quantum::BlochVector;
using quantum::DensityMatrix;

enum class Polarization { Prepolarized, SelfPolarized };

// Ensemble: nucleus follows the unconditional map R_z^alpha.
// Conditioned: nucleus follows the Lueders update for the sampled outcome.
enum class BackAction { Ensemble, Conditioned };

struct ProtocolConfig {
  double alpha = 0.18 * 3.14159265358979323846;
  double omega = 1.0;  // rad/s
  double t_f = 1.0;    // s
  int n_steps = 100;
  Polarization polarization = Polarization::SelfPolarized;
  std::uint64_t seed = 1;

  double phi() const { return omega * t_f; }
  void validate() const;
};

struct PhysicalParams {
  double A_par = 0;      // Hz
  double A_perp = 0;     // Hz
  double B_z = 0;        // T
  double gamma_C = 0;    // Hz/T
  int N_p = 0;
  double tau = 0;        // s
  double t_l = 0;        // s
  double t_s = 0;        // s

  double omega_L() const;  // 2 pi gamma_C B_z, rad/s
  void validate() const;
};

/// Picks pi/omega_L when 2 pi A_par is 100x below omega_L, otherwise
/// (2k+1) pi / (2 omega_L + 2 pi A_par) when 2 pi A_perp is 100x below omega_L.
double resonance_tau(const PhysicalParams& p, int k);

struct DephasingRates {
  double gamma_perp = 0;  // 1/s
  double gamma_opt = 0;   // 1/s
};
DephasingRates dephasing_rates(const PhysicalParams& p, double alpha);

/// alpha = pi N_p A_perp tau
double measurement_strength(const PhysicalParams& p);

struct ElectronFrequencies {
  double omega_0 = 0, omega_plus = 0, omega_minus = 0;  // rad/s
};
ElectronFrequencies electron_dependent_frequencies(const PhysicalParams& p);

struct InitialState {
  BlochVector w;
  int sign = 1;
};
InitialState generate_initial_state(double alpha, Rng& rng);

ComplexMatrix precession_hamiltonian();   // 1 (x) I_z, phase omega t_f
ComplexMatrix interaction_hamiltonian();  // S_z (x) I_x, phase 2 alpha
ComplexMatrix sensor_rotation_hamiltonian();  // S_x (x) 1, phase pi/2

/// Max entry of [S_z (x) I_x, S_x (x) I_y]; zero.
double entanglement_signature();

/// (S_e + S_x) (x) rho_I
DensityMatrix cycle_input(const BlochVector& nucleus);

struct CycleResult {
  DensityMatrix composite_after;
  BlochVector nuclear_after;
  double zeta;
};

/// Free precession, interaction, (pi/2)_x on the sensor, then readout of
/// zeta = tr[sigma_z rho^S]. Throws unsupported-state outside the BCH family.
CycleResult measurement_cycle(const DensityMatrix& state, const ProtocolConfig& cfg);

BlochVector recurrence_step(const BlochVector& w, double alpha, double phi);

/// Outcome probability P(o) for the sensor readout given the pre-interaction x.
double outcome_probability(double x_pre, double alpha, int outcome);

/// Nuclear state after interaction and readout outcome o, from pre-interaction w.
BlochVector conditioned_update(const BlochVector& w_pre, double alpha, int outcome);

/// (x_N, y_N) from the small-alpha closed form.
std::pair<double, double> approx_amplitudes(int N, double alpha, double omega, double t_f, int sign,
                                            Polarization pol = Polarization::SelfPolarized);

struct SpinTrajectory {
  std::vector<BlochVector> bloch_history;
  std::vector<double> zeta_history;
  std::vector<int> outcomes;
  int polarization_sign = 1;
};

SpinTrajectory sample_trajectory(const ProtocolConfig& cfg, Rng& rng, BackAction mode = BackAction::Ensemble);

/// One cycle of the sampled process: precession, readout, back-action. Returns the outcome.
int sample_cycle(BlochVector& w, double alpha, double phi, Rng& rng, BackAction mode, double* zeta = nullptr);

}  // namespace wmsim::protocol
