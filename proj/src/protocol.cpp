#include "wmsim/protocol.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

#include "wmsim/bch.hpp"
#include "wmsim/error.hpp"

namespace wmsim::protocol {

using quantum::pauli_basis_op;
using quantum::Subsystem;

namespace {

const char* kMod = "weak-measurement";

[[noreturn]] void bad(ErrorKind k, const std::string& msg) { throw Error(k, kMod, msg); }

constexpr double kDominance = 100.0;

}  // namespace

void ProtocolConfig::validate() const {
  if (!(alpha >= 0 && alpha <= std::numbers::pi / 2)) bad(ErrorKind::InvalidArgument, "alpha must lie in [0, pi/2]");
  if (n_steps < 1) bad(ErrorKind::InvalidArgument, "n_steps must be >= 1");
  if (!(t_f > 0)) bad(ErrorKind::InvalidArgument, "t_f must be > 0");
  if (!std::isfinite(omega)) bad(ErrorKind::InvalidArgument, "omega must be finite");
}

double PhysicalParams::omega_L() const { return 2 * std::numbers::pi * gamma_C * B_z; }

void PhysicalParams::validate() const {
  if (A_par < 0 || A_perp < 0 || B_z < 0 || gamma_C < 0 || N_p < 0 || tau < 0 || t_l < 0 || t_s < 0)
    bad(ErrorKind::InvalidArgument, "physical parameters must be nonnegative");
}

double resonance_tau(const PhysicalParams& p, int k) {
  p.validate();
  const double wl = p.omega_L();
  if (!(wl > 0)) bad(ErrorKind::InvalidArgument, "omega_L must be > 0");
  if (k < 0) bad(ErrorKind::InvalidArgument, "resonance order must be >= 0");
  const double a_zz = 2 * std::numbers::pi * p.A_par;
  const double a_zx = 2 * std::numbers::pi * p.A_perp;
  if (kDominance * a_zz <= wl) return std::numbers::pi / wl;
  if (kDominance * a_zx <= wl) return (2 * k + 1) * std::numbers::pi / (2 * wl + a_zz);
  bad(ErrorKind::AmbiguousRegime, "hyperfine couplings too strong for either resonance condition");
}

DephasingRates dephasing_rates(const PhysicalParams& p, double alpha) {
  if (!(p.t_s > 0)) bad(ErrorKind::InvalidArgument, "t_s must be > 0");
  const double a_par = 2 * std::numbers::pi * p.A_par;
  return {alpha * alpha / (4 * p.t_s), a_par * a_par * p.t_l * p.t_l / (2 * p.t_s)};
}

double measurement_strength(const PhysicalParams& p) {
  return std::numbers::pi * p.N_p * p.A_perp * p.tau;
}

ElectronFrequencies electron_dependent_frequencies(const PhysicalParams& p) {
  const double w0 = p.omega_L();
  const double ap = 2 * std::numbers::pi * p.A_par;
  const double at = 2 * std::numbers::pi * p.A_perp;
  return {w0, std::hypot(w0 + ap, at), std::hypot(w0 - ap, at)};
}

InitialState generate_initial_state(double alpha, Rng& rng) {
  const int sign = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
  return {{sign * std::sin(alpha), 0, 0}, sign};
}

ComplexMatrix precession_hamiltonian() { return pauli_basis_op("I_z", 2); }
ComplexMatrix interaction_hamiltonian() { return pauli_basis_op("S_z*I_x", 2); }
ComplexMatrix sensor_rotation_hamiltonian() { return pauli_basis_op("S_x", 2); }

double entanglement_signature() {
  return quantum::max_abs(
      quantum::commutator(pauli_basis_op("S_z*I_x", 2), pauli_basis_op("S_x*I_y", 2)));
}

DensityMatrix cycle_input(const BlochVector& nucleus) {
  const ComplexMatrix sensor = pauli_basis_op("S_e") + pauli_basis_op("S_x");
  return DensityMatrix(quantum::tensor(sensor, quantum::bloch_to_density(nucleus).matrix()));
}

CycleResult measurement_cycle(const DensityMatrix& state, const ProtocolConfig& cfg) {
  cfg.validate();
  if (state.dim() != 4) bad(ErrorKind::InvalidArgument, "cycle needs a composite state");
  const ComplexMatrix sensor = quantum::partial_trace(state.matrix(), Subsystem::Sensor);
  if (quantum::max_abs(sensor - pauli_basis_op("S_e") - pauli_basis_op("S_x")) > 1e-10)
    bad(ErrorKind::InvalidArgument, "sensor must enter the cycle as S_e + S_x");
  assert(entanglement_signature() == 0.0);

  const auto precessed = bch::bch_evolve(precession_hamiltonian(), state, cfg.phi());
  const ComplexMatrix Hi = interaction_hamiltonian();
  const auto d = bch::check_bch_conditions(Hi, precessed);
  if (!d.valid && !d.stationary)
    bad(ErrorKind::UnsupportedState, "interaction step outside the closed-form family");
  const auto entangled = bch::bch_evolve(Hi, precessed, 2 * cfg.alpha, d);
  auto rotated = bch::bch_evolve(sensor_rotation_hamiltonian(), entangled, std::numbers::pi / 2);

  const ComplexMatrix rs = quantum::partial_trace(rotated.matrix(), Subsystem::Sensor);
  const double zeta = (rs * quantum::sigma('z')).trace().real();
  const BlochVector nuc = quantum::bloch_of(quantum::partial_trace(rotated.matrix(), Subsystem::Nucleus));
  return {std::move(rotated), nuc, zeta};
}

BlochVector recurrence_step(const BlochVector& w, double alpha, double phi) {
  const double c = std::cos(phi), s = std::sin(phi), ca = std::cos(alpha);
  return {c * w.x - s * w.y, (s * w.x + c * w.y) * ca, w.z};
}

double outcome_probability(double x_pre, double alpha, int outcome) {
  return 0.5 * (1 + outcome * x_pre * std::sin(alpha));
}

BlochVector conditioned_update(const BlochVector& w, double alpha, int outcome) {
  const double sa = std::sin(alpha);
  const double norm = 1 + outcome * w.x * sa;
  if (!(norm > 0)) bad(ErrorKind::InvalidArgument, "outcome has zero probability");
  return {(w.x + outcome * sa) / norm, w.y * std::cos(alpha) / norm, w.z * std::cos(alpha) / norm};
}

std::pair<double, double> approx_amplitudes(int N, double alpha, double omega, double t_f, int sign,
                                            Polarization pol) {
  const double pf = pol == Polarization::SelfPolarized ? std::sin(alpha) : 1.0;
  const double env = std::exp(-(N - 1) * alpha * alpha / 4);
  const double ph = omega * N * t_f;
  return {sign * pf * std::cos(ph) * env, sign * pf * std::sin(ph) * std::cos(alpha) * env};
}

int sample_cycle(BlochVector& w, double alpha, double phi, Rng& rng, BackAction mode, double* zeta) {
  const double c = std::cos(phi), s = std::sin(phi);
  const BlochVector pre{c * w.x - s * w.y, s * w.x + c * w.y, w.z};
  const double z = pre.x * std::sin(alpha);
  if (zeta) *zeta = z;
  const double p_plus = std::clamp(0.5 * (1 + z), 0.0, 1.0);
  const int o = std::bernoulli_distribution(p_plus)(rng) ? 1 : -1;
  if (mode == BackAction::Ensemble)
    w = {pre.x, pre.y * std::cos(alpha), pre.z};
  else
    w = conditioned_update(pre, alpha, o);
  return o;
}

SpinTrajectory sample_trajectory(const ProtocolConfig& cfg, Rng& rng, BackAction mode) {
  cfg.validate();
  SpinTrajectory t;
  BlochVector w{1, 0, 0};
  if (cfg.polarization == Polarization::SelfPolarized) {
    const auto init = generate_initial_state(cfg.alpha, rng);
    w = init.w;
    t.polarization_sign = init.sign;
  }
  t.bloch_history.reserve(cfg.n_steps);
  t.zeta_history.reserve(cfg.n_steps);
  t.outcomes.reserve(cfg.n_steps);
  for (int n = 0; n < cfg.n_steps; ++n) {
    double z;
    t.outcomes.push_back(sample_cycle(w, cfg.alpha, cfg.phi(), rng, mode, &z));
    t.zeta_history.push_back(z);
    t.bloch_history.push_back(w);
  }
  return t;
}

}  // namespace wmsim::protocol
