#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wmsim/calibration.hpp"
#include "wmsim/correlation.hpp"
#include "wmsim/error.hpp"
#include "wmsim/readout.hpp"

using namespace wmsim;
using namespace wmsim::readout;

namespace {

constexpr double pi = std::numbers::pi;

double mean(const std::vector<std::int64_t>& v) {
  double s = 0;
  for (auto c : v) s += c;
  return s / v.size();
}

}  // namespace

TEST(Readout, BrightPoissonMean) {
  ReadoutModel m;
  m.n_a = 5;
  m.n_b = 1;
  Rng rng = make_rng(1, 0);
  std::vector<std::int64_t> c(100000);
  for (auto& v : c) v = sample_readout(1.0, m, rng);
  EXPECT_NEAR(mean(c), 5.0, 0.03);
}

TEST(Readout, RepetitionScaling) {
  ReadoutModel m;
  m.n_a = 40;
  m.n_b = 20;
  m.repetitions = 50;
  Rng rng = make_rng(2, 0);
  std::vector<std::int64_t> c(100000);
  for (auto& v : c) v = sample_readout(0.0, m, rng);
  EXPECT_NEAR(mean(c), 5.0, 0.03);
}

TEST(Readout, ProbabilityChecked) {
  ReadoutModel m;
  Rng rng = make_rng(1, 0);
  EXPECT_THROW(sample_readout(1.1, m, rng), Error);
  EXPECT_THROW(sample_readout(-0.1, m, rng), Error);
}

TEST(Readout, ModelValidation) {
  ReadoutModel m;
  m.n_a = 3;
  m.n_b = 3;
  EXPECT_THROW(m.validate(), Error);
  ChargeModel c{1.5};
  EXPECT_THROW(c.validate(), Error);
}

TEST(Readout, TraceKindStrings) {
  for (auto k : {TraceKind::Quantum, TraceKind::Classical, TraceKind::ModulationCalibration})
    EXPECT_EQ(trace_kind_from_string(to_string(k)), k);
  EXPECT_THROW(trace_kind_from_string("x"), Error);
}

TEST(Readout, RunsSplitAndAppend) {
  PhotonTrace t, a, b;
  a.counts = {1, 2, 3};
  b.counts = {4, 5};
  t.append_run(a);
  t.append_run(b);
  const auto r = t.runs();
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1], (std::vector<double>{4, 5}));
  t.run_lengths = {3, 3};
  EXPECT_THROW(t.runs(), Error);
}

TEST(Modulation, MeanLaw) {
  EXPECT_DOUBLE_EQ(modulation_mean(0, 5, 3, 0), 4.0);
  EXPECT_DOUBLE_EQ(modulation_mean(180, 5, 3, 0), 5.0);
  EXPECT_NEAR(modulation_mean(90, 5, 3, 0), 4.5, 1e-15);
}

TEST(Modulation, TraceLayoutAndMeans) {
  ReadoutModel m;
  Rng rng = make_rng(3, 0);
  const auto t = modulation_trace(m, default_modulation_angles(), 50, rng);
  EXPECT_EQ(t.kind, TraceKind::ModulationCalibration);
  ASSERT_EQ(t.counts.size(), 12u * 50 + 500);
  ASSERT_EQ(t.angles_deg.size(), t.counts.size());
  double s90 = 0;
  int n90 = 0;
  for (std::size_t i = 0; i < t.counts.size(); ++i)
    if (t.angles_deg[i] == 90) {
      s90 += t.counts[i];
      ++n90;
    }
  EXPECT_EQ(n90, 500);
  const double expect = modulation_mean(90, m.n_a, m.n_b, 0);
  // per-count sd: Poisson plus binomial spread of the bright fraction
  const double sd = std::sqrt(expect + 200 * 0.5 * 0.5 * 9.0);
  EXPECT_NEAR(s90 / n90, expect, 4 * sd / std::sqrt(500.0));
}

TEST(Quantum, DeterministicReplay) {
  protocol::ProtocolConfig cfg;
  cfg.alpha = 0.3;
  cfg.omega = 0.5;
  cfg.n_steps = 300;
  ReadoutModel m;
  Rng r1 = make_rng(9, 1), r2 = make_rng(9, 1);
  EXPECT_EQ(run_quantum_experiment(cfg, m, {0.7}, r1).counts, run_quantum_experiment(cfg, m, {0.7}, r2).counts);
}

TEST(Quantum, AllNeutralGivesDarkCounts) {
  protocol::ProtocolConfig cfg;
  cfg.n_steps = 50000;
  ReadoutModel m;
  m.n_a = 10;
  m.n_b = 2;
  m.n_nv0 = 1;
  Rng rng = make_rng(4, 1);
  const auto t = run_quantum_experiment(cfg, m, {0.0}, rng);
  EXPECT_NEAR(mean(t.counts), 1.0, 4 * std::sqrt(1.0 / 50000));
}

TEST(Quantum, IdealChargeMatchesChargeFreeLagOne) {
  // Two-sample check at 5% significance on the lag-1 reconstructed correlation.
  protocol::ProtocolConfig cfg;
  cfg.alpha = 0.18 * pi;
  cfg.omega = 27 * pi / 180;
  cfg.n_steps = 2000;
  ReadoutModel m;
  m.n_a = 20;
  m.n_b = 5;
  PhotonTrace a, b;
  for (int r = 0; r < 25; ++r) {
    Rng ra = make_rng(10, r);
    a.append_run(run_quantum_experiment(cfg, m, {1.0}, ra));
    Rng rb = make_rng(11, r);
    const auto tr = protocol::sample_trajectory(cfg, rb, protocol::BackAction::Conditioned);
    PhotonTrace run;
    for (int o : tr.outcomes) run.counts.push_back(sample_readout(o > 0 ? 1.0 : 0.0, m, rb));
    b.append_run(run);
  }
  const auto ca = calib::reconstruct_Sz_corr(a, m, 2, calib::Centering::SampleMean);
  const auto cb = calib::reconstruct_Sz_corr(b, m, 2, calib::Centering::SampleMean);
  const double z = (ca.values[1] - cb.values[1]) / std::hypot(ca.errors[1], cb.errors[1]);
  EXPECT_LT(std::abs(z), 1.96);
}

TEST(Classical, ZeroAmplitudeIsCoinFlip) {
  ClassicalParams p;
  p.alpha = 0;
  ReadoutModel m;
  m.n_a = 10;
  m.n_b = 0;
  Rng rng = make_rng(5, 1);
  const auto t = run_classical_experiment(p, m, rng, 100000);
  EXPECT_EQ(t.kind, TraceKind::Classical);
  // counts are a 50/50 mixture of Poisson(10) and zero
  EXPECT_NEAR(mean(t.counts), 5.0, 4 * std::sqrt(35.0 / 100000));
}

TEST(Classical, PopulationCorrelationOfSignal) {
  // Empirical z correlation over random phases -> (alpha^2 / 2) cos(w tau) at small alpha.
  ClassicalParams p;
  p.alpha = 0.1;
  p.omega_ac = pi / 5;
  ReadoutModel m;
  m.n_a = 1;
  m.n_b = 0;
  m.repetitions = 200;
  PhotonTrace all;
  for (int r = 0; r < 400; ++r) {
    Rng rng = make_rng(6, r);
    all.append_run(run_classical_experiment(p, m, rng, 2000));
  }
  const auto c = calib::reconstruct_Sz_corr(all, m, 10, calib::Centering::Calibrated);
  for (int n = 1; n <= 10; ++n)
    EXPECT_NEAR(c.values[n], 0.005 * std::cos(pi / 5 * n), 3.5 * c.errors[n]) << n;
}

TEST(Classical, ModulatedAmplitude) {
  EXPECT_NEAR(modulated_amplitude(0, 0.3, 1.0), std::sin(0.3), 1e-15);
  EXPECT_NEAR(modulated_amplitude(2, 0.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(modulated_amplitude(6, 0.0, 1.0), -1.0, 1e-15);
}

TEST(Charge, IdealIsExactRecurrence) {
  const double a = 0.1 * pi, phi = 0.6;
  const auto amps = charge_amplitudes(a, phi, {1.0}, 3, 30, 42);
  quantum::BlochVector w{1, 0, 0};
  for (int n = 0; n < 30; ++n) {
    const double x = std::cos(phi) * w.x - std::sin(phi) * w.y;
    EXPECT_NEAR(amps.zeta_mean[n], x * std::sin(a), 1e-14);
    w = protocol::recurrence_step(w, a, phi);
  }
  // self-polarized, sign-weighted: sin^2(a) times the same amplitudes
  for (int n = 0; n < 30; ++n) EXPECT_NEAR(amps.sign_corr[n], std::sin(a) * amps.zeta_mean[n], 1e-14);
}

TEST(Charge, NeutralPulsesSuppressAmplitude) {
  const auto ideal = charge_amplitudes(0.1 * pi, 0.47, {1.0}, 2000, 5, 7);
  const auto half = charge_amplitudes(0.1 * pi, 0.47, {0.5}, 2000, 5, 7);
  // first lag: both the sign pulse and the readout pulse must be NV-
  EXPECT_NEAR(half.sign_corr[0] / ideal.sign_corr[0], 0.25, 0.05);
  EXPECT_NEAR(half.zeta_mean[0] / ideal.zeta_mean[0], 0.5, 0.05);
}
