#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wmsim/bch.hpp"
#include "wmsim/error.hpp"
#include "wmsim/protocol.hpp"

using namespace wmsim;
using namespace wmsim::quantum;
using wmsim::bch::bch_evolve;
using wmsim::bch::check_bch_conditions;
using wmsim::bch::exact_evolve;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0, 1);

ComplexMatrix Hint() { return protocol::interaction_hamiltonian(); }

DensityMatrix family(double x, double y) { return protocol::cycle_input({x, y, 0}); }

}  // namespace

TEST(Bch, KIsQuarterForSzIx) {
  const auto d = check_bch_conditions(Hint(), family(1, 0));
  ASSERT_TRUE(d.valid);
  EXPECT_NEAR(d.k, 0.25, 1e-14);
  EXPECT_LT(d.residual, 1e-14);
}

TEST(Bch, KIsOneForDoubledCoupling) {
  const auto d = check_bch_conditions(2.0 * Hint(), family(0.4, -0.3));
  ASSERT_TRUE(d.valid);
  EXPECT_NEAR(d.k, 1.0, 1e-14);
}

TEST(Bch, DeltaCommutesAndReconstructs) {
  const double x = 0.6, y = -0.2;
  const auto rho = family(x, y);
  const auto d = check_bch_conditions(Hint(), rho);
  ASSERT_TRUE(d.valid);
  EXPECT_LT(max_abs(commutator(Hint(), d.Delta)), 1e-14);
  const ComplexMatrix B = commutator(Hint(), rho.matrix());
  EXPECT_LT(max_abs(d.B - B), 1e-15);
  EXPECT_LT(max_abs(commutator(Hint(), B) - d.k * (rho.matrix() - d.Delta)), 1e-14);
}

TEST(Bch, DeltaStructureForAlignedNucleus) {
  // x-polarized nucleus: rho = (S_e + S_x)(I_e + I_x); only S_x parts rotate.
  const auto d = check_bch_conditions(Hint(), family(1, 0));
  const ComplexMatrix expect = pauli_basis_op("S_e*I_e", 2) + pauli_basis_op("S_e*I_x", 2);
  EXPECT_LT(max_abs(d.Delta - expect), 1e-14);
}

TEST(Bch, MatchesExactOnFamily) {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> u(-1, 1), a(0, pi);
  for (int i = 0; i < 500; ++i) {
    double x, y;
    do {
      x = u(g);
      y = u(g);
    } while (x * x + y * y > 1);
    const auto rho = family(x, y);
    const double phi = 2 * a(g);
    EXPECT_LT(max_abs(bch_evolve(Hint(), rho, phi).matrix() - exact_evolve(Hint(), rho, phi).matrix()), 1e-12);
  }
}

TEST(Bch, MatchesExactForOtherGenerators) {
  const auto rho = family(0.3, 0.5);
  for (const char* h : {"S_x", "I_z", "S_z*I_z"}) {
    const ComplexMatrix H = pauli_basis_op(h, 2);
    const auto d = check_bch_conditions(H, rho);
    if (!d.valid) continue;
    for (double phi : {0.1, 1.0, 2.5})
      EXPECT_LT(max_abs(bch_evolve(H, rho, phi).matrix() - exact_evolve(H, rho, phi).matrix()), 1e-12) << h;
  }
}

TEST(Bch, ZeroPhaseIsIdentity) {
  const auto rho = family(0.2, 0.7);
  EXPECT_LT(max_abs(bch_evolve(Hint(), rho, 0).matrix() - rho.matrix()), 1e-15);
}

TEST(Bch, FullPeriodReturns) {
  // phi sqrt(k) = 2 pi
  const auto rho = family(-0.4, 0.1);
  EXPECT_LT(max_abs(bch_evolve(Hint(), rho, 4 * pi).matrix() - rho.matrix()), 1e-13);
}

TEST(Bch, OutputIsDensityMatrix) {
  const auto out = bch_evolve(Hint(), family(0.9, 0.1), 1.234);
  EXPECT_TRUE(is_hermitian(out.matrix()));
  EXPECT_NEAR(out.trace().real(), 1.0, 1e-13);
}

TEST(Bch, StationaryStateUnchanged) {
  const DensityMatrix mixed(ComplexMatrix::Identity(4, 4) / 4.0);
  const auto d = check_bch_conditions(Hint(), mixed);
  EXPECT_TRUE(d.stationary);
  EXPECT_LT(max_abs(bch_evolve(Hint(), mixed, 0.7).matrix() - mixed.matrix()), 1e-15);
}

TEST(Bch, OutsideFamilyThrowsUnsupported) {
  // A generator with several distinct Bohr frequencies has no single-k orbit.
  const DensityMatrix rho(tensor(bloch_to_density({0.5, 0, 0.5}).matrix(), bloch_to_density({0.3, 0.4, 0.5}).matrix()));
  const ComplexMatrix H = pauli_basis_op("S_z*I_x", 2) + 0.37 * pauli_basis_op("S_x", 2) + 0.21 * pauli_basis_op("I_z", 2);
  const auto d = check_bch_conditions(H, rho);
  EXPECT_FALSE(d.valid);
  try {
    bch_evolve(H, rho, 1.0);
    FAIL() << "expected unsupported-state";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedState);
  }
  // the brute-force path still works
  EXPECT_NO_THROW(exact_evolve(H, rho, 1.0));
}

TEST(Bch, NonHermitianGenerator) {
  ComplexMatrix H = Hint();
  H(0, 1) += I;
  EXPECT_THROW(check_bch_conditions(H, family(1, 0)), Error);
}

TEST(Bch, PropagatorUnitary) {
  const ComplexMatrix U = bch::propagator(Hint(), 0.77);
  EXPECT_LT(max_abs(U * U.adjoint() - ComplexMatrix::Identity(4, 4)), 1e-14);
}

TEST(MasterEquation, QuarterKForm) {
  const double alpha = 0.41;
  const auto rho = family(0.5, 0.5);
  const ComplexMatrix H = Hint();
  const ComplexMatrix c1 = commutator(H, rho.matrix());
  const ComplexMatrix c2 = commutator(H, c1);
  const ComplexMatrix expect = rho.matrix() - 2.0 * I * c1 * std::sin(alpha) - 4.0 * c2 * (1 - std::cos(alpha));
  EXPECT_LT(max_abs(bch::master_equation_step(rho, H, alpha).matrix() - expect), 1e-14);
  EXPECT_LT(max_abs(bch::master_equation_step(rho, H, alpha).matrix() -
                    exact_evolve(H, rho, 2 * alpha).matrix()),
            1e-12);
}

TEST(MasterEquation, NuclearMarginalIsUnconditionalMap) {
  const double alpha = 0.3, x = 0.6, y = -0.2;
  const auto out = bch::master_equation_step(family(x, y), Hint(), alpha).matrix();
  EXPECT_LT(max_abs(out - exact_evolve(Hint(), family(x, y), 2 * alpha).matrix()), 1e-13);
  const auto w = bloch_of(partial_trace(out, Subsystem::Nucleus));
  EXPECT_NEAR(w.x, x, 1e-13);
  EXPECT_NEAR(w.y, y * std::cos(alpha), 1e-13);
  EXPECT_NEAR(w.z, 0.0, 1e-13);
}
