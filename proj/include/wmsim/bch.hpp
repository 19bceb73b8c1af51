#pragma once

#include "wmsim/quantum.hpp"

namespace wmsim::bch {

constexpr double kResidualTol = 1e-10;

/// B = [H, rho], [H, B] = k rho - k Delta, [H, Delta] = 0.
struct BchDecomposition {
  ComplexMatrix B;
  double k = 0;
  ComplexMatrix Delta;
  bool valid = false;
  // [H, rho] vanishes: rho is invariant and no positive k exists.
  bool stationary = false;
  double residual = 0;  // max of |[H,[H,B]] - kB| and |[H,Delta]|
};

BchDecomposition check_bch_conditions(const ComplexMatrix& H, const quantum::DensityMatrix& rho);

/// U rho U* with U = exp(-i phi H), in closed form. Stationary states are
/// returned unchanged; other invalid decompositions throw unsupported-state.
quantum::DensityMatrix bch_evolve(const ComplexMatrix& H, const quantum::DensityMatrix& rho, double phi);
quantum::DensityMatrix bch_evolve(const ComplexMatrix& H, const quantum::DensityMatrix& rho, double phi,
                                  const BchDecomposition& d);

/// Brute-force oracle through the eigendecomposition of H.
quantum::DensityMatrix exact_evolve(const ComplexMatrix& H, const quantum::DensityMatrix& rho, double phi);
ComplexMatrix propagator(const ComplexMatrix& H, double phi);

/// rho - (1/sqrt k) i[H,rho] sin(a) - (1/k) [H,[H,rho]] (1 - cos a), i.e. bch_evolve
/// with phi sqrt(k) = a. For k = 1/4 this is rho - 2i[H,rho] sin a - 4[H,[H,rho]](1 - cos a).
quantum::DensityMatrix master_equation_step(const quantum::DensityMatrix& rho_prev, const ComplexMatrix& H,
                                            double alpha);

}  // namespace wmsim::bch
