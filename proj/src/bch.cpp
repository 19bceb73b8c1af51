#include "wmsim/bch.hpp"

#include <cmath>

#include "wmsim/error.hpp"

namespace wmsim::bch {

using quantum::commutator;
using quantum::DensityMatrix;
using quantum::max_abs;

namespace {

const char* kMod = "bch-propagator";

void require_pair(const ComplexMatrix& H, const DensityMatrix& rho) {
  if (!quantum::is_hermitian(H)) throw Error(ErrorKind::InvalidArgument, kMod, "H is not Hermitian");
  if (H.rows() != rho.dim()) throw Error(ErrorKind::InvalidArgument, kMod, "H and rho differ in dimension");
}

// Entries below this are treated as an exactly vanishing [H, rho].
constexpr double kStationaryTol = 1e-13;

}  // namespace

BchDecomposition check_bch_conditions(const ComplexMatrix& H, const DensityMatrix& rho) {
  require_pair(H, rho);
  BchDecomposition d;
  d.B = commutator(H, rho.matrix());
  if (max_abs(d.B) < kStationaryTol) {
    d.stationary = true;
    d.Delta = rho.matrix();
    return d;
  }
  const ComplexMatrix HB = commutator(H, d.B);
  const ComplexMatrix HHB = commutator(H, HB);
  // least squares for [H,[H,B]] = k B over all entries
  const double bb = d.B.squaredNorm();
  d.k = (d.B.adjoint() * HHB).trace().real() / bb;
  if (!(d.k > 0)) {
    d.Delta = ComplexMatrix::Zero(H.rows(), H.cols());
    d.residual = max_abs(HHB);
    return d;
  }
  d.Delta = rho.matrix() - HB / d.k;
  d.residual = std::max(max_abs(HHB - d.k * d.B), max_abs(commutator(H, d.Delta)));
  d.valid = d.residual < kResidualTol;
  return d;
}

DensityMatrix bch_evolve(const ComplexMatrix& /*H*/, const DensityMatrix& rho, double phi,
                         const BchDecomposition& d) {
  if (d.stationary) return rho;
  if (!d.valid)
    throw Error(ErrorKind::UnsupportedState, kMod, "BCH conditions fail; use exact_evolve");
  const double s = std::sqrt(d.k);
  const double c = std::cos(phi * s);
  ComplexMatrix out = rho.matrix() * c + d.Delta * (1 - c) - cplx(0, 1) * d.B * (std::sin(phi * s) / s);
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

DensityMatrix bch_evolve(const ComplexMatrix& H, const DensityMatrix& rho, double phi) {
  return bch_evolve(H, rho, phi, check_bch_conditions(H, rho));
}

ComplexMatrix propagator(const ComplexMatrix& H, double phi) {
  if (!quantum::is_hermitian(H)) throw Error(ErrorKind::InvalidArgument, kMod, "H is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<cplx>() * cplx(0, -phi)).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

DensityMatrix exact_evolve(const ComplexMatrix& H, const DensityMatrix& rho, double phi) {
  require_pair(H, rho);
  const ComplexMatrix U = propagator(H, phi);
  ComplexMatrix out = U * rho.matrix() * U.adjoint();
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

DensityMatrix master_equation_step(const DensityMatrix& rho_prev, const ComplexMatrix& H, double alpha) {
  const BchDecomposition d = check_bch_conditions(H, rho_prev);
  if (d.stationary) return rho_prev;
  if (!d.valid)
    throw Error(ErrorKind::UnsupportedState, kMod, "BCH conditions fail for the master-equation step");
  const ComplexMatrix HHr = commutator(H, d.B);
  ComplexMatrix out = rho_prev.matrix() - cplx(0, 1) * d.B * (std::sin(alpha) / std::sqrt(d.k)) -
                      HHr * ((1 - std::cos(alpha)) / d.k);
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

}  // namespace wmsim::bch
