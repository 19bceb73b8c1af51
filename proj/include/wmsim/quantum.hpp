#pragma once

// Two-spin algebra. Convention throughout: composite index = sensor * 2 + nucleus
// (sensor factor first), S_k = I_k = sigma_k / 2, S_e = I_e = 1/2, hbar = 1.

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace wmsim {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

namespace quantum {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kEigenTol = 1e-10;
constexpr double kRankCutoff = 1e-10;

enum class Subsystem { Sensor, Nucleus };

/// Single-spin labels: S_e S_x S_y S_z I_e I_x I_y I_z (also sx, sy, sz, id).
/// Product labels join two single-spin labels with '*', e.g. "S_z*I_x".
ComplexMatrix pauli_basis_op(std::string_view label, int subsystems = 1);

ComplexMatrix sigma(char axis);  // 'x', 'y', 'z' or 'e' (identity)
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);

struct BlochVector {
  double x = 0, y = 0, z = 0;

  double norm() const;
  /// Throws invalid-argument when |w| > 1 + 1e-10.
  void validate() const;
};

class DensityMatrix {
 public:
  /// Validates hermiticity, unit trace and positivity.
  explicit DensityMatrix(ComplexMatrix m);

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  cplx trace() const { return m_.trace(); }

 private:
  ComplexMatrix m_;
};

DensityMatrix bloch_to_density(const BlochVector& w);
BlochVector density_to_bloch(const DensityMatrix& rho);
BlochVector bloch_of(const ComplexMatrix& rho2);

/// tr_D over the subsystem that is not kept.
DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);
ComplexMatrix partial_trace(const ComplexMatrix& rho, Subsystem keep);

struct GramMatrix {
  Eigen::Matrix<double, 6, 6> entries;
  int rank = 0;
};

GramMatrix gram_rank(const DensityMatrix& rho);

}  // namespace quantum
}  // namespace wmsim
