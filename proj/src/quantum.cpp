#include "wmsim/quantum.hpp"

#include <cmath>
#include <string>

#include "wmsim/error.hpp"

namespace wmsim::quantum {
namespace {

const char* kMod = "quantum-core";

[[noreturn]] void bad(const std::string& msg) {
  throw Error(ErrorKind::InvalidArgument, kMod, msg);
}

// Parses "S_x" / "I_e" style labels. Returns subsystem letter and axis.
bool parse_single(std::string_view s, char& sub, char& axis) {
  if (s.size() == 3 && (s[0] == 'S' || s[0] == 'I') && s[1] == '_' &&
      (s[2] == 'e' || s[2] == 'x' || s[2] == 'y' || s[2] == 'z')) {
    sub = s[0];
    axis = s[2];
    return true;
  }
  return false;
}

}  // namespace

ComplexMatrix sigma(char axis) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (axis) {
    case 'e': m(0, 0) = 1; m(1, 1) = 1; break;
    case 'x': m(0, 1) = 1; m(1, 0) = 1; break;
    case 'y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
    case 'z': m(0, 0) = 1; m(1, 1) = -1; break;
    default: bad(std::string("unknown axis '") + axis + "'");
  }
  return m;
}

ComplexMatrix pauli_basis_op(std::string_view label, int subsystems) {
  if (subsystems != 1 && subsystems != 2) bad("subsystem count must be 1 or 2");

  std::size_t split = label.find('*');
  std::size_t skip = 1;
  if (split == std::string_view::npos) {
    split = label.find("⊗");
    skip = std::string_view("⊗").size();
  }
  if (split != std::string_view::npos) {
    if (subsystems != 2) bad("product label needs two subsystems");
    char sa, aa, sb, ab;
    if (!parse_single(label.substr(0, split), sa, aa) ||
        !parse_single(label.substr(split + skip), sb, ab) || sa != 'S' || sb != 'I')
      bad("unknown product label '" + std::string(label) + "'");
    return tensor(0.5 * sigma(aa), 0.5 * sigma(ab));
  }

  char sub, axis;
  if (!parse_single(label, sub, axis)) bad("unknown label '" + std::string(label) + "'");
  ComplexMatrix single = 0.5 * sigma(axis);
  if (subsystems == 1) return single;
  return sub == 'S' ? tensor(single, sigma('e')) : tensor(sigma('e'), single);
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != 2 || a.cols() != 2 || b.rows() != 2 || b.cols() != 2)
    bad("tensor expects two 2x2 factors");
  ComplexMatrix out(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
  return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

void BlochVector::validate() const {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) ||
      x * x + y * y + z * z > 1 + 1e-10)
    bad("Bloch vector outside the unit ball");
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || (m_.rows() != 2 && m_.rows() != 4))
    bad("density matrix must be 2x2 or 4x4");
  if (!is_hermitian(m_)) bad("density matrix not Hermitian");
  if (std::abs(m_.trace() - cplx(1, 0)) > kTraceTol) bad("density matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kEigenTol) bad("density matrix has a negative eigenvalue");
}

DensityMatrix bloch_to_density(const BlochVector& w) {
  w.validate();
  return DensityMatrix(0.5 * (sigma('e') + w.x * sigma('x') + w.y * sigma('y') + w.z * sigma('z')));
}

BlochVector bloch_of(const ComplexMatrix& rho2) {
  if (rho2.rows() != 2 || rho2.cols() != 2) bad("Bloch coordinates need a 2x2 matrix");
  return {(rho2 * sigma('x')).trace().real(), (rho2 * sigma('y')).trace().real(),
          (rho2 * sigma('z')).trace().real()};
}

BlochVector density_to_bloch(const DensityMatrix& rho) { return bloch_of(rho.matrix()); }

ComplexMatrix partial_trace(const ComplexMatrix& rho, Subsystem keep) {
  if (rho.rows() != 4 || rho.cols() != 4) bad("partial trace needs a 4x4 matrix");
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        if (keep == Subsystem::Nucleus)
          out(i, j) += rho(k * 2 + i, k * 2 + j);
        else
          out(i, j) += rho(i * 2 + k, j * 2 + k);
      }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
  return DensityMatrix(partial_trace(rho.matrix(), keep));
}

GramMatrix gram_rank(const DensityMatrix& rho) {
  if (rho.dim() != 4) bad("Gram matrix needs a 4x4 state");
  const cplx i(0, 1);
  ComplexMatrix W[6];
  for (int k = 0; k < 3; ++k) {
    const char ax = "xyz"[k];
    W[k] = commutator(tensor(i * sigma(ax), sigma('e')), rho.matrix());
    W[k + 3] = commutator(tensor(sigma('e'), i * sigma(ax)), rho.matrix());
  }
  GramMatrix g;
  for (int a = 0; a < 6; ++a)
    for (int b = a; b < 6; ++b) {
      const double v = 0.5 * (W[a] * W[b]).trace().real();
      g.entries(a, b) = v;
      g.entries(b, a) = v;
    }
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(g.entries);
  const auto& sv = svd.singularValues();
  g.rank = static_cast<int>((sv.array() > kRankCutoff).count());
  return g;
}

}  // namespace wmsim::quantum
