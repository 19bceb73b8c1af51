#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wmsim/correlation.hpp"

namespace wmsim::lg {

struct LgSeries {
  std::vector<int> taus;
  std::vector<double> lg_values;
  std::vector<double> errors;
  std::vector<int> violations;  // taus with lg - 3 err > 1

  bool violated(std::size_t i) const;
  double max_lg() const;
};

/// LG(tau) = 2 C(tau) - C(2 tau) for every tau >= 1 whose 2 tau lag is present.
LgSeries lg_function(const corr::CorrelationSeries& c);

/// Probabilities indexed by (xi, phi, theta) in {+1,-1}^3; index bit 2 is xi = -1,
/// bit 1 is phi = -1, bit 0 is theta = -1.
struct ThreeVariableJoint {
  std::array<double, 8> p{};
  void validate() const;
  double prob(int xi, int phi, int theta) const;
};

struct WignerResult {
  double lhs = 0, rhs = 0;
  bool holds = true;
};

/// P(xi=1, phi=1) + P(phi=-1, theta=1) >= P(xi=1, theta=1)
WignerResult wigner_despagnat_check(const ThreeVariableJoint& j);

/// Measure on the Boolean algebra of subsets of at most 64 atoms; sets are bitmasks.
class FiniteMeasure {
 public:
  static FiniteMeasure from_atoms(std::vector<double> atoms);
  /// Full set-function table of size 2^n (n <= 16); rejects non-additive tables.
  static FiniteMeasure from_table(const std::vector<double>& table, int n_atoms);

  double operator()(std::uint64_t set) const;
  int atoms() const { return static_cast<int>(atoms_.size()); }

 private:
  std::vector<double> atoms_;
};

/// P(A) + P(B) = P(A and B) + P(A or B) to 1e-12.
bool strong_additivity_check(const FiniteMeasure& m, std::uint64_t A, std::uint64_t B);

/// Atom bitmask of the 8-atom space for (xi, phi, theta) constraints; 0 leaves a variable free.
std::uint64_t event(int xi, int phi, int theta);

/// The decomposition behind the inequality, with A = {xi=1, phi=1},
/// B = {phi=-1, theta=1}, C = {xi=1, theta=1} contained in A or B:
/// P(A) + P(B) = P(C) + P((A or B) minus C). Returns the absolute defect.
double wigner_decomposition_defect(const ThreeVariableJoint& j);

}  // namespace wmsim::lg
