#include "wmsim/lg.hpp"

#include <algorithm>
#include <cmath>

#include "wmsim/error.hpp"

namespace wmsim::lg {
namespace {

const char* kMod = "lg-test";

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, kMod, msg); }

int atom_index(int xi, int phi, int theta) {
  return (xi < 0 ? 4 : 0) + (phi < 0 ? 2 : 0) + (theta < 0 ? 1 : 0);
}

FiniteMeasure measure_of(const ThreeVariableJoint& j) {
  return FiniteMeasure::from_atoms(std::vector<double>(j.p.begin(), j.p.end()));
}

}  // namespace

bool LgSeries::violated(std::size_t i) const {
  return std::find(violations.begin(), violations.end(), taus[i]) != violations.end();
}

double LgSeries::max_lg() const {
  return lg_values.empty() ? 0.0 : *std::max_element(lg_values.begin(), lg_values.end());
}

LgSeries lg_function(const corr::CorrelationSeries& c) {
  LgSeries out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const int tau = c.lags[i];
    if (tau < 1) continue;
    const int j = c.find(2 * tau);
    if (j < 0) continue;
    const double v = 2 * c.values[i] - c.values[j];
    const double e = c.errors.empty() ? 0.0 : std::sqrt(4 * c.errors[i] * c.errors[i] + c.errors[j] * c.errors[j]);
    out.taus.push_back(tau);
    out.lg_values.push_back(v);
    out.errors.push_back(e);
    if (v - 3 * e > 1) out.violations.push_back(tau);
  }
  return out;
}

void ThreeVariableJoint::validate() const {
  double s = 0;
  for (double v : p) {
    if (!(v >= 0)) bad("negative joint probability");
    s += v;
  }
  if (std::abs(s - 1) > 1e-12) bad("joint probabilities do not sum to 1");
}

double ThreeVariableJoint::prob(int xi, int phi, int theta) const { return p[atom_index(xi, phi, theta)]; }

std::uint64_t event(int xi, int phi, int theta) {
  std::uint64_t m = 0;
  for (int a : {1, -1})
    for (int b : {1, -1})
      for (int c : {1, -1})
        if ((xi == 0 || xi == a) && (phi == 0 || phi == b) && (theta == 0 || theta == c))
          m |= std::uint64_t{1} << atom_index(a, b, c);
  return m;
}

WignerResult wigner_despagnat_check(const ThreeVariableJoint& j) {
  j.validate();
  const FiniteMeasure m = measure_of(j);
  WignerResult r;
  r.lhs = m(event(1, 1, 0)) + m(event(0, -1, 1));
  r.rhs = m(event(1, 0, 1));
  r.holds = r.lhs >= r.rhs - 1e-15;
  return r;
}

FiniteMeasure FiniteMeasure::from_atoms(std::vector<double> atoms) {
  if (atoms.empty() || atoms.size() > 64) bad("measure needs 1..64 atoms");
  double s = 0;
  for (double a : atoms) {
    if (!(a >= 0)) bad("negative atom mass");
    s += a;
  }
  if (std::abs(s - 1) > 1e-12) bad("atom masses do not sum to 1");
  FiniteMeasure m;
  m.atoms_ = std::move(atoms);
  return m;
}

FiniteMeasure FiniteMeasure::from_table(const std::vector<double>& table, int n_atoms) {
  if (n_atoms < 1 || n_atoms > 16 || table.size() != (std::size_t{1} << n_atoms))
    bad("table size must be 2^n_atoms with n_atoms <= 16");
  if (std::abs(table[0]) > 1e-12) bad("measure of the empty set must vanish");
  std::vector<double> atoms(n_atoms);
  for (int i = 0; i < n_atoms; ++i) atoms[i] = table[std::size_t{1} << i];
  for (std::size_t s = 0; s < table.size(); ++s) {
    double sum = 0;
    for (int i = 0; i < n_atoms; ++i)
      if (s >> i & 1) sum += atoms[i];
    if (std::abs(sum - table[s]) > 1e-12) bad("set function is not additive");
  }
  return from_atoms(std::move(atoms));
}

double FiniteMeasure::operator()(std::uint64_t set) const {
  double s = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (set >> i & 1) s += atoms_[i];
  return s;
}

bool strong_additivity_check(const FiniteMeasure& m, std::uint64_t A, std::uint64_t B) {
  return std::abs(m(A) + m(B) - m(A & B) - m(A | B)) <= 1e-12;
}

double wigner_decomposition_defect(const ThreeVariableJoint& j) {
  j.validate();
  const FiniteMeasure m = measure_of(j);
  const std::uint64_t A = event(1, 1, 0), B = event(0, -1, 1), C = event(1, 0, 1);
  return std::abs(m(A) + m(B) - m(C) - m((A | B) & ~C));
}

}  // namespace wmsim::lg
