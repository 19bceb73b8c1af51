#pragma once

#include <functional>
#include <vector>

namespace wmsim::optim {

struct Result {
  std::vector<double> x;
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes f on [lo, hi]: coarse grid scan, then golden-section in the best cell.
/// Converges when the bracket is below rel_tol * max(|x|, 1e-3).
Result golden_section(const std::function<double(double)>& f, double lo, double hi, double rel_tol = 1e-9,
                      int grid = 200, int max_iter = 500);

/// Nelder-Mead simplex. Converges when the simplex spread in every coordinate is
/// below rel_tol * max(|x_i|, 1e-3).
Result nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                   std::vector<double> step, double rel_tol = 1e-9, int max_iter = 20000);

}  // namespace wmsim::optim
