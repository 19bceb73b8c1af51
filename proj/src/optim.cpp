#include "wmsim/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wmsim::optim {

Result golden_section(const std::function<double(double)>& f, double lo, double hi, double rel_tol, int grid,
                      int max_iter) {
  int best = 0;
  double best_v = f(lo);
  for (int i = 1; i <= grid; ++i) {
    const double v = f(lo + (hi - lo) * i / grid);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / grid;
  double b = lo + (hi - lo) * std::min(best + 1, grid) / grid;

  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  Result r;
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    const double mid = 0.5 * (a + b);
    if (b - a <= rel_tol * std::max(std::abs(mid), 1e-3)) {
      r.converged = true;
      break;
    }
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  // endpoints of the original interval can beat the interior bracket
  if (best_v < fx) {
    r.x = {lo + (hi - lo) * best / grid};
    r.value = best_v;
  } else {
    r.x = {x};
    r.value = fx;
  }
  return r;
}

namespace {

Result simplex(const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& x0,
               const std::vector<double>& step, double rel_tol, int max_iter) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> p(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) p[i + 1][i] += step[i];
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = f(p[i]);

  Result r;
  std::vector<std::size_t> idx(n + 1);
  auto point = [&](const std::vector<double>& cen, const std::vector<double>& w, double t) {
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = cen[j] + t * (w[j] - cen[j]);
    return out;
  };

  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    const std::size_t lo = idx[0], hi = idx[n], nh = idx[n - 1];

    bool small = true;
    for (std::size_t j = 0; j < n && small; ++j) {
      double mn = p[0][j], mx = p[0][j];
      for (std::size_t i = 1; i <= n; ++i) {
        mn = std::min(mn, p[i][j]);
        mx = std::max(mx, p[i][j]);
      }
      small = mx - mn <= rel_tol * std::max(std::abs(p[lo][j]), 1e-3);
    }
    if (small) {
      r.converged = true;
      break;
    }

    std::vector<double> cen(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != hi)
        for (std::size_t j = 0; j < n; ++j) cen[j] += p[i][j] / n;

    const auto xr = point(cen, p[hi], -1.0);
    const double fr = f(xr);
    if (fr < v[lo]) {
      const auto xe = point(cen, p[hi], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        p[hi] = xe;
        v[hi] = fe;
      } else {
        p[hi] = xr;
        v[hi] = fr;
      }
    } else if (fr < v[nh]) {
      p[hi] = xr;
      v[hi] = fr;
    } else {
      const bool outside = fr < v[hi];
      const auto xc = point(cen, outside ? xr : p[hi], 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : v[hi])) {
        p[hi] = xc;
        v[hi] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == lo) continue;
          p[i] = point(p[lo], p[i], 0.5);
          v[i] = f(p[i]);
        }
      }
    }
  }
  const std::size_t best = std::min_element(v.begin(), v.end()) - v.begin();
  r.x = p[best];
  r.value = v[best];
  return r;
}

}  // namespace

Result nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                   std::vector<double> step, double rel_tol, int max_iter) {
  Result r = simplex(f, x0, step, rel_tol, max_iter);
  // restart once from the optimum; a collapsed simplex can stall off the minimum
  Result again = simplex(f, r.x, step, rel_tol, max_iter);
  again.iterations += r.iterations;
  again.converged = again.converged && r.converged;
  return again.value <= r.value ? again : r;
}

}  // namespace wmsim::optim
