#include "wmsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "wmsim/error.hpp"
#include "wmsim/optim.hpp"

namespace wmsim::calib {
namespace {

const char* kMod = "calibration";

[[noreturn]] void fail(ErrorKind k, const std::string& msg) { throw Error(k, kMod, msg); }

constexpr double kDeg = std::numbers::pi / 180;

double wrap_pi(double a) {
  a = std::fmod(a, 2 * std::numbers::pi);
  if (a > std::numbers::pi) a -= 2 * std::numbers::pi;
  if (a <= -std::numbers::pi) a += 2 * std::numbers::pi;
  return a;
}

// Covariance s^2 (J^T J)^-1 with s^2 = rss / (n - p); empty when J^T J is singular.
std::optional<Eigen::MatrixXd> ls_covariance(const Eigen::MatrixXd& J, double rss) {
  const Eigen::Index n = J.rows(), p = J.cols();
  if (n <= p) return std::nullopt;
  const Eigen::MatrixXd JtJ = J.transpose() * J;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(JtJ);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0 || sv(p - 1) < 1e-12 * sv(0)) return std::nullopt;
  return Eigen::MatrixXd(JtJ.inverse() * (rss / (n - p)));
}

}  // namespace

double FitResult::at(const std::string& name) const {
  const auto it = parameters.find(name);
  if (it == parameters.end()) fail(ErrorKind::InvalidArgument, "no fit parameter '" + name + "'");
  return it->second;
}

FitResult fit_na_nb(const readout::PhotonTrace& trace) {
  if (trace.angles_deg.size() != trace.counts.size() || trace.counts.empty())
    fail(ErrorKind::InvalidArgument, "trace carries no angle series");
  const std::set<double> distinct(trace.angles_deg.begin(), trace.angles_deg.end());
  if (distinct.size() < 3) fail(ErrorKind::InvalidArgument, "need at least three modulation angles");

  const std::size_t n = trace.counts.size();
  // n(k) = c - d cos(phi + 2 phi_0) is linear in (c, -d cos 2phi_0, d sin 2phi_0)
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ph = trace.angles_deg[i] * kDeg;
    X(i, 0) = 1;
    X(i, 1) = std::cos(ph);
    X(i, 2) = std::sin(ph);
    y(i) = static_cast<double>(trace.counts[i]);
  }
  const Eigen::Vector3d lin = X.colPivHouseholderQr().solve(y);
  const double d = std::hypot(lin(1), lin(2));
  const double phi0 = 0.5 * std::atan2(lin(2), -lin(1));
  const double n_av = lin(0) - d;
  std::vector<double> x0{n_av + 2 * d, n_av - 2 * d, phi0};

  auto model = [&](const std::vector<double>& p, std::size_t i) {
    return readout::modulation_mean(trace.angles_deg[i], p[0], p[1], p[2]);
  };
  auto rss = [&](const std::vector<double>& p) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y(i) - model(p, i);
      s += r * r;
    }
    return s;
  };
  const double scale = std::max({std::abs(x0[0]), std::abs(x0[1]), 1.0});
  const auto opt = optim::nelder_mead(rss, x0, {1e-3 * scale, 1e-3 * scale, 1e-3});
  if (!opt.converged) fail(ErrorKind::FitFailure, "n_a/n_b fit did not converge");

  std::vector<double> p = opt.x;
  p[2] = wrap_pi(2 * p[2]) / 2;

  Eigen::MatrixXd J(n, 3);
  for (int k = 0; k < 3; ++k) {
    const double h = k == 2 ? 1e-6 : 1e-6 * std::max(std::abs(p[k]), 1.0);
    auto up = p, dn = p;
    up[k] += h;
    dn[k] -= h;
    for (std::size_t i = 0; i < n; ++i) J(i, k) = (model(up, i) - model(dn, i)) / (2 * h);
  }
  const auto cov = ls_covariance(J, opt.value);
  const double contrast = p[0] - p[1];
  if (!cov || !(contrast > 1e-9 * std::max(std::abs(p[1]), 1.0)))
    fail(ErrorKind::DegenerateContrast, "bright and dark rates are indistinguishable");
  const double se_contrast = std::sqrt(std::max(0.0, (*cov)(0, 0) + (*cov)(1, 1) - 2 * (*cov)(0, 1)));
  if (contrast < 3 * se_contrast) fail(ErrorKind::DegenerateContrast, "contrast below 3 standard errors");

  FitResult r;
  r.names = {"n_a", "n_b", "phi_0"};
  for (int k = 0; k < 3; ++k) {
    r.parameters[r.names[k]] = p[k];
    r.errors[r.names[k]] = std::sqrt(std::max(0.0, (*cov)(k, k)));
  }
  r.residual = opt.value;
  r.converged = true;
  r.iterations = opt.iterations;
  r.covariance = cov;
  return r;
}

corr::CorrelationSeries reconstruct_Sz_corr(const readout::PhotonTrace& trace, const readout::ReadoutModel& model,
                                            int max_lag, Centering centering, double contrast_stderr) {
  const double dn = model.n_a - model.n_b;
  if (!(std::abs(dn) > 0)) fail(ErrorKind::DegenerateContrast, "n_a = n_b");
  auto runs = trace.runs();
  corr::CorrelationSeries out;
  if (centering == Centering::Calibrated) {
    const double n_av = 0.5 * (model.n_a + model.n_b);
    out = corr::empirical_corr(runs, max_lag);
    for (double& v : out.values) v -= n_av * n_av;
  } else {
    // products of deviations from the trace mean
    double s = 0;
    std::size_t cnt = 0;
    for (const auto& r : runs)
      for (double v : r) {
        s += v;
        ++cnt;
      }
    const double m = s / cnt;
    for (auto& r : runs)
      for (double& v : r) v -= m;
    out = corr::empirical_corr(runs, max_lag);
  }
  const double k = 4 / (dn * dn);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] *= k;
    const double rel = 2 * contrast_stderr / dn;
    out.errors[i] = std::hypot(out.errors[i] * k, out.values[i] * rel);
  }
  return out;
}

std::vector<int> nonphysical_lags(const corr::CorrelationSeries& c) {
  std::vector<int> out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double e = c.errors.empty() ? 0.0 : c.errors[i];
    if (std::abs(c.values[i]) > 1 + 3 * e) out.push_back(c.lags[i]);
  }
  return out;
}

double sz_model(int N, double alpha, double omega, double t_f) {
  const double s = std::sin(alpha);
  return s * s * std::cos(omega * N * t_f) * std::exp(-(N - 1) * alpha * alpha / 4);
}

FitResult fit_alpha(const corr::CorrelationSeries& c, double omega, double t_f, Weighting w) {
  std::vector<int> lags;
  std::vector<double> vals, errs;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.lags[i] >= 1) {
      lags.push_back(c.lags[i]);
      vals.push_back(c.values[i]);
      errs.push_back(c.errors.empty() ? 0.0 : c.errors[i]);
    }
  if (lags.size() < 2) fail(ErrorKind::InvalidArgument, "need at least two lags >= 1");
  const double step = std::abs(wrap_pi(omega * t_f));
  const int last = *std::max_element(lags.begin(), lags.end());
  if (!w.boxcar && last * step < 4 * std::numbers::pi)
    fail(ErrorKind::InvalidArgument, "lags cover fewer than two oscillation periods");

  auto fit_window = [&](double window) {
    auto obj = [&](double a) {
      double s = 0;
      for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] - 1 > window) continue;
        const double r = vals[i] - sz_model(lags[i], a, omega, t_f);
        s += r * r;
      }
      return s;
    };
    return optim::golden_section(obj, 0.0, std::numbers::pi / 2);
  };

  double window = 1e300;
  auto opt = fit_window(window);
  if (w.boxcar) {
    for (int it = 0; it < 50; ++it) {
      const double a = std::max(opt.x[0], 1e-6);
      const double next = std::max(w.fraction * 4 / (a * a), 1.0);
      if (next == window) break;
      window = next;
      opt = fit_window(window);
    }
    if (window * step < 2 * std::numbers::pi)
      fail(ErrorKind::InvalidArgument, "boxcar window covers less than one oscillation period");
  }
  if (!opt.converged) fail(ErrorKind::FitFailure, "alpha fit did not converge");

  const double a = opt.x[0];
  double sjj = 0, sjjs = 0;
  int used = 0;
  bool have_errs = false;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (lags[i] - 1 > window) continue;
    const double h = 1e-6;
    const double lo = std::max(a - h, 0.0), hi = std::min(a + h, std::numbers::pi / 2);
    const double j = (sz_model(lags[i], hi, omega, t_f) - sz_model(lags[i], lo, omega, t_f)) / (hi - lo);
    sjj += j * j;
    sjjs += j * j * errs[i] * errs[i];
    have_errs = have_errs || errs[i] > 0;
    ++used;
  }
  double se = 0;
  if (sjj > 0) {
    if (have_errs)
      se = std::sqrt(sjjs) / sjj;
    else if (used > 1)
      se = std::sqrt(opt.value / (used - 1) / sjj);
  }

  FitResult r;
  r.names = {"alpha"};
  r.parameters["alpha"] = a;
  r.errors["alpha"] = se;
  if (w.boxcar) r.parameters["window"] = window;
  r.residual = opt.value;
  r.converged = true;
  r.iterations = opt.iterations;
  r.boundary = a < 1e-6 || a > std::numbers::pi / 2 - 1e-6;
  r.covariance = Eigen::MatrixXd::Constant(1, 1, se * se);
  return r;
}

corr::CorrelationSeries reconstruct_Ix_corr(const corr::CorrelationSeries& c_sz, double alpha, bool undo_decay,
                                            double omega, double t_f) {
  (void)omega;
  (void)t_f;
  const double s2 = std::sin(alpha) * std::sin(alpha);
  if (s2 < 1e-6) fail(ErrorKind::Amplification, "sin^2(alpha) < 1e-6 amplifies noise without bound");
  corr::CorrelationSeries out = c_sz;
  if (c_sz.kind == corr::SeriesKind::AnalyticSz) out.kind = corr::SeriesKind::AnalyticIx;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double f = 1 / s2;
    if (undo_decay) f *= std::exp((out.lags[i] - 1) * alpha * alpha / 4);
    out.values[i] *= f;
    if (!out.errors.empty()) out.errors[i] *= f;
  }
  return out;
}

FitResult fit_damped_cosine(const std::vector<double>& values, double phi) {
  const std::size_t n = values.size();
  if (n < 3) fail(ErrorKind::InvalidArgument, "need at least three values");
  auto shape = [&](std::size_t i, double g) { return std::cos(phi * (i + 1)) * std::exp(-g * i); };
  auto amp = [&](double g) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = shape(i, g);
      num += values[i] * f;
      den += f * f;
    }
    return den > 0 ? num / den : 0.0;
  };
  auto rss = [&](double g) {
    const double A = amp(g);
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = values[i] - A * shape(i, g);
      s += r * r;
    }
    return s;
  };
  const auto opt = optim::golden_section(rss, 0.0, 2.0);
  if (!opt.converged) fail(ErrorKind::FitFailure, "damped-cosine fit did not converge");
  const double g = opt.x[0], A = amp(g);

  Eigen::MatrixXd J(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    J(i, 0) = shape(i, g);
    J(i, 1) = -A * static_cast<double>(i) * shape(i, g);
  }
  FitResult r;
  r.names = {"amplitude", "gamma"};
  r.parameters["amplitude"] = A;
  r.parameters["gamma"] = g;
  r.residual = opt.value;
  r.converged = true;
  r.iterations = opt.iterations;
  r.boundary = g <= 1e-9 || g >= 2 - 1e-9;
  r.covariance = ls_covariance(J, opt.value);
  if (r.covariance) {
    r.errors["amplitude"] = std::sqrt((*r.covariance)(0, 0));
    r.errors["gamma"] = std::sqrt((*r.covariance)(1, 1));
  }
  return r;
}

std::vector<double> modulated_autocorr(double alpha, double phi_s, int n, int max_lag) {
  if (n <= max_lag) fail(ErrorKind::InvalidArgument, "run shorter than max_lag");
  std::vector<double> S(n);
  for (int k = 0; k < n; ++k) S[k] = readout::modulated_amplitude(k, alpha, phi_s);
  std::vector<double> out(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    double s = 0;
    for (int i = 0; i + k < n; ++i) s += S[i] * S[i + k];
    out[k] = s / (n - k);
  }
  return out;
}

FitResult fit_modulated(const readout::PhotonTrace& trace, double phi_s, int max_lag,
                        const readout::ReadoutModel& guess) {
  const auto runs = trace.runs();
  const std::size_t len = runs.front().size();
  for (const auto& r : runs)
    if (r.size() != len) fail(ErrorKind::InvalidArgument, "modulated fit needs equal-length runs");
  const auto cn = corr::empirical_corr(runs, max_lag);

  auto obj = [&](const std::vector<double>& p) {
    const double a = std::clamp(p[2], 0.0, std::numbers::pi / 2);
    const double penalty = std::abs(p[2] - a);
    const auto ss = modulated_autocorr(a, phi_s, static_cast<int>(len), max_lag);
    const double n_av = 0.5 * (p[0] + p[1]), q = 0.25 * (p[0] - p[1]) * (p[0] - p[1]);
    double s = 0;
    for (int k = 1; k <= max_lag; ++k) {
      const double r = (cn.values[k] - n_av * n_av) - q * ss[k];
      s += r * r;
    }
    return s * (1 + penalty);
  };
  const double sc = std::max(guess.n_a, 1.0);
  const auto opt = optim::nelder_mead(obj, {guess.n_a, guess.n_b, 0.3}, {0.01 * sc, 0.01 * sc, 0.05});
  if (!opt.converged) fail(ErrorKind::FitFailure, "modulated fit did not converge");
  FitResult r;
  r.names = {"n_a", "n_b", "alpha"};
  r.parameters["n_a"] = opt.x[0];
  r.parameters["n_b"] = opt.x[1];
  r.parameters["alpha"] = std::clamp(opt.x[2], 0.0, std::numbers::pi / 2);
  r.residual = opt.value;
  r.converged = true;
  r.iterations = opt.iterations;
  r.boundary = opt.x[2] <= 0 || opt.x[2] >= std::numbers::pi / 2;
  return r;
}

}  // namespace wmsim::calib
