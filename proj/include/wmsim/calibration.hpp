#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wmsim/correlation.hpp"
#include "wmsim/readout.hpp"

namespace wmsim::calib {

struct FitResult {
  std::map<std::string, double> parameters;
  std::map<std::string, double> errors;  // standard errors, where available
  double residual = 0;                   // objective at the optimum
  bool converged = false;
  bool boundary = false;  // a bounded parameter ended on its bound
  int iterations = 0;
  std::vector<std::string> names;  // covariance ordering
  std::optional<Eigen::MatrixXd> covariance;

  double at(const std::string& name) const;
};

/// Nonlinear least squares of the n(k) law over (n_a, n_b, phi_0).
FitResult fit_na_nb(const readout::PhotonTrace& trace);

enum class Centering {
  Calibrated,  // n_av = (n_a + n_b) / 2
  SampleMean,  // n_av = mean count of the trace
};

/// 4 (C_n(N) - n_av^2) / (n_a - n_b)^2 for N = 0..max_lag, pooled over runs.
corr::CorrelationSeries reconstruct_Sz_corr(const readout::PhotonTrace& trace, const readout::ReadoutModel& model,
                                            int max_lag, Centering centering = Centering::Calibrated,
                                            double contrast_stderr = 0);

/// Lags whose value lies more than 3 errors outside [-1, 1].
std::vector<int> nonphysical_lags(const corr::CorrelationSeries& c);

struct Weighting {
  bool boxcar = false;
  double fraction = 1.0 / 3;  // of the decay length 4 / alpha^2
};

/// sin^2(a) cos(w N t_f) exp(-(N-1) a^2 / 4)
double sz_model(int N, double alpha, double omega, double t_f);

/// Least squares of sz_model over lags >= 1.
FitResult fit_alpha(const corr::CorrelationSeries& c, double omega, double t_f, Weighting w = {});

/// Divides by sin^2(alpha) and, with undo_decay, by exp(-(N-1) alpha^2 / 4).
corr::CorrelationSeries reconstruct_Ix_corr(const corr::CorrelationSeries& c_sz, double alpha, bool undo_decay,
                                            double omega, double t_f);

/// Fits A cos(phi N) exp(-Gamma (N-1)) to values at lags 1..n.
FitResult fit_damped_cosine(const std::vector<double>& values, double phi);

/// <S_i S_{i+k}>_i of the modulated amplitude over a run of n measurements.
std::vector<double> modulated_autocorr(double alpha, double phi_s, int n, int max_lag);

/// min over (n_a, n_b, alpha) of
/// sum_k ((<n_i n_{i+k}> - n_av^2) - (n_a - n_b)^2 / 4 <S_i S_{i+k}>)^2, k = 1..max_lag.
FitResult fit_modulated(const readout::PhotonTrace& trace, double phi_s, int max_lag,
                        const readout::ReadoutModel& guess);

}  // namespace wmsim::calib
