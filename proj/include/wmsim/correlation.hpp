#pragma once

#include <string>
#include <vector>

namespace wmsim::corr {

struct JointDistribution {
  double p_pp = 0.25, p_pm = 0.25, p_mp = 0.25, p_mm = 0.25;  // (mu, lambda)
  void validate() const;
};

enum class SeriesKind { AnalyticIx, AnalyticSz, Empirical };

const char* to_string(SeriesKind k);
SeriesKind series_kind_from_string(const std::string& s);

struct CorrelationSeries {
  std::vector<int> lags;
  std::vector<double> values;
  std::vector<double> errors;  // standard errors; empty for analytic series
  SeriesKind kind = SeriesKind::Empirical;

  std::size_t size() const { return lags.size(); }
  /// Index of lag n, or -1.
  int find(int lag) const;
};

/// Self-polarized nuclear amplitude sin(a) cos(w N t_f) exp(-(N-1) a^2 / 4).
double x_N(int N, double alpha, double omega, double t_f);

JointDistribution joint_distribution(int N, double alpha, double omega, double t_f);

/// 4 * sum mu lambda p(mu, lambda), mu, lambda = +-1/2.
double corr_from_joint(const JointDistribution& j);
double corr_Ix(int N, double alpha, double omega, double t_f);
/// corr_Ix / sin(alpha): cos(w N t_f) exp(-(N-1) a^2 / 4).
double corr_Ix_normalized(int N, double alpha, double omega, double t_f);
double corr_Sz(int N, double alpha, double omega, double t_f);

CorrelationSeries analytic_series(SeriesKind kind, int max_lag, double alpha, double omega, double t_f);

/// C(N) = 1/(k-N) sum_i s_i s_{i+N} for N = 0..max_lag, raw (non-centered).
CorrelationSeries empirical_corr(const std::vector<double>& series, int max_lag);
/// Same estimator with lag products pooled over independent runs.
CorrelationSeries empirical_corr(const std::vector<std::vector<double>>& runs, int max_lag);

/// sum P_i ln(P_i / Q_i), with 0 ln 0 = 0.
double relative_entropy(const std::vector<double>& P, const std::vector<double>& Q);
/// H(S_z | I_x) for a polarized start.
double entropy_Sz_Ix(int N, double alpha, double omega, double t_f);

}  // namespace wmsim::corr
