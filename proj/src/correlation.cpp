#include "wmsim/correlation.hpp"

#include <cmath>

#include "wmsim/error.hpp"

namespace wmsim::corr {
namespace {

const char* kMod = "correlation";

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, kMod, msg); }

void require_lag(int N) {
  if (N < 1) bad("lag must be >= 1");
}

double envelope(int N, double alpha) { return std::exp(-(N - 1) * alpha * alpha / 4); }

}  // namespace

void JointDistribution::validate() const {
  for (double p : {p_pp, p_pm, p_mp, p_mm})
    if (!(p >= 0 && p <= 1)) bad("joint probability outside [0, 1]");
  if (std::abs(p_pp + p_pm + p_mp + p_mm - 1) > 1e-12) bad("joint probabilities do not sum to 1");
}

const char* to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::AnalyticIx: return "analytic-Ix";
    case SeriesKind::AnalyticSz: return "analytic-Sz";
    case SeriesKind::Empirical: return "empirical";
  }
  return "empirical";
}

SeriesKind series_kind_from_string(const std::string& s) {
  if (s == "analytic-Ix") return SeriesKind::AnalyticIx;
  if (s == "analytic-Sz") return SeriesKind::AnalyticSz;
  if (s == "empirical") return SeriesKind::Empirical;
  bad("unknown series kind '" + s + "'");
}

int CorrelationSeries::find(int lag) const {
  for (std::size_t i = 0; i < lags.size(); ++i)
    if (lags[i] == lag) return static_cast<int>(i);
  return -1;
}

double x_N(int N, double alpha, double omega, double t_f) {
  return std::sin(alpha) * std::cos(omega * N * t_f) * envelope(N, alpha);
}

JointDistribution joint_distribution(int N, double alpha, double omega, double t_f) {
  require_lag(N);
  const double x = x_N(N, alpha, omega, t_f);
  JointDistribution j{0.25 * (1 + x), 0.25 * (1 - x), 0.25 * (1 - x), 0.25 * (1 + x)};
  j.validate();
  return j;
}

double corr_from_joint(const JointDistribution& j) {
  double s = 0;
  s += 0.5 * 0.5 * j.p_pp;
  s += 0.5 * -0.5 * j.p_pm;
  s += -0.5 * 0.5 * j.p_mp;
  s += -0.5 * -0.5 * j.p_mm;
  return 4 * s;
}

double corr_Ix(int N, double alpha, double omega, double t_f) {
  return corr_from_joint(joint_distribution(N, alpha, omega, t_f));
}

double corr_Ix_normalized(int N, double alpha, double omega, double t_f) {
  require_lag(N);
  return std::cos(omega * N * t_f) * envelope(N, alpha);
}

double corr_Sz(int N, double alpha, double omega, double t_f) {
  require_lag(N);
  return std::sin(alpha) * x_N(N, alpha, omega, t_f);
}

CorrelationSeries analytic_series(SeriesKind kind, int max_lag, double alpha, double omega, double t_f) {
  if (kind == SeriesKind::Empirical) bad("analytic series needs an analytic kind");
  CorrelationSeries s;
  s.kind = kind;
  for (int n = 1; n <= max_lag; ++n) {
    s.lags.push_back(n);
    s.values.push_back(kind == SeriesKind::AnalyticSz ? corr_Sz(n, alpha, omega, t_f)
                                                      : corr_Ix_normalized(n, alpha, omega, t_f));
  }
  return s;
}

CorrelationSeries empirical_corr(const std::vector<std::vector<double>>& runs, int max_lag) {
  if (max_lag < 0) bad("max_lag must be >= 0");
  for (const auto& r : runs)
    if (r.size() < 2 * static_cast<std::size_t>(max_lag) + 1)
      bad("series shorter than 2 * max_lag");
  CorrelationSeries out;
  out.kind = SeriesKind::Empirical;
  for (int n = 0; n <= max_lag; ++n) {
    double sum = 0, sum2 = 0;
    std::size_t cnt = 0;
    for (const auto& r : runs) {
      const std::size_t m = r.size() - n;
      for (std::size_t i = 0; i < m; ++i) {
        const double p = r[i] * r[i + n];
        sum += p;
        sum2 += p * p;
      }
      cnt += m;
    }
    const double mean = sum / cnt;
    const double var = cnt > 1 ? std::max(0.0, (sum2 - cnt * mean * mean) / (cnt - 1)) : 0.0;
    out.lags.push_back(n);
    out.values.push_back(mean);
    out.errors.push_back(std::sqrt(var / cnt));
  }
  return out;
}

CorrelationSeries empirical_corr(const std::vector<double>& series, int max_lag) {
  return empirical_corr(std::vector<std::vector<double>>{series}, max_lag);
}

double relative_entropy(const std::vector<double>& P, const std::vector<double>& Q) {
  if (P.size() != Q.size() || P.empty()) bad("distributions differ in length");
  double sp = 0, sq = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (!(P[i] >= 0) || !(Q[i] >= 0)) bad("negative probability");
    sp += P[i];
    sq += Q[i];
  }
  if (std::abs(sp - 1) > 1e-9 || std::abs(sq - 1) > 1e-9) bad("distribution does not sum to 1");
  double h = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i] == 0) continue;
    if (Q[i] == 0) bad("support of P not contained in support of Q");
    h += P[i] * std::log(P[i] / Q[i]);
  }
  return h;
}

double entropy_Sz_Ix(int N, double alpha, double omega, double t_f) {
  require_lag(N);
  const double xs = std::cos(omega * N * t_f) * envelope(N, alpha) * std::sin(alpha);
  const double c = std::cos(omega * t_f);
  return relative_entropy({0.5 * (1 + xs), 0.5 * (1 - xs)}, {0.5 * (1 + c), 0.5 * (1 - c)});
}

}  // namespace wmsim::corr
