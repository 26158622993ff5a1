#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace reactsim {

class StatisticsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw StatisticsError("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Unbiased (n - 1) sample variance.
inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw StatisticsError("variance needs at least two samples");
  const double m = sample_mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

struct TTestResult {
  double t{0.0};
  double df{0.0};
  double p{1.0};
};

/// Two-tailed Student's t-test with pooled variance. Zero pooled variance
/// gives p = 1 for equal means and p = 0 (t = +/-inf) otherwise.
inline TTestResult two_sample_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw StatisticsError("t-test needs at least two samples per group");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = sample_mean(a);
  const double mb = sample_mean(b);
  const double pooled = ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0);
  TTestResult r;
  r.df = na + nb - 2.0;
  if (pooled <= 0.0) {
    if (ma == mb) return {0.0, r.df, 1.0};
    r.t = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  boost::math::students_t dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  return r;
}

/// Two-sided 97.5% quantile of Student's t with `df` degrees of freedom.
inline double t_critical_975(double df) {
  boost::math::students_t dist(df);
  return boost::math::quantile(dist, 0.975);
}

struct ConfidenceInterval {
  double mean{0.0};
  double half_width{0.0};
};

/// mean +/- t_{0.975, n-1} * s / sqrt(n)
inline ConfidenceInterval confidence_interval_95(std::span<const double> xs) {
  if (xs.size() < 2) throw StatisticsError("confidence interval needs at least two samples");
  const double n = static_cast<double>(xs.size());
  const double s = std::sqrt(sample_variance(xs));
  return {sample_mean(xs), t_critical_975(n - 1.0) * s / std::sqrt(n)};
}

}  // namespace reactsim
