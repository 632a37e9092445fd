#pragma once

#include <functional>
#include <span>
#include <vector>

namespace frameflow {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// Q((sqrt(ne) + 0.12 + 0.11/sqrt(ne)) D), ne = nm/(n+m).
/// Both samples need at least 50 values (`min_size`).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, std::size_t min_size = 50);

/// One-sample test against a continuous CDF.
KsResult ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf, std::size_t min_size = 50);

double standard_normal_cdf(double x);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanEstimate mean_and_stderr(std::span<const double> values);

/// Least squares y ~ slope * x through the origin; r_squared is measured
/// against the mean of y.
struct OriginFit {
  double slope = 0.0;
  double r_squared = 0.0;
};
OriginFit fit_through_origin(std::span<const double> x, std::span<const double> y);

}  // namespace frameflow
