#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pglab {

double mean(const std::vector<double>& xs);
// Sample standard deviation (n-1 denominator).
double sample_std(const std::vector<double>& xs);
// Linear-interpolation quantile on a copy (numpy's default scheme); q in [0, 1].
double quantile(std::vector<double> xs, double q);

// Wilson score interval for a binomial proportion at confidence z.
struct WilsonInterval {
  double lower = 0.0;
  double upper = 1.0;
};
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

// Pr[|x| >= t] for x ~ N(0, sigma^2), via the complementary error function.
double gaussian_two_sided_tail(double t, double sigma);

// Quantile of the standard normal (Acklam's rational approximation,
// |relative error| < 1.2e-9; plenty for grid calibration).
double normal_quantile(double p);

// Least-squares line fit of log(y) against log(x).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean squared residual in log space
};
LogLogFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

// FNV-1a over raw bytes, rendered as 16 hex digits.
std::string fnv1a_hex(const void* data, std::size_t bytes);

}  // namespace pglab
