#pragma once

#include <cstdint>
#include <vector>

namespace segsamp {

// Asymptotic 1% critical value of the Kolmogorov distribution.
inline constexpr double kKs01 = 1.6276;

// sup |F_n - F| against Uniform(0,1); sorts a copy.
double ks_uniform_statistic(std::vector<double> x);
bool ks_uniform_passes(const std::vector<double>& x);
double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b);
bool ks_two_sample_passes(const std::vector<double>& a, const std::vector<double>& b);

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  std::int64_t n = 0;
  double se() const;
};

MeanVar mean_var(const std::vector<double>& x);

// Batch-means asymptotic variance of the series average, batch size floor(sqrt(n)).
double batch_means_variance(const std::vector<double>& series);

// Variance of the sample variance, from the fourth central moment.
double variance_se(const std::vector<double>& x);

}  // namespace segsamp
