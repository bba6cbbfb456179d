#include "segsamp/stats.hpp"

#include <algorithm>
#include <cmath>

#include "segsamp/errors.hpp"

namespace segsamp {

double ks_uniform_statistic(std::vector<double> x) {
  if (x.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = std::clamp(x[i], 0.0, 1.0);
    dmax = std::max({dmax, (i + 1) / n - f, f - i / n});
  }
  return dmax;
}

bool ks_uniform_passes(const std::vector<double>& x) {
  return ks_uniform_statistic(x) * std::sqrt(double(x.size())) < kKs01;
}

double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double dmax = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    dmax = std::max(dmax, std::abs(i / na - j / nb));
  }
  return dmax;
}

bool ks_two_sample_passes(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = double(a.size()), nb = double(b.size());
  return ks_two_sample_statistic(a, b) < kKs01 * std::sqrt((na + nb) / (na * nb));
}

double MeanVar::se() const { return n > 0 ? std::sqrt(var / n) : 0.0; }

MeanVar mean_var(const std::vector<double>& x) {
  MeanVar mv;
  mv.n = static_cast<std::int64_t>(x.size());
  if (x.empty()) return mv;
  double s = 0.0;
  for (double v : x) s += v;
  mv.mean = s / mv.n;
  double ss = 0.0;
  for (double v : x) ss += (v - mv.mean) * (v - mv.mean);
  mv.var = mv.n > 1 ? ss / (mv.n - 1) : 0.0;
  return mv;
}

double batch_means_variance(const std::vector<double>& series) {
  const auto n = series.size();
  const auto bs = static_cast<std::size_t>(std::floor(std::sqrt(double(n))));
  if (bs < 1 || n / bs < 2) throw Error(ErrorKind::InvalidArgument, "series too short for batch means");
  const std::size_t a = n / bs;
  std::vector<double> means(a);
  for (std::size_t j = 0; j < a; ++j) {
    double s = 0.0;
    for (std::size_t t = j * bs; t < (j + 1) * bs; ++t) s += series[t];
    means[j] = s / bs;
  }
  return bs * mean_var(means).var;
}

double variance_se(const std::vector<double>& x) {
  const auto mv = mean_var(x);
  double m4 = 0.0;
  for (double v : x) m4 += std::pow(v - mv.mean, 4);
  m4 /= mv.n;
  return std::sqrt(std::max(m4 - mv.var * mv.var, 0.0) / mv.n);
}

}  // namespace segsamp
