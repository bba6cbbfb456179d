#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "segsamp/construction.hpp"
#include "segsamp/parallel.hpp"

namespace segsamp {

double wang_sloan(const double* x, int p, double a, double tau);

struct Integrand {
  std::string name;
  int p = 1;
  std::function<double(const double*)> f;
  double mean = 0.0;
  double variance = 0.0;                     // Var f(U), U iid uniform
  std::optional<double> residual_variance;   // integral of r^2 in the ANOVA split
};

// ids: wang-sloan, product2, additive
Integrand make_integrand(const std::string& id, int p = 2, double a = 1.0, double tau = 1.0);

struct Scheme {
  enum class Type { McIid, Glh, External };
  Type type = Type::McIid;
  std::string name;
  Construction base;  // glh: antithetic vector of dimension n_points (d is overridden)
  std::string path;   // external: CSV of points, one per row
};

Scheme mc_iid_scheme();
Scheme glh_scheme(const Construction& base);
Scheme external_scheme(const std::string& path);

struct IntegrationConfig {
  Integrand integrand;
  std::vector<int> points{100};
  int replications = 1000;
  std::vector<Scheme> schemes;
  std::uint64_t seed = 0;
  Exec exec = Exec::Parallel;
};

struct IntegrationRow {
  std::string scheme;
  int n_points = 0;
  double mse = 0.0;
  double mean_time = 0.0;  // seconds per estimate
};

std::vector<IntegrationRow> mc_integrate(const IntegrationConfig& cfg);

struct CltRow {
  int d = 0;
  double variance = 0.0;
  double variance_se = 0.0;
  double analytic = 0.0;
  double iid_variance = 0.0;
};

std::vector<CltRow> clt_check(const Integrand& f, const std::vector<int>& d_list, int reps,
                              const Construction& base, std::uint64_t seed,
                              Exec exec = Exec::Parallel);

struct TimingRow {
  std::string construction;
  int d = 0;
  double mean_time = 0.0;  // seconds per batch of n draws
};

std::vector<TimingRow> sampling_time_study(const std::vector<Construction>& constructions,
                                           const std::vector<int>& d_list, std::int64_t n,
                                           int reps, std::uint64_t seed);

}  // namespace segsamp
