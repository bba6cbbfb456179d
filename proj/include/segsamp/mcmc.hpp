#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "segsamp/construction.hpp"
#include "segsamp/parallel.hpp"

namespace segsamp {

struct McmcConfig {
  std::string model = "probit";  // probit | pumps
  std::string data_path;         // empty: synthetic probit data
  int d = 2;                     // coupled chains
  int iterations = 5000;
  int burn_in = 500;
  int replications = 200;
  bool antithetic_acceptance = false;  // pumps only
  std::uint64_t seed = 0;
  Construction coupling = make_construction(Kind::Rbs, 2);
  double proposal_sd = 0.5;  // random-walk step for pumps alpha
  Exec exec = Exec::Parallel;
};

struct ParameterSummary {
  std::string name;
  double ratio_mean = 0.0;  // mean over replications of var_anti / var_iid
  double ratio_se = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double pooled_ratio = 0.0;  // mean var_anti / mean var_iid
  // each coupled chain's posterior mean, averaged over replications
  std::vector<double> chain_mean;
  std::vector<double> chain_mean_se;
  double iid_mean = 0.0;
  double iid_mean_se = 0.0;
};

struct VarianceRatioResult {
  std::string model;
  int d = 0;
  int replications = 0;
  bool antithetic_acceptance = false;
  std::vector<ParameterSummary> params;
};

struct ProbitData {
  Eigen::MatrixXd X;  // n x 3, intercept first
  Eigen::VectorXd y;
};

ProbitData read_probit_csv(const std::string& path);
ProbitData synthetic_probit(int n, const Eigen::Vector3d& beta, std::uint64_t seed);
extern const Eigen::Vector3d kSyntheticBeta;

struct PumpData {
  std::vector<double> s;
  std::vector<double> t;
};

PumpData read_pumps_csv(const std::string& path);

VarianceRatioResult probit_gibbs(const McmcConfig& cfg, const ProbitData& data);
VarianceRatioResult pumps_mwg(const McmcConfig& cfg, const PumpData& data);

}  // namespace segsamp
