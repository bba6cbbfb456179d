#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "segsamp/parallel.hpp"
#include "segsamp/sampling.hpp"
#include "segsamp/segments.hpp"

namespace segsamp {

enum class VModel { Common, Iid };

const char* vmodel_name(VModel m);

double kendall_tau_min(int d);
double spearman_rho_min(int d);

// normalising constants shared by the exact and empirical estimators
double tau_scale(int d);  // 2^d / (2^{d-1} - 1)
double rho_scale(int d);  // 2^d (d+1) / (2^d - d - 1)

// P(U <= W) for two independent draws of the sampler on s.
double lower_orthant_probability(const SegmentSet& s, VModel m, Exec exec = Exec::Parallel);
// Plain double loop, kept as the reference for the blocked kernel.
double lower_orthant_probability_serial(const SegmentSet& s, VModel m);
double expected_product(const SegmentSet& s, VModel m);

double kendall_tau_exact(const SegmentSet& s, VModel m, Exec exec = Exec::Parallel);
double spearman_rho_exact(const SegmentSet& s, VModel m);
double xi_star(const SegmentSet& s);

// Independent blocks concatenated coordinate-wise (e.g. pairs plus a triple).
struct Block {
  SegmentSet set;
  VModel vmodel = VModel::Common;
};

struct ConcordanceReport {
  double tau = 0.0;
  double tau_min = 0.0;
  double rho = 0.0;
  std::optional<double> rho_min;
  std::optional<double> xi_star;
  std::string method;
  std::optional<double> tau_se;
  std::optional<double> rho_se;
  std::int64_t draws = 0;
  int d = 0;
};

ConcordanceReport exact_concordance(const std::vector<Block>& blocks, Exec exec = Exec::Parallel);
nlohmann::json report_to_json(const ConcordanceReport& r);

struct IlhClosedForm {
  double tau;
  double xi_star;
  double rho_iid;
};

IlhClosedForm ilh_tau_rho(int d, int T);
// Permutation-sampling estimate of xi*_T with its standard error.
std::pair<double, double> ilh_xi_star_monte_carlo(int d, int T, std::int64_t samples,
                                                  std::uint64_t seed);
double ilh_rho_from_xi(int d, double xi);

std::pair<double, double> empirical_tau(const DrawBatch& b1, const DrawBatch& b2);
std::pair<double, double> empirical_rho(const DrawBatch& b);
ConcordanceReport empirical_concordance(const DrawBatch& b1, const DrawBatch& b2);

}  // namespace segsamp
