#pragma once

#include <Eigen/Dense>
#include <vector>

#include "segsamp/parallel.hpp"
#include "segsamp/segments.hpp"

namespace segsamp {

struct PsiValueGrad {
  double value = 0.0;
  Eigen::VectorXd gradient;  // d Psi_l / d a_{l,m}, m = 2..n_l-1
};

// Psi_l at the given interior values; endpoints come from the projection.
PsiValueGrad psi_value_grad(const CoordinateProjection& p, const Eigen::VectorXd& a_interior);

struct SolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 500;
  Exec exec = Exec::Parallel;
};

// Grouping pattern of a template set. Interior levels of every coordinate are
// the unknowns; endpoints are pinned to 0 and 1.
struct UniformityProblem {
  SegmentSet pattern;
  std::vector<CoordinateProjection> projections;
  bool constant_sum = false;  // add one row per vertex: sum_l x_{l,k} = d/2
};

UniformityProblem make_uniformity_problem(const SegmentSet& pattern, bool constant_sum);

struct SolveResult {
  SegmentSet solution;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  UniformityReport report;
};

SolveResult solve_standard_uniform(const UniformityProblem& problem, const SolverOptions& opt = {});
SolveResult solve_strict_ctm(const UniformityProblem& problem, const SolverOptions& opt = {});

// First row x_1 of the circulant coordinate matrix, sorted ascending.
std::vector<double> solve_circulant(int d, const std::vector<int>& offsets,
                                    const SolverOptions& opt = {});

double kl_divergence(const SegmentSet& s, int l);

}  // namespace segsamp
