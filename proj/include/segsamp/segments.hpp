#pragma once

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

namespace segsamp {

inline constexpr double kCoordTol = 1e-12;
inline constexpr double kGroupTol = 1e-12;

// Vertex indices are 1-based, with i < j.
struct Edge {
  int i;
  int j;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Support {graph, X} of a segment sampler. Column k of X is vertex k+1.
class SegmentSet {
 public:
  SegmentSet() = default;

  int dim() const { return static_cast<int>(x_.rows()); }
  int vertex_count() const { return static_cast<int>(x_.cols()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Eigen::MatrixXd& coords() const { return x_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // l and vertex are 1-based
  double x(int l, int vertex) const { return x_(l - 1, vertex - 1); }
  // 0-based edge and coordinate, used by the hot loops
  double tail(int k, int l0) const { return x_(l0, edges_[k].i - 1); }
  double head(int k, int l0) const { return x_(l0, edges_[k].j - 1); }

 private:
  friend SegmentSet build_segment_set(Eigen::MatrixXd x, std::vector<Edge> edges);
  Eigen::MatrixXd x_;
  std::vector<Edge> edges_;
};

SegmentSet build_segment_set(Eigen::MatrixXd x, std::vector<Edge> edges);

struct ProjectedEdge {
  int lo;  // 0-based level index of the smaller projected value
  int hi;
};

struct CoordinateProjection {
  int coordinate = 0;                       // 1-based
  int edge_total = 0;                       // |E| of the underlying set
  std::vector<double> values;               // a_l, strictly increasing
  std::vector<std::vector<int>> positions;  // M_{l,m}, 1-based vertices
  std::vector<int> level;                   // level index of each vertex (0-based)
  std::vector<ProjectedEdge> edges;         // non-self-loop projected edges, one per edge
  std::map<std::pair<int, int>, int> multiplicity;  // keyed (lo, hi), 0-based levels
  std::vector<int> self_loops;              // 1-based edge indices

  int level_count() const { return static_cast<int>(values.size()); }
  // n^l_{(m,m')} for 1-based levels, symmetric
  int n(int m, int mp) const;
};

CoordinateProjection project_coordinate(const SegmentSet& s, int l);

struct AdmissibilityViolation {
  int edge;        // 1-based
  int coordinate;  // 1-based
};

struct UniformityReport {
  std::vector<AdmissibilityViolation> admissibility;
  std::vector<int> range_violations;  // 1-based coordinates
  // residuals[l-1][m-2] = F_{l,m}, m = 2..n_l-1
  std::vector<std::vector<double>> residuals;
  std::vector<double> sum_residuals;  // per vertex: sum_l x_{l,k} - d/2

  double max_residual() const;
  double max_sum_residual() const;
  bool admissible() const { return admissibility.empty(); }
  bool uniform(double tol = 1e-8) const;
  bool constant_sum(double tol = 1e-10) const { return max_sum_residual() <= tol; }
};

UniformityReport uniformity_residuals(const SegmentSet& s);

// (alpha, beta) for 1-based edge k and coordinate l.
std::pair<double, double> conditional_support(const SegmentSet& s, int k, int l);

// Stable column sort by (row 1, row 2, ...), edges relabelled and re-oriented.
SegmentSet canonicalize(const SegmentSet& s);

}  // namespace segsamp
