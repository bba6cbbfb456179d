#include "segsamp/segments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "segsamp/errors.hpp"

namespace segsamp {

SegmentSet build_segment_set(Eigen::MatrixXd x, std::vector<Edge> edges) {
  const auto n = static_cast<int>(x.cols());
  if (x.rows() < 1 || n < 1)
    throw Error(ErrorKind::InvalidArgument, "empty coordinate matrix");
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double v = x(r, c);
      if (!(v >= -kCoordTol && v <= 1.0 + kCoordTol))
        throw Error(ErrorKind::OutOfRangeCoordinate,
                    "x[" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                        "] = " + std::to_string(v));
    }
  }
  for (const auto& e : edges) {
    if (e.i < 1 || e.j < 1 || e.i > n || e.j > n)
      throw Error(ErrorKind::BadIndex, "edge (" + std::to_string(e.i) + "," +
                                           std::to_string(e.j) + ") outside 1.." +
                                           std::to_string(n));
    if (e.i == e.j)
      throw Error(ErrorKind::SelfLoop, "edge (" + std::to_string(e.i) + "," +
                                           std::to_string(e.j) + ")");
    if (e.i > e.j)
      throw Error(ErrorKind::BadIndex, "edge (" + std::to_string(e.i) + "," +
                                           std::to_string(e.j) + ") needs i < j");
  }
  std::stable_sort(edges.begin(), edges.end());
  SegmentSet s;
  s.x_ = std::move(x);
  s.edges_ = std::move(edges);
  return s;
}

int CoordinateProjection::n(int m, int mp) const {
  if (m > mp) std::swap(m, mp);
  auto it = multiplicity.find({m - 1, mp - 1});
  return it == multiplicity.end() ? 0 : it->second;
}

CoordinateProjection project_coordinate(const SegmentSet& s, int l) {
  if (l < 1 || l > s.dim())
    throw Error(ErrorKind::BadIndex, "coordinate " + std::to_string(l));
  CoordinateProjection p;
  p.coordinate = l;
  p.edge_total = s.edge_count();
  const int n = s.vertex_count();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return s.coords()(l - 1, a) < s.coords()(l - 1, b); });

  p.level.assign(n, -1);
  double prev = 0.0;
  for (int idx = 0; idx < n; ++idx) {
    const int k = order[idx];
    const double v = s.coords()(l - 1, k);
    if (idx == 0 || v - prev > kGroupTol) {
      p.values.push_back(v);
      p.positions.emplace_back();
    }
    prev = v;
    p.level[k] = static_cast<int>(p.values.size()) - 1;
    p.positions.back().push_back(k + 1);
  }
  for (auto& m : p.positions) std::sort(m.begin(), m.end());

  for (int k = 0; k < s.edge_count(); ++k) {
    int a = p.level[s.edges()[k].i - 1];
    int b = p.level[s.edges()[k].j - 1];
    if (a == b) {
      p.self_loops.push_back(k + 1);
      continue;
    }
    if (a > b) std::swap(a, b);
    p.edges.push_back({a, b});
    ++p.multiplicity[{a, b}];
  }
  return p;
}

double UniformityReport::max_residual() const {
  double m = 0.0;
  for (const auto& row : residuals)
    for (double f : row) m = std::max(m, std::abs(f));
  return m;
}

double UniformityReport::max_sum_residual() const {
  double m = 0.0;
  for (double r : sum_residuals) m = std::max(m, std::abs(r));
  return m;
}

bool UniformityReport::uniform(double tol) const {
  return admissibility.empty() && range_violations.empty() && max_residual() <= tol;
}

UniformityReport uniformity_residuals(const SegmentSet& s) {
  UniformityReport rep;
  const int d = s.dim();
  const double inv_e = s.edge_count() > 0 ? 1.0 / s.edge_count() : 0.0;
  for (int l = 1; l <= d; ++l) {
    const auto p = project_coordinate(s, l);
    for (int k : p.self_loops) rep.admissibility.push_back({k, l});
    const auto row = s.coords().row(l - 1);
    if (std::abs(row.minCoeff()) > kCoordTol || std::abs(row.maxCoeff() - 1.0) > kCoordTol)
      rep.range_violations.push_back(l);

    // density on cell [a_t, a_{t+1}) accumulated by a difference array
    const int nl = p.level_count();
    std::vector<double> acc(std::max(nl, 1), 0.0);
    for (const auto& e : p.edges) {
      const double w = 1.0 / (p.values[e.hi] - p.values[e.lo]);
      acc[e.lo] += w;
      acc[e.hi] -= w;
    }
    std::vector<double> f;
    double run = 0.0;
    for (int t = 0; t + 2 < nl; ++t) {
      run += acc[t];
      f.push_back(run * inv_e - 1.0);
    }
    rep.residuals.push_back(std::move(f));
  }
  for (int k = 0; k < s.vertex_count(); ++k)
    rep.sum_residuals.push_back(s.coords().col(k).sum() - 0.5 * d);
  return rep;
}

std::pair<double, double> conditional_support(const SegmentSet& s, int k, int l) {
  if (k < 1 || k > s.edge_count() || l < 1 || l > s.dim())
    throw Error(ErrorKind::BadIndex,
                "edge " + std::to_string(k) + ", coordinate " + std::to_string(l));
  const double a = s.tail(k - 1, l - 1);
  const double b = s.head(k - 1, l - 1);
  if (std::abs(a - b) <= kGroupTol)
    throw Error(ErrorKind::DegenerateEdge,
                "edge " + std::to_string(k) + ", coordinate " + std::to_string(l));
  return {std::min(a, b), std::max(a, b)};
}

SegmentSet canonicalize(const SegmentSet& s) {
  const int n = s.vertex_count();
  const auto& x = s.coords();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      if (x(r, a) < x(r, b)) return true;
      if (x(r, a) > x(r, b)) return false;
    }
    return false;
  });
  std::vector<int> new_index(n);
  Eigen::MatrixXd y(x.rows(), n);
  for (int pos = 0; pos < n; ++pos) {
    new_index[order[pos]] = pos + 1;
    y.col(pos) = x.col(order[pos]);
  }
  std::vector<Edge> edges;
  edges.reserve(s.edges().size());
  for (const auto& e : s.edges()) {
    int a = new_index[e.i - 1];
    int b = new_index[e.j - 1];
    if (a > b) std::swap(a, b);
    edges.push_back({a, b});
  }
  return build_segment_set(std::move(y), std::move(edges));
}

}  // namespace segsamp
