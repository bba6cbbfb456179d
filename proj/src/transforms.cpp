#include "segsamp/transforms.hpp"

#include <cmath>
#include <string>

#include "segsamp/errors.hpp"

namespace segsamp {

std::vector<double> reflect(const std::vector<double>& u, const std::vector<int>& L) {
  std::vector<double> w = u;
  std::vector<char> hit(u.size(), 0);
  for (int l : L) {
    if (l < 1 || l > static_cast<int>(u.size()))
      throw Error(ErrorKind::BadIndex, "reflection index " + std::to_string(l));
    if (hit[l - 1]) continue;
    hit[l - 1] = 1;
    w[l - 1] = 1.0 - u[l - 1];
  }
  return w;
}

std::vector<double> permute_vector(const std::vector<double>& u, const std::vector<int>& pi) {
  const auto d = static_cast<int>(u.size());
  if (static_cast<int>(pi.size()) != d)
    throw Error(ErrorKind::BadPermutation, "permutation length " + std::to_string(pi.size()));
  std::vector<char> seen(d, 0);
  std::vector<double> w(d);
  for (int l = 0; l < d; ++l) {
    const int p = pi[l];
    if (p < 1 || p > d || seen[p - 1])
      throw Error(ErrorKind::BadPermutation, "not a permutation of 1.." + std::to_string(d));
    seen[p - 1] = 1;
    w[l] = u[p - 1];
  }
  return w;
}

SegmentSet stochastic_compose(const SegmentSet& s1, const SegmentSet& s2) {
  if (s1.dim() != s2.dim())
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(s1.dim()) + " vs " + std::to_string(s2.dim()));
  const int n1 = s1.vertex_count();
  Eigen::MatrixXd x(s1.dim(), n1 + s2.vertex_count());
  x << s1.coords(), s2.coords();
  std::vector<Edge> edges = s1.edges();
  for (const auto& e : s2.edges()) edges.push_back({e.i + n1, e.j + n1});
  return build_segment_set(std::move(x), std::move(edges));
}

SegmentSet deterministic_compose(const SegmentSet& sy, const SegmentSet& sx,
                                 std::int64_t edge_cap) {
  if (sy.dim() != sx.dim())
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(sy.dim()) + " vs " + std::to_string(sx.dim()));
  const std::int64_t ne = std::int64_t(sy.edge_count()) * sx.edge_count();
  const std::int64_t nv = std::int64_t(sy.edge_count()) * sx.vertex_count();
  if (ne > edge_cap || nv > 2 * edge_cap)
    throw Error(ErrorKind::SizeLimit, "composition has " + std::to_string(ne) + " edges");
  const int d = sy.dim(), nx = sx.vertex_count();
  Eigen::MatrixXd z(d, nv);
  std::vector<Edge> edges;
  edges.reserve(ne);
  for (int k = 0; k < sy.edge_count(); ++k) {
    for (int ip = 0; ip < nx; ++ip) {
      const int col = k * nx + ip;
      for (int l = 0; l < d; ++l) {
        const double x = sx.coords()(l, ip);
        z(l, col) = sy.tail(k, l) * x + sy.head(k, l) * (1.0 - x);
      }
    }
    for (const auto& e : sx.edges()) edges.push_back({k * nx + e.i, k * nx + e.j});
  }
  return build_segment_set(std::move(z), std::move(edges));
}

SegmentSet reflection_structure(int d, const std::vector<int>& L) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(d, 2);
  y.col(1).setOnes();
  for (int l : L) {
    if (l < 1 || l > d) throw Error(ErrorKind::BadIndex, "reflection index " + std::to_string(l));
    y(l - 1, 0) = 1.0;
    y(l - 1, 1) = 0.0;
  }
  return build_segment_set(std::move(y), {{1, 2}});
}

CtmCompositionCheck ctm_composition_check(const SegmentSet& sy) {
  constexpr double tol = 1e-10;
  CtmCompositionCheck r;
  if (sy.edge_count() == 0) return r;
  r.c1 = std::abs(sy.tail(0, 0) - sy.head(0, 0));
  r.c1_constant = true;
  double c2 = 0.0;
  for (int l = 0; l < sy.dim(); ++l) c2 += sy.head(0, l);
  r.c2 = c2;
  r.c2_constant = true;
  for (int k = 0; k < sy.edge_count(); ++k) {
    double s = 0.0;
    for (int l = 0; l < sy.dim(); ++l) {
      if (std::abs(std::abs(sy.tail(k, l) - sy.head(k, l)) - r.c1) > tol) r.c1_constant = false;
      s += sy.head(k, l);
    }
    if (std::abs(s - r.c2) > tol) r.c2_constant = false;
  }
  r.preserves = r.c1_constant && r.c2_constant &&
                std::abs((1.0 - r.c1) * sy.dim() / 2.0 - r.c2) < tol;
  return r;
}

}  // namespace segsamp
