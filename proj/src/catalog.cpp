#include "segsamp/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "segsamp/errors.hpp"

namespace segsamp {

namespace {

void require_dim(int d, int lo = 2) {
  if (d < lo) throw Error(ErrorKind::InvalidArgument, "dimension " + std::to_string(d));
}

}  // namespace

SegmentSet antithetic_pair_segment_set() {
  Eigen::MatrixXd x(2, 2);
  x << 1, 0, 0, 1;
  return build_segment_set(x, {{1, 2}});
}

SegmentSet comonotone_segment_set(int d) {
  require_dim(d, 1);
  Eigen::MatrixXd x(d, 2);
  x.col(0).setZero();
  x.col(1).setOnes();
  return build_segment_set(x, {{1, 2}});
}

SegmentSet rotation_segment_set(int d) {
  require_dim(d);
  Eigen::MatrixXd x(d, 2 * d);
  for (int l = 1; l <= d; ++l) {
    for (int m = 1; m <= d; ++m) {
      const bool wrap = m >= d + 2 - l;
      x(l - 1, m - 1) = (l + m - 1 - (wrap ? d : 0)) / double(d);
      x(l - 1, d + m - 1) = (l + m - 2 - (wrap ? d : 0)) / double(d);
    }
  }
  std::vector<Edge> edges;
  for (int m = 1; m <= d; ++m) edges.push_back({m, d + m});
  return build_segment_set(std::move(x), std::move(edges));
}

SegmentSet aj_segment_set(int d, int b, std::int64_t vertex_cap) {
  require_dim(d);
  if (b < 1) throw Error(ErrorKind::InvalidArgument, "base " + std::to_string(b));
  std::int64_t cells = 1;
  for (int i = 0; i < d - 2; ++i) {
    cells *= b;
    if (2 * cells > vertex_cap)
      throw Error(ErrorKind::SizeLimit, "aj(" + std::to_string(d) + "," + std::to_string(b) +
                                            ") exceeds " + std::to_string(vertex_cap) +
                                            " vertices");
  }
  const auto B = static_cast<int>(cells);
  // the map is linear on each cell [m/B,(m+1)/B) of U_1
  Eigen::MatrixXd x(d, 2 * B);
  std::vector<Edge> edges;
  for (int m = 0; m < B; ++m) {
    Eigen::VectorXd y(d), z(d);
    y[0] = double(m) / B;
    z[0] = double(m + 1) / B;
    std::int64_t scale = 1;  // b^{i-2}
    for (int i = 2; i <= d - 1; ++i) {
      // y_i = frac(b^{i-2} m / B + 1/b), kept exact in integer units of 1/B
      const std::int64_t num = (scale * m + B / b) % B;
      y[i - 1] = double(num) / B;
      z[i - 1] = double(num + scale) / B;
      scale *= b;
    }
    y[d - 1] = 1.0;
    z[d - 1] = 0.0;
    x.col(m) = z;
    x.col(B + m) = y;
    edges.push_back({m + 1, B + m + 1});
  }
  return build_segment_set(std::move(x), std::move(edges));
}

std::vector<Edge> circulant_edges(int d, const std::vector<int>& offsets) {
  require_dim(d);
  if (offsets.empty()) throw Error(ErrorKind::InvalidArgument, "offsets must be nonempty");
  std::set<int> L;
  for (int o : offsets) {
    if (o < 1 || o > d / 2)
      throw Error(ErrorKind::InvalidArgument,
                  "offset " + std::to_string(o) + " outside 1.." + std::to_string(d / 2));
    L.insert(o);
  }
  std::vector<Edge> edges;
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j)
      if (L.count(j - i) || L.count(d - (j - i))) edges.push_back({i, j});
  return edges;
}

SegmentSet ccv_segment_set(int d, const std::vector<int>& offsets, const SolverOptions& opt) {
  const auto edges = circulant_edges(d, offsets);
  const auto first = solve_circulant(d, offsets, opt);
  Eigen::MatrixXd x(d, d);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i) x(k, i) = first[(i + k) % d];
  return build_segment_set(std::move(x), edges);
}

SegmentSet lh_segment_set(int d) {
  require_dim(d);
  if (d > 8) throw Error(ErrorKind::SizeLimit, "lh_segment_set needs d <= 8");
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const int f = static_cast<int>(perms.size());
  Eigen::MatrixXd x(d, 2 * f);
  std::vector<Edge> edges;
  for (int k = 0; k < f; ++k) {
    for (int l = 0; l < d; ++l) {
      x(l, k) = (perms[k][l] + 1) / double(d);
      x(l, f + k) = perms[k][l] / double(d);
    }
    edges.push_back({k + 1, f + k + 1});
  }
  return build_segment_set(std::move(x), std::move(edges));
}

std::array<double, 3> gaffke3_sampler(double v) {
  if (v < 0.5) return {v, v + 0.5, 1.0 - 2.0 * v};
  return {v, v - 0.5, 2.0 - 2.0 * v};
}

void gaffke_d_sampler(int d, Rng& rng, double* out) {
  require_dim(d);
  const int pairs = (d % 2 == 0) ? d / 2 : (d - 3) / 2;
  for (int p = 0; p < pairs; ++p) {
    const double v = rng.uniform();
    out[2 * p] = v;
    out[2 * p + 1] = 1.0 - v;
  }
  if (d % 2 == 1) {
    const auto t = gaffke3_sampler(rng.uniform());
    std::copy(t.begin(), t.end(), out + 2 * pairs);
  }
}

void rbs_sampler(int d, Rng& rng, double* out) {
  require_dim(d);
  const double z1 = 2.0 * rng.uniform() - 1.0;
  out[0] = 0.5 * (z1 + 1.0);
  for (int l = 2; l <= d; ++l) {
    const double c = -1.0 + (2.0 * l - 3.0) / (d - 1);
    out[l - 1] = 0.5 * (c - z1 / (d - 1) + 1.0);
  }
  for (int i = d - 1; i > 0; --i)
    std::swap(out[i], out[rng.below(static_cast<std::size_t>(i) + 1)]);
}

void rotation_sampler(int d, Rng& rng, double* out) {
  require_dim(d);
  const double u = rng.uniform();
  for (int l = 0; l < d; ++l) {
    const double v = u + double(l) / d;
    out[l] = v >= 1.0 ? v - 1.0 : v;
  }
}

void aj_sampler(int d, int b, Rng& rng, double* out) {
  require_dim(d);
  if (b < 1) throw Error(ErrorKind::InvalidArgument, "base " + std::to_string(b));
  if (b == 1) {
    // one cell: U_1 = V, middle coordinates V, U_d = 1 - V
    const double v = rng.uniform();
    for (int l = 0; l < d - 1; ++l) out[l] = v;
    out[d - 1] = 1.0 - v;
    return;
  }
  const int extra = static_cast<int>(std::ceil(64.0 / std::log2(double(b))));
  const int len = d - 2 + extra;
  thread_local std::vector<int> c;
  thread_local std::vector<double> tail;
  c.resize(len + 2);
  tail.assign(len + 2, 0.0);
  for (int j = 1; j <= len; ++j) c[j] = static_cast<int>(rng.below(b));
  // tail[i] = 0.c_i c_{i+1} ... in base b
  for (int j = len; j >= 1; --j) tail[j] = (c[j] + tail[j + 1]) / b;
  out[0] = tail[1];
  for (int i = 2; i <= d - 1; ++i) out[i - 1] = ((c[i - 1] + 1) % b + tail[i]) / b;
  out[d - 1] = 1.0 - tail[d - 1];
}

namespace {

template <class M>
void ilh_rows(M& batch, Rng& rng) {
  const auto d = static_cast<int>(batch.cols());
  std::vector<int> perm;
  for (Eigen::Index r = 0; r < batch.rows(); ++r) {
    rng.permutation(perm, d);
    for (int l = 0; l < d; ++l) batch(r, l) = (perm[l] + batch(r, l)) / d;
  }
}

}  // namespace

void ilh_iterate(Eigen::Ref<Eigen::MatrixXd> batch, Rng& rng) { ilh_rows(batch, rng); }

void ilh_iterate(Eigen::Ref<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> batch,
                 Rng& rng) {
  ilh_rows(batch, rng);
}

std::array<double, 3> superstar_step(const std::array<double, 3>& x, const std::array<int, 3>& perm) {
  std::array<double, 3> y;
  for (int l = 0; l < 3; ++l) y[l] = x[l] / 3.0 + 2.0 / 3.0 * (perm[l] - 1);
  return y;
}

std::vector<std::array<double, 3>> superstar_sampler(int T, const std::array<double, 3>& x0, Rng& rng) {
  if (T < 1) throw Error(ErrorKind::InvalidArgument, "T must be >= 1");
  std::vector<std::array<double, 3>> path;
  std::vector<int> perm;
  auto x = x0;
  for (int t = 0; t < T; ++t) {
    rng.permutation(perm, 3);
    x = superstar_step(x, {perm[0], perm[1], perm[2]});
    path.push_back(x);
  }
  return path;
}

}  // namespace segsamp
