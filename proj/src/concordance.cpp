#include "segsamp/concordance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segsamp/errors.hpp"
#include "segsamp/polygon.hpp"

namespace segsamp {

const char* vmodel_name(VModel m) { return m == VModel::Common ? "common" : "iid"; }

double kendall_tau_min(int d) {
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "d must be >= 2");
  return -1.0 / (std::ldexp(1.0, d - 1) - 1.0);
}

double spearman_rho_min(int d) {
  switch (d) {
    case 2: return -1.0;
    case 3: return -0.56;
    case 4: return -0.32;
    case 5: return -0.18;
    case 10: return -0.01;
    case 20: return -1.99e-5;
    case 50: return -4.53e-14;
    case 100: return -7.97e-29;
    default:
      throw Error(ErrorKind::UnsupportedDimension, "no tabulated minimum for d = " + std::to_string(d));
  }
}

double tau_scale(int d) { return std::ldexp(1.0, d) / (std::ldexp(1.0, d - 1) - 1.0); }

double rho_scale(int d) {
  const double p = std::ldexp(1.0, d);
  return p * (d + 1) / (p - d - 1);
}

namespace {

void require_nondegenerate(const SegmentSet& s) {
  if (s.edge_count() == 0) throw Error(ErrorKind::EmptyEdgeSet, "segment set has no edges");
  for (int k = 0; k < s.edge_count(); ++k)
    for (int l = 0; l < s.dim(); ++l)
      if (std::abs(s.tail(k, l) - s.head(k, l)) <= kGroupTol)
        throw Error(ErrorKind::DegenerateEdge,
                    "edge " + std::to_string(k + 1) + ", coordinate " + std::to_string(l + 1));
}

// G(t) = integral of the clamped CDF of U[a1,a2] up to t
double integrated_cdf(double t, double a1, double a2) {
  if (t <= a1) return 0.0;
  if (t >= a2) return 0.5 * (a2 - a1) + (t - a2);
  return 0.5 * (t - a1) * (t - a1) / (a2 - a1);
}

// P(A <= B), A ~ U[a1,a2], B ~ U[b1,b2] independent
double interval_le(double a1, double a2, double b1, double b2) {
  return (integrated_cdf(b2, a1, a2) - integrated_cdf(b1, a1, a2)) / (b2 - b1);
}

// Row k of the pair matrix: sum over k' of P(U <= W | K=k, K'=k').
struct PairKernel {
  const SegmentSet& s;
  VModel model;
  std::vector<double> a, b, c;
  std::vector<Pt> poly, scratch;

  PairKernel(const SegmentSet& set, VModel m) : s(set), model(m) {
    a.resize(s.dim());
    b.resize(s.dim());
    c.resize(s.dim());
    poly.reserve(8 + 2 * s.dim());
    scratch.reserve(8 + 2 * s.dim());
  }

  double pair(int k, int kp) {
    const int d = s.dim();
    if (model == VModel::Common) {
      // U_l = p + q V, W_l = p' + q' V'
      for (int l = 0; l < d; ++l) {
        const double p = s.head(k, l), q = s.tail(k, l) - p;
        const double pp = s.head(kp, l), qp = s.tail(kp, l) - pp;
        a[l] = q;
        b[l] = -qp;
        c[l] = p - pp;
      }
      return unit_square_region_area(a.data(), b.data(), c.data(), d, poly, scratch);
    }
    double prod = 1.0;
    for (int l = 0; l < d && prod > 0.0; ++l) {
      const double x1 = s.tail(k, l), x2 = s.head(k, l);
      const double y1 = s.tail(kp, l), y2 = s.head(kp, l);
      prod *= interval_le(std::min(x1, x2), std::max(x1, x2), std::min(y1, y2), std::max(y1, y2));
    }
    return prod;
  }

  double row(int k) {
    double acc = 0.0;
    for (int kp = 0; kp < s.edge_count(); ++kp) acc += pair(k, kp);
    return acc;
  }
};

}  // namespace

double lower_orthant_probability(const SegmentSet& s, VModel m, Exec exec) {
  require_nondegenerate(s);
  const int ne = s.edge_count();
  std::vector<double> rows(ne);
  if (exec == Exec::Parallel) {
#pragma omp parallel
    {
      PairKernel kern(s, m);
#pragma omp for schedule(dynamic, 16)
      for (int k = 0; k < ne; ++k) rows[k] = kern.row(k);
    }
  } else {
    PairKernel kern(s, m);
    for (int k = 0; k < ne; ++k) rows[k] = kern.row(k);
  }
  // pairwise reduction in index order: identical for any thread count
  std::size_t width = 1;
  while (width < rows.size()) {
    for (std::size_t i = 0; i + width < rows.size(); i += 2 * width) rows[i] += rows[i + width];
    width *= 2;
  }
  const double total = rows.empty() ? 0.0 : rows[0];
  return total / (double(ne) * ne);
}

double lower_orthant_probability_serial(const SegmentSet& s, VModel m) {
  require_nondegenerate(s);
  PairKernel kern(s, m);
  double acc = 0.0;
  for (int k = 0; k < s.edge_count(); ++k)
    for (int kp = 0; kp < s.edge_count(); ++kp) acc += kern.pair(k, kp);
  return acc / (double(s.edge_count()) * s.edge_count());
}

double expected_product(const SegmentSet& s, VModel m) {
  require_nondegenerate(s);
  const int d = s.dim();
  if (m == VModel::Iid) return xi_star(s) / std::ldexp(1.0, d);
  // E[prod_l (x_i V + x_j (1-V))] = sum_m c_m B(m+1, d-m+1)
  std::vector<double> beta(d + 1);
  double binom = 1.0;
  for (int j = 0; j <= d; ++j) {
    beta[j] = 1.0 / ((d + 1) * binom);
    binom = binom * (d - j) / (j + 1);
  }
  std::vector<double> coef(d + 1);
  double acc = 0.0;
  for (int k = 0; k < s.edge_count(); ++k) {
    std::fill(coef.begin(), coef.end(), 0.0);
    coef[0] = 1.0;
    for (int l = 0; l < d; ++l) {
      const double xi = s.tail(k, l), xj = s.head(k, l);
      for (int j = l + 1; j >= 1; --j) coef[j] = coef[j] * xj + coef[j - 1] * xi;
      coef[0] *= xj;
    }
    double e = 0.0;
    for (int j = 0; j <= d; ++j) e += coef[j] * beta[j];
    acc += e;
  }
  return acc / s.edge_count();
}

double kendall_tau_exact(const SegmentSet& s, VModel m, Exec exec) {
  const int d = s.dim();
  return tau_scale(d) * (lower_orthant_probability(s, m, exec) - std::ldexp(1.0, -d));
}

double spearman_rho_exact(const SegmentSet& s, VModel m) {
  const int d = s.dim();
  return rho_scale(d) * (expected_product(s, m) - std::ldexp(1.0, -d));
}

double xi_star(const SegmentSet& s) {
  if (s.edge_count() == 0) throw Error(ErrorKind::EmptyEdgeSet, "segment set has no edges");
  double acc = 0.0;
  for (int k = 0; k < s.edge_count(); ++k) {
    double p = 1.0;
    for (int l = 0; l < s.dim(); ++l) p *= s.tail(k, l) + s.head(k, l);
    acc += p;
  }
  return acc / s.edge_count();
}

ConcordanceReport exact_concordance(const std::vector<Block>& blocks, Exec exec) {
  if (blocks.empty()) throw Error(ErrorKind::InvalidArgument, "no blocks");
  ConcordanceReport r;
  double p = 1.0, e = 1.0, xi = 1.0;
  bool all_iid = true, all_common = true;
  for (const auto& bl : blocks) {
    r.d += bl.set.dim();
    p *= lower_orthant_probability(bl.set, bl.vmodel, exec);
    e *= expected_product(bl.set, bl.vmodel);
    xi *= xi_star(bl.set);
    all_iid = all_iid && bl.vmodel == VModel::Iid;
    all_common = all_common && bl.vmodel == VModel::Common;
  }
  r.tau = tau_scale(r.d) * (p - std::ldexp(1.0, -r.d));
  r.rho = rho_scale(r.d) * (e - std::ldexp(1.0, -r.d));
  r.tau_min = kendall_tau_min(r.d);
  try {
    r.rho_min = spearman_rho_min(r.d);
  } catch (const Error&) {
  }
  r.xi_star = xi;
  r.method = all_iid ? "exact-iid" : (all_common ? "exact-polygon" : "exact-mixed");
  return r;
}

nlohmann::json report_to_json(const ConcordanceReport& r) {
  nlohmann::json j{{"d", r.d}, {"tau", r.tau}, {"tau_min", r.tau_min}, {"rho", r.rho},
                   {"method", r.method}, {"draws", r.draws}};
  j["rho_min"] = r.rho_min ? nlohmann::json(*r.rho_min) : nlohmann::json(nullptr);
  j["xi_star"] = r.xi_star ? nlohmann::json(*r.xi_star) : nlohmann::json(nullptr);
  j["tau_se"] = r.tau_se ? nlohmann::json(*r.tau_se) : nlohmann::json(nullptr);
  j["rho_se"] = r.rho_se ? nlohmann::json(*r.rho_se) : nlohmann::json(nullptr);
  return j;
}

namespace {

// e_m(0, 1, ..., d-1)
std::vector<long double> elementary_of_range(int d) {
  std::vector<long double> e(d + 1, 0.0L);
  e[0] = 1.0L;
  for (int v = 0; v < d; ++v)
    for (int m = v + 1; m >= 1; --m) e[m] += e[m - 1] * v;
  return e;
}

long double choose(int n, int k) {
  long double r = 1.0L;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double ilh_rho_from_xi(int d, double xi) {
  const double p = std::ldexp(1.0, d);
  return (1.0 - xi) * (-(d + 1) / (p - (d + 1)));
}

IlhClosedForm ilh_tau_rho(int d, int T) {
  if (d < 2 || T < 1) throw Error(ErrorKind::InvalidArgument, "ilh needs d >= 2, T >= 1");
  if (d > 10 || T > 5)
    throw Error(ErrorKind::SizeLimit, "direct evaluation limited to d <= 10, T <= 5");
  long double fact = 1.0L;
  for (int i = 2; i <= d; ++i) fact *= i;
  IlhClosedForm r;
  r.tau = double((1.0L / std::pow(fact, (long double)T) - 1.0L) /
                 (std::ldexp(1.0L, d - 1) - 1.0L));

  const auto E = elementary_of_range(d);
  const long double dT = std::pow((long double)d, (long double)T);
  // per-level factor of choosing m coordinates for level t
  std::vector<std::vector<long double>> factor(T + 1, std::vector<long double>(d + 1));
  for (int m = 0; m <= d; ++m) factor[0][m] = std::pow(1.0L / dT, (long double)m);
  for (int t = 1; t <= T; ++t) {
    const long double scale = 2.0L / std::pow((long double)d, (long double)(T - t + 1));
    for (int m = 0; m <= d; ++m)
      factor[t][m] = std::pow(scale, (long double)m) * E[m] / choose(d, m);
  }
  // sum over compositions m_0 + ... + m_T = d of multinomial * prod factor
  long double xi = 0.0L;
  std::vector<int> parts(T + 1, 0);
  auto rec = [&](auto&& self, int t, int left, long double mult, long double prod) -> void {
    if (t == T) {
      xi += mult * prod * factor[T][left];
      return;
    }
    for (int m = 0; m <= left; ++m)
      self(self, t + 1, left - m, mult * choose(left, m), prod * factor[t][m]);
  };
  rec(rec, 0, d, 1.0L, 1.0L);
  r.xi_star = double(xi);
  r.rho_iid = ilh_rho_from_xi(d, r.xi_star);
  return r;
}

std::pair<double, double> ilh_xi_star_monte_carlo(int d, int T, std::int64_t samples,
                                                  std::uint64_t seed) {
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 samples");
  Rng rng(seed, 0, Purpose::Permutation);
  std::vector<int> perm;
  std::vector<double> alpha(d);
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    std::fill(alpha.begin(), alpha.end(), 0.0);
    for (int t = 1; t <= T; ++t) {
      rng.permutation(perm, d);
      const double scale = std::pow(double(d), -(T - t + 1));
      for (int l = 0; l < d; ++l) alpha[l] += perm[l] * scale;
    }
    const double w = std::pow(double(d), -T);
    double p = 1.0;
    for (int l = 0; l < d; ++l) p *= 2.0 * alpha[l] + w;
    sum += p;
    sum2 += p * p;
  }
  const double mean = sum / samples;
  const double var = std::max(sum2 / samples - mean * mean, 0.0) * samples / (samples - 1);
  return {mean, std::sqrt(var / samples)};
}

std::pair<double, double> empirical_tau(const DrawBatch& b1, const DrawBatch& b2) {
  if (b1.size() != b2.size() || b1.dim() != b2.dim())
    throw Error(ErrorKind::LengthMismatch, "batches differ in shape");
  const auto n = b1.size();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty batches");
  const int d = b1.dim();
  std::int64_t hits = 0;
  for (std::int64_t r = 0; r < n; ++r) {
    bool le = true;
    for (int l = 0; l < d && le; ++l) le = b1.samples(r, l) <= b2.samples(r, l);
    hits += le;
  }
  const double p = double(hits) / n;
  const double pt = (hits + 2.0) / (n + 4.0);
  const double k = tau_scale(d);
  return {k * (p - std::ldexp(1.0, -d)), k * std::sqrt(pt * (1.0 - pt) / n)};
}

std::pair<double, double> empirical_rho(const DrawBatch& b) {
  const auto n = b.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 draws");
  const int d = b.dim();
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t r = 0; r < n; ++r) {
    double p = 1.0;
    for (int l = 0; l < d; ++l) p *= b.samples(r, l);
    sum += p;
    sum2 += p * p;
  }
  const double mean = sum / n;
  const double var = std::max(sum2 - n * mean * mean, 0.0) / (n - 1);
  const double k = rho_scale(d);
  return {k * (mean - std::ldexp(1.0, -d)), k * std::sqrt(var / n)};
}

ConcordanceReport empirical_concordance(const DrawBatch& b1, const DrawBatch& b2) {
  ConcordanceReport r;
  r.d = b1.dim();
  const auto [tau, tse] = empirical_tau(b1, b2);
  const auto [rho, rse] = empirical_rho(b1);
  r.tau = tau;
  r.tau_se = tse;
  r.rho = rho;
  r.rho_se = rse;
  r.tau_min = kendall_tau_min(r.d);
  try {
    r.rho_min = spearman_rho_min(r.d);
  } catch (const Error&) {
  }
  r.method = "empirical";
  r.draws = b1.size();
  return r;
}

}  // namespace segsamp
