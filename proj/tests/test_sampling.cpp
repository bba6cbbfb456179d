#include "doctest.h"

#include <cmath>
#include <numeric>

#include "segsamp/catalog.hpp"
#include "segsamp/errors.hpp"
#include "segsamp/sampling.hpp"
#include "segsamp/stats.hpp"

using namespace segsamp;

namespace {

std::vector<double> column(const DrawBatch& b, int l) {
  std::vector<double> v(b.size());
  for (std::int64_t i = 0; i < b.size(); ++i) v[i] = b.samples(i, l);
  return v;
}

std::vector<double> sums(const DrawBatch& b) {
  std::vector<double> v(b.size());
  for (std::int64_t i = 0; i < b.size(); ++i) v[i] = b.samples.row(i).sum();
  return v;
}

}  // namespace

TEST_CASE("draw: antithetic pair") {
  const auto b = draw(antithetic_pair_segment_set(), 10000, 1);
  for (std::int64_t i = 0; i < b.size(); ++i) CHECK(b.samples(i, 1) == 1.0 - b.samples(i, 0));
  CHECK(b.seed == 1);
}

TEST_CASE("draw: ccv sums and marginals") {
  const auto b = draw(ccv_segment_set(5, {1}), 100000, 2);
  double worst = 0.0;
  for (double s : sums(b)) worst = std::max(worst, std::abs(s - 2.5));
  CHECK(worst < 1e-12);
  for (int l = 0; l < 5; ++l) CHECK(ks_uniform_passes(column(b, l)));
  CHECK(b.samples.minCoeff() >= 0.0);
  CHECK(b.samples.maxCoeff() <= 1.0);
}

TEST_CASE("draw: marginals of a non-ctm set") {
  const auto b = draw(aj_segment_set(4, 3), 100000, 3);
  for (int l = 0; l < 4; ++l) CHECK(ks_uniform_passes(column(b, l)));
}

TEST_CASE("draw: guards") {
  Eigen::MatrixXd x(2, 4);
  x << 0, 0.5, 1, 0, 0.5, 0, 0.5, 0;
  const auto bad = build_segment_set(x, {{1, 2}, {2, 3}, {3, 4}});
  CHECK_THROWS_AS(draw(bad, 10, 1), Error);
  CHECK(draw(bad, 10, 1, 0, true).size() == 10);
  const auto empty = build_segment_set(x, {});
  try {
    draw(empty, 10, 1, 0, true);
    FAIL("expected EmptyEdgeSet");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyEdgeSet);
  }
  CHECK(draw(antithetic_pair_segment_set(), 0, 1).size() == 0);
}

TEST_CASE("draw: reproducible and schedule independent") {
  const auto s = ccv_segment_set(4, {1, 2});
  const auto a = draw(s, 30000, 9, 2, false, Exec::Parallel);
  const auto b = draw(s, 30000, 9, 2, false, Exec::Parallel);
  const auto c = draw(s, 30000, 9, 2, false, Exec::Serial);
  const auto e = draw(s, 30000, 9, 3);
  CHECK(a.samples == b.samples);
  CHECK(a.samples == c.samples);
  CHECK(a.samples != e.samples);
  // prefix property: chunked streams make draw i independent of n
  const auto shorter = draw(s, 5000, 9, 2);
  CHECK(shorter.samples == a.samples.topRows(5000));
}

TEST_CASE("draw_generalized: LH halves") {
  const auto b = draw_generalized(lh_segment_set(2), iid_source(2), 20000, 4);
  for (std::int64_t i = 0; i < b.size(); ++i) CHECK((b.samples(i, 0) < 0.5) != (b.samples(i, 1) < 0.5));
  CHECK(ks_uniform_passes(column(b, 0)));
  CHECK(ks_uniform_passes(column(b, 1)));
}

TEST_CASE("draw_generalized: comonotone source reduces to draw") {
  const auto s = aj_segment_set(3, 2);
  const auto a = draw(s, 50000, 5);
  const auto g = draw_generalized(s, comonotone_source(3), 50000, 6);
  for (int l = 0; l < 3; ++l) CHECK(ks_two_sample_passes(column(a, l), column(g, l)));
  CHECK(ks_two_sample_passes(sums(a), sums(g)));
  // the product picks up the joint structure too
  std::vector<double> pa(a.size()), pg(g.size());
  for (std::int64_t i = 0; i < a.size(); ++i) {
    pa[i] = a.samples.row(i).prod();
    pg[i] = g.samples.row(i).prod();
  }
  CHECK(ks_two_sample_passes(pa, pg));
}

TEST_CASE("draw_generalized: CTM source through the LH structure") {
  const auto src = [](Rng& rng, double* out) { aj_sampler(4, 2, rng, out); };
  const auto b = draw_generalized(lh_segment_set(4), src, 50000, 7);
  double worst = 0.0;
  for (double s : sums(b)) worst = std::max(worst, std::abs(s - 2.0));
  CHECK(worst < 1e-12);
  for (int l = 0; l < 4; ++l) CHECK(ks_uniform_passes(column(b, l)));
}

TEST_CASE("glh sample") {
  const auto one = glh_sample(1, 8, iid_source(8), 3, "iid", true);
  REQUIRE(one.u.rows() == 1);
  REQUIRE(one.permutations.size() == 1);
  std::vector<double> row(8);
  for (int l = 0; l < 8; ++l) row[l] = one.u(0, l);
  std::sort(row.begin(), row.end());
  for (int m = 0; m < 8; ++m) {
    CHECK(row[m] >= m / 8.0);
    CHECK(row[m] < (m + 1) / 8.0);
  }
  const auto ccv = ccv_segment_set(6, {1});
  const VectorSource base = [&](Rng& rng, double* out) { draw_one(ccv, rng, out); };
  std::vector<std::vector<double>> entries(6);
  for (int r = 0; r < 2000; ++r) {
    const auto g = glh_sample(10, 6, base, 100 + r, "ccv");
    for (int i = 0; i < 10; ++i) {
      std::vector<double> sorted(6);
      for (int l = 0; l < 6; ++l) sorted[l] = g.u(i, l);
      for (int l = 0; l < 6; ++l) entries[l].push_back(g.u(i, l));
      std::sort(sorted.begin(), sorted.end());
      for (int m = 0; m < 6; ++m) CHECK((sorted[m] >= m / 6.0 && sorted[m] <= (m + 1) / 6.0));
    }
  }
  for (const auto& e : entries) CHECK(ks_uniform_passes(e));
  CHECK_THROWS_AS(glh_sample(0, 4, iid_source(4), 1), Error);
}

TEST_CASE("conditional cdf") {
  const auto pair = antithetic_pair_segment_set();
  CHECK(conditional_cdf(pair, 1, {0.5, 0.5}) == 0.0);
  CHECK(conditional_cdf(pair, 1, {1.0, 1.0}) == 1.0);
  CHECK(conditional_cdf(pair, 1, {0.7, 0.6}) == doctest::Approx(0.3));

  // Monte Carlo oracle along edge (1,2) of C3
  const auto c3 = ccv_segment_set(3, {1});
  const std::vector<double> u{0.4, 0.9, 1.0};
  Rng rng(12);
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.uniform();
    bool in = true;
    for (int l = 0; l < 3; ++l) in = in && c3.tail(0, l) * v + (1 - v) * c3.head(0, l) <= u[l];
    hits += in;
  }
  const double p = double(hits) / n, se = std::sqrt(std::max(p * (1 - p), 1e-12) / n);
  CHECK(std::abs(conditional_cdf(c3, 1, u) - p) <= 3 * se);
}

TEST_CASE("joint cdf") {
  const auto aj = aj_segment_set(3, 2);
  CHECK(joint_cdf(aj, {1, 1, 1}) == 1.0);
  for (double t : {0.1, 0.35, 0.8}) {
    CHECK(joint_cdf(aj, {1, t, 1}) == doctest::Approx(t).epsilon(1e-12));
    CHECK(joint_cdf(ccv_segment_set(5, {1, 2}), {t, 1, 1, 1, 1}) == doctest::Approx(t).epsilon(1e-9));
  }
  const std::vector<double> u{0.3, 0.6, 0.8};
  const auto b = draw(aj, 1000000, 13);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < b.size(); ++i)
    hits += b.samples(i, 0) <= u[0] && b.samples(i, 1) <= u[1] && b.samples(i, 2) <= u[2];
  const double p = double(hits) / b.size();
  CHECK(std::abs(joint_cdf(aj, u) - p) <= 3 * std::sqrt(p * (1 - p) / b.size()));
}

TEST_CASE("joint cdf is a cdf on the grid") {
  for (const auto& s : {ccv_segment_set(3, {1}), aj_segment_set(4, 2), rotation_segment_set(3)}) {
    const int d = s.dim();
    int total = 1;
    for (int l = 0; l < d; ++l) total *= 11;
    std::vector<double> f(total);
    std::vector<double> u(d);
    for (int idx = 0; idx < total; ++idx) {
      int r = idx;
      for (int l = 0; l < d; ++l) {
        u[l] = (r % 11) / 10.0;
        r /= 11;
      }
      f[idx] = joint_cdf(s, u);
    }
    bool mono = true;
    int stride = 1;
    for (int l = 0; l < d; ++l, stride *= 11)
      for (int idx = 0; idx < total; ++idx)
        if ((idx / stride) % 11 < 10) mono = mono && f[idx + stride] >= f[idx] - 1e-14;
    CHECK(mono);
    CHECK(f[0] == 0.0);
    CHECK(f[total - 1] == doctest::Approx(1.0));
  }
}

TEST_CASE("csv output") {
  const auto b = draw(antithetic_pair_segment_set(), 2, 1);
  std::ostringstream os;
  write_csv(b, os, "note");
  const std::string text = os.str();
  CHECK(text.rfind("# note\nu1,u2\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
