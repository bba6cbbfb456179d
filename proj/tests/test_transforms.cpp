#include "doctest.h"

#include <cmath>
#include <numeric>
#include <set>

#include "segsamp/catalog.hpp"
#include "segsamp/errors.hpp"
#include "segsamp/sampling.hpp"
#include "segsamp/rng.hpp"
#include "segsamp/transforms.hpp"

using namespace segsamp;

namespace {

double total(const std::vector<double>& u) { return std::accumulate(u.begin(), u.end(), 0.0); }

// endpoints of every segment, unordered, rounded to 1e-12 for comparison
std::multiset<std::vector<long long>> segment_keys(const SegmentSet& s) {
  std::multiset<std::vector<long long>> keys;
  for (int k = 0; k < s.edge_count(); ++k) {
    std::vector<long long> a, b;
    for (int l = 0; l < s.dim(); ++l) {
      a.push_back(std::llround(s.tail(k, l) * 1e12));
      b.push_back(std::llround(s.head(k, l) * 1e12));
    }
    if (b < a) std::swap(a, b);
    a.insert(a.end(), b.begin(), b.end());
    keys.insert(a);
  }
  return keys;
}

bool on_some_segment(const SegmentSet& s, const double* u) {
  for (int k = 0; k < s.edge_count(); ++k) {
    // solve for v on the coordinate with the widest span, then verify all
    int best = 0;
    for (int l = 1; l < s.dim(); ++l)
      if (std::abs(s.tail(k, l) - s.head(k, l)) > std::abs(s.tail(k, best) - s.head(k, best))) best = l;
    const double v = (u[best] - s.head(k, best)) / (s.tail(k, best) - s.head(k, best));
    if (v < -1e-12 || v > 1 + 1e-12) continue;
    bool ok = true;
    for (int l = 0; l < s.dim() && ok; ++l) ok = std::abs(s.tail(k, l) * v + (1 - v) * s.head(k, l) - u[l]) < 1e-9;
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("reflect") {
  // 1 - (1 - u) is exact when 1 - u is representable: dyadic grids and u >= 1/2
  const std::vector<double> u{0.125, 0.25, 0.7, 0.875};
  CHECK(reflect(reflect(u, {1, 2, 3, 4}), {1, 2, 3, 4}) == u);
  Rng rng(6);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> w{rng.uniform(), rng.uniform()};
    const auto back = reflect(reflect(w, {1, 2}), {1, 2});
    worst = std::max({worst, std::abs(back[0] - w[0]), std::abs(back[1] - w[1])});
  }
  CHECK(worst <= 0x1.0p-53);
  const auto r = reflect(u, {2});
  CHECK(r[1] == 0.75);
  CHECK(r[0] == u[0]);
  const auto batch = draw(ccv_segment_set(3, {1}), 200, 1);
  bool all_ok = true, single_breaks = false;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> v(batch.samples.row(i).data(), batch.samples.row(i).data() + 3);
    all_ok = all_ok && std::abs(total(reflect(v, {1, 2, 3})) - 1.5) < 1e-12;
    single_breaks = single_breaks || std::abs(total(reflect(v, {1})) - 1.5) > 1e-3;
  }
  CHECK(all_ok);
  CHECK(single_breaks);
}

TEST_CASE("permute_vector") {
  const std::vector<double> u{0.0, 0.5, 1.0};
  CHECK(permute_vector(u, {1, 2, 3}) == u);
  CHECK(permute_vector(u, {3, 2, 1}) == std::vector<double>{1.0, 0.5, 0.0});
  const std::vector<double> c{0.2, 0.9, 0.4};
  CHECK(total(permute_vector(c, {2, 3, 1})) == total(c));
  CHECK_THROWS_AS(permute_vector(u, {1, 1, 2}), Error);
  CHECK_THROWS_AS(permute_vector(u, {1, 2}), Error);
  CHECK_THROWS_AS(permute_vector(u, {0, 1, 2}), Error);
}

TEST_CASE("stochastic compose") {
  const auto pp = stochastic_compose(antithetic_pair_segment_set(), antithetic_pair_segment_set());
  CHECK(pp.vertex_count() == 4);
  CHECK(pp.edge_count() == 2);
  const auto b = draw(pp, 1000, 3);
  CHECK((b.samples.col(0) + b.samples.col(1) - Eigen::VectorXd::Ones(1000)).cwiseAbs().maxCoeff() == 0.0);

  const auto c3 = ccv_segment_set(3, {1});
  const auto aj = aj_segment_set(3, 2);
  const auto mix = stochastic_compose(c3, aj);
  const auto rep = uniformity_residuals(mix);
  CHECK(rep.uniform());
  CHECK(rep.constant_sum());
  CHECK_THROWS_AS(stochastic_compose(c3, antithetic_pair_segment_set()), Error);
}

TEST_CASE("stochastic compose: branch frequencies follow edge counts") {
  const auto c3 = ccv_segment_set(3, {1});
  const auto aj = aj_segment_set(3, 2);
  const auto mix = stochastic_compose(c3, aj);
  const int n = 20000;
  const auto b = draw(mix, n, 5);
  // the two sets share one segment, so: C3-only 2/5, AJ-only 1/5, shared 1/5 + 1/5
  int only1 = 0, only2 = 0;
  for (int i = 0; i < n; ++i) {
    const double* u = b.samples.row(i).data();
    const bool in1 = on_some_segment(c3, u), in2 = on_some_segment(aj, u);
    REQUIRE((in1 || in2));
    only1 += in1 && !in2;
    only2 += in2 && !in1;
  }
  for (auto [hits, p] : {std::pair{only1, 0.4}, std::pair{only2, 0.2}, std::pair{n - only1 - only2, 0.4}}) {
    const double phat = double(hits) / n;
    CHECK(std::abs(phat - p) < 3 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("deterministic compose: diagonal leaves the segments unchanged") {
  for (const auto& s : {ccv_segment_set(4, {1, 2}), aj_segment_set(3, 3), rotation_segment_set(3)}) {
    const auto z = deterministic_compose(s, comonotone_segment_set(s.dim()));
    CHECK(segment_keys(z) == segment_keys(s));
  }
}

TEST_CASE("deterministic compose: LH twice in two dimensions") {
  const auto z = deterministic_compose(lh_segment_set(2), lh_segment_set(2));
  REQUIRE(z.edge_count() == 4);
  std::set<double> corners0, corners1;
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(std::abs(z.tail(k, 0) - z.head(k, 0)) - 0.25) < 1e-15);
    CHECK(std::abs(std::abs(z.tail(k, 1) - z.head(k, 1)) - 0.25) < 1e-15);
    corners0.insert(std::min(z.tail(k, 0), z.head(k, 0)));
    corners1.insert(std::min(z.tail(k, 1), z.head(k, 1)));
  }
  CHECK(corners0 == std::set<double>{0, 0.25, 0.5, 0.75});
  CHECK(corners1 == std::set<double>{0, 0.25, 0.5, 0.75});
  CHECK(uniformity_residuals(z).uniform());
}

TEST_CASE("deterministic compose: LH over a CTM set stays CTM") {
  const auto z = deterministic_compose(lh_segment_set(3), ccv_segment_set(3, {1}));
  const auto rep = uniformity_residuals(z);
  CHECK(rep.uniform());
  CHECK(rep.max_sum_residual() < 1e-12);
  CHECK(z.vertex_count() == 6 * 3);
  CHECK(z.edge_count() == 6 * 3);
  CHECK_THROWS_AS(deterministic_compose(lh_segment_set(3), antithetic_pair_segment_set()), Error);
  CHECK_THROWS_AS(deterministic_compose(aj_segment_set(8, 2), aj_segment_set(8, 2), 1000), Error);
}

TEST_CASE("ctm composition check") {
  const auto lh = ctm_composition_check(lh_segment_set(3));
  CHECK(lh.c1_constant);
  CHECK(lh.c2_constant);
  CHECK(lh.c1 == doctest::Approx(1.0 / 3.0));
  CHECK(lh.c2 == doctest::Approx(1.0));
  CHECK(lh.preserves);
  const auto full = ctm_composition_check(reflection_structure(3, {1, 2, 3}));
  CHECK(full.c1 == 1.0);
  CHECK(full.c2 == 0.0);
  CHECK(full.preserves);
  const auto part = ctm_composition_check(reflection_structure(3, {1}));
  CHECK(part.c1 == 1.0);
  CHECK(part.c2 == 2.0);
  CHECK_FALSE(part.preserves);
}

TEST_CASE("ctm composition check predicts the composed vertex sums") {
  const auto x = ccv_segment_set(3, {1});
  for (const auto& y : {lh_segment_set(3), rotation_segment_set(3), reflection_structure(3, {1, 2, 3}),
                        reflection_structure(3, {1}), reflection_structure(3, {2, 3}), aj_segment_set(3, 2)}) {
    const auto chk = ctm_composition_check(y);
    const auto z = deterministic_compose(y, x);
    if (chk.preserves) CHECK(uniformity_residuals(z).max_sum_residual() < 1e-12);
    if (chk.c1_constant && chk.c2_constant && !chk.preserves)
      CHECK(uniformity_residuals(z).max_sum_residual() > 1e-3);
  }
}
