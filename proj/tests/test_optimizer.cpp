#include "doctest.h"

#include <cmath>
#include <random>

#include "segsamp/catalog.hpp"
#include "segsamp/errors.hpp"
#include "segsamp/optimizer.hpp"

using namespace segsamp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Independent oracle: -(1/|E|) sum over edges of log |gap|, reading levels directly.
double psi_direct(const CoordinateProjection& p, const std::vector<double>& levels) {
  double s = 0.0;
  for (const auto& e : p.edges) s -= std::log(std::abs(levels[e.hi] - levels[e.lo]));
  return s / p.edge_total;
}

std::vector<double> with_ends(const CoordinateProjection& p, const VectorXd& inner) {
  std::vector<double> a{p.values.front()};
  for (int i = 0; i < inner.size(); ++i) a.push_back(inner[i]);
  a.push_back(p.values.back());
  return a;
}

SegmentSet circulant_pattern(int d, const std::vector<int>& offsets, const std::vector<double>& first) {
  MatrixXd x(d, d);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i) x(k, i) = first[(i + k) % d];
  return build_segment_set(x, circulant_edges(d, offsets));
}

SegmentSet random_pattern(std::mt19937_64& gen, int d, int n, int edges) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MatrixXd x(d, n);
  for (int l = 0; l < d; ++l) {
    for (int k = 0; k < n; ++k) x(l, k) = u(gen);
    x(l, 0) = 0.0;
    x(l, 1) = 1.0;
  }
  std::vector<Edge> es;
  if (edges <= 0) {  // complete graph plus -edges random duplicates
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) es.push_back({i, j});
    edges = static_cast<int>(es.size()) - edges;
  }
  std::uniform_int_distribution<int> pick(1, n);
  while (static_cast<int>(es.size()) < edges) {
    int i = pick(gen), j = pick(gen);
    if (i == j) continue;
    es.push_back({std::min(i, j), std::max(i, j)});
  }
  return build_segment_set(x, es);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("psi: C3 stationary at the midpoint") {
  const auto p = project_coordinate(ccv_segment_set(3, {1}), 1);
  VectorXd a(1);
  a << 0.5;
  const auto r = psi_value_grad(p, a);
  CHECK(std::abs(r.gradient[0]) < 1e-15);
  CHECK(r.value == doctest::Approx(psi_direct(p, {0.0, 0.5, 1.0})).epsilon(1e-15));
}

TEST_CASE("psi: single edge") {
  const auto p = project_coordinate(antithetic_pair_segment_set(), 1);
  const auto r = psi_value_grad(p, VectorXd(0));
  CHECK(r.value == 0.0);
  CHECK(r.gradient.size() == 0);
}

TEST_CASE("psi: errors") {
  const auto p = project_coordinate(ccv_segment_set(3, {1}), 1);
  CHECK(kind_of([&] { psi_value_grad(p, VectorXd(2)); }) == ErrorKind::LengthMismatch);
  VectorXd a(1);
  a << 0.0;
  CHECK(kind_of([&] { psi_value_grad(p, a); }) == ErrorKind::DomainViolation);
}

TEST_CASE("psi: gradient matches central differences") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = random_pattern(gen, 1, 6, 9);
    const auto p = project_coordinate(s, 1);
    if (!p.self_loops.empty()) continue;
    const int ni = p.level_count() - 2;
    VectorXd a(ni);
    std::vector<double> draws(ni);
    for (auto& v : draws) v = 0.02 + 0.96 * u(gen);
    std::sort(draws.begin(), draws.end());
    for (int i = 0; i < ni; ++i) a[i] = draws[i];
    bool ok = true;
    const auto full = with_ends(p, a);
    for (const auto& e : p.edges) ok = ok && std::abs(full[e.hi] - full[e.lo]) > 1e-3;
    if (!ok) continue;
    const auto r = psi_value_grad(p, a);
    CHECK(r.value == doctest::Approx(psi_direct(p, full)).epsilon(1e-13));
    const double h = 1e-6;
    for (int i = 0; i < ni; ++i) {
      VectorXd ap = a, am = a;
      ap[i] += h;
      am[i] -= h;
      const double fd = (psi_direct(p, with_ends(p, ap)) - psi_direct(p, with_ends(p, am))) / (2 * h);
      CHECK(std::abs(fd - r.gradient[i]) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
    ++checked;
  }
  CHECK(checked >= 50);
}

TEST_CASE("psi: midpoint convexity along chords") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto p = project_coordinate(ccv_segment_set(5, {1, 2}), 1);
  const int ni = p.level_count() - 2;
  auto point = [&] {
    std::vector<double> v(ni);
    for (auto& x : v) x = u(gen);
    std::sort(v.begin(), v.end());
    return VectorXd(Eigen::Map<VectorXd>(v.data(), ni));
  };
  for (int rep = 0; rep < 50; ++rep) {
    const VectorXd a = point(), b = point();
    const VectorXd m = 0.5 * (a + b);
    const double fa = psi_value_grad(p, a).value, fb = psi_value_grad(p, b).value;
    const double fm = psi_value_grad(p, m).value;
    CHECK(fm <= 0.5 * (fa + fb) + 1e-10);
  }
}

TEST_CASE("standard uniform: AJ(3,2) pattern gives equal spacing") {
  const auto aj = aj_segment_set(3, 2);
  MatrixXd x = aj.coords();
  // perturb interior levels while keeping the grouping
  for (int l = 0; l < x.rows(); ++l)
    for (int k = 0; k < x.cols(); ++k)
      if (x(l, k) == 0.5) x(l, k) = 0.37;
  const auto res = solve_standard_uniform(make_uniformity_problem(build_segment_set(x, aj.edges()), false));
  CHECK(res.report.max_residual() < 1e-8);
  for (int l = 1; l <= 3; ++l) {
    const auto p = project_coordinate(res.solution, l);
    const int nl = p.level_count();
    for (int m = 0; m < nl; ++m) CHECK(p.values[m] == doctest::Approx(double(m) / (nl - 1)).epsilon(1e-10));
  }
}

TEST_CASE("standard uniform: two diagonals") {
  MatrixXd x(2, 4);
  x << 0, 1, 1, 0, 1, 0, 1, 0;
  const auto res = solve_standard_uniform(make_uniformity_problem(build_segment_set(x, {{1, 2}, {3, 4}}), false));
  CHECK(res.objective == 0.0);
  CHECK(res.report.uniform());
}

TEST_CASE("standard uniform: three-edge example gives beta = 1/2") {
  MatrixXd x(2, 4);
  x << 0, 0.2, 1, 0, 0.2, 0, 0.2, 0;
  const auto res = solve_standard_uniform(make_uniformity_problem(build_segment_set(x, {{1, 2}, {2, 3}, {3, 4}}), false));
  const auto p = project_coordinate(res.solution, 1);
  REQUIRE(p.level_count() == 3);
  CHECK(p.values[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(res.gradient_norm <= 1e-10);
}

TEST_CASE("standard uniform: random graphs") {
  std::mt19937_64 gen(5);
  int solved = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const auto s = random_pattern(gen, 3, 5 + rep % 3, -(rep % 4));
    const auto pr = make_uniformity_problem(s, false);
    bool admissible = true;
    for (const auto& p : pr.projections) admissible = admissible && p.self_loops.empty();
    if (!admissible) {
      CHECK(kind_of([&] { solve_standard_uniform(pr); }) == ErrorKind::Infeasible);
      continue;
    }
    SolveResult res;
    try {
      res = solve_standard_uniform(pr);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Infeasible);  // interior minimizer absent
      continue;
    }
    CHECK(res.report.max_residual() < 1e-8);
    double kl = 0.0;
    for (int l = 1; l <= 3; ++l) kl += kl_divergence(res.solution, l);
    CHECK(std::abs(kl - res.objective) < 1e-12);
    ++solved;
  }
  CHECK(solved > 10);
}

TEST_CASE("standard uniform: serial and parallel agree") {
  const auto pat = circulant_pattern(6, {1, 2}, {0, 0.1, 0.3, 0.5, 0.8, 1});
  SolverOptions ser;
  ser.exec = Exec::Serial;
  const auto a = solve_standard_uniform(make_uniformity_problem(pat, false), ser);
  const auto b = solve_standard_uniform(make_uniformity_problem(pat, false));
  CHECK((a.solution.coords() - b.solution.coords()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standard uniform: one-sided level is infeasible") {
  MatrixXd x(1, 3);
  x << 0, 0.5, 1;
  CHECK(kind_of([&] { solve_standard_uniform(make_uniformity_problem(build_segment_set(x, {{1, 2}, {1, 3}}), false)); }) ==
        ErrorKind::Infeasible);
}

TEST_CASE("standard uniform: iteration cap") {
  const auto pat = circulant_pattern(6, {1, 2}, {0, 0.1, 0.3, 0.5, 0.8, 1});
  SolverOptions opt;
  opt.max_iterations = 1;
  CHECK(kind_of([&] { solve_standard_uniform(make_uniformity_problem(pat, false), opt); }) ==
        ErrorKind::MaxIterations);
}

TEST_CASE("strict ctm: antithetic pair") {
  MatrixXd x(2, 2);
  x << 0.2, 0.9, 0.7, 0.1;
  const auto res = solve_strict_ctm(make_uniformity_problem(build_segment_set(x, {{1, 2}}), true));
  MatrixXd expect(2, 2);
  expect << 0, 1, 1, 0;
  CHECK((res.solution.coords() - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("strict ctm: C4({1}) matches the circulant closed form") {
  const auto res = solve_strict_ctm(make_uniformity_problem(circulant_pattern(4, {1}, {0, 0.2, 0.45, 1}), true));
  const auto ref = ccv_segment_set(4, {1});
  CHECK((res.solution.coords() - ref.coords()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(res.report.max_sum_residual() < 1e-10);
  CHECK(res.gradient_norm <= 1e-10);
}

TEST_CASE("strict ctm: offsets {1} agree with equal spacing") {
  for (int d = 3; d <= 7; ++d) {
    std::vector<double> first(d);
    for (int i = 0; i < d; ++i) first[i] = std::pow(double(i) / (d - 1), 1.3);
    const auto res = solve_strict_ctm(make_uniformity_problem(circulant_pattern(d, {1}, first), true));
    const auto p = project_coordinate(res.solution, 1);
    for (int m = 0; m < d; ++m) CHECK(std::abs(p.values[m] - double(m) / (d - 1)) < 1e-8);
    CHECK(res.report.uniform());
    CHECK(res.report.constant_sum());
  }
}

TEST_CASE("strict ctm: multi-offset circulant agrees with the dedicated solver") {
  const std::vector<double> first{0, 0.1, 0.5, 0.7, 1};
  const auto res = solve_strict_ctm(make_uniformity_problem(circulant_pattern(5, {1, 2}, first), true));
  const auto x1 = solve_circulant(5, {1, 2});
  const auto p = project_coordinate(res.solution, 1);
  for (int m = 0; m < 5; ++m) CHECK(std::abs(p.values[m] - x1[m]) < 1e-8);
}

TEST_CASE("strict ctm: inconsistent constraints") {
  MatrixXd x(2, 2);
  x << 0, 1, 0, 1;
  CHECK(kind_of([&] { solve_strict_ctm(make_uniformity_problem(build_segment_set(x, {{1, 2}}), true)); }) ==
        ErrorKind::InconsistentConstraints);
}

TEST_CASE("circulant: closed-form rows") {
  auto near = [](const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
  };
  CHECK(near(solve_circulant(3, {1}), {0, 0.5, 1}) == 0.0);
  const double r5 = 1.0 / (2.0 * std::sqrt(5.0));
  CHECK(near(solve_circulant(4, {1, 2}), {0, 0.5 - r5, 0.5 + r5, 1}) < 1e-6);
  CHECK(near(solve_circulant(5, {2}), {0, 0, 0.5, 1, 1}) < 1e-6);
  CHECK(kind_of([] { solve_circulant(5, {3}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("kl divergence") {
  CHECK(kl_divergence(antithetic_pair_segment_set(), 1) == 0.0);
  // C3, coordinate 1: gaps 1/2, 1/2, 1 over three edges
  CHECK(kl_divergence(ccv_segment_set(3, {1}), 1) == doctest::Approx(2.0 * std::log(2.0) / 3.0).epsilon(1e-15));
  const auto s = ccv_segment_set(5, {1, 2});
  for (int l = 1; l <= 5; ++l) {
    const auto p = project_coordinate(s, l);
    VectorXd inner(p.level_count() - 2);
    for (int m = 1; m + 1 < p.level_count(); ++m) inner[m - 1] = p.values[m];
    CHECK(std::abs(kl_divergence(s, l) - psi_value_grad(p, inner).value) < 1e-12);
  }
}
