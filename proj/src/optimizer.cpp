#include "segsamp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "segsamp/catalog.hpp"
#include "segsamp/errors.hpp"

namespace segsamp {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 80;

// full level vector of a projection with interior values substituted
std::vector<double> full_levels(const CoordinateProjection& p, const double* interior,
                                double lo, double hi) {
  const int nl = p.level_count();
  std::vector<double> a(nl);
  a.front() = lo;
  a.back() = hi;
  for (int m = 1; m + 1 < nl; ++m) a[m] = interior[m - 1];
  return a;
}

// Psi_l, gradient and Hessian over the interior levels. Returns false when a
// connected gap is not positive.
bool psi_eval(const CoordinateProjection& p, const std::vector<double>& a, double& value,
              double* grad, double* hess, int ld) {
  const int nl = p.level_count();
  const double inv_e = 1.0 / p.edge_total;
  value = 0.0;
  for (const auto& e : p.edges) {
    const double g = a[e.hi] - a[e.lo];
    if (!(g > 0.0)) return false;
    value -= std::log(g) * inv_e;
    if (!grad) continue;
    const double w = inv_e / g;
    const int ih = e.hi - 1, il = e.lo - 1;  // interior indices
    const bool hin = e.hi > 0 && e.hi < nl - 1;
    const bool lin = e.lo > 0 && e.lo < nl - 1;
    if (hin) grad[ih] -= w;
    if (lin) grad[il] += w;
    if (hess) {
      const double w2 = w / g;
      if (hin) hess[ih * ld + ih] += w2;
      if (lin) hess[il * ld + il] += w2;
      if (hin && lin) {
        hess[ih * ld + il] -= w2;
        hess[il * ld + ih] -= w2;
      }
    }
  }
  return true;
}

struct Layout {
  std::vector<int> offset;
  int nv = 0;
};

Layout make_layout(const std::vector<CoordinateProjection>& ps) {
  Layout lay;
  for (const auto& p : ps) {
    lay.offset.push_back(lay.nv);
    lay.nv += std::max(p.level_count() - 2, 0);
  }
  return lay;
}

struct Eval {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

bool evaluate(const std::vector<CoordinateProjection>& ps, const Layout& lay,
              const Eigen::VectorXd& z, bool derivatives, Eval& out) {
  out.value = 0.0;
  if (derivatives) {
    out.grad = Eigen::VectorXd::Zero(lay.nv);
    out.hess = Eigen::MatrixXd::Zero(lay.nv, lay.nv);
  }
  for (std::size_t l = 0; l < ps.size(); ++l) {
    const auto& p = ps[l];
    const int off = lay.offset[l];
    const auto a = full_levels(p, z.data() + off, 0.0, 1.0);
    for (int m = 1; m + 1 < p.level_count(); ++m)
      if (a[m] < 0.0 || a[m] > 1.0) return false;
    const int ni = std::max(p.level_count() - 2, 0);
    double v = 0.0;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(ni);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(ni, ni);
    if (!psi_eval(p, a, v, derivatives ? g.data() : nullptr,
                  derivatives ? h.data() : nullptr, ni))
      return false;
    out.value += v;
    if (derivatives && ni > 0) {
      out.grad.segment(off, ni) = g;
      out.hess.block(off, off, ni, ni) = h;
    }
  }
  return true;
}

// Locate the first connected pair that the point collapses, for diagnostics.
std::string offending_pair(const std::vector<CoordinateProjection>& ps, const Layout& lay,
                           const Eigen::VectorXd& z) {
  for (std::size_t l = 0; l < ps.size(); ++l) {
    const auto a = full_levels(ps[l], z.data() + lay.offset[l], 0.0, 1.0);
    for (std::size_t k = 0; k < ps[l].edges.size(); ++k) {
      const auto& e = ps[l].edges[k];
      if (!(a[e.hi] - a[e.lo] > 0.0))
        return "coordinate " + std::to_string(l + 1) + ", levels " + std::to_string(e.lo + 1) +
               " and " + std::to_string(e.hi + 1);
    }
    for (int m = 1; m + 1 < ps[l].level_count(); ++m)
      if (a[m] < 0.0 || a[m] > 1.0)
        return "coordinate " + std::to_string(l + 1) + " leaves [0,1]";
  }
  return "unknown";
}

// Stalled iterate pressed against the box or a connected gap: the infimum sits
// on the boundary, so no interior minimizer exists.
std::string boundary_diagnosis(const std::vector<CoordinateProjection>& ps, const Layout& lay,
                               const Eigen::VectorXd& z) {
  constexpr double eps = 1e-7;
  for (std::size_t l = 0; l < ps.size(); ++l) {
    const auto a = full_levels(ps[l], z.data() + lay.offset[l], 0.0, 1.0);
    for (int m = 1; m + 1 < ps[l].level_count(); ++m)
      if (a[m] < eps || a[m] > 1.0 - eps)
        return "coordinate " + std::to_string(l + 1) + ", level " + std::to_string(m + 1) +
               " is pushed to the boundary";
    for (const auto& e : ps[l].edges)
      if (a[e.hi] - a[e.lo] < eps)
        return "coordinate " + std::to_string(l + 1) + ", levels " + std::to_string(e.lo + 1) +
               " and " + std::to_string(e.hi + 1) + " collapse";
  }
  return {};
}

struct NewtonOutcome {
  Eigen::VectorXd z;
  double value = 0.0;
  double gnorm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped Newton on z = z0 + N w; rejects steps that leave the domain.
NewtonOutcome newton_nullspace(const std::vector<CoordinateProjection>& ps, const Layout& lay,
                               Eigen::VectorXd z, const Eigen::MatrixXd& N,
                               const SolverOptions& opt) {
  NewtonOutcome out;
  Eval ev, trial;
  evaluate(ps, lay, z, true, ev);
  for (int it = 0;; ++it) {
    const Eigen::VectorXd gw = N.transpose() * ev.grad;
    out.gnorm = gw.size() ? gw.lpNorm<Eigen::Infinity>() : 0.0;
    out.iterations = it;
    if (out.gnorm <= opt.tolerance) {
      out.converged = true;
      break;
    }
    if (it >= opt.max_iterations) break;
    const Eigen::MatrixXd hw = N.transpose() * ev.hess * N;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hw);
    Eigen::VectorXd dw;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) dw = -ldlt.solve(gw);
    if (dw.size() == 0 || !dw.allFinite() || dw.dot(gw) >= 0.0) dw = -gw;
    const Eigen::VectorXd dz = N * dw;
    const double slope = gw.dot(dw);
    const bool local = -slope < 1e-14;  // decrement below rounding of the objective
    double t = 1.0;
    bool moved = false;
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      const Eigen::VectorXd zt = z + t * dz;
      if (!evaluate(ps, lay, zt, false, trial)) continue;
      if (local || trial.value <= ev.value + kArmijo * t * slope) {
        z = zt;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    evaluate(ps, lay, z, true, ev);
  }
  out.z = std::move(z);
  out.value = ev.value;
  return out;
}

SegmentSet assemble(const UniformityProblem& pr, const Layout& lay, const Eigen::VectorXd& z) {
  const auto& pat = pr.pattern;
  Eigen::MatrixXd x(pat.dim(), pat.vertex_count());
  for (int l = 0; l < pat.dim(); ++l) {
    const auto& p = pr.projections[l];
    const auto a = full_levels(p, z.data() + lay.offset[l], 0.0, 1.0);
    for (int k = 0; k < pat.vertex_count(); ++k)
      x(l, k) = std::clamp(a[p.level[k]], 0.0, 1.0);
  }
  return build_segment_set(std::move(x), pat.edges());
}

Eigen::VectorXd equal_spacing(const UniformityProblem& pr, const Layout& lay) {
  Eigen::VectorXd z(lay.nv);
  for (std::size_t l = 0; l < pr.projections.size(); ++l) {
    const int nl = pr.projections[l].level_count();
    for (int m = 1; m + 1 < nl; ++m) z[lay.offset[l] + m - 1] = double(m) / (nl - 1);
  }
  return z;
}

Eigen::VectorXd template_values(const UniformityProblem& pr, const Layout& lay) {
  Eigen::VectorXd z(lay.nv);
  for (std::size_t l = 0; l < pr.projections.size(); ++l) {
    const auto& p = pr.projections[l];
    const double lo = p.values.front(), hi = p.values.back();
    for (int m = 1; m + 1 < p.level_count(); ++m)
      z[lay.offset[l] + m - 1] = (p.values[m] - lo) / (hi - lo);
  }
  return z;
}

void require_admissible(const UniformityProblem& pr) {
  for (const auto& p : pr.projections) {
    if (!p.self_loops.empty())
      throw Error(ErrorKind::Infeasible, "edge " + std::to_string(p.self_loops.front()) +
                                             " collapses on coordinate " +
                                             std::to_string(p.coordinate));
    if (p.level_count() < 2)
      throw Error(ErrorKind::Infeasible,
                  "coordinate " + std::to_string(p.coordinate) + " is constant");
  }
}

// An interior level whose edges all leave on one side has a one-signed
// derivative, so the uniformity equations cannot hold.
void require_two_sided(const UniformityProblem& pr) {
  for (const auto& p : pr.projections) {
    const int nl = p.level_count();
    std::vector<int> up(nl, 0), down(nl, 0);
    for (const auto& e : p.edges) {
      ++up[e.lo];
      ++down[e.hi];
    }
    for (int m = 1; m + 1 < nl; ++m)
      if (up[m] == 0 || down[m] == 0)
        throw Error(ErrorKind::Infeasible, "coordinate " + std::to_string(p.coordinate) + ", level " +
                                               std::to_string(m + 1) + " is joined on one side only");
  }
}

}  // namespace

PsiValueGrad psi_value_grad(const CoordinateProjection& p, const Eigen::VectorXd& a_interior) {
  const int ni = std::max(p.level_count() - 2, 0);
  if (a_interior.size() != ni)
    throw Error(ErrorKind::LengthMismatch, "expected " + std::to_string(ni) + " interior values");
  if (p.edge_total == 0) throw Error(ErrorKind::EmptyEdgeSet, "projection has no edges");
  const auto a = full_levels(p, a_interior.data(), p.values.front(), p.values.back());
  PsiValueGrad r;
  r.gradient = Eigen::VectorXd::Zero(ni);
  if (!p.self_loops.empty() || !psi_eval(p, a, r.value, r.gradient.data(), nullptr, ni))
    throw Error(ErrorKind::DomainViolation,
                "connected projected values coincide on coordinate " +
                    std::to_string(p.coordinate));
  return r;
}

UniformityProblem make_uniformity_problem(const SegmentSet& pattern, bool constant_sum) {
  if (pattern.edge_count() == 0) throw Error(ErrorKind::EmptyEdgeSet, "pattern has no edges");
  UniformityProblem pr;
  pr.pattern = pattern;
  pr.constant_sum = constant_sum;
  for (int l = 1; l <= pattern.dim(); ++l) pr.projections.push_back(project_coordinate(pattern, l));
  return pr;
}

SolveResult solve_standard_uniform(const UniformityProblem& pr, const SolverOptions& opt) {
  require_admissible(pr);
  require_two_sided(pr);
  const Layout lay = make_layout(pr.projections);
  const int d = static_cast<int>(pr.projections.size());
  Eigen::VectorXd z = equal_spacing(pr, lay);
  std::vector<NewtonOutcome> outs(d);

  auto solve_one = [&](int l) {
    const std::vector<CoordinateProjection> one{pr.projections[l]};
    const Layout lay1 = make_layout(one);
    Eigen::VectorXd z1 = z.segment(lay.offset[l], lay1.nv);
    outs[l] = newton_nullspace(one, lay1, z1, Eigen::MatrixXd::Identity(lay1.nv, lay1.nv), opt);
  };
  if (opt.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int l = 0; l < d; ++l) solve_one(l);
  } else {
    for (int l = 0; l < d; ++l) solve_one(l);
  }

  SolveResult res;
  for (int l = 0; l < d; ++l) {
    const auto& o = outs[l];
    if (!o.converged) {
      const std::vector<CoordinateProjection> one{pr.projections[l]};
      const std::string why = boundary_diagnosis(one, make_layout(one), o.z);
      if (!why.empty()) throw Error(ErrorKind::Infeasible, "no interior minimizer: " + why);
    }
    if (!o.converged)
      throw Error(ErrorKind::MaxIterations, "coordinate " + std::to_string(l + 1) +
                                                " stopped with gradient " +
                                                std::to_string(o.gnorm));
    z.segment(lay.offset[l], o.z.size()) = o.z;
    res.objective += o.value;
    res.gradient_norm = std::max(res.gradient_norm, o.gnorm);
    res.iterations = std::max(res.iterations, o.iterations);
  }
  res.solution = canonicalize(assemble(pr, lay, z));
  res.report = uniformity_residuals(res.solution);
  return res;
}

SolveResult solve_strict_ctm(const UniformityProblem& pr, const SolverOptions& opt) {
  require_admissible(pr);
  const Layout lay = make_layout(pr.projections);
  const auto& pat = pr.pattern;
  const int d = pat.dim(), n = pat.vertex_count();

  // one row per vertex: sum of its interior levels = d/2 - pinned endpoints
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, lay.nv);
  Eigen::VectorXd b = Eigen::VectorXd::Constant(n, 0.5 * d);
  for (int l = 0; l < d; ++l) {
    const auto& p = pr.projections[l];
    const int nl = p.level_count();
    for (int k = 0; k < n; ++k) {
      const int m = p.level[k];
      if (m == nl - 1)
        b[k] -= 1.0;
      else if (m > 0)
        A(k, lay.offset[l] + m - 1) += 1.0;
    }
  }

  Eigen::MatrixXd N;
  Eigen::VectorXd z0;
  if (lay.nv > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    const int rank = static_cast<int>(svd.rank());
    z0 = svd.solve(b);
    N = svd.matrixV().rightCols(lay.nv - rank);
  } else {
    z0 = Eigen::VectorXd::Zero(0);
    N = Eigen::MatrixXd::Zero(0, 0);
  }
  const double resid = (A * z0 - b).lpNorm<Eigen::Infinity>();
  if (!(resid <= 1e-9))
    throw Error(ErrorKind::InconsistentConstraints,
                "vertex-sum rows unsatisfiable, residual " + std::to_string(resid));

  auto project = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    if (N.cols() == 0) return z0;
    return z0 + N * (N.transpose() * (z - z0));
  };
  Eval probe;
  Eigen::VectorXd start = project(equal_spacing(pr, lay));
  if (!evaluate(pr.projections, lay, start, false, probe)) {
    const Eigen::VectorXd alt = project(template_values(pr, lay));
    if (!evaluate(pr.projections, lay, alt, false, probe))
      throw Error(ErrorKind::Infeasible,
                  "affine projection collapses " + offending_pair(pr.projections, lay, start));
    start = alt;
  }

  auto out = newton_nullspace(pr.projections, lay, start, N, opt);
  if (!out.converged && !boundary_diagnosis(pr.projections, lay, out.z).empty())
    throw Error(ErrorKind::Infeasible,
                "no interior minimizer: " + boundary_diagnosis(pr.projections, lay, out.z));
  if (!out.converged)
    throw Error(ErrorKind::MaxIterations,
                "projected gradient " + std::to_string(out.gnorm) + " after " +
                    std::to_string(out.iterations) + " iterations");
  SolveResult res;
  res.solution = canonicalize(assemble(pr, lay, out.z));
  res.objective = out.value;
  res.gradient_norm = out.gnorm;
  res.iterations = out.iterations;
  res.report = uniformity_residuals(res.solution);
  return res;
}

namespace {

// Circulant problem in gap variables g_t = x_{t+1} - x_t >= 0.
struct GapProblem {
  int d;
  std::vector<Edge> edges;
  Eigen::MatrixXd A;  // 2 x (d-1)
  Eigen::Vector2d b;
};

double span(const GapProblem& gp, const Eigen::VectorXd& g, const Edge& e) {
  double s = 0.0;
  for (int t = e.i - 1; t < e.j - 1; ++t) s += g[t];
  return s;
}

// objective plus optional barrier on every free gap
bool gap_eval(const GapProblem& gp, const Eigen::VectorXd& g, const std::vector<char>& free,
              double mu, bool derivs, double& f, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
  const int m = gp.d - 1;
  const double inv_e = 1.0 / gp.edges.size();
  f = 0.0;
  if (derivs) {
    grad = Eigen::VectorXd::Zero(m);
    hess = Eigen::MatrixXd::Zero(m, m);
  }
  for (const auto& e : gp.edges) {
    const double s = span(gp, g, e);
    if (!(s > 0.0)) return false;
    f -= inv_e * std::log(s);
    if (!derivs) continue;
    const double w = inv_e / s, w2 = w / s;
    for (int t = e.i - 1; t < e.j - 1; ++t) {
      grad[t] -= w;
      for (int u = e.i - 1; u < e.j - 1; ++u) hess(t, u) += w2;
    }
  }
  for (int t = 0; t < m; ++t) {
    if (!free[t]) continue;
    if (mu > 0.0) {
      if (!(g[t] > 0.0)) return false;
      f -= mu * std::log(g[t]);
      if (derivs) {
        grad[t] -= mu / g[t];
        hess(t, t) += mu / (g[t] * g[t]);
      }
    } else if (g[t] < 0.0) {
      return false;
    }
  }
  return true;
}

bool gap_newton(const GapProblem& gp, Eigen::VectorXd& g, const std::vector<char>& free,
                const Eigen::MatrixXd& N, double mu, double tol, int& budget) {
  double f, ft;
  Eigen::VectorXd grad, gt;
  Eigen::MatrixXd hess, ht;
  if (!gap_eval(gp, g, free, mu, true, f, grad, hess)) return false;
  while (budget-- > 0) {
    if (N.cols() == 0) return true;
    const Eigen::VectorXd gw = N.transpose() * grad;
    const Eigen::MatrixXd hw = N.transpose() * hess * N;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hw);
    Eigen::VectorXd dw = -ldlt.solve(gw);
    if (!dw.allFinite() || dw.dot(gw) >= 0.0) dw = -gw;
    const double dec = -gw.dot(dw);
    if (dec <= tol) return true;
    const Eigen::VectorXd dg = N * dw;
    double t = 1.0;
    bool moved = false;
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      const Eigen::VectorXd trial = g + t * dg;
      if (!gap_eval(gp, trial, free, mu, false, ft, gt, ht)) continue;
      if (ft <= f - kArmijo * t * dec || dec < 1e-14) {
        g = trial;
        moved = true;
        break;
      }
    }
    if (!moved) return true;
    gap_eval(gp, g, free, mu, true, f, grad, hess);
  }
  return false;
}

Eigen::MatrixXd null_basis(const Eigen::MatrixXd& A) {
  if (A.cols() == 0) return Eigen::MatrixXd::Zero(0, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  return svd.matrixV().rightCols(A.cols() - svd.rank());
}

}  // namespace

std::vector<double> solve_circulant(int d, const std::vector<int>& offsets,
                                    const SolverOptions& opt) {
  GapProblem gp{d, circulant_edges(d, offsets), Eigen::MatrixXd(2, d - 1), {1.0, 0.5 * d}};
  std::vector<double> x(d);
  if (offsets.size() == 1 && offsets[0] == 1) {
    for (int i = 0; i < d; ++i) x[i] = double(i) / (d - 1);
    return x;
  }
  const int m = d - 1;
  for (int t = 0; t < m; ++t) {
    gp.A(0, t) = 1.0;
    gp.A(1, t) = d - 1 - t;
  }
  Eigen::VectorXd g = Eigen::VectorXd::Constant(m, 1.0 / m);
  std::vector<char> free(m, 1);
  int budget = opt.max_iterations;

  // barrier path, then fix the vanishing gaps and re-solve without barrier
  const Eigen::MatrixXd N = null_basis(gp.A);
  for (double mu = 1.0; mu >= 1e-14; mu *= 0.1)
    if (!gap_newton(gp, g, free, N, mu, 1e-20, budget))
      throw Error(budget <= 0 ? ErrorKind::MaxIterations : ErrorKind::Infeasible,
                  "circulant barrier path failed");

  for (int t = 0; t < m; ++t)
    if (g[t] < 1e-7) free[t] = 0;
  std::vector<int> idx;
  for (int t = 0; t < m; ++t) {
    if (free[t]) idx.push_back(t);
    else g[t] = 0.0;
  }
  Eigen::MatrixXd Af(2, idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) Af.col(c) = gp.A.col(idx[c]);
  Eigen::VectorXd gf(idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) gf[c] = g[idx[c]];
  gf += Af.completeOrthogonalDecomposition().solve(gp.b - Af * gf);
  Eigen::VectorXd polished = g;
  for (std::size_t c = 0; c < idx.size(); ++c) polished[idx[c]] = gf[c];
  Eigen::MatrixXd Nf = Eigen::MatrixXd::Zero(m, 0);
  const Eigen::MatrixXd nb = null_basis(Af);
  if (nb.cols() > 0) {
    Nf = Eigen::MatrixXd::Zero(m, nb.cols());
    for (std::size_t c = 0; c < idx.size(); ++c) Nf.row(idx[c]) = nb.row(c);
  }
  const double feas = (gp.A * polished - gp.b).lpNorm<Eigen::Infinity>();
  if (feas <= 1e-12 && polished.minCoeff() >= 0.0 &&
      gap_newton(gp, polished, free, Nf, 0.0, 1e-28, budget))
    g = polished;
  if (budget <= 0) throw Error(ErrorKind::MaxIterations, "circulant solve");

  x[0] = 0.0;
  for (int t = 0; t < m; ++t) x[t + 1] = x[t] + std::max(g[t], 0.0);
  x[d - 1] = 1.0;
  double total = 0.0;
  for (double v : x) total += v;
  if (std::abs(total - 0.5 * d) > 1e-10)
    throw Error(ErrorKind::Infeasible, "circulant vertex sum off by " + std::to_string(total - 0.5 * d));
  return x;
}

double kl_divergence(const SegmentSet& s, int l) {
  const auto p = project_coordinate(s, l);
  if (std::abs(p.values.front()) > kCoordTol || std::abs(p.values.back() - 1.0) > kCoordTol)
    throw Error(ErrorKind::DomainViolation, "coordinate " + std::to_string(l) + " range is not [0,1]");
  Eigen::VectorXd interior(std::max(p.level_count() - 2, 0));
  for (Eigen::Index m = 0; m < interior.size(); ++m) interior[m] = p.values[m + 1];
  return psi_value_grad(p, interior).value;
}

}  // namespace segsamp
