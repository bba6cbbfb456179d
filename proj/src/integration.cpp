#include "segsamp/integration.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "segsamp/errors.hpp"
#include "segsamp/stats.hpp"

namespace segsamp {

using Clock = std::chrono::steady_clock;

double wang_sloan(const double* x, int p, double a, double tau) {
  double f = 1.0, t = 1.0;
  for (int i = 0; i < p; ++i) {
    t *= tau;
    f *= 1.0 + a * t * (x[i] - 0.5);
  }
  return f;
}

Integrand make_integrand(const std::string& id, int p, double a, double tau) {
  Integrand g;
  g.name = id;
  if (id == "wang-sloan") {
    if (p < 1) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
    g.p = p;
    g.f = [p, a, tau](const double* x) { return wang_sloan(x, p, a, tau); };
    g.mean = 1.0;
    double prod = 1.0, add = 0.0, t = 1.0;
    for (int i = 0; i < p; ++i) {
      t *= tau;
      const double vi = a * a * t * t / 12.0;
      prod *= 1.0 + vi;
      add += vi;
    }
    g.variance = prod - 1.0;
    g.residual_variance = g.variance - add;
  } else if (id == "product2") {
    g.p = 2;
    g.f = [](const double* x) { return x[0] * x[1]; };
    g.mean = 0.25;
    g.variance = 7.0 / 144.0;
    g.residual_variance = 1.0 / 144.0;
  } else if (id == "additive") {
    if (p < 1) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
    g.p = p;
    g.f = [p](const double* x) {
      double s = 0.0;
      for (int i = 0; i < p; ++i) s += x[i];
      return s;
    };
    g.mean = 0.5 * p;
    g.variance = p / 12.0;
    g.residual_variance = 0.0;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown integrand '" + id + "'");
  }
  return g;
}

Scheme mc_iid_scheme() { return {Scheme::Type::McIid, "mc-iid", {}, {}}; }

Scheme glh_scheme(const Construction& base) {
  return {Scheme::Type::Glh, std::string("glh-") + kind_name(base.kind), base, {}};
}

Scheme external_scheme(const std::string& path) {
  return {Scheme::Type::External, "external", {}, path};
}

namespace {

std::vector<std::vector<double>> read_points(const std::string& path, int p) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::BadData, "cannot open " + path);
  std::vector<std::vector<double>> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::vector<double> row;
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (pts.empty()) continue;  // header
      throw Error(ErrorKind::BadData, path + ": non-numeric row");
    }
    if (static_cast<int>(row.size()) < p) throw Error(ErrorKind::BadData, path + ": short row");
    pts.push_back(std::move(row));
  }
  return pts;
}

// squared errors of each replication for one (scheme, n)
std::vector<double> replicate(const Scheme& sc, const Integrand& g, int n, int reps,
                              std::uint64_t seed, Exec exec) {
  std::vector<double> err(reps);
  Design base;
  if (sc.type == Scheme::Type::Glh) {
    Construction c = sc.base;
    c.d = n;
    base = resolve(c);
  }
  auto run = [&](int r) {
    Rng rng(seed, static_cast<std::uint64_t>(r), Purpose::Replication, static_cast<std::uint64_t>(n));
    thread_local Eigen::MatrixXd u;
    thread_local std::vector<double> x;
    x.resize(g.p);
    double s = 0.0;
    if (sc.type == Scheme::Type::Glh) {
      u.resize(g.p, n);
      glh_fill(g.p, n, base.sampler, rng, u);
      for (int l = 0; l < n; ++l) {
        for (int i = 0; i < g.p; ++i) x[i] = u(i, l);
        s += g.f(x.data());
      }
    } else {
      for (int l = 0; l < n; ++l) {
        for (int i = 0; i < g.p; ++i) x[i] = rng.uniform();
        s += g.f(x.data());
      }
    }
    const double e = s / n - g.mean;
    err[r] = e * e;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < reps; ++r) run(r);
  } else {
    for (int r = 0; r < reps; ++r) run(r);
  }
  return err;
}

}  // namespace

std::vector<IntegrationRow> mc_integrate(const IntegrationConfig& cfg) {
  if (!cfg.integrand.f) throw Error(ErrorKind::InvalidArgument, "integrand has no function");
  if (cfg.replications < 2) throw Error(ErrorKind::InvalidArgument, "need >= 2 replications");
  std::vector<IntegrationRow> rows;
  const auto& g = cfg.integrand;
  for (const auto& sc : cfg.schemes) {
    std::vector<std::vector<double>> pts;
    if (sc.type == Scheme::Type::External) pts = read_points(sc.path, g.p);
    for (int n : cfg.points) {
      if (n < 2) throw Error(ErrorKind::InvalidArgument, "need >= 2 points");
      IntegrationRow row{sc.name, n, 0.0, 0.0};
      const auto t0 = Clock::now();
      if (sc.type == Scheme::Type::External) {
        if (static_cast<int>(pts.size()) < n)
          throw Error(ErrorKind::BadData, sc.path + " has fewer than " + std::to_string(n) + " points");
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += g.f(pts[l].data());
        row.mse = std::pow(s / n - g.mean, 2);
        row.mean_time = std::chrono::duration<double>(Clock::now() - t0).count();
      } else {
        const auto err = replicate(sc, g, n, cfg.replications, cfg.seed, cfg.exec);
        double s = 0.0;
        for (double e : err) s += e;
        row.mse = s / err.size();
        row.mean_time = std::chrono::duration<double>(Clock::now() - t0).count() / cfg.replications;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<CltRow> clt_check(const Integrand& f, const std::vector<int>& d_list, int reps,
                              const Construction& base, std::uint64_t seed, Exec exec) {
  if (!f.residual_variance) throw Error(ErrorKind::InvalidArgument, "integrand lacks residual variance");
  if (reps < 2) throw Error(ErrorKind::InvalidArgument, "need >= 2 replications");
  std::vector<CltRow> rows;
  for (int d : d_list) {
    Construction c = base;
    c.d = d;
    const Design ds = resolve(c);
    std::vector<double> z(reps);
    auto run = [&](int r) {
      Rng rng(seed, static_cast<std::uint64_t>(r), Purpose::Replication, static_cast<std::uint64_t>(d));
      thread_local Eigen::MatrixXd u;
      thread_local std::vector<double> x;
      u.resize(f.p, d);
      x.resize(f.p);
      glh_fill(f.p, d, ds.sampler, rng, u);
      double s = 0.0;
      for (int l = 0; l < d; ++l) {
        for (int i = 0; i < f.p; ++i) x[i] = u(i, l);
        s += f.f(x.data());
      }
      z[r] = std::sqrt(double(d)) * (s / d - f.mean);
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
      for (int r = 0; r < reps; ++r) run(r);
    } else {
      for (int r = 0; r < reps; ++r) run(r);
    }
    CltRow row;
    row.d = d;
    row.variance = mean_var(z).var;
    row.variance_se = variance_se(z);
    row.analytic = *f.residual_variance;
    row.iid_variance = f.variance;
    rows.push_back(row);
  }
  return rows;
}

std::vector<TimingRow> sampling_time_study(const std::vector<Construction>& constructions,
                                           const std::vector<int>& d_list, std::int64_t n,
                                           int reps, std::uint64_t seed) {
  std::vector<TimingRow> rows;
  if (n <= 0 || reps <= 0) return rows;
  for (const auto& c0 : constructions) {
    for (int d : d_list) {
      Construction c = c0;
      c.d = d;
      const Design ds = resolve(c);
      std::vector<double> buf(d);
      double sink = 0.0;
      const auto t0 = Clock::now();
      for (int r = 0; r < reps; ++r) {
        Rng rng(seed, static_cast<std::uint64_t>(r), Purpose::Timing);
        for (std::int64_t i = 0; i < n; ++i) {
          ds.sampler(rng, buf.data());
          sink += buf[0];
        }
      }
      const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
      volatile double keep = sink;
      (void)keep;
      rows.push_back({ds.name, d, dt / reps});
    }
  }
  return rows;
}

}  // namespace segsamp
