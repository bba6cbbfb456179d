#include "segsamp/mcmc.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "segsamp/errors.hpp"
#include "segsamp/stats.hpp"

namespace segsamp {

const Eigen::Vector3d kSyntheticBeta(-0.5, 0.8, -0.6);

namespace {

const boost::math::normal kStdNormal;
constexpr double kTiny = 1e-300;

double phi_cdf(double x) { return boost::math::cdf(kStdNormal, x); }
double phi_inv(double p) { return boost::math::quantile(kStdNormal, std::clamp(p, kTiny, 1.0 - 1e-16)); }

std::vector<std::vector<double>> read_numeric_csv(const std::string& path,
                                                  const std::vector<std::string>& cols) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::BadData, "cannot open " + path);
  std::string line;
  std::vector<int> index;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::vector<std::string> head;
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell.erase(std::remove_if(cell.begin(), cell.end(), ::isspace), cell.end());
      head.push_back(cell);
    }
    for (const auto& c : cols) {
      auto it = std::find(head.begin(), head.end(), c);
      if (it == head.end()) throw Error(ErrorKind::BadData, path + ": missing column " + c);
      index.push_back(static_cast<int>(it - head.begin()));
    }
    break;
  }
  if (index.empty()) throw Error(ErrorKind::BadData, path + ": no header");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::vector<std::string> cells;
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    std::vector<double> row;
    for (int i : index) {
      if (i >= static_cast<int>(cells.size())) throw Error(ErrorKind::BadData, path + ": short row");
      try {
        row.push_back(std::stod(cells[i]));
      } catch (const std::exception&) {
        throw Error(ErrorKind::BadData, path + ": bad value '" + cells[i] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::BadData, path + ": no data rows");
  return rows;
}

// Uniform vectors for one iteration: slot s, chain c -> u(s, c).
class UniformFeed {
 public:
  UniformFeed(const Design* coupling, int d) : coupling_(coupling), d_(d), buf_(d) {}
  void fill(Rng& rng, Eigen::MatrixXd& u) {
    for (Eigen::Index s = 0; s < u.rows(); ++s) {
      if (coupling_) {
        coupling_->sampler(rng, buf_.data());
        for (int c = 0; c < d_; ++c) u(s, c) = buf_[c];
      } else {
        for (int c = 0; c < d_; ++c) u(s, c) = rng.uniform();
      }
    }
  }

 private:
  const Design* coupling_;
  int d_;
  std::vector<double> buf_;
};

struct ChainTrace {
  // trace[c][j] = post-burn-in values of parameter j for chain c
  std::vector<std::vector<std::vector<double>>> trace;
};

struct RepOutcome {
  std::vector<double> var_anti, var_iid;
  std::vector<std::vector<double>> chain_means;  // [j][c]
  std::vector<double> iid_mean;                  // [j], chain 0 of the iid group
};

RepOutcome summarise_rep(const ChainTrace& anti, const ChainTrace& iid, int d, int np) {
  RepOutcome o;
  o.chain_means.assign(np, std::vector<double>(d));
  for (int j = 0; j < np; ++j) {
    const std::size_t len = anti.trace[0][j].size();
    std::vector<double> sa(len, 0.0), si(len, 0.0);
    for (int c = 0; c < d; ++c) {
      double m = 0.0;
      for (std::size_t t = 0; t < len; ++t) {
        sa[t] += anti.trace[c][j][t] / d;
        si[t] += iid.trace[c][j][t] / d;
        m += anti.trace[c][j][t];
      }
      o.chain_means[j][c] = m / len;
    }
    o.var_anti.push_back(batch_means_variance(sa));
    o.var_iid.push_back(batch_means_variance(si));
    double mi = 0.0;
    for (double v : iid.trace[0][j]) mi += v;
    o.iid_mean.push_back(mi / len);
  }
  return o;
}

template <class RunChains>
VarianceRatioResult run_study(const McmcConfig& cfg, const std::vector<std::string>& names,
                              RunChains&& run_chains) {
  if (cfg.d < 2) throw Error(ErrorKind::InvalidArgument, "need d >= 2 chains");
  if (cfg.burn_in < 0 || cfg.iterations <= cfg.burn_in)
    throw Error(ErrorKind::InvalidArgument, "need iterations > burn-in >= 0");
  if (cfg.replications < 2) throw Error(ErrorKind::InvalidArgument, "need >= 2 replications");
  Construction cc = cfg.coupling;
  cc.d = cfg.d;
  const Design coupling = resolve(cc);
  const int np = static_cast<int>(names.size());
  std::vector<RepOutcome> reps(cfg.replications);
  auto one = [&](int r) {
    Rng ra(cfg.seed, static_cast<std::uint64_t>(r), Purpose::Coupling);
    Rng ri(cfg.seed, static_cast<std::uint64_t>(r), Purpose::Replication);
    Rng acc(cfg.seed, static_cast<std::uint64_t>(r), Purpose::Acceptance);
    UniformFeed anti_feed(&coupling, cfg.d), iid_feed(nullptr, cfg.d);
    const ChainTrace a = run_chains(anti_feed, ra, acc, true);
    const ChainTrace i = run_chains(iid_feed, ri, ri, false);
    reps[r] = summarise_rep(a, i, cfg.d, np);
  };
  if (cfg.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < cfg.replications; ++r) one(r);
  } else {
    for (int r = 0; r < cfg.replications; ++r) one(r);
  }

  VarianceRatioResult res;
  res.d = cfg.d;
  res.replications = cfg.replications;
  res.antithetic_acceptance = cfg.antithetic_acceptance;
  for (int j = 0; j < np; ++j) {
    ParameterSummary ps;
    ps.name = names[j];
    std::vector<double> ratio, va, vi, im;
    for (const auto& o : reps) {
      ratio.push_back(o.var_anti[j] / o.var_iid[j]);
      va.push_back(o.var_anti[j]);
      vi.push_back(o.var_iid[j]);
      im.push_back(o.iid_mean[j]);
    }
    const auto rmv = mean_var(ratio);
    ps.ratio_mean = rmv.mean;
    ps.ratio_se = rmv.se();
    ps.ratio_min = *std::min_element(ratio.begin(), ratio.end());
    ps.ratio_max = *std::max_element(ratio.begin(), ratio.end());
    ps.pooled_ratio = mean_var(va).mean / mean_var(vi).mean;
    const auto imv = mean_var(im);
    ps.iid_mean = imv.mean;
    ps.iid_mean_se = imv.se();
    for (int c = 0; c < cfg.d; ++c) {
      std::vector<double> cm;
      for (const auto& o : reps) cm.push_back(o.chain_means[j][c]);
      const auto mv = mean_var(cm);
      ps.chain_mean.push_back(mv.mean);
      ps.chain_mean_se.push_back(mv.se());
    }
    res.params.push_back(std::move(ps));
  }
  return res;
}

}  // namespace

ProbitData read_probit_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path, {"y", "x1", "x2"});
  ProbitData data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.X.resize(n, 3);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = rows[i][0];
    if (y != 0.0 && y != 1.0) throw Error(ErrorKind::BadData, path + ": y must be 0 or 1");
    data.y[i] = y;
    data.X.row(i) << 1.0, rows[i][1], rows[i][2];
  }
  return data;
}

ProbitData synthetic_probit(int n, const Eigen::Vector3d& beta, std::uint64_t seed) {
  Rng rng(seed, 0, Purpose::Data);
  ProbitData data;
  data.X.resize(n, 3);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    data.X.row(i) << 1.0, phi_inv(rng.uniform()), phi_inv(rng.uniform());
    const double eta = data.X.row(i).dot(beta);
    data.y[i] = rng.uniform() < phi_cdf(eta) ? 1.0 : 0.0;
  }
  return data;
}

PumpData read_pumps_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path, {"s", "t"});
  PumpData data;
  for (const auto& r : rows) {
    if (r[0] < 0.0 || !(r[1] > 0.0)) throw Error(ErrorKind::BadData, path + ": need s >= 0, t > 0");
    data.s.push_back(r[0]);
    data.t.push_back(r[1]);
  }
  return data;
}

VarianceRatioResult probit_gibbs(const McmcConfig& cfg, const ProbitData& data) {
  const auto n = static_cast<int>(data.X.rows());
  if (n < 3 || data.X.cols() != 3 || data.y.size() != n)
    throw Error(ErrorKind::BadData, "probit data needs >= 3 rows of (y, x1, x2)");
  const Eigen::MatrixXd xtx = data.X.transpose() * data.X;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(xtx);
  const auto sv = svd.singularValues();
  if (!(sv[sv.size() - 1] > 1e-10 * sv[0])) throw Error(ErrorKind::SingularDesign, "X'X is singular");
  const Eigen::MatrixXd cov = xtx.inverse();
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  const Eigen::MatrixXd proj = cov * data.X.transpose();  // beta_tilde = proj * z
  const int d = cfg.d, burn = cfg.burn_in, iters = cfg.iterations;

  auto run_chains = [&](UniformFeed& feed, Rng& rng, Rng&, bool) {
    ChainTrace tr;
    tr.trace.assign(d, std::vector<std::vector<double>>(3));
    std::vector<Eigen::Vector3d> beta(d, Eigen::Vector3d::Zero());
    Eigen::MatrixXd u(n + 3, d);
    Eigen::VectorXd z(n);
    for (int it = 0; it < iters; ++it) {
      feed.fill(rng, u);
      for (int c = 0; c < d; ++c) {
        const Eigen::VectorXd mu = data.X * beta[c];
        for (int i = 0; i < n; ++i) {
          // truncated N(mu, 1) by inverse CDF
          const double uc = u(i, c);
          if (data.y[i] > 0.5)
            z[i] = mu[i] - phi_inv((1.0 - uc) * phi_cdf(mu[i]));
          else
            z[i] = mu[i] + phi_inv(uc * phi_cdf(-mu[i]));
        }
        Eigen::Vector3d xi;
        for (int j = 0; j < 3; ++j) xi[j] = phi_inv(u(n + j, c));
        beta[c] = proj * z + L * xi;
        if (it >= burn)
          for (int j = 0; j < 3; ++j) tr.trace[c][j].push_back(beta[c][j]);
      }
    }
    return tr;
  };
  auto res = run_study(cfg, {"beta0", "beta1", "beta2"}, run_chains);
  res.model = "probit";
  return res;
}

VarianceRatioResult pumps_mwg(const McmcConfig& cfg, const PumpData& data) {
  const int np = static_cast<int>(data.s.size());
  if (np == 0 || data.t.size() != data.s.size()) throw Error(ErrorKind::BadData, "empty pump data");
  const int d = cfg.d, burn = cfg.burn_in, iters = cfg.iterations;
  const double sd = cfg.proposal_sd;

  auto run_chains = [&](UniformFeed& feed, Rng& rng, Rng& acc_rng, bool coupled) {
    ChainTrace tr;
    tr.trace.assign(d, std::vector<std::vector<double>>(2));
    std::vector<double> alpha(d, 1.0), beta(d, 1.0);
    std::vector<std::vector<double>> lambda(d, std::vector<double>(np, 1.0));
    // slots: lambda_1..n, beta, alpha proposal, alpha acceptance
    const bool couple_accept = !coupled || cfg.antithetic_acceptance;
    Eigen::MatrixXd u(np + (couple_accept ? 3 : 2), d);
    auto log_post = [&](double a, double b, const std::vector<double>& lam) {
      double sl = 0.0;
      for (double v : lam) sl += std::log(v);
      return a * (np * std::log(b) + sl - 1.0) - np * std::lgamma(a);
    };
    for (int it = 0; it < iters; ++it) {
      feed.fill(rng, u);
      for (int c = 0; c < d; ++c) {
        double sum_l = 0.0;
        for (int k = 0; k < np; ++k) {
          const double shape = alpha[c] + data.s[k];
          lambda[c][k] = std::max(boost::math::gamma_p_inv(shape, u(k, c)), kTiny) / (beta[c] + data.t[k]);
          sum_l += lambda[c][k];
        }
        beta[c] = std::max(boost::math::gamma_p_inv(0.1 + np * alpha[c], u(np, c)), kTiny) / (1.0 + sum_l);
        const double prop = alpha[c] + sd * phi_inv(u(np + 1, c));
        const double ua = couple_accept ? u(np + 2, c) : acc_rng.uniform();
        if (prop > 0.0 &&
            std::log(ua) < log_post(prop, beta[c], lambda[c]) - log_post(alpha[c], beta[c], lambda[c]))
          alpha[c] = prop;
        if (it >= burn) {
          tr.trace[c][0].push_back(alpha[c]);
          tr.trace[c][1].push_back(beta[c]);
        }
      }
    }
    return tr;
  };
  auto res = run_study(cfg, {"alpha", "beta"}, run_chains);
  res.model = "pumps";
  return res;
}

}  // namespace segsamp
