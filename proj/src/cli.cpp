#include "segsamp/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "segsamp/catalog.hpp"
#include "segsamp/concordance.hpp"
#include "segsamp/construction.hpp"
#include "segsamp/errors.hpp"
#include "segsamp/integration.hpp"
#include "segsamp/mcmc.hpp"
#include "segsamp/optimizer.hpp"
#include "segsamp/parallel.hpp"
#include "segsamp/segment_io.hpp"

namespace segsamp {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

struct Options {
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  int threads = 0;
  std::string config;

  std::string segments;
  std::string solve_kind;
  int d = 3;
  int chains = 2;
  int b = 2;
  int T = 1;
  std::vector<int> offsets{1};
  bool exchangeable = false;
  std::string construction;
  std::string construction_file;
  std::int64_t n = 1000;
  std::string method = "exact";
  std::string vmodel = "common";

  std::string integrand = "wang-sloan";
  double a = 0.1;
  double tau = 0.1;
  int p = 20;
  std::vector<int> points{100};
  int reps = 1000;
  std::vector<std::string> schemes{"mc-iid", "glh-ccv"};
  std::string points_file;
  std::vector<int> d_list{64, 256, 1024};
  std::string base = "iid";

  std::string model = "probit";
  std::string data;
  int iterations = 5000;
  int burn_in = 500;
  bool antithetic_acceptance = false;
  std::string coupling = "rbs";

  std::vector<std::string> constructions{"rbs", "ccv"};
};

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Emitter {
  std::ostream& fallback;
  std::string path;
  std::string header;  // provenance line
  json provenance;

  void text(const std::string& body, bool csv) const {
    std::ofstream file;
    std::ostream* os = &fallback;
    if (!path.empty()) {
      file.open(path);
      if (!file) throw Error(ErrorKind::BadData, "cannot write " + path);
      os = &file;
    }
    if (csv) *os << "# " << header << '\n';
    *os << body;
  }
  void emit_json(json j) const {
    j["provenance"] = provenance;
    text(j.dump(2) + "\n", false);
  }
};

// Inject JSON config values as flags unless the flag is already on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& ex) {
    throw CLI::ValidationError("--config", ex.what());
  }
  if (!cfg.is_object()) throw CLI::ValidationError("--config", "config must be a JSON object");
  auto present = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  for (const auto& [key, val] : cfg.items()) {
    const std::string flag = "--" + key;
    if (present(flag)) continue;
    if (val.is_boolean()) {
      if (val.get<bool>()) args.push_back(flag);
      continue;
    }
    std::string text;
    if (val.is_array()) {
      for (std::size_t i = 0; i < val.size(); ++i) {
        if (i) text += ",";
        text += val[i].is_string() ? val[i].get<std::string>() : val[i].dump();
      }
    } else {
      text = val.is_string() ? val.get<std::string>() : val.dump();
    }
    args.push_back(flag);
    args.push_back(text);
  }
  return args;
}

Construction construction_from_options(const Options& o) {
  if (!o.construction_file.empty()) {
    std::ifstream in(o.construction_file);
    if (!in) throw Error(ErrorKind::BadData, "cannot open " + o.construction_file);
    json j;
    in >> j;
    return construction_from_json(j);
  }
  Construction c = make_construction(kind_from_name(o.construction), o.d, o.b, o.offsets, o.T,
                                     o.exchangeable);
  if (c.kind == Kind::Custom) c.path = o.segments;
  return c;
}

std::string csv_rows(const std::vector<std::string>& head, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream s;
  for (std::size_t i = 0; i < head.size(); ++i) s << (i ? "," : "") << head[i];
  s << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << r[i];
    s << '\n';
  }
  return s.str();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int cmd_validate(const Options& o, const Emitter& em) {
  const SegmentSet s = read_segment_set(o.segments);
  const auto rep = uniformity_residuals(s);
  em.emit_json(report_to_json(rep));
  return rep.uniform() ? 0 : 1;
}

int cmd_solve(const Options& o, const Emitter& em) {
  SegmentSet s;
  json extra;
  if (o.solve_kind == "circulant") {
    s = ccv_segment_set(o.d, o.offsets);
  } else {
    const auto pattern = read_segment_set(o.segments);
    const bool ctm = o.solve_kind == "ctm";
    const auto pr = make_uniformity_problem(pattern, ctm);
    const auto res = ctm ? solve_strict_ctm(pr) : solve_standard_uniform(pr);
    s = res.solution;
    extra = {{"objective", res.objective}, {"gradient_norm", res.gradient_norm},
             {"iterations", res.iterations}};
  }
  json j = segment_set_to_json(s);
  if (!extra.is_null()) j["solver"] = extra;
  em.emit_json(j);
  return 0;
}

int cmd_sample(const Options& o, const Emitter& em) {
  const Design ds = resolve(construction_from_options(o));
  const auto batch = sample(ds, o.n, o.seed);
  std::ostringstream s;
  write_csv(batch, s);
  em.text(s.str(), true);
  return 0;
}

int cmd_measure(const Options& o, const Emitter& em) {
  const VModel vm = o.vmodel == "iid" ? VModel::Iid : VModel::Common;
  ConcordanceReport rep;
  if (o.method == "exact") {
    if (!o.segments.empty() && o.construction.empty()) {
      rep = exact_concordance({Block{read_segment_set(o.segments), vm}});
    } else {
      const Construction c = construction_from_options(o);
      if ((c.kind == Kind::Ilh || c.kind == Kind::Lh) && c.parts.empty()) {
        const int T = c.kind == Kind::Lh ? 1 : c.T;
        rep.d = c.d;
        rep.tau = (1.0 / std::pow(std::tgamma(c.d + 1.0), T) - 1.0) / (std::ldexp(1.0, c.d - 1) - 1.0);
        try {
          const auto cf = ilh_tau_rho(c.d, T);
          rep.xi_star = cf.xi_star;
          rep.rho = cf.rho_iid;
          rep.method = "exact-ilh";
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::SizeLimit) throw;
          const auto [xi, se] = ilh_xi_star_monte_carlo(c.d, T, std::max<std::int64_t>(o.n, 2), o.seed);
          rep.xi_star = xi;
          rep.rho = ilh_rho_from_xi(c.d, xi);
          rep.rho_se = std::abs(ilh_rho_from_xi(c.d, xi + se) - rep.rho);
          rep.draws = std::max<std::int64_t>(o.n, 2);
          rep.method = "monte-carlo-ilh";
        }
        rep.tau_min = kendall_tau_min(c.d);
        try {
          rep.rho_min = spearman_rho_min(c.d);
        } catch (const Error&) {
        }
      } else {
        const Design ds = resolve(c);
        if (ds.blocks.empty())
          throw Error(ErrorKind::InvalidArgument, ds.name + " has no exact representation; use --method empirical");
        rep = exact_concordance(ds.blocks);
      }
    }
  } else if (o.method == "empirical") {
    DrawBatch b1, b2;
    if (!o.segments.empty() && o.construction.empty()) {
      const auto s = read_segment_set(o.segments);
      if (vm == VModel::Common) {
        b1 = draw(s, o.n, o.seed, 0);
        b2 = draw(s, o.n, o.seed, 1);
      } else {
        b1 = draw_generalized(s, iid_source(s.dim()), o.n, o.seed, 0);
        b2 = draw_generalized(s, iid_source(s.dim()), o.n, o.seed, 1);
      }
    } else {
      const Design ds = resolve(construction_from_options(o));
      b1 = sample(ds, o.n, o.seed, 0);
      b2 = sample(ds, o.n, o.seed, 1);
    }
    rep = empirical_concordance(b1, b2);
  } else {
    throw CLI::ValidationError("--method", "expected exact or empirical");
  }
  em.emit_json(report_to_json(rep));
  return 0;
}

Scheme scheme_from_name(const std::string& name, const Options& o) {
  if (name == "mc-iid") return mc_iid_scheme();
  if (name == "external") return external_scheme(o.points_file);
  if (name.rfind("glh-", 0) == 0) {
    Construction c = make_construction(kind_from_name(name.substr(4)), 2, o.b, {1});
    return glh_scheme(c);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown scheme '" + name + "'");
}

int cmd_integrate(const Options& o, const Emitter& em) {
  IntegrationConfig cfg;
  cfg.integrand = make_integrand(o.integrand, o.p, o.a, o.tau);
  cfg.points = o.points;
  cfg.replications = o.reps;
  cfg.seed = o.seed;
  for (const auto& s : o.schemes) cfg.schemes.push_back(scheme_from_name(s, o));
  if (!o.points_file.empty() &&
      std::none_of(o.schemes.begin(), o.schemes.end(), [](const std::string& s) { return s == "external"; }))
    cfg.schemes.push_back(external_scheme(o.points_file));
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : mc_integrate(cfg))
    rows.push_back({r.scheme, std::to_string(r.n_points), num(r.mse), num(r.mean_time)});
  em.text(csv_rows({"scheme", "n_points", "mse", "mean_time"}, rows), true);
  return 0;
}

int cmd_clt(const Options& o, const Emitter& em) {
  const Integrand f = make_integrand(o.integrand, o.p, o.a, o.tau);
  Construction base = make_construction(kind_from_name(o.base), 2, o.b, {1});
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : clt_check(f, o.d_list, o.reps, base, o.seed))
    rows.push_back({std::to_string(r.d), num(r.variance), num(r.variance_se), num(r.analytic),
                    num(r.iid_variance)});
  em.text(csv_rows({"d", "variance", "variance_se", "analytic", "iid_variance"}, rows), true);
  return 0;
}

int cmd_mcmc(const Options& o, const Emitter& em) {
  McmcConfig cfg;
  cfg.model = o.model;
  cfg.data_path = o.data;
  cfg.d = o.chains;
  cfg.iterations = o.iterations;
  cfg.burn_in = o.burn_in;
  cfg.replications = o.reps;
  cfg.antithetic_acceptance = o.antithetic_acceptance;
  cfg.seed = o.seed;
  cfg.coupling = make_construction(kind_from_name(o.coupling), o.d, o.b, {1}, 1, false);
  VarianceRatioResult res;
  if (o.model == "probit") {
    const ProbitData data = o.data.empty() ? synthetic_probit(55, kSyntheticBeta, o.seed) : read_probit_csv(o.data);
    res = probit_gibbs(cfg, data);
  } else if (o.model == "pumps") {
    res = pumps_mwg(cfg, read_pumps_csv(o.data.empty() ? "data/pumps.csv" : o.data));
  } else {
    throw CLI::ValidationError("--model", "expected probit or pumps");
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : res.params) {
    double worst = 0.0;
    for (std::size_t c = 0; c < p.chain_mean.size(); ++c)
      worst = std::max(worst, std::abs(p.chain_mean[c] - p.iid_mean) /
                                  std::hypot(p.chain_mean_se[c], p.iid_mean_se));
    rows.push_back({res.model, p.name, std::to_string(res.d), std::to_string(res.replications),
                    res.antithetic_acceptance ? "1" : "0", num(p.ratio_mean), num(p.ratio_se), num(p.ratio_min),
                    num(p.ratio_max), num(p.pooled_ratio), num(p.iid_mean), num(worst)});
  }
  em.text(csv_rows({"model", "parameter", "d", "replications", "antithetic_acceptance", "ratio_mean",
                    "ratio_se", "ratio_min", "ratio_max", "pooled_ratio", "iid_mean", "max_chain_z"},
                   rows),
          true);
  return 0;
}

int cmd_timing(const Options& o, const Emitter& em) {
  std::vector<Construction> cs;
  for (const auto& name : o.constructions) {
    Construction c = make_construction(kind_from_name(name), 2, o.b, {1}, o.T, o.exchangeable);
    cs.push_back(c);
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : sampling_time_study(cs, o.d_list, o.n, o.reps, o.seed))
    rows.push_back({r.construction, std::to_string(r.d), num(r.mean_time)});
  em.text(csv_rows({"construction", "d", "mean_time"}, rows), true);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sampling on line segments: antithetic constructions, solvers and experiments", "segsamp"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  Options o;
  app.add_option("--seed", o.seed, "RNG seed");
  app.add_option("--out", o.out, "output file (default stdout)");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", o.threads, "worker threads (default: all cores)");
  app.add_option("--config", o.config, "JSON config; command-line flags take precedence");
  app.set_version_flag("--version", kVersion);

  auto* validate = app.add_subcommand("validate", "check the uniformity assumptions of a segment set");
  validate->add_option("--segments", o.segments, "segment-set JSON")->required();

  auto* solve = app.add_subcommand("solve", "solve a uniformity problem");
  solve->add_option("kind", o.solve_kind, "circulant | uniform | ctm")
      ->required()
      ->check(CLI::IsMember({"circulant", "uniform", "ctm"}));
  solve->add_option("--d", o.d, "dimension");
  solve->add_option("--offsets", o.offsets, "circulant offsets")->delimiter(',');
  solve->add_option("--segments", o.segments, "template segment set (uniform, ctm)");

  auto add_construction = [&](CLI::App* sub) {
    sub->add_option("--construction", o.construction, "construction kind");
    sub->add_option("--construction-file", o.construction_file, "construction descriptor JSON");
    sub->add_option("--d", o.d, "dimension");
    sub->add_option("--b", o.b, "base for aj-base-b");
    sub->add_option("--T", o.T, "ILH iterations");
    sub->add_option("--offsets", o.offsets, "circulant offsets")->delimiter(',');
    sub->add_flag("--exchangeable", o.exchangeable, "apply a uniform random coordinate permutation");
    sub->add_option("--segments", o.segments, "segment-set JSON (custom kind or direct input)");
    sub->add_option("--n", o.n, "number of draws");
  };
  auto* samp = app.add_subcommand("sample", "draw from a construction (CSV)");
  add_construction(samp);
  auto* measure = app.add_subcommand("measure", "Kendall's tau and Spearman's rho report (JSON)");
  add_construction(measure);
  measure->add_option("--method", o.method, "exact | empirical")->check(CLI::IsMember({"exact", "empirical"}));
  measure->add_option("--vmodel", o.vmodel, "common | iid")->check(CLI::IsMember({"common", "iid"}));

  auto* integ = app.add_subcommand("integrate", "Monte Carlo integration study (CSV)");
  integ->add_option("--integrand", o.integrand, "wang-sloan | product2 | additive");
  integ->add_option("--a", o.a, "Wang-Sloan a");
  integ->add_option("--tau", o.tau, "Wang-Sloan tau");
  integ->add_option("--p", o.p, "ambient dimension");
  integ->add_option("--points", o.points, "points per estimate")->delimiter(',');
  integ->add_option("--reps", o.reps, "replications");
  integ->add_option("--schemes", o.schemes, "mc-iid, glh-<kind>, external")->delimiter(',');
  integ->add_option("--points-file", o.points_file, "external point set CSV");
  integ->add_option("--b", o.b, "base for glh-aj-base-b");

  auto* clt = app.add_subcommand("clt", "CLT variance check over a GLH sample (CSV)");
  clt->add_option("--integrand", o.integrand, "product2 | additive | wang-sloan");
  clt->add_option("--p", o.p, "ambient dimension (additive, wang-sloan)");
  clt->add_option("--a", o.a, "Wang-Sloan a");
  clt->add_option("--tau", o.tau, "Wang-Sloan tau");
  clt->add_option("--d-list", o.d_list, "GLH sizes")->delimiter(',');
  clt->add_option("--reps", o.reps, "replications");
  clt->add_option("--base", o.base, "base measure kind (iid, aj-base-b, rbs, ccv, ...)");
  clt->add_option("--b", o.b, "base for aj-base-b");

  auto* mcmc = app.add_subcommand("mcmc", "antithetically coupled MCMC study (CSV)");
  mcmc->add_option("--model", o.model, "probit | pumps");
  mcmc->add_option("--data", o.data, "data CSV (probit: y,x1,x2; pumps: s,t)");
  mcmc->add_option("--d", o.chains, "coupled chains");
  mcmc->add_option("--iterations", o.iterations, "iterations per chain");
  mcmc->add_option("--burn-in", o.burn_in, "discarded iterations");
  mcmc->add_option("--reps", o.reps, "replications");
  mcmc->add_flag("--antithetic-acceptance", o.antithetic_acceptance, "couple MH acceptance uniforms");
  mcmc->add_option("--coupling", o.coupling, "coupling construction kind");
  mcmc->add_option("--b", o.b, "base for aj-base-b coupling");

  auto* timing = app.add_subcommand("timing", "sampling time study (CSV)");
  timing->add_option("--constructions", o.constructions, "construction kinds")->delimiter(',');
  timing->add_option("--d-list", o.d_list, "dimensions")->delimiter(',');
  timing->add_option("--n", o.n, "draws per batch");
  timing->add_option("--reps", o.reps, "batches per cell");
  timing->add_option("--b", o.b, "base for aj-base-b");
  timing->add_option("--T", o.T, "ILH iterations");
  timing->add_flag("--exchangeable", o.exchangeable, "exchangeable variants");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(kVersion) + "\n" : app.help());
      return 0;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }
  set_thread_count(o.threads);

  CLI::App* sub = app.get_subcommands().front();
  Emitter em{out, o.out, "", {}};
  // where the settings came from, where output goes and thread count do not change results
  std::string cfg_text = sub->get_name() + "\n";
  {
    std::istringstream lines(app.config_to_str(true, false));
    for (std::string line; std::getline(lines, line);)
      if (line.rfind("config=", 0) != 0 && line.rfind("out=", 0) != 0 && line.rfind("threads=", 0) != 0)
        cfg_text += line + "\n";
  }
  const std::string hash = hex(fnv1a(cfg_text));
  em.header = std::string("segsamp ") + kVersion + " seed=" + std::to_string(o.seed) + " config=" + hash;
  em.provenance = {{"tool", std::string("segsamp ") + kVersion}, {"seed", o.seed}, {"config_hash", hash},
                   {"command", sub->get_name()}};
  try {
    const std::string name = sub->get_name();
    if ((name == "sample" || name == "measure") && o.construction.empty() && o.construction_file.empty() &&
        o.segments.empty())
      throw CLI::ValidationError("--construction", "give --construction, --construction-file or --segments");
    if (name == "solve" && o.solve_kind != "circulant" && o.segments.empty())
      throw CLI::ValidationError("--segments", "solve uniform/ctm needs a template segment set");
    if (name == "validate") return cmd_validate(o, em);
    if (name == "solve") return cmd_solve(o, em);
    if (name == "sample") return cmd_sample(o, em);
    if (name == "measure") return cmd_measure(o, em);
    if (name == "integrate") return cmd_integrate(o, em);
    if (name == "clt") return cmd_clt(o, em);
    if (name == "mcmc") return cmd_mcmc(o, em);
    if (name == "timing") return cmd_timing(o, em);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << sub->help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidArgument ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace segsamp
