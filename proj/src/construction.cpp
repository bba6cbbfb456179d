#include "segsamp/construction.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "segsamp/catalog.hpp"
#include "segsamp/errors.hpp"
#include "segsamp/segment_io.hpp"
#include "segsamp/transforms.hpp"

namespace segsamp {

namespace {

struct KindName {
  Kind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {Kind::AntitheticPair, "antithetic-pair"}, {Kind::Rotation, "rotation"},
    {Kind::AjBaseB, "aj-base-b"},              {Kind::Gaffke3, "gaffke3"},
    {Kind::GaffkeD, "gaffke-d"},               {Kind::Ccv, "ccv"},
    {Kind::Rbs, "rbs"},                        {Kind::Lh, "lh"},
    {Kind::Ilh, "ilh"},                        {Kind::Custom, "custom"},
    {Kind::Composed, "composed"},              {Kind::Iid, "iid"},
};

VectorSource segment_source(const SegmentSet& s, VModel m) {
  auto sp = std::make_shared<const SegmentSet>(s);
  if (m == VModel::Common) return [sp](Rng& rng, double* out) { draw_one(*sp, rng, out); };
  return [sp](Rng& rng, double* out) {
    const int d = sp->dim(), ne = sp->edge_count();
    thread_local std::vector<double> v;
    v.resize(d);
    for (int l = 0; l < d; ++l) v[l] = rng.uniform();
    const int k = std::min(static_cast<int>(ne * rng.uniform()), ne - 1);
    for (int l = 0; l < d; ++l) out[l] = sp->tail(k, l) * v[l] + sp->head(k, l) * (1.0 - v[l]);
  };
}

VectorSource exchangeable_wrap(VectorSource inner, int d) {
  return [inner = std::move(inner), d](Rng& rng, double* out) {
    inner(rng, out);
    for (int i = d - 1; i > 0; --i) std::swap(out[i], out[rng.below(static_cast<std::size_t>(i) + 1)]);
  };
}

// Exact exchangeable versions are materialised as the union of all d! row permutations.
constexpr long kExchangeableEdgeCap = 4000;

std::optional<SegmentSet> permutation_mixture(const SegmentSet& s) {
  const int d = s.dim(), nv = s.vertex_count(), ne = s.edge_count();
  long copies = 1;
  for (int l = 2; l <= d; ++l) {
    copies *= l;
    if (copies * ne > kExchangeableEdgeCap) return std::nullopt;
  }
  std::vector<int> perm(d);
  for (int l = 0; l < d; ++l) perm[l] = l;
  Eigen::MatrixXd x(d, nv * copies);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(ne * copies));
  int c = 0;
  do {
    for (int l = 0; l < d; ++l) x.block(l, c * nv, 1, nv) = s.coords().row(perm[l]);
    for (const auto& e : s.edges()) edges.push_back({e.i + c * nv, e.j + c * nv});
    ++c;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return build_segment_set(std::move(x), std::move(edges));
}

void use_segments(Design& ds, SegmentSet s, VModel m) {
  ds.vmodel = m;
  ds.blocks = {Block{s, m}};
  ds.sampler = segment_source(s, m);
  ds.segments = std::move(s);
}

std::string describe(const Construction& c) {
  std::string s = kind_name(c.kind);
  s += "(d=" + std::to_string(c.d);
  if (c.kind == Kind::AjBaseB) s += ",b=" + std::to_string(c.b);
  if (c.kind == Kind::Ccv) {
    s += ",L={";
    for (std::size_t i = 0; i < c.offsets.size(); ++i)
      s += (i ? "," : "") + std::to_string(c.offsets[i]);
    s += "}";
  }
  if (c.kind == Kind::Ilh) s += ",T=" + std::to_string(c.T);
  s += ")";
  if (c.exchangeable) s += "*";
  return s;
}

}  // namespace

const char* kind_name(Kind k) {
  for (const auto& kn : kKinds)
    if (kn.kind == k) return kn.name;
  return "unknown";
}

Kind kind_from_name(const std::string& s) {
  for (const auto& kn : kKinds)
    if (s == kn.name) return kn.kind;
  throw Error(ErrorKind::InvalidArgument, "unknown construction kind '" + s + "'");
}

nlohmann::json construction_to_json(const Construction& c) {
  nlohmann::json j{{"kind", kind_name(c.kind)}, {"d", c.d}, {"b", c.b}, {"offsets", c.offsets},
                   {"T", c.T}, {"exchangeable", c.exchangeable}};
  if (!c.path.empty()) j["path"] = c.path;
  if (c.kind == Kind::Composed) j["mode"] = c.mode;
  if (!c.parts.empty()) {
    j["parts"] = nlohmann::json::array();
    for (const auto& p : c.parts) j["parts"].push_back(construction_to_json(p));
  }
  return j;
}

Construction construction_from_json(const nlohmann::json& j) {
  try {
    Construction c;
    c.kind = kind_from_name(j.at("kind").get<std::string>());
    c.d = j.value("d", 2);
    c.b = j.value("b", 2);
    c.offsets = j.value("offsets", std::vector<int>{1});
    c.T = j.value("T", 1);
    c.exchangeable = j.value("exchangeable", false);
    c.path = j.value("path", std::string());
    c.mode = j.value("mode", std::string("stochastic"));
    if (j.contains("parts"))
      for (const auto& p : j.at("parts")) c.parts.push_back(construction_from_json(p));
    return c;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::BadData, ex.what());
  }
}

Construction make_construction(Kind k, int d, int b, std::vector<int> offsets, int T,
                               bool exchangeable) {
  Construction c;
  c.kind = k;
  c.d = d;
  c.b = b;
  c.offsets = std::move(offsets);
  c.T = T;
  c.exchangeable = exchangeable;
  return c;
}

Design resolve(const Construction& c, const SolverOptions& opt) {
  Design ds;
  ds.spec = c;
  ds.d = c.d;
  const int d = c.d;
  if (d < 2 && c.kind != Kind::Custom && c.kind != Kind::Composed)
    throw Error(ErrorKind::InvalidArgument, "construction needs d >= 2");

  switch (c.kind) {
    case Kind::AntitheticPair: {
      if (d != 2) throw Error(ErrorKind::InvalidArgument, "antithetic-pair has d = 2");
      use_segments(ds, antithetic_pair_segment_set(), VModel::Common);
      ds.strict_ctm = true;
      break;
    }
    case Kind::Rotation: {
      use_segments(ds, rotation_segment_set(d), VModel::Common);
      ds.sampler = [d](Rng& rng, double* out) { rotation_sampler(d, rng, out); };
      break;
    }
    case Kind::AjBaseB: {
      const int b = c.b;
      if (b < 1) throw Error(ErrorKind::InvalidArgument, "aj-base-b needs b >= 1");
      try {
        use_segments(ds, aj_segment_set(d, b), VModel::Common);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SizeLimit) throw;
      }
      ds.sampler = [d, b](Rng& rng, double* out) { aj_sampler(d, b, rng, out); };
      ds.strict_ctm = b == 2;
      break;
    }
    case Kind::Gaffke3: {
      if (d != 3) throw Error(ErrorKind::InvalidArgument, "gaffke3 has d = 3");
      ds.blocks = {Block{aj_segment_set(3, 2), VModel::Common}};
      ds.sampler = [](Rng& rng, double* out) {
        const auto u = gaffke3_sampler(rng.uniform());
        std::copy(u.begin(), u.end(), out);
      };
      ds.strict_ctm = true;
      break;
    }
    case Kind::GaffkeD: {
      const int pairs = (d % 2 == 0) ? d / 2 : (d - 3) / 2;
      for (int p = 0; p < pairs; ++p) ds.blocks.push_back({antithetic_pair_segment_set(), VModel::Common});
      if (d % 2 == 1) ds.blocks.push_back({aj_segment_set(3, 2), VModel::Common});
      ds.sampler = [d](Rng& rng, double* out) { gaffke_d_sampler(d, rng, out); };
      ds.strict_ctm = true;
      break;
    }
    case Kind::Ccv: {
      use_segments(ds, ccv_segment_set(d, c.offsets, opt), VModel::Common);
      ds.strict_ctm = true;
      break;
    }
    case Kind::Rbs: {
      ds.blocks = {Block{ccv_segment_set(d, {1}, opt), VModel::Common}};
      ds.sampler = [d](Rng& rng, double* out) { rbs_sampler(d, rng, out); };
      ds.strict_ctm = true;
      break;
    }
    case Kind::Lh:
    case Kind::Ilh: {
      const int T = c.kind == Kind::Lh ? 1 : c.T;
      if (T < 1) throw Error(ErrorKind::InvalidArgument, "ilh needs T >= 1");
      Design base = c.parts.empty() ? resolve(make_construction(Kind::Iid, d), opt)
                                    : resolve(c.parts.front(), opt);
      if (base.d != d) throw Error(ErrorKind::DimensionMismatch, "ilh base dimension");
      ds.strict_ctm = base.strict_ctm;
      if (base.blocks.size() == 1 && d <= 8) {
        try {
          const SegmentSet lh = lh_segment_set(d);
          SegmentSet cur = base.blocks.front().set;
          for (int t = 0; t < T; ++t) cur = deterministic_compose(lh, cur);
          ds.blocks = {Block{cur, base.blocks.front().vmodel}};
          ds.segments = cur;
          ds.vmodel = base.blocks.front().vmodel;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::SizeLimit) throw;
        }
      }
      ds.sampler = [inner = base.sampler, d, T](Rng& rng, double* out) {
        inner(rng, out);
        thread_local std::vector<int> perm;
        for (int t = 0; t < T; ++t) {
          rng.permutation(perm, d);
          for (int l = 0; l < d; ++l) out[l] = (perm[l] + out[l]) / d;
        }
      };
      break;
    }
    case Kind::Iid: {
      use_segments(ds, comonotone_segment_set(d), VModel::Iid);
      ds.sampler = iid_source(d);
      break;
    }
    case Kind::Custom: {
      if (c.path.empty()) throw Error(ErrorKind::InvalidArgument, "custom needs a path");
      SegmentSet s = read_segment_set(c.path);
      ds.d = s.dim();
      const auto rep = uniformity_residuals(s);
      ds.strict_ctm = rep.uniform() && rep.constant_sum();
      use_segments(ds, std::move(s), VModel::Common);
      break;
    }
    case Kind::Composed: {
      if (c.parts.size() < 2) throw Error(ErrorKind::InvalidArgument, "composed needs two parts");
      std::vector<Design> parts;
      for (const auto& p : c.parts) parts.push_back(resolve(p, opt));
      for (const auto& p : parts)
        if (!p.segments)
          throw Error(ErrorKind::InvalidArgument, std::string(kind_name(p.spec.kind)) +
                                                      " has no segment set to compose");
      SegmentSet out;
      VModel m = parts.back().vmodel;
      if (c.mode == "stochastic") {
        for (const auto& p : parts)
          if (p.vmodel != VModel::Common)
            throw Error(ErrorKind::InvalidArgument, "stochastic composition needs common-V parts");
        out = *parts[0].segments;
        for (std::size_t i = 1; i < parts.size(); ++i) out = stochastic_compose(out, *parts[i].segments);
        m = VModel::Common;
      } else if (c.mode == "deterministic") {
        out = *parts.back().segments;
        for (std::size_t i = parts.size() - 1; i-- > 0;) out = deterministic_compose(*parts[i].segments, out);
      } else {
        throw Error(ErrorKind::InvalidArgument, "composition mode '" + c.mode + "'");
      }
      ds.d = out.dim();
      ds.strict_ctm = m == VModel::Common && uniformity_residuals(out).constant_sum();
      use_segments(ds, std::move(out), m);
      break;
    }
  }
  if (c.exchangeable) {
    ds.sampler = exchangeable_wrap(ds.sampler, ds.d);
    // tau of a CTM set is already minimal and rho only sees the margins of the product,
    // so the unpermuted blocks stay valid there; otherwise the mixture is needed.
    std::optional<SegmentSet> mix;
    if (ds.blocks.size() == 1) mix = permutation_mixture(ds.blocks.front().set);
    if (mix) {
      ds.blocks = {Block{*mix, ds.blocks.front().vmodel}};
      ds.vmodel = ds.blocks.front().vmodel;
      ds.segments = std::move(mix);
    } else {
      ds.segments.reset();
      if (!ds.strict_ctm) ds.blocks.clear();
    }
  }
  ds.name = describe(c);
  return ds;
}

DrawBatch sample(const Design& design, std::int64_t n, std::uint64_t seed, std::uint64_t stream,
                 Exec exec) {
  DrawBatch b = draw_source(design.sampler, design.d, n, seed, stream, exec);
  b.construction = construction_to_json(design.spec);
  return b;
}

}  // namespace segsamp
