#include "segsamp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "segsamp/errors.hpp"

namespace segsamp {

namespace {

template <class Body>
void for_chunks(std::int64_t n, Exec exec, Body&& body) {
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c)
      body(c, c * kChunk, std::min(n, (c + 1) * kChunk));
  } else {
    for (std::int64_t c = 0; c < chunks; ++c)
      body(c, c * kChunk, std::min(n, (c + 1) * kChunk));
  }
}

void require_edges(const SegmentSet& s) {
  if (s.edge_count() == 0) throw Error(ErrorKind::EmptyEdgeSet, "segment set has no edges");
}

void require_count(std::int64_t n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative draw count");
}

}  // namespace

VectorSource iid_source(int d) {
  return [d](Rng& rng, double* out) {
    for (int l = 0; l < d; ++l) out[l] = rng.uniform();
  };
}

VectorSource comonotone_source(int d) {
  return [d](Rng& rng, double* out) {
    const double v = rng.uniform();
    for (int l = 0; l < d; ++l) out[l] = v;
  };
}

DrawBatch draw(const SegmentSet& s, std::int64_t n, std::uint64_t seed, std::uint64_t stream,
               bool force, Exec exec) {
  require_edges(s);
  require_count(n);
  if (!force && !uniformity_residuals(s).uniform())
    throw Error(ErrorKind::InvalidArgument, "segment set fails the uniformity checks");
  DrawBatch b;
  b.seed = seed;
  b.stream = stream;
  b.samples.resize(n, s.dim());
  for_chunks(n, exec, [&](std::int64_t c, std::int64_t lo, std::int64_t hi) {
    Rng rng(seed, stream, Purpose::Draws, static_cast<std::uint64_t>(c));
    for (std::int64_t r = lo; r < hi; ++r) draw_one(s, rng, b.samples.row(r).data());
  });
  return b;
}

DrawBatch draw_generalized(const SegmentSet& s, const VectorSource& v_source, std::int64_t n,
                           std::uint64_t seed, std::uint64_t stream, Exec exec) {
  require_edges(s);
  require_count(n);
  const int d = s.dim(), ne = s.edge_count();
  DrawBatch b;
  b.seed = seed;
  b.stream = stream;
  b.samples.resize(n, d);
  for_chunks(n, exec, [&](std::int64_t c, std::int64_t lo, std::int64_t hi) {
    Rng rng(seed, stream, Purpose::Draws, static_cast<std::uint64_t>(c));
    std::vector<double> v(d);
    for (std::int64_t r = lo; r < hi; ++r) {
      v_source(rng, v.data());
      const int k = std::min(static_cast<int>(ne * rng.uniform()), ne - 1);
      double* out = b.samples.row(r).data();
      for (int l = 0; l < d; ++l) out[l] = s.tail(k, l) * v[l] + s.head(k, l) * (1.0 - v[l]);
    }
  });
  return b;
}

DrawBatch draw_source(const VectorSource& source, int d, std::int64_t n, std::uint64_t seed,
                      std::uint64_t stream, Exec exec) {
  require_count(n);
  DrawBatch b;
  b.seed = seed;
  b.stream = stream;
  b.samples.resize(n, d);
  for_chunks(n, exec, [&](std::int64_t c, std::int64_t lo, std::int64_t hi) {
    Rng rng(seed, stream, Purpose::Draws, static_cast<std::uint64_t>(c));
    for (std::int64_t r = lo; r < hi; ++r) source(rng, b.samples.row(r).data());
  });
  return b;
}

void glh_fill(int p, int d, const VectorSource& base, Rng& rng, Eigen::Ref<Eigen::MatrixXd> out) {
  thread_local std::vector<int> perm;
  thread_local std::vector<double> v;
  v.resize(d);
  for (int i = 0; i < p; ++i) {
    rng.permutation(perm, d);
    base(rng, v.data());
    for (int l = 0; l < d; ++l) out(i, l) = (perm[l] + v[l]) / d;
  }
}

GlhSample glh_sample(int p, int d, const VectorSource& base, std::uint64_t seed,
                     const std::string& base_name, bool keep_permutations) {
  if (p < 1 || d < 2) throw Error(ErrorKind::InvalidArgument, "glh_sample needs p >= 1, d >= 2");
  GlhSample g;
  g.base = base_name;
  g.u.resize(p, d);
  Rng rng(seed, 0, Purpose::Permutation);
  std::vector<int> perm;
  std::vector<double> v(d);
  for (int i = 0; i < p; ++i) {
    rng.permutation(perm, d);
    base(rng, v.data());
    for (int l = 0; l < d; ++l) g.u(i, l) = (perm[l] + v[l]) / d;
    if (keep_permutations) g.permutations.push_back(perm);
  }
  return g;
}

double conditional_cdf(const SegmentSet& s, int k, const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != s.dim())
    throw Error(ErrorKind::LengthMismatch, "u has " + std::to_string(u.size()) + " entries");
  double vp = 1.0, vm = 1.0;
  for (int l = 1; l <= s.dim(); ++l) {
    const auto [alpha, beta] = conditional_support(s, k, l);
    const double v = std::clamp((u[l - 1] - alpha) / (beta - alpha), 0.0, 1.0);
    if (s.tail(k - 1, l - 1) - s.head(k - 1, l - 1) >= 0.0)
      vp = std::min(vp, v);
    else
      vm = std::min(vm, v);
  }
  return std::max(vp + vm - 1.0, 0.0);
}

double joint_cdf(const SegmentSet& s, const std::vector<double>& u) {
  require_edges(s);
  double acc = 0.0;
  for (int k = 1; k <= s.edge_count(); ++k) acc += conditional_cdf(s, k, u);
  return acc / s.edge_count();
}

void write_csv(const DrawBatch& batch, std::ostream& out, const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  for (int l = 1; l <= batch.dim(); ++l) out << (l > 1 ? "," : "") << 'u' << l;
  out << '\n';
  char buf[32];
  for (std::int64_t r = 0; r < batch.size(); ++r) {
    for (int l = 0; l < batch.dim(); ++l) {
      std::snprintf(buf, sizeof buf, "%.17g", batch.samples(r, l));
      out << (l > 0 ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace segsamp
