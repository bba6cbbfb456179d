#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "segsamp/parallel.hpp"
#include "segsamp/rng.hpp"
#include "segsamp/segments.hpp"

namespace segsamp {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::int64_t kChunk = 4096;

struct DrawBatch {
  RowMatrix samples;  // N x d
  nlohmann::json construction;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  int dim() const { return static_cast<int>(samples.cols()); }
  std::int64_t size() const { return samples.rows(); }
};

// Fills one d-vector from the generator.
using VectorSource = std::function<void(Rng&, double*)>;

VectorSource iid_source(int d);
VectorSource comonotone_source(int d);

// Draw i lives in chunk i / kChunk, which owns its own stream, so the output
// does not depend on the thread schedule.
DrawBatch draw(const SegmentSet& s, std::int64_t n, std::uint64_t seed, std::uint64_t stream = 0,
               bool force = false, Exec exec = Exec::Parallel);
DrawBatch draw_generalized(const SegmentSet& s, const VectorSource& v_source, std::int64_t n,
                           std::uint64_t seed, std::uint64_t stream = 0, Exec exec = Exec::Parallel);
DrawBatch draw_source(const VectorSource& source, int d, std::int64_t n, std::uint64_t seed,
                      std::uint64_t stream = 0, Exec exec = Exec::Parallel);

// One draw of the common-V sampler.
inline void draw_one(const SegmentSet& s, Rng& rng, double* out) {
  const double v = rng.uniform();
  const double w = rng.uniform();
  const int ne = s.edge_count();
  const int k = std::min(static_cast<int>(ne * w), ne - 1);
  for (int l = 0; l < s.dim(); ++l) out[l] = s.tail(k, l) * v + (1.0 - v) * s.head(k, l);
}

struct GlhSample {
  Eigen::MatrixXd u;  // p x d
  std::string base;
  std::vector<std::vector<int>> permutations;
};

// Row i: U^i_l = (pi_i(l) + V^i_l)/d, V^i from the base source.
GlhSample glh_sample(int p, int d, const VectorSource& base, std::uint64_t seed,
                     const std::string& base_name = "iid", bool keep_permutations = false);
void glh_fill(int p, int d, const VectorSource& base, Rng& rng, Eigen::Ref<Eigen::MatrixXd> out);

double conditional_cdf(const SegmentSet& s, int k, const std::vector<double>& u);
double joint_cdf(const SegmentSet& s, const std::vector<double>& u);

void write_csv(const DrawBatch& batch, std::ostream& out, const std::string& header_comment = "");

}  // namespace segsamp
