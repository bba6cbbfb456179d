#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "segsamp/optimizer.hpp"
#include "segsamp/rng.hpp"
#include "segsamp/segments.hpp"

namespace segsamp {

inline constexpr std::int64_t kDefaultVertexCap = 1000000;

SegmentSet antithetic_pair_segment_set();
// vertices 0-vector and 1-vector joined by one edge
SegmentSet comonotone_segment_set(int d);
SegmentSet rotation_segment_set(int d);
SegmentSet aj_segment_set(int d, int b, std::int64_t vertex_cap = kDefaultVertexCap);
std::vector<Edge> circulant_edges(int d, const std::vector<int>& offsets);
SegmentSet ccv_segment_set(int d, const std::vector<int>& offsets, const SolverOptions& opt = {});
SegmentSet lh_segment_set(int d);

std::array<double, 3> gaffke3_sampler(double v);
void gaffke_d_sampler(int d, Rng& rng, double* out);
void rbs_sampler(int d, Rng& rng, double* out);
// U_l = frac(U + (l-1)/d)
void rotation_sampler(int d, Rng& rng, double* out);
// base-b digit displacement; exact for any d through a digit stream
void aj_sampler(int d, int b, Rng& rng, double* out);

// One ILH step per row: U <- (pi + U)/d with a fresh permutation per row.
void ilh_iterate(Eigen::Ref<Eigen::MatrixXd> batch, Rng& rng);
void ilh_iterate(Eigen::Ref<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> batch,
                 Rng& rng);

// X_t = X_{t-1}/3 + (2/3) V with V a permutation of (-1,0,1); perm holds V+1.
std::array<double, 3> superstar_step(const std::array<double, 3>& x, const std::array<int, 3>& perm);
std::vector<std::array<double, 3>> superstar_sampler(int T, const std::array<double, 3>& x0, Rng& rng);

}  // namespace segsamp
