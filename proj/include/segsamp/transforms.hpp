#pragma once

#include <cstdint>
#include <vector>

#include "segsamp/segments.hpp"

namespace segsamp {

inline constexpr std::int64_t kDefaultEdgeCap = 1000000;

// L holds 1-based coordinates; component l becomes 1 - u_l iff l in L.
std::vector<double> reflect(const std::vector<double>& u, const std::vector<int>& L);
// w_l = u_{pi(l)}, pi a 1-based permutation
std::vector<double> permute_vector(const std::vector<double>& u, const std::vector<int>& pi);

// Disjoint union; uniform edge choice mixes branches by edge count.
SegmentSet stochastic_compose(const SegmentSet& s1, const SegmentSet& s2);
// Vertices E^y x V^x in lexicographic order, edges E^y x E^x.
SegmentSet deterministic_compose(const SegmentSet& sy, const SegmentSet& sx,
                                 std::int64_t edge_cap = kDefaultEdgeCap);

// Two-vertex structure y_{l,1} = 1{l in L}, y_{l,2} = 1{l not in L}.
SegmentSet reflection_structure(int d, const std::vector<int>& L);

struct CtmCompositionCheck {
  double c1 = 0.0;
  double c2 = 0.0;
  bool c1_constant = false;
  bool c2_constant = false;
  bool preserves = false;
};

CtmCompositionCheck ctm_composition_check(const SegmentSet& sy);

}  // namespace segsamp
