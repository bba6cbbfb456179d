#pragma once

#include <vector>

namespace segsamp {

struct Pt {
  double x;
  double y;
};

inline constexpr double kVertexTol = 1e-12;
inline constexpr double kCoefTol = 1e-14;

// Sutherland-Hodgman step: keep the part of convex `poly` with a*x + b*y + c <= 0.
void clip_half_plane(std::vector<Pt>& poly, std::vector<Pt>& scratch, double a, double b, double c);

double polygon_area(const std::vector<Pt>& poly);

// Area of {(v,w) in [0,1]^2 : a_i v + b_i w + c_i <= 0 for all i}.
double unit_square_region_area(const double* a, const double* b, const double* c, int m,
                               std::vector<Pt>& poly, std::vector<Pt>& scratch);

}  // namespace segsamp
