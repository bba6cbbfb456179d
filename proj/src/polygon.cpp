#include "segsamp/polygon.hpp"

#include <cmath>

namespace segsamp {

void clip_half_plane(std::vector<Pt>& poly, std::vector<Pt>& scratch, double a, double b, double c) {
  if (poly.empty()) return;
  if (std::abs(a) < kCoefTol && std::abs(b) < kCoefTol) {
    // constant constraint: all in or all out
    if (c > kVertexTol) poly.clear();
    return;
  }
  scratch.clear();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& p = poly[i];
    const Pt& q = poly[(i + 1) % n];
    const double sp = a * p.x + b * p.y + c;
    const double sq = a * q.x + b * q.y + c;
    const bool pin = sp <= kVertexTol;
    const bool qin = sq <= kVertexTol;
    if (pin) scratch.push_back(p);
    if (pin != qin && std::abs(sp - sq) > 0.0) {
      const double t = sp / (sp - sq);
      if (t > 0.0 && t < 1.0) scratch.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  poly.swap(scratch);
}

double polygon_area(const std::vector<Pt>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& p = poly[i];
    const Pt& q = poly[(i + 1) % n];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(s);
}

double unit_square_region_area(const double* a, const double* b, const double* c, int m,
                               std::vector<Pt>& poly, std::vector<Pt>& scratch) {
  poly.assign({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
  for (int i = 0; i < m && !poly.empty(); ++i) clip_half_plane(poly, scratch, a[i], b[i], c[i]);
  return polygon_area(poly);
}

}  // namespace segsamp
