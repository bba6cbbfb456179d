#include "segsamp/segment_io.hpp"

#include <fstream>

#include "segsamp/errors.hpp"

namespace segsamp {

using nlohmann::json;

json segment_set_to_json(const SegmentSet& s) {
  json rows = json::array();
  for (int l = 0; l < s.dim(); ++l) {
    json row = json::array();
    for (int k = 0; k < s.vertex_count(); ++k) row.push_back(s.coords()(l, k));
    rows.push_back(std::move(row));
  }
  json edges = json::array();
  for (const auto& e : s.edges()) edges.push_back({e.i, e.j});
  return {{"d", s.dim()}, {"n", s.vertex_count()}, {"coordinates", rows}, {"edges", edges}};
}

SegmentSet segment_set_from_json(const json& j) {
  try {
    const int d = j.at("d").get<int>();
    const int n = j.at("n").get<int>();
    const auto& rows = j.at("coordinates");
    if (static_cast<int>(rows.size()) != d)
      throw Error(ErrorKind::BadData, "coordinates must have d rows");
    Eigen::MatrixXd x(d, n);
    for (int l = 0; l < d; ++l) {
      if (static_cast<int>(rows[l].size()) != n)
        throw Error(ErrorKind::BadData, "coordinate row " + std::to_string(l + 1) +
                                            " must have n entries");
      for (int k = 0; k < n; ++k) x(l, k) = rows[l][k].get<double>();
    }
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (e.size() != 2) throw Error(ErrorKind::BadData, "edge must be a pair");
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return build_segment_set(std::move(x), std::move(edges));
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::BadData, ex.what());
  }
}

SegmentSet read_segment_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::BadData, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::BadData, path + ": " + ex.what());
  }
  return segment_set_from_json(j);
}

void write_segment_set(const SegmentSet& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::BadData, "cannot write " + path);
  out << segment_set_to_json(s).dump(2) << '\n';
}

json report_to_json(const UniformityReport& r) {
  json adm = json::array();
  for (const auto& v : r.admissibility) adm.push_back({{"edge", v.edge}, {"coordinate", v.coordinate}});
  return {{"admissibility_violations", adm},
          {"range_violations", r.range_violations},
          {"coordinate_residuals", r.residuals},
          {"constant_sum_residuals", r.sum_residuals},
          {"max_coordinate_residual", r.max_residual()},
          {"max_constant_sum_residual", r.max_sum_residual()},
          {"uniform", r.uniform()},
          {"constant_sum", r.constant_sum()}};
}

}  // namespace segsamp
