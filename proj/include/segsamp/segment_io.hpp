#pragma once

#include <string>

#include "json.hpp"
#include "segsamp/segments.hpp"

namespace segsamp {

nlohmann::json segment_set_to_json(const SegmentSet& s);
SegmentSet segment_set_from_json(const nlohmann::json& j);

SegmentSet read_segment_set(const std::string& path);
void write_segment_set(const SegmentSet& s, const std::string& path);

nlohmann::json report_to_json(const UniformityReport& r);

}  // namespace segsamp
