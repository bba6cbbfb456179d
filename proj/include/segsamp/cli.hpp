#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace segsamp {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 validation failure or library error, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::uint64_t fnv1a(const std::string& text);

}  // namespace segsamp
