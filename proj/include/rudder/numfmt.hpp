#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rudder {

// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

// Whole-string parse; nullopt on any trailing garbage. Accepts "nan"/"inf",
// callers that need finite values check separately.
std::optional<double> parse_double(std::string_view text);
std::optional<std::uint64_t> parse_u64(std::string_view text);

// Splits on runs of ASCII whitespace.
std::vector<std::string_view> split_ws(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace rudder
