#pragma once

#include <optional>
#include <string_view>

namespace pegrisk::detail {

std::string_view trim(std::string_view s) noexcept;

/// Full-string parse; rejects trailing garbage, NaN and infinities.
std::optional<double> parse_double(std::string_view s) noexcept;

}  // namespace pegrisk::detail
