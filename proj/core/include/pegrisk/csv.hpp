#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pegrisk::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_line(std::string_view line);

/// Shortest text that survives a round trip: 17 significant digits, "%.17g".
std::string format_double(double value);

struct Row {
    std::size_t line_no = 0;  // 1-based physical line in the source
    std::vector<std::string> fields;
};

/// Header-first CSV reader. Strips a UTF-8 BOM and trailing '\r', skips blank lines.
class Reader {
public:
    explicit Reader(std::istream& in);

    [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
    [[nodiscard]] bool has_header() const { return has_header_; }

    /// Index of a header column, or nullopt.
    [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const;

    bool next(Row& row);

private:
    std::istream& in_;
    std::vector<std::string> header_;
    bool has_header_ = false;
    std::size_t line_no_ = 0;
};

}  // namespace pegrisk::csv
