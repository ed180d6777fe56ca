#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace pegrisk {

/// UTC calendar date; the join key for daily bars.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    constexpr Date(int year, unsigned month, unsigned day)
        : days_(std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                            std::chrono::day{day}}) {}

    /// Accepts "YYYY-MM-DD" optionally followed by a time part ("T..." or " ...");
    /// the time part is ignored. Returns nullopt on anything else.
    static std::optional<Date> parse(std::string_view text);

    [[nodiscard]] std::string iso() const;
    [[nodiscard]] constexpr std::chrono::sys_days days() const { return days_; }
    [[nodiscard]] constexpr Date plus_days(int n) const { return Date{days_ + std::chrono::days{n}}; }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace pegrisk
