#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace injury {

/// Calendar date with day resolution. Arithmetic is in whole days.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Strict ISO-8601 `YYYY-MM-DD`; nullopt on any deviation or impossible date.
    static std::optional<Date> parse(std::string_view text);

    std::string to_string() const;

    constexpr std::chrono::sys_days days() const { return days_; }
    constexpr long serial() const { return days_.time_since_epoch().count(); }

    constexpr Date plus_days(long n) const { return Date(days_ + std::chrono::days(n)); }
    constexpr long days_until(Date later) const { return later.serial() - serial(); }

    constexpr auto operator<=>(const Date&) const = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace injury
