#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "qna/error.hpp"

namespace qna {

/// Calendar day. Thin wrapper over sys_days so dates order, hash and diff
/// as plain integers.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  constexpr Date(int year, unsigned month, unsigned day)
      : days_(std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}) {}

  /// Parses strict ISO-8601 `YYYY-MM-DD`.
  static Date parse(std::string_view text) {
    auto digits = [&](std::size_t from, std::size_t count, int& out) {
      out = 0;
      for (std::size_t i = from; i < from + count; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') return false;
        out = out * 10 + (c - '0');
      }
      return true;
    };
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !digits(0, 4, y) ||
        !digits(5, 2, m) || !digits(8, 2, d)) {
      fail(ErrorKind::parse, "invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) fail(ErrorKind::parse, "invalid calendar date '" + std::string(text) + "'");
    return Date(std::chrono::sys_days(ymd));
  }

  std::string iso() const {
    const std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
  }

  constexpr std::chrono::sys_days days() const { return days_; }
  constexpr long serial() const { return days_.time_since_epoch().count(); }

  constexpr bool is_weekend() const {
    const std::chrono::weekday wd{days_};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
  }

  constexpr Date plus_days(long n) const { return Date(days_ + std::chrono::days{n}); }

  /// Next Monday-to-Friday day strictly after this one.
  constexpr Date next_business_day() const {
    Date d = plus_days(1);
    while (d.is_weekend()) d = d.plus_days(1);
    return d;
  }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace qna
