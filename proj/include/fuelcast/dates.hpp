#pragma once

#include <chrono>
#include <string>

namespace fuelcast {

/// Calendar date at daily resolution. Stored as days since the epoch so
/// consecutive-day arithmetic is exact and timezone-free.
using Date = std::chrono::sys_days;

/// Strict `YYYY-MM-DD` parser; rejects short forms and invalid calendar
/// dates (throws Error{Parse}).
Date parse_date(const std::string& iso);

std::string format_date(Date d);

}  // namespace fuelcast
