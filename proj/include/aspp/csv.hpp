#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "aspp/estimator.hpp"

namespace aspp {

/// Shortest decimal form that parses back to the same double (also handles
/// inf/nan). All numeric CSV output goes through this.
std::string format_double(double value);

/// Strict full-string double parse; throws Error on failure.
double parse_double(std::string_view text);

std::string iso_date(std::chrono::sys_days day);

/// Parses YYYY-MM-DD; throws Error on malformed or non-existent dates.
std::chrono::sys_days parse_iso_date(std::string_view text);

/// FNV-1a 64-bit checksum, used for the reproducibility manifest.
std::uint64_t fnv1a64(std::string_view bytes);

struct PriceCsvResult {
    PriceSeries series;
    std::size_t skipped_rows = 0;  ///< rows dropped for an empty or "null" close
};

/// Loads a daily-close CSV (Yahoo-export compatible: header row, extra columns
/// ignored, "null"/empty closes skipped with a warning count). Dates are
/// ISO-8601; closes must be positive. Output is sorted by date. `min_rows`
/// lets the caller enforce the window-dependent minimum length.
PriceCsvResult load_price_csv(const std::filesystem::path& path,
                              std::string_view date_column = "Date",
                              std::string_view close_column = "Close", std::size_t min_rows = 0);

}  // namespace aspp
