#pragma once

// Tick CSV ingestion: header `time,<asset1>,<asset2>,...`, one row per tick.
// Times are decimal year fractions or ISO-8601 timestamps (converted on an
// ACT/365.25 basis from the Unix epoch); prices pass through raw or as
// log-prices per the ingestion config. Malformed rows are reported with
// their row number.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sigrisk/path_signature.hpp"

namespace sigrisk::io {

enum class TimeFormat { year_fraction, iso8601 };
enum class PriceTransform { raw, log_price };

struct TickFormat {
  TimeFormat time = TimeFormat::year_fraction;
  PriceTransform transform = PriceTransform::log_price;
};

TimeFormat time_format_from_string(const std::string& s);
PriceTransform price_transform_from_string(const std::string& s);

// Seconds since the Unix epoch of an ISO-8601 timestamp
// (YYYY-MM-DD[THH:MM:SS[.fraction]][Z]), then scaled by 365.25 * 86400.
double iso8601_to_year_fraction(const std::string& stamp);

struct TickCsv {
  std::vector<std::string> asset_names;
  TimedPath path;
};

TickCsv read_tick_csv(std::istream& in, const TickFormat& format, const std::string& origin);
TickCsv read_tick_csv(const std::filesystem::path& file, const TickFormat& format);

void write_tick_csv(std::ostream& out, const TimedPath& path,
                    const std::vector<std::string>& asset_names);

}  // namespace sigrisk::io
