#include "sigrisk/tick_io.hpp"

#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sigrisk::io {

namespace {

constexpr double kSecondsPerYear = 365.25 * 86400.0;

[[noreturn]] void fail_row(const std::string& origin, std::size_t row, const std::string& what) {
  throw std::runtime_error(origin + ", row " + std::to_string(row) + ": " + what);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::string& origin, std::size_t row) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  while (ptr != end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
  if (ec != std::errc{} || ptr != end) fail_row(origin, row, "cannot parse number '" + s + "'");
  if (!std::isfinite(value)) fail_row(origin, row, "non-finite number");
  return value;
}

// Days from civil date, Howard Hinnant's algorithm; valid over the full
// proleptic Gregorian range we care about.
long long days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

}  // namespace

TimeFormat time_format_from_string(const std::string& s) {
  if (s == "yearfrac" || s == "year_fraction") return TimeFormat::year_fraction;
  if (s == "iso8601") return TimeFormat::iso8601;
  throw std::invalid_argument("unknown time format: " + s);
}

PriceTransform price_transform_from_string(const std::string& s) {
  if (s == "raw") return PriceTransform::raw;
  if (s == "log" || s == "log_price") return PriceTransform::log_price;
  throw std::invalid_argument("unknown price transform: " + s);
}

double iso8601_to_year_fraction(const std::string& stamp) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  char date_only_end = '\0';
  int consumed = std::sscanf(stamp.c_str(), "%d-%u-%u%c", &y, &mo, &d, &date_only_end);
  if (consumed >= 3 && (consumed == 3 || date_only_end == 'T' || date_only_end == ' ')) {
    if (consumed == 4) {
      const std::size_t t_pos = stamp.find(date_only_end);
      const std::string clock = stamp.substr(t_pos + 1);
      if (std::sscanf(clock.c_str(), "%u:%u:%lf", &h, &mi, &sec) < 2)
        throw std::invalid_argument("cannot parse ISO-8601 time of day: " + stamp);
    }
  } else {
    throw std::invalid_argument("cannot parse ISO-8601 timestamp: " + stamp);
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec < 0.0 || sec >= 61.0)
    throw std::invalid_argument("ISO-8601 timestamp out of range: " + stamp);
  const double seconds =
      static_cast<double>(days_from_civil(y, mo, d)) * 86400.0 + h * 3600.0 + mi * 60.0 + sec;
  return seconds / kSecondsPerYear;
}

TickCsv read_tick_csv(std::istream& in, const TickFormat& format, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(origin + ": empty tick file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "time")
    throw std::runtime_error(origin + ": header must be 'time,<asset1>,...'");

  TickCsv out;
  out.asset_names.assign(header.begin() + 1, header.end());
  out.path.n_assets = static_cast<int>(out.asset_names.size());

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      fail_row(origin, row,
               "expected " + std::to_string(header.size()) + " fields, got " +
                   std::to_string(fields.size()));
    double t = 0.0;
    if (format.time == TimeFormat::year_fraction) {
      t = parse_double(fields[0], origin, row);
    } else {
      try {
        t = iso8601_to_year_fraction(fields[0]);
      } catch (const std::exception& e) {
        fail_row(origin, row, e.what());
      }
    }
    if (!out.path.times.empty() && !(t > out.path.times.back()))
      fail_row(origin, row, "tick time not strictly increasing");
    out.path.times.push_back(t);
    for (std::size_t a = 1; a < fields.size(); ++a) {
      double v = parse_double(fields[a], origin, row);
      if (format.transform == PriceTransform::log_price) {
        if (!(v > 0.0)) fail_row(origin, row, "log transform needs strictly positive prices");
        v = std::log(v);
      }
      out.path.values.push_back(v);
    }
  }
  if (out.path.times.size() < 2)
    throw std::runtime_error(origin + ": need at least 2 tick rows");
  return out;
}

TickCsv read_tick_csv(const std::filesystem::path& file, const TickFormat& format) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  return read_tick_csv(in, format, file.string());
}

void write_tick_csv(std::ostream& out, const TimedPath& path,
                    const std::vector<std::string>& asset_names) {
  out << "time";
  for (const auto& name : asset_names) out << ',' << name;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < path.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", path.times[i]);
    out << buf;
    auto row = path.row(i);
    for (double v : row) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace sigrisk::io
