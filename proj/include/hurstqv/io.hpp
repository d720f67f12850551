#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "hurstqv/errors.hpp"
#include "hurstqv/sample_path.hpp"

namespace hurstqv {

namespace detail {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double_field(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw IoError("csv: cannot parse number '" + std::string(field) + "' on line " +
                  std::to_string(line_no));
  return v;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace detail

/// Writes the path as CSV `j,t,x` (plus a `b` driver column when given);
/// t = j*T/m and all reals carry 17 significant digits.
inline void write_path_csv(std::ostream& os, const SamplePath& path,
                           const SamplePath* driver = nullptr) {
  if (driver != nullptr && driver->steps() != path.steps())
    throw DomainError("write_path_csv: driver grid does not match path grid");
  os << (driver ? "j,t,x,b\n" : "j,t,x\n");
  for (std::size_t j = 0; j <= path.steps(); ++j) {
    os << j << ',' << detail::format_g17(path.time_at(j)) << ','
       << detail::format_g17(path.values[j]);
    if (driver) os << ',' << detail::format_g17(driver->values[j]);
    os << '\n';
  }
}

/// Reads a `j,t,x[,b]` CSV back into a SamplePath (the driver column, when
/// present, is ignored). The time column must be a uniform grid starting at 0,
/// within 1e-9 relative; j must run 0..m in order.
inline SamplePath read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "j,t,x" && line != "j,t,x,b")
    throw IoError("csv: expected header 'j,t,x' (optionally with driver column 'b'), got '" +
                  line + "'");

  std::vector<double> times;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() < 3)
      throw IoError("csv: expected at least 3 columns on line " + std::to_string(line_no));
    const double j = detail::parse_double_field(fields[0], line_no);
    if (j != static_cast<double>(values.size()))
      throw IoError("csv: index column must run 0..m in order (line " +
                    std::to_string(line_no) + ")");
    times.push_back(detail::parse_double_field(fields[1], line_no));
    values.push_back(detail::parse_double_field(fields[2], line_no));
    if (!std::isfinite(values.back()))
      throw IoError("csv: non-finite value on line " + std::to_string(line_no));
  }
  if (values.size() < 2) throw IoError("csv: need at least two grid points");

  const std::size_t m = values.size() - 1;
  const double horizon = times.back();
  if (!(horizon > 0.0)) throw IoError("csv: final time must be positive");
  for (std::size_t j = 0; j <= m; ++j) {
    const double expected = horizon * static_cast<double>(j) / static_cast<double>(m);
    if (std::abs(times[j] - expected) > 1e-9 * horizon)
      throw IoError("csv: non-uniform time grid at row " + std::to_string(j) +
                    " (estimators require uniform spacing)");
  }
  return SamplePath(horizon, std::move(values));
}

}  // namespace hurstqv
