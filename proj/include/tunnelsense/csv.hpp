#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tunnelsense/errors.hpp"
#include "tunnelsense/trace.hpp"

namespace tunnelsense {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  const char* c = s.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  require(end != c && *end == '\0', errc::invalid_argument,
          "csv: cannot parse " + what + " from '" + s + "'");
  return v;
}

// Shortest decimal that round-trips the double exactly.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_trace_csv(const Trace& t, const std::string& path,
                            const std::string& value_header = "frequency_hz") {
  validate(t);
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), errc::io_error, "csv: cannot open '" + path + "' for writing");
  f << "time_s," << value_header << "\n";
  for (std::size_t i = 0; i < t.values.size(); ++i)
    f << detail::fmt_g17(t.time_at(i)) << "," << detail::fmt_g17(t.values[i])
      << "\n";
  require(f.good(), errc::io_error, "csv: short write to '" + path + "'");
}

// Parse a two-column trace CSV. The header must name `time_s` and the given
// value column (a column merely containing the stem, e.g. "force", is
// accepted as a fallback). Non-uniform timestamps are resampled onto a
// uniform grid whose interval is the median of the diffs.
inline Trace read_trace_csv(const std::string& path,
                            const std::string& value_column) {
  std::ifstream f(path);
  require(f.good(), errc::io_error, "csv: cannot open '" + path + "'");

  std::string line;
  require(static_cast<bool>(std::getline(f, line)), errc::missing_column,
          "csv: empty file '" + path + "'");
  auto header = detail::split_csv_line(line);

  auto find_col = [&](const std::string& exact, const std::string& stem) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == exact) return static_cast<long>(i);
    for (std::size_t i = 0; i < header.size(); ++i) {
      std::string low = header[i];
      std::transform(low.begin(), low.end(), low.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (low.find(stem) != std::string::npos) return static_cast<long>(i);
    }
    return -1L;
  };
  std::string stem = value_column.substr(0, value_column.find('_'));
  long ti = find_col("time_s", "time");
  long vi = find_col(value_column, stem);
  require(ti >= 0, errc::missing_column, "csv: no time_s column in '" + path + "'");
  require(vi >= 0, errc::missing_column,
          "csv: no " + value_column + " column in '" + path + "'");

  std::vector<double> times, vals;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    require(cells.size() > static_cast<std::size_t>(std::max(ti, vi)),
            errc::invalid_argument,
            "csv: row " + std::to_string(lineno) + " has too few columns");
    times.push_back(detail::parse_double(cells[ti], "time"));
    vals.push_back(detail::parse_double(cells[vi], "value"));
  }
  require(times.size() >= 2, errc::invalid_argument,
          "csv: need at least 2 data rows in '" + path + "'");
  for (std::size_t i = 1; i < times.size(); ++i)
    require(times[i] > times[i - 1], errc::non_monotonic_time,
            "csv: time column not strictly increasing at row " +
                std::to_string(i + 2));

  std::vector<double> diffs(times.size() - 1);
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    diffs[i] = times[i + 1] - times[i];
  std::vector<double> sorted = diffs;
  std::sort(sorted.begin(), sorted.end());
  double dt = sorted[sorted.size() / 2];

  bool uniform = true;
  for (double d : diffs)
    if (std::abs(d - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
      uniform = false;
      break;
    }

  Trace raw;
  raw.start_time = times.front();
  raw.sample_interval = dt;
  raw.values = vals;
  if (uniform) return raw;

  // Irregular grid: interpolate sample-by-sample against the true times.
  double span = times.back() - times.front();
  std::size_t n = static_cast<std::size_t>(std::floor(span / dt + 1e-9)) + 1;
  Trace out;
  out.start_time = times.front();
  out.sample_interval = dt;
  out.values.resize(n);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double t = times.front() + static_cast<double>(i) * dt;
    while (j + 2 < times.size() && times[j + 1] <= t) ++j;
    double frac = (t - times[j]) / (times[j + 1] - times[j]);
    frac = std::clamp(frac, 0.0, 1.0);
    out.values[i] = vals[j] + frac * (vals[j + 1] - vals[j]);
  }
  return out;
}

inline FrequencyTrace read_frequency_csv(const std::string& path) {
  return read_trace_csv(path, "frequency_hz");
}

inline RespTrace read_resp_csv(const std::string& path) {
  return read_trace_csv(path, "force_n");
}

}  // namespace tunnelsense
