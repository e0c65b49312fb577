#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "tunnelsense/errors.hpp"

namespace tunnelsense {

// Uniformly sampled time series. The frequency tracker marks dropped
// windows as NaN ("missing"), so values are not guaranteed finite unless a
// stage has filled or split the gaps.
struct Trace {
  double start_time = 0.0;      // s
  double sample_interval = 0.0; // s, > 0
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double time_at(std::size_t i) const {
    return start_time + static_cast<double>(i) * sample_interval;
  }
  double end_time() const {
    return values.empty() ? start_time : time_at(values.size() - 1);
  }
  // Span covered by the samples (first to last timestamp).
  double duration() const {
    return values.empty() ? 0.0
                          : static_cast<double>(values.size() - 1) * sample_interval;
  }
};

// The same container carries oscillator frequency in Hz and belt force in N.
using FrequencyTrace = Trace;
using RespTrace = Trace;

inline bool is_missing(double v) { return std::isnan(v); }

inline void validate(const Trace& t) {
  require(t.sample_interval > 0.0, errc::invalid_argument,
          "trace: sample_interval must be positive");
}

// Linear interpolation at time t, clamped to the end values outside the
// sampled span. NaN neighbours propagate.
inline double value_at(const Trace& t, double time) {
  validate(t);
  require(!t.empty(), errc::invalid_argument, "trace: empty");
  double x = (time - t.start_time) / t.sample_interval;
  if (x <= 0.0) return t.values.front();
  double last = static_cast<double>(t.values.size() - 1);
  if (x >= last) return t.values.back();
  std::size_t i = static_cast<std::size_t>(x);
  double frac = x - static_cast<double>(i);
  return t.values[i] + frac * (t.values[i + 1] - t.values[i]);
}

// Resample onto a uniform grid [t0, t0 + n*dt) by linear interpolation.
inline Trace resample(const Trace& t, double t0, double dt, std::size_t n) {
  require(dt > 0.0, errc::invalid_argument, "resample: dt must be positive");
  Trace out;
  out.start_time = t0;
  out.sample_interval = dt;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] = value_at(t, t0 + static_cast<double>(i) * dt);
  return out;
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace tunnelsense
