#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "tunnelsense/errors.hpp"
#include "tunnelsense/fft.hpp"
#include "tunnelsense/iq.hpp"
#include "tunnelsense/trace.hpp"

namespace tunnelsense {

inline constexpr std::pair<double, double> kDefaultBand{0.08, 0.7};

struct TrackerConfig {
  std::size_t fft_length = 4096;
  std::size_t hop = 4096;
  enum class Window { hann, rectangular } window = Window::hann;
  // Offsets from center_frequency; unset means the full ±fs/2 span.
  std::optional<std::pair<double, double>> search_band;
};

struct RateEstimate {
  double bpm = 0.0;
  double confidence = 0.0;  // peak-lobe power / in-band power
  std::pair<double, double> band_hz = kDefaultBand;
};

struct AlignmentResult {
  double lag_s = 0.0;  // > 0: second trace is delayed relative to the first
  double correlation = 0.0;
};

namespace detail {

// Median of the finite entries (NaN ignored); NaN if none.
inline double finite_median(std::vector<double>& scratch) {
  if (scratch.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t mid = scratch.size() / 2;
  std::nth_element(scratch.begin(), scratch.begin() + mid, scratch.end());
  double hi = scratch[mid];
  if (scratch.size() % 2 == 1) return hi;
  double lo = *std::max_element(scratch.begin(), scratch.begin() + mid);
  return 0.5 * (lo + hi);
}

// Centered moving median, edge-truncated, NaN-aware. The window slides as a
// sorted vector: O(w) insert/erase keeps the whole pass near O(n*w) with
// tiny constants, fast enough for every trace this toolkit produces.
inline std::vector<double> moving_median(const std::vector<double>& v,
                                         std::size_t window) {
  const std::size_t n = v.size();
  const std::size_t h = window / 2;
  std::vector<double> sorted;
  sorted.reserve(window);
  auto add = [&](double x) {
    if (std::isnan(x)) return;
    sorted.insert(std::lower_bound(sorted.begin(), sorted.end(), x), x);
  };
  auto remove = [&](double x) {
    if (std::isnan(x)) return;
    sorted.erase(std::lower_bound(sorted.begin(), sorted.end(), x));
  };

  std::vector<double> out(n);
  std::size_t lo = 0, hi = 0;  // current window is [lo, hi)
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t want_lo = i > h ? i - h : 0;
    std::size_t want_hi = std::min(n, i + h + 1);
    while (hi < want_hi) add(v[hi++]);
    while (lo < want_lo) remove(v[lo++]);
    if (sorted.empty()) {
      out[i] = std::numeric_limits<double>::quiet_NaN();
    } else {
      std::size_t m = sorted.size();
      out[i] = m % 2 == 1 ? sorted[m / 2]
                          : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    }
  }
  return out;
}

inline double parabolic_delta(double left, double mid, double right) {
  if (!(left > 0.0) || !(mid > 0.0) || !(right > 0.0)) return 0.0;
  double la = std::log(left), lb = std::log(mid), lc = std::log(right);
  double denom = la - 2.0 * lb + lc;
  if (denom >= 0.0 || !std::isfinite(denom)) return 0.0;
  return std::clamp(0.5 * (la - lc) / denom, -0.5, 0.5);
}

}  // namespace detail

// STFT peak tracker: per hop, windowed FFT magnitude, argmax restricted to
// the search band, three-point parabolic interpolation on log magnitude.
// All-zero windows (receiver dropout) yield NaN, never a fabricated value.
inline FrequencyTrace track_frequency(const IQRecording& iq,
                                      const TrackerConfig& cfg) {
  const std::size_t n = cfg.fft_length;
  require(n >= 8 && (n & (n - 1)) == 0, errc::invalid_config,
          "tracker: fft_length must be a power of two (>= 8)");
  require(cfg.hop >= 1 && cfg.hop <= n, errc::invalid_config,
          "tracker: need 1 <= hop <= fft_length");
  require(iq.sample_rate > 0.0, errc::invalid_metadata,
          "tracker: recording has no sample rate");
  require(iq.samples.size() >= n, errc::invalid_argument,
          "tracker: recording shorter than one FFT window");

  const double fs = iq.sample_rate;
  double band_lo = -fs / 2.0, band_hi = fs / 2.0;
  if (cfg.search_band) {
    band_lo = cfg.search_band->first;
    band_hi = cfg.search_band->second;
    require(band_lo < band_hi && band_lo >= -fs / 2.0 && band_hi <= fs / 2.0,
            errc::invalid_config,
            "tracker: search_band must lie within +/- sample_rate/2");
  }

  std::vector<double> win(n, 1.0);
  if (cfg.window == TrackerConfig::Window::hann)
    for (std::size_t j = 0; j < n; ++j)
      win[j] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi *
                                     static_cast<double>(j) /
                                     static_cast<double>(n - 1)));

  const double df = fs / static_cast<double>(n);
  auto signed_bin = [&](std::size_t i) {
    return i < n / 2 ? static_cast<double>(i)
                     : static_cast<double>(i) - static_cast<double>(n);
  };

  FrequencyTrace trace;
  trace.sample_interval = static_cast<double>(cfg.hop) / fs;
  trace.start_time = 0.5 * static_cast<double>(n - 1) / fs;

  const std::size_t n_windows = 1 + (iq.samples.size() - n) / cfg.hop;
  trace.values.resize(n_windows);
  std::vector<std::complex<double>> buf(n);
  std::vector<double> mag(n);

  for (std::size_t w = 0; w < n_windows; ++w) {
    const std::complex<float>* src = iq.samples.data() + w * cfg.hop;
    bool all_zero = true;
    for (std::size_t j = 0; j < n; ++j) {
      buf[j] = std::complex<double>(src[j].real(), src[j].imag()) * win[j];
      if (src[j].real() != 0.0f || src[j].imag() != 0.0f) all_zero = false;
    }
    if (all_zero) {
      trace.values[w] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    fft_radix2(buf);
    for (std::size_t j = 0; j < n; ++j) mag[j] = std::abs(buf[j]);

    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double f = signed_bin(j) * df;
      if (f < band_lo || f > band_hi) continue;
      if (mag[j] > best) {
        best = mag[j];
        best_i = j;
      }
    }
    if (best <= 0.0) {
      trace.values[w] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double left = mag[(best_i + n - 1) % n];
    double right = mag[(best_i + 1) % n];
    double delta = detail::parabolic_delta(left, best, right);
    trace.values[w] = iq.center_frequency + (signed_bin(best_i) + delta) * df;
  }
  return trace;
}

// Subtract a moving-median baseline (window given in seconds, rounded to an
// odd sample count). Removes slow oscillator wander while leaving the
// breathing band intact for windows well above the breathing period.
inline FrequencyTrace detrend(const FrequencyTrace& t, double window_s) {
  validate(t);
  require(window_s > 0.0, errc::invalid_argument,
          "detrend: window must be positive");
  std::size_t w = static_cast<std::size_t>(
      std::llround(window_s / t.sample_interval));
  if (w % 2 == 0) ++w;
  require(w >= 3, errc::invalid_argument,
          "detrend: window spans fewer than 3 samples");
  auto base = detail::moving_median(t.values, w);
  FrequencyTrace out = t;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] -= base[i];
  return out;
}

// Classic Hampel outlier rejector: replace samples deviating from the
// window median by more than n_sigmas * 1.4826 * MAD. Non-outliers pass
// through bit-identically; NaN (missing) samples stay missing.
inline FrequencyTrace hampel_filter(const FrequencyTrace& t, std::size_t window,
                                    double n_sigmas) {
  validate(t);
  require(window >= 3 && window % 2 == 1, errc::invalid_argument,
          "hampel: window must be odd and >= 3");
  require(n_sigmas > 0.0, errc::invalid_argument,
          "hampel: n_sigmas must be positive");

  const std::size_t n = t.values.size();
  const std::size_t h = window / 2;
  FrequencyTrace out = t;
  std::vector<double> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(t.values[i])) continue;
    std::size_t lo = i > h ? i - h : 0;
    std::size_t hi = std::min(n, i + h + 1);
    scratch.clear();
    for (std::size_t j = lo; j < hi; ++j)
      if (!std::isnan(t.values[j])) scratch.push_back(t.values[j]);
    double med = detail::finite_median(scratch);
    for (double& x : scratch) x = std::abs(x - med);
    double mad = detail::finite_median(scratch);
    if (std::abs(t.values[i] - med) > n_sigmas * 1.4826 * mad)
      out.values[i] = med;
  }
  return out;
}

// Centered moving average, edge-truncated. The weight a truncated (or NaN)
// neighbour would have carried is assigned to the sample itself, which
// makes the kernel doubly stochastic: the trace mean is preserved exactly.
inline FrequencyTrace smooth(const FrequencyTrace& t, std::size_t window) {
  validate(t);
  require(window >= 1 && window % 2 == 1, errc::invalid_argument,
          "smooth: window must be odd and >= 1");
  const std::size_t n = t.values.size();
  const std::size_t h = window / 2;
  FrequencyTrace out = t;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(t.values[i])) continue;
    std::size_t lo = i > h ? i - h : 0;
    std::size_t hi = std::min(n, i + h + 1);
    double sum = 0.0;
    std::size_t m = 0;
    for (std::size_t j = lo; j < hi; ++j) {
      if (std::isnan(t.values[j])) continue;
      sum += t.values[j];
      ++m;
    }
    out.values[i] =
        (sum + static_cast<double>(window - m) * t.values[i]) /
        static_cast<double>(window);
  }
  return out;
}

// Interpolate across missing-sample gaps shorter than max_gap_s and split
// the trace at longer ones. Leading/trailing missing runs are trimmed.
inline std::vector<FrequencyTrace> fill_gaps(const FrequencyTrace& t,
                                             double max_gap_s = 2.0) {
  validate(t);
  const auto& v = t.values;
  const std::size_t n = v.size();
  std::size_t first = 0, last = n;
  while (first < n && std::isnan(v[first])) ++first;
  while (last > first && std::isnan(v[last - 1])) --last;
  if (first >= last) return {};

  std::vector<FrequencyTrace> out;
  FrequencyTrace seg;
  seg.sample_interval = t.sample_interval;
  seg.start_time = t.time_at(first);

  std::size_t i = first;
  while (i < last) {
    if (!std::isnan(v[i])) {
      seg.values.push_back(v[i]);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (std::isnan(v[j])) ++j;  // j < last by construction
    double gap = static_cast<double>(j - i + 1) * t.sample_interval;
    if (gap < max_gap_s) {
      double a = v[i - 1], b = v[j];
      for (std::size_t k = i; k < j; ++k) {
        double frac = static_cast<double>(k - i + 1) /
                      static_cast<double>(j - i + 1);
        seg.values.push_back(a + frac * (b - a));
      }
    } else {
      out.push_back(std::move(seg));
      seg = FrequencyTrace{};
      seg.sample_interval = t.sample_interval;
      seg.start_time = t.time_at(j);
    }
    i = j;
  }
  out.push_back(std::move(seg));
  return out;
}

inline FrequencyTrace longest_segment(const std::vector<FrequencyTrace>& segs) {
  require(!segs.empty(), errc::invalid_argument,
          "fill_gaps: no usable samples in trace");
  const FrequencyTrace* best = &segs.front();
  for (const auto& s : segs)
    if (s.duration() > best->duration()) best = &s;
  return *best;
}

// Spectral breathing-rate estimate: mean-removed trace, zero-padded FFT to
// at least 0.005 Hz resolution, in-band peak with parabolic interpolation.
// Confidence is the fraction of in-band power inside the peak's lobe (the
// contiguous monotone flanks around the maximum), 1 for a clean tone and
// near 0 for flat noise.
inline RateEstimate estimate_rate(const Trace& t,
                                  std::pair<double, double> band = kDefaultBand) {
  validate(t);
  require(band.first > 0.0 && band.second > band.first, errc::invalid_argument,
          "estimate_rate: need 0 < band.min < band.max");
  double fs = 1.0 / t.sample_interval;
  require(band.second <= fs / 2.0, errc::invalid_argument,
          "estimate_rate: band exceeds trace Nyquist frequency");
  for (double v : t.values)
    require(std::isfinite(v), errc::non_finite_samples,
            "estimate_rate: trace has missing values; fill_gaps first");
  double span = static_cast<double>(t.values.size()) * t.sample_interval;
  require(span >= 2.0 / band.first, errc::duration_too_short,
          "estimate_rate: trace shorter than two periods of band.min");

  RateEstimate est;
  est.band_hz = band;

  double m = mean(t.values);
  std::size_t nfft = next_pow2(std::max<std::size_t>(
      t.values.size(),
      static_cast<std::size_t>(std::ceil(fs / 0.005))));
  std::vector<std::complex<double>> buf(nfft);
  for (std::size_t i = 0; i < t.values.size(); ++i)
    buf[i] = t.values[i] - m;
  fft_radix2(buf);

  double df = fs / static_cast<double>(nfft);
  std::size_t lo = static_cast<std::size_t>(std::ceil(band.first / df));
  std::size_t hi = static_cast<std::size_t>(std::floor(band.second / df));
  lo = std::max<std::size_t>(lo, 1);
  hi = std::min<std::size_t>(hi, nfft / 2);
  require(lo <= hi, errc::invalid_argument,
          "estimate_rate: band contains no FFT bins");

  std::vector<double> power(hi - lo + 1);
  double total = 0.0, best = 0.0;
  std::size_t best_i = 0;
  for (std::size_t i = lo; i <= hi; ++i) {
    double p = std::norm(buf[i]);
    power[i - lo] = p;
    total += p;
    if (p > best) {
      best = p;
      best_i = i;
    }
  }
  if (!(total > 0.0) || !(best > 0.0)) return est;  // flat: confidence 0

  double left = best_i > lo ? power[best_i - 1 - lo] : std::norm(buf[best_i - 1]);
  double right = best_i < hi ? power[best_i + 1 - lo] : std::norm(buf[best_i + 1]);
  // The parabola vertex is invariant under ordinate scaling, so fitting on
  // log-power gives the same delta as log-magnitude.
  double delta = detail::parabolic_delta(left, best, right);
  double f_peak = (static_cast<double>(best_i) + delta) * df;
  est.bpm = 60.0 * std::clamp(f_peak, band.first, band.second);

  double lobe = best;
  for (std::size_t i = best_i; i > lo && power[i - 1 - lo] < power[i - lo]; --i)
    lobe += power[i - 1 - lo];
  for (std::size_t i = best_i; i < hi && power[i + 1 - lo] < power[i - lo]; ++i)
    lobe += power[i + 1 - lo];
  est.confidence = std::clamp(lobe / total, 0.0, 1.0);
  return est;
}

// Time-domain cross-check: count prominence-filtered local maxima.
// Confidence reflects the regularity of the inter-peak intervals.
inline RateEstimate count_breaths(const Trace& t, double min_prominence) {
  validate(t);
  require(min_prominence > 0.0, errc::invalid_argument,
          "count_breaths: min_prominence must be positive");
  const auto& v = t.values;
  const std::size_t n = v.size();
  require(n >= 3, errc::insufficient_cycles,
          "count_breaths: insufficient cycles");
  for (double x : v)
    require(std::isfinite(x), errc::non_finite_samples,
            "count_breaths: trace has missing values; fill_gaps first");

  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
    double left_min = v[i], right_min = v[i];
    for (std::size_t j = i; j-- > 0;) {
      if (v[j] > v[i]) break;
      left_min = std::min(left_min, v[j]);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (v[j] > v[i]) break;
      right_min = std::min(right_min, v[j]);
    }
    double prominence = v[i] - std::max(left_min, right_min);
    if (prominence >= min_prominence) peaks.push_back(i);
  }
  require(peaks.size() >= 2, errc::insufficient_cycles,
          "count_breaths: insufficient cycles");

  double span = static_cast<double>(peaks.back() - peaks.front()) *
                t.sample_interval;
  RateEstimate est;
  est.band_hz = {0.0, 0.0};
  est.bpm = 60.0 * static_cast<double>(peaks.size() - 1) / span;

  std::vector<double> gaps(peaks.size() - 1);
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i)
    gaps[i] = static_cast<double>(peaks[i + 1] - peaks[i]) * t.sample_interval;
  double gm = mean(gaps);
  double gs = std::sqrt(variance(gaps));
  est.confidence = gm > 0.0 ? std::clamp(1.0 - gs / gm, 0.0, 1.0) : 0.0;
  return est;
}

// Normalized cross-correlation alignment. Both traces are resampled to the
// finer of the two rates over their overlap, and lags up to 25% of the
// overlap are scanned; the returned lag maximizes |correlation| (ties go to
// the smallest |lag|), with the signed correlation at that lag. Positive
// lag means b is delayed relative to a.
inline AlignmentResult align(const Trace& a, const Trace& b) {
  validate(a);
  validate(b);
  require(!a.empty() && !b.empty(), errc::invalid_argument, "align: empty trace");

  double t0 = std::max(a.start_time, b.start_time);
  double t1 = std::min(a.end_time(), b.end_time());
  require(t1 - t0 >= 10.0, errc::insufficient_overlap,
          "align: traces overlap less than 10 s");

  double dt = std::min(a.sample_interval, b.sample_interval);
  std::size_t n = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9)) + 1;
  Trace ra = resample(a, t0, dt, n);
  Trace rb = resample(b, t0, dt, n);
  for (std::size_t i = 0; i < n; ++i)
    require(std::isfinite(ra.values[i]) && std::isfinite(rb.values[i]),
            errc::non_finite_samples,
            "align: trace has missing values; fill_gaps first");
  require(variance(ra.values) > 0.0 && variance(rb.values) > 0.0,
          errc::zero_variance, "align: zero-variance input");

  auto pearson = [&](long lag) {
    std::size_t ia = lag < 0 ? static_cast<std::size_t>(-lag) : 0;
    std::size_t ib = lag > 0 ? static_cast<std::size_t>(lag) : 0;
    std::size_t m = n - static_cast<std::size_t>(std::abs(lag));
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      ma += ra.values[ia + i];
      mb += rb.values[ib + i];
    }
    ma /= static_cast<double>(m);
    mb /= static_cast<double>(m);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double xa = ra.values[ia + i] - ma;
      double xb = rb.values[ib + i] - mb;
      sab += xa * xb;
      saa += xa * xa;
      sbb += xb * xb;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
    return sab / std::sqrt(saa * sbb);
  };

  long max_lag = static_cast<long>(n / 4);
  AlignmentResult best;
  double best_abs = -1.0;
  for (long lag = -max_lag; lag <= max_lag; ++lag) {
    // corr(a[i], b[i + lag]): sliding b left by `lag` samples.
    double c = pearson(lag);
    double abs_c = std::abs(c);
    bool better = abs_c > best_abs * (1.0 + 1e-12) + 1e-15;
    bool tie = std::abs(abs_c - best_abs) <=
               1e-12 * std::max(1.0, best_abs) &&
               std::abs(lag) * dt < std::abs(best.lag_s);
    if (better || tie) {
      best_abs = abs_c;
      best.lag_s = static_cast<double>(lag) * dt;
      best.correlation = c;
    }
  }
  return best;
}

}  // namespace tunnelsense
