#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tunnelsense/diode.hpp"
#include "tunnelsense/errors.hpp"

namespace tunnelsense {

struct PhotoSource {
  double current_per_lux = 10e-9;    // A/lx
  double saturation_current = 50e-6; // A
};

struct StorageCap {
  double capacitance = 1431e-6;      // F
  double leakage_conductance = 1e-7; // S
};

// Voltage window in which the tag oscillates while the capacitor
// discharges. The load is either a constant calibrated current or the
// diode model's own I-V curve.
struct ActiveWindow {
  double v_high = 0.197;  // V, discharge enters the window here
  double v_low = 0.075;   // V, oscillation stops here
  enum class Load { constant, diode_curve } load = Load::constant;
  double load_current_a = 3.42e-3;  // used when load == constant
  DiodeParams diode;                // used when load == diode_curve
};

inline void validate(const PhotoSource& s) {
  require(s.current_per_lux > 0.0 && s.saturation_current > 0.0,
          errc::invalid_config, "harvest: photodiode parameters must be positive");
}

inline void validate(const StorageCap& c) {
  require(c.capacitance > 0.0, errc::invalid_config,
          "harvest: capacitance must be positive");
  require(c.leakage_conductance >= 0.0, errc::invalid_config,
          "harvest: leakage must be non-negative");
}

inline void validate(const ActiveWindow& w) {
  require(w.v_low < w.v_high, errc::invalid_config,
          "harvest: need v_low < v_high");
  if (w.load == ActiveWindow::Load::constant)
    require(w.load_current_a > 0.0, errc::invalid_config,
            "harvest: constant load current must be positive");
}

namespace detail {

// One classic RK4 step of dV/dt = f(V).
template <typename F>
double rk4_step(F&& f, double v, double dt) {
  double k1 = f(v);
  double k2 = f(v + 0.5 * dt * k1);
  double k3 = f(v + 0.5 * dt * k2);
  double k4 = f(v + dt * k3);
  return v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline double load_current(const ActiveWindow& w, const DiodeModel* diode,
                           double v) {
  if (w.load == ActiveWindow::Load::constant) return w.load_current_a;
  return diode->current(std::max(v, 0.0));
}

}  // namespace detail

// Charge a capacitor from rest under constant illumination:
// dV/dt = (min(I_ph, I_sat) - G*V) / C, integrated with RK4.
inline std::vector<std::pair<double, double>> charge_curve(
    const PhotoSource& src, const StorageCap& cap, double lux, double duration,
    double dt) {
  validate(src);
  validate(cap);
  require(lux >= 0.0, errc::invalid_argument, "harvest: lux must be non-negative");
  require(dt > 0.0 && duration >= 0.0, errc::invalid_argument,
          "harvest: need dt > 0 and duration >= 0");

  double i_ph = std::min(src.current_per_lux * lux, src.saturation_current);
  auto dv = [&](double v) {
    return (i_ph - cap.leakage_conductance * v) / cap.capacitance;
  };

  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(duration / dt) + 2);
  double t = 0.0, v = 0.0;
  out.emplace_back(t, v);
  while (t < duration) {
    double step = std::min(dt, duration - t);
    v = detail::rk4_step(dv, v, step);
    t += step;
    out.emplace_back(t, v);
  }
  return out;
}

namespace detail {

// Discharge from v_start through the window; returns (time inside
// [v_low, v_high], time from v_start until the window is entered). dt is an
// upper bound on the step: it shrinks whenever one step would move the
// voltage more than ~2 mV, which keeps the stiff post-valley branch of a
// diode load stable. Crossings are refined by linear interpolation, keeping
// the constant-load case within a hair of the closed form t = C * dV / I.
inline std::pair<double, double> discharge_through_window(
    const StorageCap& cap, const ActiveWindow& w, double v_start, double dt) {
  validate(cap);
  validate(w);
  require(dt > 0.0, errc::invalid_argument, "harvest: dt must be positive");
  require(v_start > w.v_low, errc::invalid_argument,
          "harvest: start voltage is already below the window");

  std::optional<DiodeModel> diode_model;
  if (w.load == ActiveWindow::Load::diode_curve) diode_model.emplace(w.diode);
  const DiodeModel* diode = diode_model ? &*diode_model : nullptr;
  // The load must actually discharge the capacitor everywhere it operates.
  for (double v = w.v_low; v <= w.v_high + 1e-12; v += (w.v_high - w.v_low) / 64)
    require(load_current(w, diode, v) > 0.0, errc::invalid_config,
            "harvest: load current must stay positive inside the window");

  auto dv = [&](double v) {
    return -load_current(w, diode, v) / cap.capacitance;
  };

  double t = 0.0, v = std::min(v_start, 1e3);
  double t_enter = v <= w.v_high ? 0.0 : -1.0;
  double active = 0.0;
  // Hard bound: a few times the constant-load estimate, to terminate even
  // for pathological load curves.
  double worst_i = load_current(w, diode, w.v_low);
  double t_max = 100.0 * cap.capacitance * std::max(v_start, w.v_high) /
                 std::min(worst_i, load_current(w, diode, w.v_high));
  double prev_v = v, prev_t = t;
  while (v > w.v_low && t < t_max) {
    prev_v = v;
    prev_t = t;
    double i_now = load_current(w, diode, v);
    double step =
        i_now > 0.0 ? std::min(dt, 0.002 * cap.capacitance / i_now) : dt;
    v = rk4_step(dv, v, step);
    t += step;
    if (t_enter < 0.0 && v <= w.v_high) {
      double frac = (prev_v - w.v_high) / (prev_v - v);
      t_enter = prev_t + frac * (t - prev_t);
    }
  }
  require(v <= w.v_low, errc::invalid_config,
          "harvest: discharge failed to reach v_low");
  double frac = (prev_v - w.v_low) / (prev_v - v);
  double t_exit = prev_t + frac * (t - prev_t);
  if (t_enter < 0.0) t_enter = 0.0;  // never above the window
  active = t_exit - t_enter;
  return {active, t_enter};
}

}  // namespace detail

// Time the tag spends oscillating while the capacitor discharges from
// v_start (which must be at or above the window top).
inline double active_time(const StorageCap& cap, const ActiveWindow& w,
                          double v_start, double dt) {
  validate(w);
  require(v_start >= w.v_high, errc::invalid_argument,
          "harvest: v_start must be at or above v_high");
  return detail::discharge_through_window(cap, w, v_start, dt).first;
}

struct HarvestRow {
  double capacitance_f = 0.0;
  double lux = 0.0;
  double peak_voltage_v = 0.0;
  double time_to_window_s = 0.0;  // NaN if the window is never reached
  double active_time_s = 0.0;
};

// Sweep (capacitor, lux): charge for charge_duration, read the peak
// voltage, then discharge from that peak and report when/how long the tag
// is active. A peak below the window yields zero (or partial) active time.
inline std::vector<HarvestRow> harvest_report(
    const PhotoSource& src, const std::vector<StorageCap>& caps,
    const std::vector<double>& lux_levels, const ActiveWindow& w,
    double charge_duration = 30.0, double charge_dt = 1e-3,
    double discharge_dt = 1e-5) {
  validate(src);
  validate(w);
  std::vector<HarvestRow> rows;
  rows.reserve(caps.size() * lux_levels.size());
  for (const auto& cap : caps) {
    for (double lux : lux_levels) {
      HarvestRow row;
      row.capacitance_f = cap.capacitance;
      row.lux = lux;
      auto curve = charge_curve(src, cap, lux, charge_duration, charge_dt);
      row.peak_voltage_v = curve.back().second;

      row.time_to_window_s = std::numeric_limits<double>::quiet_NaN();
      for (const auto& [t, v] : curve)
        if (v >= w.v_high) {
          row.time_to_window_s = t;
          break;
        }

      if (row.peak_voltage_v > w.v_low) {
        row.active_time_s =
            detail::discharge_through_window(cap, w, row.peak_voltage_v,
                                             discharge_dt)
                .first;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_harvest_csv(const std::vector<HarvestRow>& rows,
                              std::ostream& os) {
  os << "capacitance_f,lux,peak_voltage_v,time_to_window_s,active_time_s\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.capacitance_f, r.lux, r.peak_voltage_v, r.time_to_window_s,
                  r.active_time_s);
    os << buf;
  }
}

}  // namespace tunnelsense
