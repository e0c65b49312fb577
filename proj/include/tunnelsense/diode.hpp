#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "tunnelsense/errors.hpp"

namespace tunnelsense {

// Parameters of the tunnel diode I-V characteristic. Peak voltage/current
// are device data; valley current and the excess-branch scale are
// calibration knobs (data sheets rarely state them) and can be overridden
// from config.
struct DiodeParams {
  double v_peak = 0.070;          // V
  double i_peak = 1.0e-3;         // A
  double v_valley = 0.150;        // V
  double i_valley = 0.12e-3;      // A
  double v_excess_scale = 0.040;  // V, e-folding of the post-valley branch
};

// Compact tunnel-diode model:
//
//   I(v) = A * (v/v_p) * exp((1 - (v/v_p)^k) / k) + a * exp((v - v_v) / s)
//
// The first term is the tunneling current (k = 1 gives the textbook
// i_p*(v/v_p)*exp(1 - v/v_p) form), the second the excess/injection
// current that forms the rising post-valley branch. Construction solves
// (A, a, k) so that the curve passes through the peak exactly and has its
// local minimum exactly at the valley point:
//
//   I(v_peak)    = i_peak
//   I(v_valley)  = i_valley
//   I'(v_valley) = 0
//
// The fixed k = 1 form cannot satisfy these anchors when the valley sits
// close to the peak (the tunneling term still carries ~0.68*i_peak at
// 150 mV for a 70 mV peak), hence the solved steepness exponent.
class DiodeModel {
 public:
  explicit DiodeModel(const DiodeParams& p = {}) : p_(p) {
    require(p.v_peak > 0.0 && p.v_peak < p.v_valley, errc::invalid_config,
            "diode: need 0 < v_peak < v_valley");
    require(p.i_valley > 0.0 && p.i_valley < p.i_peak, errc::invalid_config,
            "diode: need 0 < i_valley < i_peak");
    require(p.v_excess_scale > 0.0, errc::invalid_config,
            "diode: v_excess_scale must be positive");
    solve_anchors();
  }

  const DiodeParams& params() const { return p_; }
  double tunnel_scale() const { return tunnel_scale_; }
  double excess_coeff() const { return excess_coeff_; }
  double steepness() const { return steepness_; }

  double current(double v) const {
    require(v >= 0.0, errc::invalid_argument,
            "diode: bias voltage must be non-negative");
    return tunnel_scale_ * shape(v) + excess_coeff_ * excess(v);
  }

  // dI/dV in closed form.
  double conductance(double v) const {
    require(v >= 0.0, errc::invalid_argument,
            "diode: bias voltage must be non-negative");
    return tunnel_scale_ * shape_deriv(v) +
           excess_coeff_ / p_.v_excess_scale * excess(v);
  }

 private:
  double shape(double v) const {
    double u = v / p_.v_peak;
    double uk = std::pow(u, steepness_);
    return u * std::exp((1.0 - uk) / steepness_);
  }

  double shape_deriv(double v) const {
    double u = v / p_.v_peak;
    double uk = std::pow(u, steepness_);
    return (1.0 - uk) * std::exp((1.0 - uk) / steepness_) / p_.v_peak;
  }

  double excess(double v) const {
    return std::exp((v - p_.v_valley) / p_.v_excess_scale);
  }

  void solve_anchors() {
    const double s = p_.v_excess_scale;
    const double decay = std::exp((p_.v_peak - p_.v_valley) / s);
    const double target = p_.i_valley / p_.i_peak;

    // With a = -s*A*shape'(v_v) (valley slope anchor), the valley-to-peak
    // current ratio is a function of k alone; bracket and bisect it.
    auto ratio = [&](double k) {
      double u = p_.v_valley / p_.v_peak;
      double uk = std::pow(u, k);
      double e = std::exp((1.0 - uk) / k);
      double sh = u * e;
      double dsh = (1.0 - uk) * e / p_.v_peak;
      return (sh - s * dsh) / (1.0 - s * dsh * decay);
    };

    double lo = 1.0, hi = 64.0;
    require(ratio(lo) > target, errc::invalid_config,
            "diode: i_valley too large to anchor the valley for these "
            "peak/valley voltages");
    require(ratio(hi) < target, errc::invalid_config,
            "diode: valley anchor out of reach (parameters degenerate)");
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (ratio(mid) > target ? lo : hi) = mid;
    }
    steepness_ = 0.5 * (lo + hi);

    double u = p_.v_valley / p_.v_peak;
    double uk = std::pow(u, steepness_);
    double e = std::exp((1.0 - uk) / steepness_);
    double dsh = (1.0 - uk) * e / p_.v_peak;
    tunnel_scale_ = p_.i_valley / (u * e - s * dsh);
    excess_coeff_ = -s * tunnel_scale_ * dsh;
  }

  DiodeParams p_;
  double tunnel_scale_ = 0.0;
  double excess_coeff_ = 0.0;
  double steepness_ = 1.0;
};

struct BiasPoint {
  double voltage = 0.0;                  // V
  double current = 0.0;                  // A
  double power = 0.0;                    // W
  double differential_conductance = 0.0; // S
};

inline double iv_current(const DiodeModel& m, double v) { return m.current(v); }

inline double differential_conductance(const DiodeModel& m, double v) {
  return m.conductance(v);
}

// Both roots of dI/dV = 0 bracketing the negative-resistance region.
// A coarse 1 mV sign-change scan locates the brackets; bisection then
// refines each root far below the 0.1 mV resolution the callers need, so
// the endpoints are numerical fixed points of the conductance.
inline std::pair<double, double> ndr_region(const DiodeModel& m) {
  const double v_hi = 2.0 * m.params().v_valley;
  const double step = 1e-3;

  auto bisect = [&](double a, double b) {
    bool rising = m.conductance(a) > 0.0;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (a + b);
      ((m.conductance(mid) > 0.0) == rising ? a : b) = mid;
    }
    return 0.5 * (a + b);
  };

  double first = -1.0, second = -1.0;
  double prev_v = step, prev_g = m.conductance(step);
  for (double v = 2 * step; v <= v_hi + step; v += step) {
    double g = m.conductance(v);
    if (prev_g > 0.0 && g <= 0.0 && first < 0.0) {
      first = bisect(prev_v, v);
    } else if (prev_g < 0.0 && g >= 0.0 && first >= 0.0) {
      second = bisect(prev_v, v);
      break;
    }
    prev_v = v;
    prev_g = g;
  }
  require(first >= 0.0 && second >= 0.0, errc::no_ndr_region,
          "diode: conductance never changes sign; no NDR region");
  return {first, second};
}

inline BiasPoint bias_point(const DiodeModel& m, double v_bias) {
  BiasPoint bp;
  bp.voltage = v_bias;
  bp.current = m.current(v_bias);
  bp.power = v_bias * bp.current;
  bp.differential_conductance = m.conductance(v_bias);
  return bp;
}

}  // namespace tunnelsense
