#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "tunnelsense/diode.hpp"
#include "tunnelsense/errors.hpp"

namespace tunnelsense {

struct ResonantCircuit {
  double inductance_h = 3.36e-9;     // H
  double capacitance_f = 10.0e-12;   // F
  double load_conductance_s = 1e-3;  // S, tank losses seen by the diode
};

struct OscillatorConfig {
  ResonantCircuit circuit;
  double nominal_bias_v = 0.100;             // V, mid-NDR operating point
  double bias_sensitivity_hz_per_v = 1.0e6;  // Hz/V, linearized bias pulling
  double tx_power_dbm = -19.0;               // dBm radiated
  double phase_noise_diffusion = 100.0;      // rad^2/s Wiener phase noise
  double frequency_diffusion = 50.0;         // Hz^2/s slow random-walk drift
};

// Distance-to-capacitance coupling of a nearby reflector on the tank:
// delta_c(d) = gain(material) * delta_c_ref_f * (d_ref_m / d)^falloff_exponent.
// Material gains follow the observed ordering metal > torso > wood/plastic.
struct PullingModel {
  double delta_c_ref_f = 0.2e-15;  // F at the reference distance
  double d_ref_m = 0.1;            // m
  double falloff_exponent = 2.0;
  std::map<std::string, double> materials = {
      {"human-torso", 1.0}, {"metal", 1.5}, {"wood", 0.3}, {"plastic", 0.2}};
};

inline void validate(const ResonantCircuit& c) {
  require(c.inductance_h > 0.0 && c.capacitance_f > 0.0 &&
              c.load_conductance_s > 0.0,
          errc::invalid_config, "circuit: L, C, load conductance must be positive");
}

inline double resonant_frequency(const ResonantCircuit& c) {
  validate(c);
  return 1.0 / (2.0 * std::numbers::pi *
                std::sqrt(c.inductance_h * c.capacitance_f));
}

// Start-up criterion: the diode's negative conductance must at least cancel
// the tank losses, and the bias must sit strictly inside the NDR region.
inline bool oscillation_sustained(const DiodeModel& diode,
                                  const OscillatorConfig& cfg) {
  validate(cfg.circuit);
  auto [lo, hi] = ndr_region(diode);
  if (!(cfg.nominal_bias_v > lo && cfg.nominal_bias_v < hi)) return false;
  return std::abs(diode.conductance(cfg.nominal_bias_v)) >=
         cfg.circuit.load_conductance_s;
}

inline double material_gain(const PullingModel& pm, const std::string& material) {
  auto it = pm.materials.find(material);
  if (it == pm.materials.end()) {
    std::string known;
    for (const auto& [label, gain] : pm.materials) {
      if (!known.empty()) known += ", ";
      known += label;
    }
    fail(errc::unknown_material,
         "pulling: unknown material '" + material + "' (known: " + known + ")");
  }
  return it->second;
}

inline double coupling_delta_c(const PullingModel& pm, double distance_m,
                               const std::string& material = "human-torso") {
  require(distance_m > 0.0, errc::invalid_argument,
          "pulling: distance must be positive");
  require(pm.delta_c_ref_f >= 0.0 && pm.d_ref_m > 0.0 &&
              pm.falloff_exponent > 0.0,
          errc::invalid_config, "pulling: invalid model parameters");
  return material_gain(pm, material) * pm.delta_c_ref_f *
         std::pow(pm.d_ref_m / distance_m, pm.falloff_exponent);
}

// Exact pulled resonance, not the first-order expansion: capacitive loading
// delta_c shifts the oscillator to f0 / sqrt(1 + delta_c / C).
inline double pulled_frequency(double f0, const ResonantCircuit& c,
                               double delta_c_f) {
  validate(c);
  require(delta_c_f > -c.capacitance_f, errc::invalid_argument,
          "pulling: delta_c must exceed -C (total capacitance positive)");
  return f0 / std::sqrt(1.0 + delta_c_f / c.capacitance_f);
}

inline double bias_frequency_offset(const OscillatorConfig& cfg, double v_bias) {
  return cfg.bias_sensitivity_hz_per_v * (v_bias - cfg.nominal_bias_v);
}

// Free-space path loss in dB for distance in metres and frequency in Hz;
// the constant folds 20*log10(4*pi/c) for isotropic antennas.
inline double fspl_db(double distance_m, double frequency_hz) {
  require(distance_m > 0.0 && frequency_hz > 0.0, errc::invalid_argument,
          "link: distance and frequency must be positive");
  return 20.0 * std::log10(distance_m) + 20.0 * std::log10(frequency_hz) -
         147.55;
}

inline double link_budget_dbm(double tx_power_dbm, double distance_m,
                              double frequency_hz) {
  return tx_power_dbm - fspl_db(distance_m, frequency_hz);
}

}  // namespace tunnelsense
