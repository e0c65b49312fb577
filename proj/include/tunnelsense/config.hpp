#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tunnelsense/diode.hpp"
#include "tunnelsense/dsp.hpp"
#include "tunnelsense/errors.hpp"
#include "tunnelsense/harvest.hpp"
#include "tunnelsense/oscillator.hpp"
#include "tunnelsense/scene.hpp"

namespace tunnelsense {

struct SceneConfig {
  double duration_s = 60.0;
  double trace_rate_hz = 20.0;
  double iq_sample_rate_hz = 1e6;
  std::string material = "human-torso";
};

struct PipelineConfig {
  double detrend_window_s = 30.0;
  std::size_t hampel_window = 11;
  double hampel_n_sigmas = 3.0;
  std::size_t smooth_window = 5;
  std::pair<double, double> band = kDefaultBand;
  double max_gap_s = 2.0;
};

struct HarvestConfig {
  PhotoSource source;
  double leakage_conductance_s = 1e-7;
  std::vector<double> capacitances_uf = {220, 330, 440, 660, 1431};
  std::vector<double> lux_levels = {200, 500, 1000, 5000, 10000};
  ActiveWindow window;
  double charge_duration_s = 30.0;
  double charge_dt_s = 1e-3;
  double discharge_dt_s = 1e-5;

  std::vector<StorageCap> caps() const {
    std::vector<StorageCap> out;
    out.reserve(capacitances_uf.size());
    for (double uf : capacitances_uf)
      out.push_back({uf * 1e-6, leakage_conductance_s});
    return out;
  }
};

struct RunConfig {
  std::uint64_t seed = 1;
  DiodeParams diode;
  OscillatorConfig oscillator;
  PullingModel pulling;
  BreathingProfile breathing;
  EnvironmentProfile environment = static_indoor();
  SceneConfig scene;
  TrackerConfig tracker;
  PipelineConfig pipeline;
  HarvestConfig harvest;
};

namespace detail {

// Strict section reader: every key present must be known and well-typed, so
// config typos fail loudly instead of silently running with defaults.
class Section {
 public:
  Section(const nlohmann::json& j, std::string name)
      : j_(j), name_(std::move(name)) {
    require(j.is_object(), errc::invalid_config,
            "config: '" + name_ + "' must be a JSON object");
  }

  ~Section() = default;

  void number(const char* key, double& out) {
    if (!mark(key)) return;
    require(j_[key].is_number(), errc::invalid_config, where(key) + " must be a number");
    out = j_[key].get<double>();
  }

  void integer(const char* key, std::uint64_t& out) {
    if (!mark(key)) return;
    require(j_[key].is_number_integer() && j_[key].get<std::int64_t>() >= 0,
            errc::invalid_config, where(key) + " must be a non-negative integer");
    out = j_[key].get<std::uint64_t>();
  }

  void size(const char* key, std::size_t& out) {
    std::uint64_t v = out;
    integer(key, v);
    out = static_cast<std::size_t>(v);
  }

  void text(const char* key, std::string& out) {
    if (!mark(key)) return;
    require(j_[key].is_string(), errc::invalid_config, where(key) + " must be a string");
    out = j_[key].get<std::string>();
  }

  void numbers(const char* key, std::vector<double>& out) {
    if (!mark(key)) return;
    require(j_[key].is_array(), errc::invalid_config, where(key) + " must be an array");
    out.clear();
    for (const auto& v : j_[key]) {
      require(v.is_number(), errc::invalid_config,
              where(key) + " must contain only numbers");
      out.push_back(v.get<double>());
    }
  }

  void pair(const char* key, std::pair<double, double>& out) {
    std::vector<double> v = {out.first, out.second};
    numbers(key, v);
    require(v.size() == 2, errc::invalid_config, where(key) + " must be [lo, hi]");
    out = {v[0], v[1]};
  }

  bool has(const char* key) { return j_.contains(key); }

  const nlohmann::json& sub(const char* key) {
    mark(key);
    return j_[key];
  }

  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      require(seen_.count(it.key()) != 0, errc::invalid_config,
              "config: unknown key '" + name_ + "." + it.key() + "'");
  }

 private:
  bool mark(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  std::string where(const char* key) const {
    return "config: '" + name_ + "." + key + "'";
  }

  const nlohmann::json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

inline void parse_diode(const nlohmann::json& j, DiodeParams& d) {
  Section s(j, "diode");
  s.number("v_peak", d.v_peak);
  s.number("i_peak", d.i_peak);
  s.number("v_valley", d.v_valley);
  s.number("i_valley", d.i_valley);
  s.number("v_excess_scale", d.v_excess_scale);
  s.finish();
}

inline void parse_oscillator(const nlohmann::json& j, OscillatorConfig& o) {
  Section s(j, "oscillator");
  s.number("inductance_h", o.circuit.inductance_h);
  s.number("capacitance_f", o.circuit.capacitance_f);
  s.number("load_conductance_s", o.circuit.load_conductance_s);
  s.number("nominal_bias_v", o.nominal_bias_v);
  s.number("bias_sensitivity_hz_per_v", o.bias_sensitivity_hz_per_v);
  s.number("tx_power_dbm", o.tx_power_dbm);
  s.number("phase_noise_diffusion", o.phase_noise_diffusion);
  s.number("frequency_diffusion", o.frequency_diffusion);
  s.finish();
}

inline void parse_pulling(const nlohmann::json& j, PullingModel& p) {
  Section s(j, "pulling");
  s.number("delta_c_ref_f", p.delta_c_ref_f);
  s.number("d_ref_m", p.d_ref_m);
  s.number("falloff_exponent", p.falloff_exponent);
  if (s.has("materials")) {
    const auto& m = s.sub("materials");
    require(m.is_object(), errc::invalid_config,
            "config: 'pulling.materials' must be an object");
    for (auto it = m.begin(); it != m.end(); ++it) {
      require(it.value().is_number(), errc::invalid_config,
              "config: material gain for '" + it.key() + "' must be a number");
      p.materials[it.key()] = it.value().get<double>();
    }
  }
  s.finish();
}

inline void parse_breathing(const nlohmann::json& j, BreathingProfile& b) {
  Section s(j, "breathing");
  s.number("rate_bpm", b.rate_bpm);
  s.number("amplitude_m", b.amplitude_m);
  s.number("baseline_distance_m", b.baseline_distance_m);
  std::string wf;
  s.text("waveform", wf);
  if (!wf.empty()) {
    if (wf == "sinusoid") b.waveform = Waveform::sinusoid;
    else if (wf == "raised_sinusoid") b.waveform = Waveform::raised_sinusoid;
    else fail(errc::invalid_config,
              "config: 'breathing.waveform' must be sinusoid or raised_sinusoid");
  }
  s.finish();
}

inline void parse_environment(const nlohmann::json& j, EnvironmentProfile& e) {
  Section s(j, "environment");
  std::string kind;
  s.text("kind", kind);
  if (!kind.empty()) {
    if (kind == "static_indoor") e = static_indoor();
    else if (kind == "dynamic_indoor") e = dynamic_indoor();
    else if (kind == "outdoor") e = outdoor();
    else fail(errc::invalid_config,
              "config: 'environment.kind' must be static_indoor, "
              "dynamic_indoor, or outdoor");
  }
  s.number("disturbance_rate", e.disturbance_rate);
  s.number("disturbance_magnitude_hz", e.disturbance_magnitude);
  s.number("noise_floor_snr_db", e.noise_floor_snr_db);
  s.finish();
}

inline void parse_scene(const nlohmann::json& j, SceneConfig& sc) {
  Section s(j, "scene");
  s.number("duration_s", sc.duration_s);
  s.number("trace_rate_hz", sc.trace_rate_hz);
  s.number("iq_sample_rate_hz", sc.iq_sample_rate_hz);
  s.text("material", sc.material);
  s.finish();
}

inline void parse_tracker(const nlohmann::json& j, TrackerConfig& t) {
  Section s(j, "tracker");
  s.size("fft_length", t.fft_length);
  s.size("hop", t.hop);
  std::string win;
  s.text("window", win);
  if (!win.empty()) {
    if (win == "hann") t.window = TrackerConfig::Window::hann;
    else if (win == "rectangular") t.window = TrackerConfig::Window::rectangular;
    else fail(errc::invalid_config,
              "config: 'tracker.window' must be hann or rectangular");
  }
  if (s.has("search_band_hz")) {
    std::pair<double, double> band{0.0, 0.0};
    s.pair("search_band_hz", band);
    t.search_band = band;
  }
  s.finish();
}

inline void parse_pipeline(const nlohmann::json& j, PipelineConfig& p) {
  Section s(j, "pipeline");
  s.number("detrend_window_s", p.detrend_window_s);
  s.size("hampel_window", p.hampel_window);
  s.number("hampel_n_sigmas", p.hampel_n_sigmas);
  s.size("smooth_window", p.smooth_window);
  s.pair("band_hz", p.band);
  s.number("max_gap_s", p.max_gap_s);
  s.finish();
}

inline void parse_harvest(const nlohmann::json& j, HarvestConfig& h) {
  Section s(j, "harvest");
  s.number("current_per_lux_a", h.source.current_per_lux);
  s.number("saturation_current_a", h.source.saturation_current);
  s.number("leakage_conductance_s", h.leakage_conductance_s);
  s.numbers("capacitances_uf", h.capacitances_uf);
  s.numbers("lux_levels", h.lux_levels);
  s.number("v_high", h.window.v_high);
  s.number("v_low", h.window.v_low);
  std::string load;
  s.text("load", load);
  if (!load.empty()) {
    if (load == "constant") h.window.load = ActiveWindow::Load::constant;
    else if (load == "diode_curve") h.window.load = ActiveWindow::Load::diode_curve;
    else fail(errc::invalid_config,
              "config: 'harvest.load' must be constant or diode_curve");
  }
  s.number("load_current_a", h.window.load_current_a);
  s.number("charge_duration_s", h.charge_duration_s);
  s.number("charge_dt_s", h.charge_dt_s);
  s.number("discharge_dt_s", h.discharge_dt_s);
  s.finish();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  require(j.is_object(), errc::invalid_config, "config: root must be a JSON object");
  RunConfig cfg;
  detail::Section s(j, "");
  std::uint64_t seed = cfg.seed;
  s.integer("seed", seed);
  cfg.seed = seed;
  if (s.has("diode")) detail::parse_diode(s.sub("diode"), cfg.diode);
  if (s.has("oscillator")) detail::parse_oscillator(s.sub("oscillator"), cfg.oscillator);
  if (s.has("pulling")) detail::parse_pulling(s.sub("pulling"), cfg.pulling);
  if (s.has("breathing")) detail::parse_breathing(s.sub("breathing"), cfg.breathing);
  if (s.has("environment")) detail::parse_environment(s.sub("environment"), cfg.environment);
  if (s.has("scene")) detail::parse_scene(s.sub("scene"), cfg.scene);
  if (s.has("tracker")) detail::parse_tracker(s.sub("tracker"), cfg.tracker);
  if (s.has("pipeline")) detail::parse_pipeline(s.sub("pipeline"), cfg.pipeline);
  if (s.has("harvest")) detail::parse_harvest(s.sub("harvest"), cfg.harvest);
  s.finish();
  // Harvest diode_curve mode draws its load from the run's diode model.
  cfg.harvest.window.diode = cfg.diode;
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), errc::io_error, "config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::invalid_config,
         "config: malformed JSON in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

}  // namespace tunnelsense
