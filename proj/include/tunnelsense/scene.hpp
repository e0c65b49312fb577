#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "tunnelsense/errors.hpp"
#include "tunnelsense/iq.hpp"
#include "tunnelsense/oscillator.hpp"
#include "tunnelsense/rng.hpp"
#include "tunnelsense/trace.hpp"

namespace tunnelsense {

enum class Waveform { sinusoid, raised_sinusoid };

struct BreathingProfile {
  double rate_bpm = 15.0;
  double amplitude_m = 0.005;         // peak-to-peak chest excursion
  double baseline_distance_m = 0.3;   // tag-to-chest distance at rest
  Waveform waveform = Waveform::raised_sinusoid;
};

inline void validate(const BreathingProfile& b) {
  require(b.rate_bpm > 2.0 && b.rate_bpm < 60.0, errc::invalid_config,
          "breathing: rate_bpm must lie in (2, 60)");
  require(b.amplitude_m >= 0.0, errc::invalid_config,
          "breathing: amplitude must be non-negative");
  require(b.baseline_distance_m > b.amplitude_m, errc::invalid_config,
          "breathing: baseline_distance must exceed amplitude");
}

enum class EnvironmentKind { static_indoor, dynamic_indoor, outdoor };

struct EnvironmentProfile {
  EnvironmentKind kind = EnvironmentKind::static_indoor;
  double disturbance_rate = 0.0;       // events/s
  double disturbance_magnitude = 0.0;  // Hz
  double noise_floor_snr_db = 25.0;    // receiver SNR when synthesizing IQ
};

inline EnvironmentProfile static_indoor() {
  return {EnvironmentKind::static_indoor, 0.0, 0.0, 25.0};
}
inline EnvironmentProfile dynamic_indoor() {
  return {EnvironmentKind::dynamic_indoor, 0.1, 200.0, 20.0};
}
inline EnvironmentProfile outdoor() {
  return {EnvironmentKind::outdoor, 0.2, 300.0, 12.0};
}

inline void validate(const EnvironmentProfile& e) {
  require(e.disturbance_rate >= 0.0, errc::invalid_config,
          "environment: disturbance_rate must be non-negative");
}

inline double chest_distance(const BreathingProfile& b, double t) {
  validate(b);
  require(t >= 0.0, errc::invalid_argument, "chest_distance: t must be >= 0");
  double phase = 2.0 * std::numbers::pi * (b.rate_bpm / 60.0) * t;
  switch (b.waveform) {
    case Waveform::sinusoid:
      return b.baseline_distance_m + 0.5 * b.amplitude_m * std::sin(phase);
    case Waveform::raised_sinusoid:
    default:
      // Exhaled rest at the baseline, inhale toward the tag.
      return b.baseline_distance_m -
             0.5 * b.amplitude_m * (1.0 + std::sin(phase));
  }
}

// One environment event: a smooth Gaussian bump in the oscillator frequency.
struct DisturbanceEvent {
  double t0 = 0.0;         // s, bump centre
  double width = 1.0;      // s, Gaussian sigma
  double magnitude = 0.0;  // Hz, signed peak height
};

// Pre-drawn Poisson arrivals for one scene. Drawing the whole process up
// front keeps evaluation at arbitrary t pure and scheduling-independent.
class DisturbanceProcess {
 public:
  DisturbanceProcess() = default;

  DisturbanceProcess(const EnvironmentProfile& env, double duration, Rng& rng) {
    validate(env);
    if (env.kind == EnvironmentKind::static_indoor ||
        env.disturbance_rate <= 0.0)
      return;
    // Poisson arrivals via exponential inter-event gaps.
    for (double t = rng.exponential(env.disturbance_rate); t < duration;
         t += rng.exponential(env.disturbance_rate)) {
      DisturbanceEvent ev;
      ev.t0 = t;
      ev.width = rng.uniform(0.5, 2.0);
      double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      ev.magnitude = sign * rng.uniform(0.3, 1.0) * env.disturbance_magnitude;
      events_.push_back(ev);
    }
    if (env.kind == EnvironmentKind::outdoor) {
      // Heavy-tailed spikes on top of the bumps: Pareto magnitudes, short
      // widths. Capped at 30x so the trace stays trackable at finite rates.
      for (double t = rng.exponential(env.disturbance_rate); t < duration;
           t += rng.exponential(env.disturbance_rate)) {
        DisturbanceEvent ev;
        ev.t0 = t;
        ev.width = rng.uniform(0.05, 0.2);
        double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        double mag = rng.pareto(env.disturbance_magnitude, 1.5);
        ev.magnitude = sign * std::min(mag, 30.0 * env.disturbance_magnitude);
        events_.push_back(ev);
      }
    }
    std::sort(events_.begin(), events_.end(),
              [](const DisturbanceEvent& a, const DisturbanceEvent& b) {
                return a.t0 < b.t0;
              });
  }

  double at(double t) const {
    double sum = 0.0;
    for (const auto& ev : events_) {
      double z = (t - ev.t0) / ev.width;
      if (std::abs(z) > 6.0) continue;
      sum += ev.magnitude * std::exp(-0.5 * z * z);
    }
    return sum;
  }

  const std::vector<DisturbanceEvent>& events() const { return events_; }

 private:
  std::vector<DisturbanceEvent> events_;
};

inline double environment_disturbance(const DisturbanceProcess& proc, double t) {
  return proc.at(t);
}

// Instantaneous oscillator frequency over a scene: tank resonance pulled by
// the breathing chest, plus a seeded frequency random walk and the
// environment disturbance process.
inline FrequencyTrace simulate_drift_trace(const BreathingProfile& breathing,
                                           const EnvironmentProfile& env,
                                           const OscillatorConfig& osc,
                                           const PullingModel& pm,
                                           double duration, double trace_rate,
                                           std::uint64_t seed,
                                           const std::string& material =
                                               "human-torso") {
  validate(breathing);
  validate(env);
  require(duration > 0.0, errc::invalid_argument,
          "scene: duration must be positive");
  require(trace_rate >= 4.0 * breathing.rate_bpm / 60.0, errc::nyquist_violation,
          "scene: trace_rate must be at least 4x the breathing frequency");

  Rng rng(seed);
  DisturbanceProcess disturbance(env, duration, rng);

  double f0 = resonant_frequency(osc.circuit);
  double dt = 1.0 / trace_rate;
  std::size_t n = static_cast<std::size_t>(std::llround(duration * trace_rate));
  double walk_sigma = std::sqrt(osc.frequency_diffusion * dt);

  FrequencyTrace trace;
  trace.start_time = 0.0;
  trace.sample_interval = dt;
  trace.values.resize(n);
  double walk = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double t = static_cast<double>(k) * dt;
    double dc = coupling_delta_c(pm, chest_distance(breathing, t), material);
    trace.values[k] =
        pulled_frequency(f0, osc.circuit, dc) + walk + disturbance.at(t);
    if (walk_sigma > 0.0) walk += walk_sigma * rng.normal();
  }
  return trace;
}

// Render a frequency trace as complex baseband: phase-accumulate the
// instantaneous offset from center_frequency (trace linearly interpolated to
// the IQ rate), add Wiener phase noise, then complex AWGN at the given SNR.
// Pass snr_db = +infinity for a noiseless recording.
inline IQRecording synthesize_iq(const FrequencyTrace& trace,
                                 double sample_rate, double center_frequency,
                                 double snr_db, double phase_noise_diffusion,
                                 std::uint64_t seed) {
  validate(trace);
  require(sample_rate > 0.0, errc::invalid_argument,
          "iq synth: sample_rate must be positive");
  require(phase_noise_diffusion >= 0.0, errc::invalid_argument,
          "iq synth: phase_noise_diffusion must be non-negative");

  double max_offset = 0.0;
  for (double v : trace.values) {
    require(std::isfinite(v), errc::non_finite_samples,
            "iq synth: trace contains missing values");
    max_offset = std::max(max_offset, std::abs(v - center_frequency));
  }
  require(trace.values.empty() || sample_rate > 2.0 * max_offset,
          errc::nyquist_violation,
          "iq synth: sample_rate must exceed twice the largest trace offset");

  IQRecording rec;
  rec.sample_rate = sample_rate;
  rec.center_frequency = center_frequency;
  rec.description = "synthesized";

  // Trace samples cover [0, n*dt); render IQ across the same span.
  double duration =
      static_cast<double>(trace.values.size()) * trace.sample_interval;
  std::size_t n =
      static_cast<std::size_t>(std::llround(duration * sample_rate));
  rec.samples.resize(n);
  if (n == 0) return rec;

  Rng rng(seed);
  double phase_sigma = std::sqrt(phase_noise_diffusion / sample_rate);
  bool noisy = std::isfinite(snr_db);
  // SNR is signal power over total complex noise power; the unit-circle
  // signal has power 1, so each noise component gets variance 1/(2*snr).
  double comp_sigma =
      noisy ? std::sqrt(0.5 * std::pow(10.0, -snr_db / 10.0)) : 0.0;

  double phi = 0.0;
  double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t j = 0; j < n; ++j) {
    double t = static_cast<double>(j) / sample_rate;
    double i_part = std::cos(phi);
    double q_part = std::sin(phi);
    if (noisy) {
      i_part += comp_sigma * rng.normal();
      q_part += comp_sigma * rng.normal();
    }
    rec.samples[j] = {static_cast<float>(i_part), static_cast<float>(q_part)};
    double f = value_at(trace, t) - center_frequency;
    phi += two_pi * f / sample_rate;
    if (phase_sigma > 0.0) phi += phase_sigma * rng.normal();
    phi = std::remainder(phi, two_pi);
  }
  return rec;
}

}  // namespace tunnelsense
