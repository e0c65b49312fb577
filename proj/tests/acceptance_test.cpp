// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Numeric targets and tolerances are frozen here on purpose —
// adjust the library, not this file.

#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <tunnelsense/tunnelsense.hpp>

#include "oracles.hpp"

using namespace tunnelsense;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int n, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  int rc = pclose(p);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// 1. Headline budget row: 1431 uF through the 75-197 mV window at the
//    calibrated 3.42 mA load gives ~51 ms, and the ODE integrator matches
//    the closed form.
void criterion_1() {
  StorageCap cap;
  cap.capacitance = 1431e-6;
  ActiveWindow w;  // defaults: 75-197 mV, constant 3.42 mA
  double closed = oracles::closed_form_discharge_s(cap.capacitance,
                                                   w.v_high - w.v_low,
                                                   w.load_current_a);
  double active = active_time(cap, w, w.v_high, 1e-5);

  // Same row through the CLI sweep (last row: 1431 uF at 10 klx).
  fs::path dir = fs::temp_directory_path() / "tunnelsense_acceptance" / "c1";
  fs::remove_all(dir);
  fs::create_directories(dir);
  RunResult r = run(std::string(TUNNELSENSE_BIN) + " harvest --out " +
                    dir.string());
  double cli_active = -1.0;
  if (r.status == 0) {
    std::string csv = slurp(dir / "harvest.csv");
    std::size_t nl = csv.rfind('\n', csv.size() - 2);
    double c, lux, peak, ttw;
    if (std::sscanf(csv.c_str() + nl + 1, "%lf,%lf,%lf,%lf,%lf", &c, &lux,
                    &peak, &ttw, &cli_active) != 5)
      cli_active = -1.0;
  }

  bool ok = std::abs(active - 0.051) / 0.051 <= 0.02 &&
            std::abs(active - closed) / closed <= 0.001 &&
            std::abs(cli_active - 0.051) / 0.051 <= 0.02;
  report(1, ok,
         fmt("1431 uF window active time %.3f ms (closed form %.3f ms, CLI "
             "row %.3f ms, target 51 ms +/- 2%%)",
             active * 1e3, closed * 1e3, cli_active * 1e3));
}

// 2. NDR region: negative conductance exactly on an interval containing
//    [80, 140] mV with endpoints within 5 mV of (70, 150) mV.
void criterion_2() {
  DiodeModel m;
  auto [lo, hi] = ndr_region(m);
  bool contains = lo <= 0.080 && hi >= 0.140;
  bool near = std::abs(lo - 0.070) <= 0.005 && std::abs(hi - 0.150) <= 0.005;
  bool inside_negative = true;
  for (int k = 1; k < 100; ++k)
    if (m.conductance(lo + (hi - lo) * k / 100.0) >= 0.0)
      inside_negative = false;
  bool outside_positive =
      m.conductance(lo - 0.001) > 0.0 && m.conductance(hi + 0.001) > 0.0;
  report(2, contains && near && inside_negative && outside_positive,
         fmt("NDR spans [%.2f, %.2f] mV (target (70, 150) +/- 5, must cover "
             "[80, 140]; sign checked on both sides)",
             lo * 1e3, hi * 1e3));
}

// 3. Power budget: 70 uW at the 70 mV bias; < 200 uW across the window.
void criterion_3() {
  DiodeModel m;
  double p70 = 0.070 * m.current(0.070);
  auto [lo, hi] = ndr_region(m);
  double p_max = 0.0;
  for (int k = 0; k <= 100; ++k) {
    double v = lo + (hi - lo) * k / 100.0;
    p_max = std::max(p_max, v * m.current(v));
  }
  bool ok = std::abs(p70 - 70e-6) < 1e-12 && p70 < 100e-6 && p_max < 200e-6;
  report(3, ok,
         fmt("bias power %.1f uW at 70 mV (< 100 uW), max %.1f uW across NDR "
             "(< 200 uW)",
             p70 * 1e6, p_max * 1e6));
}

// 4. Resonance at 868 MHz and first-order agreement of the pulling law.
void criterion_4() {
  ResonantCircuit c;
  double f0 = resonant_frequency(c);
  bool near868 = std::abs(f0 - 868e6) / 868e6 <= 0.005;
  double worst = 0.0;
  for (double ratio : {1e-5, 1e-4, 1e-3}) {
    double dc = ratio * c.capacitance_f;
    double exact = pulled_frequency(f0, c, dc);
    double shift = oracles::first_order_pull_hz(f0, dc, c.capacitance_f);
    worst = std::max(worst, std::abs(exact - (f0 + shift)) / std::abs(shift));
  }
  report(4, near868 && worst <= 0.01,
         fmt("f0 = %.3f MHz (868 +/- 0.5%%); pulling vs first-order off by "
             "%.3g of the shift for dC/C <= 1e-3 (<= 1%%)",
             f0 / 1e6, worst));
}

// 5. Range law: excursion strictly decreasing over 10/20/30 cm, and at
//    30 cm below 2x the tracker's single-tone RMS bound (50 Hz).
void criterion_5() {
  auto excursion = [](double baseline) {
    BreathingProfile b;
    b.baseline_distance_m = baseline;
    FrequencyTrace tr = simulate_drift_trace(
        b, static_indoor(), OscillatorConfig{}, PullingModel{}, 60.0, 20.0,
        101);
    // Peak-to-peak of the breathing component; the raw span would be
    // dominated by the random-walk drift.
    return 2.0 * oracles::spectral_amplitude(tr.values, 20.0,
                                             b.rate_bpm / 60.0);
  };
  double e10 = excursion(0.10), e20 = excursion(0.20), e30 = excursion(0.30);
  bool ok = e10 > e20 && e20 > e30 && e30 < 50.0;
  report(5, ok,
         fmt("breathing excursion %.0f / %.1f / %.1f Hz at 10/20/30 cm "
             "(strictly decreasing, 30 cm < 50 Hz)",
             e10, e20, e30));
}

// 6. End-to-end rate recovery across environments, 20 seeds x 3 rates.
void criterion_6() {
  struct Case {
    const char* name;
    EnvironmentProfile env;
    double tol;
    bool check_conf;
  };
  const Case cases[] = {{"static", static_indoor(), 1.0, true},
                        {"dynamic", dynamic_indoor(), 1.5, false},
                        {"outdoor", outdoor(), 3.0, false}};
  bool ok = true;
  std::string detail;
  for (const Case& cs : cases) {
    double worst = 0.0;
    int misses = 0;
    for (double rate : {10.0, 15.0, 20.0}) {
      BreathingProfile b;
      b.rate_bpm = rate;
      b.baseline_distance_m = 0.10;
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        FrequencyTrace tr = simulate_drift_trace(
            b, cs.env, OscillatorConfig{}, PullingModel{}, 60.0, 20.0,
            seed * 1000 + static_cast<std::uint64_t>(rate));
        PipelineResult res = run_pipeline(tr, PipelineConfig{});
        double err = std::abs(res.rate.bpm - rate);
        worst = std::max(worst, err);
        if (err > cs.tol || (cs.check_conf && res.rate.confidence <= 0.5))
          ++misses;
      }
    }
    if (misses > 0) ok = false;
    detail += fmt("%s worst %.2f/%.1f BPM (%d misses); ", cs.name, worst,
                  cs.tol, misses);
  }
  report(6, ok, "rate recovery over 20 seeds x {10,15,20} BPM: " + detail);
}

// 7. Tracker: pure tone at SNR 10 dB, per-window RMS <= 25 Hz, and
//    shift-equivariance to the same tolerance.
void criterion_7() {
  double f0 = resonant_frequency(ResonantCircuit{});
  auto tone_estimates = [&](double offset) {
    FrequencyTrace tone;
    tone.sample_interval = 1e-3;
    tone.values.assign(500, f0 + offset);
    IQRecording iq = synthesize_iq(tone, 1e6, f0, 10.0, 0.0, 77);
    return track_frequency(iq, TrackerConfig{});
  };
  FrequencyTrace a = tone_estimates(1234.0);
  FrequencyTrace b = tone_estimates(6234.0);
  double se = 0.0, sd = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    double e = a.values[i] - (f0 + 1234.0);  // tracker reports absolute Hz
    double d = (b.values[i] - a.values[i]) - 5000.0;
    se += e * e;
    sd += d * d;
  }
  double rms = std::sqrt(se / static_cast<double>(a.values.size()));
  double rms_shift = std::sqrt(sd / static_cast<double>(a.values.size()));
  report(7, rms <= 25.0 && rms_shift <= 25.0,
         fmt("tone at SNR 10 dB: RMS error %.2f Hz over %zu windows, "
             "shift-equivariance RMS %.2f Hz (<= 25)",
             rms, a.values.size(), rms_shift));
}

// 8. Alignment: a 2.0 s self-shift is recovered within one interval, and a
//    clean system trace correlates >= 0.9 with chest-distance ground truth.
void criterion_8() {
  BreathingProfile b;
  b.baseline_distance_m = 0.15;
  FrequencyTrace m = simulate_drift_trace(b, static_indoor(),
                                          OscillatorConfig{}, PullingModel{},
                                          70.0, 20.0, 303);
  Trace head, tail;
  head.sample_interval = tail.sample_interval = m.sample_interval;
  tail.values.assign(m.values.begin() + 40, m.values.end());
  head.values.assign(m.values.begin(), m.values.end() - 40);
  AlignmentResult shift = align(tail, head);  // head lags by 2.0 s
  bool shift_ok = std::abs(shift.lag_s - 2.0) <= m.sample_interval + 1e-9;

  OscillatorConfig quiet;
  quiet.frequency_diffusion = 0.0;
  BreathingProfile b15;
  b15.baseline_distance_m = 0.10;
  FrequencyTrace sys = simulate_drift_trace(b15, static_indoor(), quiet,
                                            PullingModel{}, 60.0, 20.0, 404);
  Trace chest;
  chest.sample_interval = 0.05;
  chest.values.resize(sys.values.size());
  for (std::size_t i = 0; i < chest.values.size(); ++i)
    chest.values[i] = chest_distance(b15, chest.time_at(i));
  AlignmentResult truth = align(detrend(sys, 30.0), detrend(chest, 30.0));
  bool corr_ok = truth.correlation >= 0.9;

  report(8, shift_ok && corr_ok,
         fmt("2.0 s shift recovered as %.3f s (+/- %.2f s); ground-truth "
             "correlation %.4f at lag %.3f s (>= 0.9)",
             shift.lag_s, m.sample_interval, truth.correlation, truth.lag_s));
}

// 9. Link budget: -19 dBm source at 10 m / 868 MHz lands near -70.2 dBm.
void criterion_9() {
  double rx = link_budget_dbm(-19.0, 10.0, 868e6);
  report(9, std::abs(rx - (-70.2)) <= 0.2,
         fmt("received power %.4f dBm at 10 m (target -70.2 +/- 0.2)", rx));
}

// 10. Determinism and lossless round trips.
void criterion_10() {
  fs::path dir = fs::temp_directory_path() / "tunnelsense_acceptance" / "c10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"scene": {"duration_s": 2.0,
    "trace_rate_hz": 50.0, "iq_sample_rate_hz": 100000.0}})";
  std::string base = std::string(TUNNELSENSE_BIN) + " simulate --config " +
                     cfg.string() + " --seed 5 --out ";
  RunResult ra = run(base + (dir / "a").string());
  RunResult rb = run(base + (dir / "b").string());
  bool cli_ok = ra.status == 0 && rb.status == 0 &&
                slurp(dir / "a" / "scene.iq") == slurp(dir / "b" / "scene.iq") &&
                !slurp(dir / "a" / "scene.iq").empty() &&
                slurp(dir / "a" / "scene_true_trace.csv") ==
                    slurp(dir / "b" / "scene_true_trace.csv");

  FrequencyTrace tone;
  tone.sample_interval = 1e-3;
  tone.values.assign(100, 868e6 + 500.0);
  IQRecording iq = synthesize_iq(tone, 1e5, 868e6, 20.0, 50.0, 9);
  fs::path iq_path = dir / "rt.iq";
  write_iq(iq, iq_path.string());
  IQRecording back = read_iq(iq_path.string());
  bool iq_ok = back.samples.size() == iq.samples.size() &&
               std::memcmp(back.samples.data(), iq.samples.data(),
                           iq.samples.size() * sizeof(iq.samples[0])) == 0 &&
               back.sample_rate == iq.sample_rate &&
               back.center_frequency == iq.center_frequency;

  // Dyadic grid so the time column reconstructs bit-exactly.
  Trace t;
  t.start_time = 0.25;
  t.sample_interval = 0.0625;
  t.values = {1.0, 2.5, std::nan(""), -3.75, 1e-17};
  fs::path csv_path = dir / "rt.csv";
  write_trace_csv(t, csv_path.string(), "frequency_hz");
  Trace back_t = read_trace_csv(csv_path.string(), "frequency_hz");
  bool csv_ok = back_t.values.size() == t.values.size() &&
                back_t.start_time == t.start_time &&
                back_t.sample_interval == t.sample_interval;
  for (std::size_t i = 0; csv_ok && i < t.values.size(); ++i)
    csv_ok = (std::isnan(t.values[i]) && std::isnan(back_t.values[i])) ||
             t.values[i] == back_t.values[i];

  report(10, cli_ok && iq_ok && csv_ok,
         fmt("CLI same-seed outputs byte-identical: %s; IQ round trip "
             "bit-exact: %s; CSV round trip lossless: %s",
             cli_ok ? "yes" : "NO", iq_ok ? "yes" : "NO",
             csv_ok ? "yes" : "NO"));
}

}  // namespace

int main() {
  struct Criterion {
    int n;
    void (*fn)();
  };
  const Criterion all[] = {{1, criterion_1}, {2, criterion_2},
                           {3, criterion_3}, {4, criterion_4},
                           {5, criterion_5}, {6, criterion_6},
                           {7, criterion_7}, {8, criterion_8},
                           {9, criterion_9}, {10, criterion_10}};
  for (const Criterion& c : all) {
    try {
      c.fn();
    } catch (const std::exception& e) {
      report(c.n, false, std::string("threw: ") + e.what());
    }
  }
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
