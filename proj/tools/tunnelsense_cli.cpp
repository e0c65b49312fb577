// tunnelsense: single CLI entry point for the simulator + DSP toolkit.
//
// Subcommands: iv, simulate, rate, compare, harvest. Every command exits 0
// on success and nonzero with a single-line JSON error on failure; --seed
// fully determines all stochastic outputs.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <tunnelsense/tunnelsense.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tunnelsense;

namespace {

constexpr std::uint64_t kIqSeedSalt = 0x9e3779b97f4a7c15ULL;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string out = ".";
  bool dump_stages = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_dump) {
  cmd->add_option("--config", a.config_path, "JSON run configuration file");
  a.seed_opt = cmd->add_option("--seed", a.seed, "Override the config seed");
  cmd->add_option("--out", a.out, "Output directory (default: .)");
  if (with_dump)
    cmd->add_flag("--dump-stages", a.dump_stages,
                  "Write each intermediate trace as CSV");
}

RunConfig make_config(const CommonArgs& a) {
  RunConfig cfg =
      a.config_path.empty() ? RunConfig{} : load_config(a.config_path);
  if (a.seed_opt && a.seed_opt->count() > 0) cfg.seed = a.seed;
  return cfg;
}

std::string out_path(const CommonArgs& a, const std::string& name) {
  fs::create_directories(a.out);
  return (fs::path(a.out) / name).string();
}

std::pair<double, double> parse_band(const std::string& s) {
  double lo = 0.0, hi = 0.0;
  char comma = 0;
  std::istringstream ss(s);
  ss >> lo >> comma >> hi;
  require(ss && comma == ',' && lo > 0.0 && hi > lo, errc::invalid_argument,
          "rate: --band expects 'lo,hi' with 0 < lo < hi");
  return {lo, hi};
}

void cmd_iv(const CommonArgs& args) {
  RunConfig cfg = make_config(args);
  DiodeModel model(cfg.diode);
  auto [ndr_lo, ndr_hi] = ndr_region(model);

  std::string path = out_path(args, "iv.csv");
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), errc::io_error, "iv: cannot open '" + path + "'");
  f << "v,i,di_dv\n";
  char row[128];
  for (int k = 0; k <= 800; ++k) {
    double v = static_cast<double>(k) * 0.0005;
    std::snprintf(row, sizeof(row), "%.17g,%.17g,%.17g\n", v, model.current(v),
                  model.conductance(v));
    f << row;
  }
  json footer = {{"ndr_low_v", ndr_lo}, {"ndr_high_v", ndr_hi}};
  f << "# " << footer.dump() << "\n";
  require(f.good(), errc::io_error, "iv: short write to '" + path + "'");
  log_info("iv: wrote " + path);

  json outj = footer;
  outj["csv"] = path;
  outj["rows"] = 801;
  std::cout << outj.dump() << "\n";
}

void cmd_simulate(const CommonArgs& args) {
  RunConfig cfg = make_config(args);
  FrequencyTrace trace = simulate_drift_trace(
      cfg.breathing, cfg.environment, cfg.oscillator, cfg.pulling,
      cfg.scene.duration_s, cfg.scene.trace_rate_hz, cfg.seed,
      cfg.scene.material);

  double f0 = resonant_frequency(cfg.oscillator.circuit);
  IQRecording iq = synthesize_iq(
      trace, cfg.scene.iq_sample_rate_hz, f0, cfg.environment.noise_floor_snr_db,
      cfg.oscillator.phase_noise_diffusion, cfg.seed ^ kIqSeedSalt);

  std::string iq_path = out_path(args, "scene.iq");
  write_iq(iq, iq_path);
  log_info("simulate: wrote " + iq_path + " (" +
           std::to_string(iq.samples.size()) + " samples)");

  std::string trace_path = out_path(args, "scene_true_trace.csv");
  write_trace_csv(trace, trace_path, "frequency_hz");

  Trace chest;
  chest.sample_interval = trace.sample_interval;
  chest.values.resize(trace.values.size());
  for (std::size_t i = 0; i < chest.values.size(); ++i)
    chest.values[i] = chest_distance(cfg.breathing, chest.time_at(i));
  std::string chest_path = out_path(args, "scene_chest.csv");
  write_trace_csv(chest, chest_path, "distance_m");

  json truth = {{"bpm", cfg.breathing.rate_bpm},
                {"confidence", 1.0},
                {"band_hz", {cfg.pipeline.band.first, cfg.pipeline.band.second}},
                {"source", "ground_truth"}};
  std::string rate_path = out_path(args, "scene_true_rate.json");
  std::ofstream rf(rate_path, std::ios::trunc);
  rf << truth.dump(2) << "\n";
  require(rf.good(), errc::io_error, "simulate: cannot write '" + rate_path + "'");

  json outj = {{"iq", iq_path},
               {"true_trace", trace_path},
               {"chest_trace", chest_path},
               {"true_rate", rate_path},
               {"center_frequency", iq.center_frequency},
               {"sample_rate", iq.sample_rate},
               {"seed", cfg.seed}};
  std::cout << outj.dump() << "\n";
}

void cmd_rate(const CommonArgs& args, const std::string& input,
              const std::string& band_flag) {
  RunConfig cfg = make_config(args);
  if (!band_flag.empty()) cfg.pipeline.band = parse_band(band_flag);

  PipelineResult res;
  if (input.size() > 3 && input.substr(input.size() - 3) == ".iq") {
    IQRecording iq = read_iq(input);
    log_info("rate: tracking " + std::to_string(iq.samples.size()) +
             " IQ samples");
    res = run_pipeline(iq, cfg.tracker, cfg.pipeline, args.dump_stages);
  } else {
    FrequencyTrace t = read_frequency_csv(input);
    res = run_pipeline(t, cfg.pipeline, args.dump_stages);
  }

  if (args.dump_stages) {
    int idx = 0;
    for (const auto& [name, t] : res.dumps) {
      std::string p =
          out_path(args, "stage_" + std::to_string(idx++) + "_" + name + ".csv");
      write_trace_csv(t, p, "frequency_hz");
      log_info("rate: dumped " + p);
    }
  }

  json outj = {{"bpm", res.rate.bpm},
               {"confidence", res.rate.confidence},
               {"band_hz", {res.rate.band_hz.first, res.rate.band_hz.second}},
               {"stages", res.stages}};
  std::cout << outj.dump() << "\n";
}

void cmd_compare(const CommonArgs& args, const std::string& system_path,
                 const std::string& reference_path) {
  RunConfig cfg = make_config(args);
  FrequencyTrace sys = longest_segment(
      fill_gaps(read_frequency_csv(system_path), cfg.pipeline.max_gap_s));
  RespTrace ref = longest_segment(
      fill_gaps(read_resp_csv(reference_path), cfg.pipeline.max_gap_s));

  // Detrend both sides so the correlation reflects breathing, not slow
  // wander or static offsets.
  FrequencyTrace ds = detrend(sys, cfg.pipeline.detrend_window_s);
  Trace dr = detrend(ref, cfg.pipeline.detrend_window_s);

  AlignmentResult al = align(ds, dr);
  RateEstimate rs = estimate_rate(ds, cfg.pipeline.band);
  RateEstimate rr = estimate_rate(dr, cfg.pipeline.band);

  json outj = {{"lag_s", al.lag_s},
               {"correlation", al.correlation},
               {"bpm_system", rs.bpm},
               {"bpm_reference", rr.bpm},
               {"bpm_error", rs.bpm - rr.bpm}};
  std::cout << outj.dump() << "\n";
}

void cmd_harvest(const CommonArgs& args) {
  RunConfig cfg = make_config(args);
  auto rows = harvest_report(cfg.harvest.source, cfg.harvest.caps(),
                             cfg.harvest.lux_levels, cfg.harvest.window,
                             cfg.harvest.charge_duration_s,
                             cfg.harvest.charge_dt_s,
                             cfg.harvest.discharge_dt_s);
  std::string path = out_path(args, "harvest.csv");
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), errc::io_error, "harvest: cannot open '" + path + "'");
  write_harvest_csv(rows, f);
  require(f.good(), errc::io_error, "harvest: short write to '" + path + "'");
  log_info("harvest: wrote " + path);

  json outj = {{"csv", path}, {"rows", rows.size()}};
  std::cout << outj.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TunnelSense simulator and signal-processing toolkit"};
  app.require_subcommand(1);

  CommonArgs iv_args;
  CLI::App* iv = app.add_subcommand("iv", "Diode I-V sweep with NDR endpoints");
  add_common(iv, iv_args, false);

  CommonArgs sim_args;
  CLI::App* sim =
      app.add_subcommand("simulate", "Simulate a breathing scene to IQ + traces");
  add_common(sim, sim_args, false);

  CommonArgs rate_args;
  std::string rate_input, rate_band;
  CLI::App* rate =
      app.add_subcommand("rate", "Estimate breathing rate from IQ or trace CSV");
  add_common(rate, rate_args, true);
  rate->add_option("--input", rate_input, "IQ recording (.iq) or trace CSV")
      ->required();
  rate->add_option("--band", rate_band, "Breathing band override, e.g. 0.1,0.5");

  CommonArgs cmp_args;
  std::string cmp_system, cmp_reference;
  CLI::App* cmp =
      app.add_subcommand("compare", "Align a system trace against a belt CSV");
  add_common(cmp, cmp_args, false);
  cmp->add_option("--system", cmp_system, "System frequency-trace CSV")
      ->required();
  cmp->add_option("--reference", cmp_reference, "Respiration-belt CSV")
      ->required();

  CommonArgs hv_args;
  CLI::App* hv = app.add_subcommand("harvest", "Energy-harvest budget sweep");
  add_common(hv, hv_args, false);

  try {
    app.parse(argc, argv);
    if (iv->parsed()) cmd_iv(iv_args);
    if (sim->parsed()) cmd_simulate(sim_args);
    if (rate->parsed()) cmd_rate(rate_args, rate_input, rate_band);
    if (cmp->parsed()) cmd_compare(cmp_args, cmp_system, cmp_reference);
    if (hv->parsed()) cmd_harvest(hv_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    json err = {{"error",
                 {{"code", static_cast<int>(e.code())},
                  {"name", errc_name(e.code())},
                  {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    json err = {{"error",
                 {{"code", 0}, {"name", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
