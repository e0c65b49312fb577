#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "tunnelsense/config.hpp"
#include "tunnelsense/dsp.hpp"
#include "tunnelsense/iq.hpp"
#include "tunnelsense/log.hpp"
#include "tunnelsense/trace.hpp"

namespace tunnelsense {

struct PipelineResult {
  RateEstimate rate;
  std::vector<std::string> stages;  // names, in execution order
  // Trace snapshot after each stage; filled only when keep_stages is set.
  std::vector<std::pair<std::string, FrequencyTrace>> dumps;
};

// Receiver chain after the tracker: detrend -> hampel -> smooth ->
// fill/split -> estimate_rate. The input may contain missing (NaN) samples;
// rate estimation runs on the longest contiguous segment.
inline PipelineResult run_pipeline(const FrequencyTrace& input,
                                   const PipelineConfig& cfg,
                                   bool keep_stages = false) {
  PipelineResult res;
  auto stage = [&](const char* name, const FrequencyTrace& t) {
    res.stages.push_back(name);
    if (keep_stages) res.dumps.emplace_back(name, t);
    log_debug(std::string("pipeline: ") + name + " -> " +
              std::to_string(t.values.size()) + " samples");
  };

  stage("input", input);
  FrequencyTrace t = detrend(input, cfg.detrend_window_s);
  stage("detrend", t);
  t = hampel_filter(t, cfg.hampel_window, cfg.hampel_n_sigmas);
  stage("hampel", t);
  t = smooth(t, cfg.smooth_window);
  stage("smooth", t);
  FrequencyTrace filled = longest_segment(fill_gaps(t, cfg.max_gap_s));
  stage("fill_gaps", filled);

  res.rate = estimate_rate(filled, cfg.band);
  res.stages.push_back("estimate_rate");
  return res;
}

inline PipelineResult run_pipeline(const IQRecording& iq,
                                   const TrackerConfig& tracker,
                                   const PipelineConfig& cfg,
                                   bool keep_stages = false) {
  FrequencyTrace raw = track_frequency(iq, tracker);
  PipelineResult res = run_pipeline(raw, cfg, keep_stages);
  res.stages.insert(res.stages.begin(), "track");
  if (keep_stages) res.dumps.insert(res.dumps.begin(), {"track", raw});
  // The "input" stage duplicates "track" for IQ runs; drop the alias.
  res.stages.erase(std::find(res.stages.begin(), res.stages.end(), "input"));
  if (keep_stages)
    res.dumps.erase(res.dumps.begin() + 1);
  return res;
}

}  // namespace tunnelsense
