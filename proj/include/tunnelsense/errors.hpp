#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tunnelsense {

// Error taxonomy for the whole toolkit. Each enumerator maps to a distinct
// CLI exit code (see exit_code()), so scripted callers can branch on the
// failure class without parsing messages.
enum class errc {
  invalid_argument = 1,   // domain violation on an operation input
  invalid_config,         // model/config parameters violate an invariant
  unknown_material,
  no_ndr_region,
  nyquist_violation,
  io_error,               // file cannot be opened/read/written
  truncated_recording,    // raw IQ byte count is not a whole number of samples
  invalid_metadata,       // sidecar missing or missing/invalid fields
  non_finite_samples,
  missing_column,
  non_monotonic_time,
  zero_variance,
  insufficient_overlap,
  insufficient_cycles,
  duration_too_short,
};

inline std::string_view errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument:     return "invalid_argument";
    case errc::invalid_config:       return "invalid_config";
    case errc::unknown_material:     return "unknown_material";
    case errc::no_ndr_region:        return "no_ndr_region";
    case errc::nyquist_violation:    return "nyquist_violation";
    case errc::io_error:             return "io_error";
    case errc::truncated_recording:  return "truncated_recording";
    case errc::invalid_metadata:     return "invalid_metadata";
    case errc::non_finite_samples:   return "non_finite_samples";
    case errc::missing_column:       return "missing_column";
    case errc::non_monotonic_time:   return "non_monotonic_time";
    case errc::zero_variance:        return "zero_variance";
    case errc::insufficient_overlap: return "insufficient_overlap";
    case errc::insufficient_cycles:  return "insufficient_cycles";
    case errc::duration_too_short:   return "duration_too_short";
  }
  return "unknown";
}

// Exit code for the CLI: 0 is success, 1 is reserved for usage errors,
// domain errors start at 2 and follow the enum order.
inline int exit_code(errc c) { return static_cast<int>(c) + 1; }

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace tunnelsense
