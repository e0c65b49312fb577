#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tunnelsense/errors.hpp"

namespace tunnelsense {

// Complex baseband capture. Samples are stored at the wire precision
// (32-bit float pairs) so a write/read round trip is bit-exact.
struct IQRecording {
  double sample_rate = 0.0;       // Hz
  double center_frequency = 0.0;  // Hz
  double start_time_unix = 0.0;   // s
  std::string description;
  std::vector<std::complex<float>> samples;

  double duration() const {
    return sample_rate > 0.0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

inline std::string sidecar_path(const std::string& iq_path) {
  return iq_path + ".json";
}

// Raw interleaved little-endian float32 I/Q pairs in `<name>.iq`, metadata
// in `<name>.iq.json`. This toolchain only targets little-endian hosts;
// the writer stores the in-memory float representation directly.
inline void write_iq(const IQRecording& rec, const std::string& path) {
  require(rec.sample_rate > 0.0, errc::invalid_metadata,
          "iq: sample_rate must be positive");
  for (const auto& s : rec.samples)
    require(std::isfinite(s.real()) && std::isfinite(s.imag()),
            errc::non_finite_samples, "iq: refusing to write non-finite samples");

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), errc::io_error, "iq: cannot open '" + path + "' for writing");
  if (!rec.samples.empty())
    f.write(reinterpret_cast<const char*>(rec.samples.data()),
            static_cast<std::streamsize>(rec.samples.size() *
                                         sizeof(std::complex<float>)));
  require(f.good(), errc::io_error, "iq: short write to '" + path + "'");
  f.close();

  nlohmann::json meta;
  meta["sample_rate"] = rec.sample_rate;
  meta["center_frequency"] = rec.center_frequency;
  meta["start_time_unix"] = rec.start_time_unix;
  meta["description"] = rec.description;
  std::ofstream m(sidecar_path(path), std::ios::trunc);
  require(m.good(), errc::io_error,
          "iq: cannot open '" + sidecar_path(path) + "' for writing");
  m << meta.dump(2) << "\n";
  require(m.good(), errc::io_error, "iq: short write to sidecar");
}

inline IQRecording read_iq(const std::string& path) {
  std::error_code ec;
  require(std::filesystem::exists(path, ec), errc::io_error,
          "iq: no such file '" + path + "'");
  const std::string side = sidecar_path(path);
  require(std::filesystem::exists(side, ec), errc::invalid_metadata,
          "iq: missing sidecar '" + side + "'");

  std::ifstream m(side);
  require(m.good(), errc::io_error, "iq: cannot open sidecar '" + side + "'");
  nlohmann::json meta;
  try {
    m >> meta;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::invalid_metadata, std::string("iq: malformed sidecar JSON: ") +
                                     e.what());
  }

  IQRecording rec;
  auto field = [&](const char* name) -> const nlohmann::json& {
    require(meta.contains(name) && meta[name].is_number(),
            errc::invalid_metadata,
            std::string("iq: sidecar missing numeric field '") + name + "'");
    return meta[name];
  };
  rec.sample_rate = field("sample_rate").get<double>();
  rec.center_frequency = field("center_frequency").get<double>();
  rec.start_time_unix =
      meta.contains("start_time_unix") ? meta["start_time_unix"].get<double>()
                                       : 0.0;
  rec.description =
      meta.contains("description") ? meta["description"].get<std::string>() : "";
  require(rec.sample_rate > 0.0, errc::invalid_metadata,
          "iq: sidecar field 'sample_rate' must be positive");

  std::ifstream f(path, std::ios::binary);
  require(f.good(), errc::io_error, "iq: cannot open '" + path + "'");
  auto bytes = std::filesystem::file_size(path, ec);
  require(!ec, errc::io_error, "iq: cannot stat '" + path + "'");
  require(bytes % sizeof(float) == 0, errc::truncated_recording,
          "iq: file size is not a whole number of float32 values");
  std::uint64_t floats = bytes / sizeof(float);
  require(floats % 2 == 0, errc::truncated_recording,
          "iq: odd float count (truncated I/Q pair)");
  rec.samples.resize(floats / 2);
  if (!rec.samples.empty()) {
    f.read(reinterpret_cast<char*>(rec.samples.data()),
           static_cast<std::streamsize>(bytes));
    require(f.gcount() == static_cast<std::streamsize>(bytes), errc::io_error,
            "iq: short read from '" + path + "'");
  }
  for (const auto& s : rec.samples)
    require(std::isfinite(s.real()) && std::isfinite(s.imag()),
            errc::non_finite_samples, "iq: non-finite samples in '" + path + "'");
  return rec;
}

}  // namespace tunnelsense
