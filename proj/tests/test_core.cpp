// FFT, RNG, trace containers, and the IQ/CSV serialization round trips.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include <tunnelsense/csv.hpp>
#include <tunnelsense/errors.hpp>
#include <tunnelsense/fft.hpp>
#include <tunnelsense/iq.hpp>
#include <tunnelsense/rng.hpp>
#include <tunnelsense/trace.hpp>

#include "oracles.hpp"

using namespace tunnelsense;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto p = fs::temp_directory_path() / "tunnelsense_core_tests";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("fft matches the naive DFT on random input") {
  Rng rng(11);
  std::vector<std::complex<double>> x(256);
  for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};

  auto got = x;
  fft_radix2(got);
  auto want = oracles::naive_dft(x);

  double max_err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    max_err = std::max(max_err, std::abs(got[i] - want[i]));
    scale = std::max(scale, std::abs(want[i]));
  }
  CHECK(max_err / scale < 1e-12);
}

TEST_CASE("fft inverse round trip and Parseval") {
  Rng rng(12);
  std::vector<std::complex<double>> x(1024);
  for (auto& v : x) v = {rng.normal(), rng.normal()};

  auto spec = x;
  fft_radix2(spec);

  double tx = 0.0, tf = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    tx += std::norm(x[i]);
    tf += std::norm(spec[i]);
  }
  CHECK(tf / static_cast<double>(x.size()) ==
        Catch::Approx(tx).epsilon(1e-10));

  fft_radix2(spec, true);
  double max_err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    max_err = std::max(max_err, std::abs(spec[i] - x[i]));
  CHECK(max_err < 1e-10);
}

TEST_CASE("fft places a pure tone on its bin") {
  const std::size_t n = 512, k = 37;
  std::vector<std::complex<double>> x(n);
  for (std::size_t j = 0; j < n; ++j) {
    double ang = 2.0 * oracles::kPi * static_cast<double>(k * j) /
                 static_cast<double>(n);
    x[j] = {std::cos(ang), std::sin(ang)};
  }
  fft_radix2(x);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(x[i]) > std::abs(x[peak])) peak = i;
  CHECK(peak == k);
}

TEST_CASE("fft rejects non-power-of-two sizes") {
  std::vector<std::complex<double>> x(100);
  CHECK_THROWS_AS(fft_radix2(x), Error);
}

TEST_CASE("next_pow2") {
  CHECK(next_pow2(1) == 1);
  CHECK(next_pow2(5) == 8);
  CHECK(next_pow2(4096) == 4096);
  CHECK(next_pow2(4097) == 8192);
}

TEST_CASE("rng is deterministic per seed") {
  Rng a(99), b(99), c(100);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    double va = a.uniform(), vb = b.uniform(), vc = c.uniform();
    all_equal = all_equal && va == vb;
    any_diff = any_diff || va != vc;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("rng uniform moments and range") {
  Rng rng(5);
  std::vector<double> v(20000);
  for (auto& x : v) {
    x = rng.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  CHECK(oracles::mean(v) == Catch::Approx(0.5).margin(0.02));
  CHECK(oracles::sample_variance(v) ==
        Catch::Approx(1.0 / 12.0).epsilon(0.1));
}

TEST_CASE("rng normal moments") {
  Rng rng(6);
  std::vector<double> v(20000);
  for (auto& x : v) x = rng.normal(2.0, 3.0);
  CHECK(oracles::mean(v) == Catch::Approx(2.0).margin(0.1));
  CHECK(oracles::sample_variance(v) == Catch::Approx(9.0).epsilon(0.1));
}

TEST_CASE("rng exponential and pareto") {
  Rng rng(7);
  std::vector<double> e(20000), p(20000);
  for (auto& x : e) {
    x = rng.exponential(2.0);
    REQUIRE(x > 0.0);
  }
  CHECK(oracles::mean(e) == Catch::Approx(0.5).epsilon(0.05));

  for (auto& x : p) {
    x = rng.pareto(1.0, 1.5);
    REQUIRE(x >= 1.0);
  }
  std::sort(p.begin(), p.end());
  // Median of Pareto(x_m, alpha) is x_m * 2^(1/alpha).
  CHECK(p[p.size() / 2] ==
        Catch::Approx(std::pow(2.0, 1.0 / 1.5)).epsilon(0.05));
}

TEST_CASE("trace interpolation and resampling") {
  Trace t;
  t.start_time = 1.0;
  t.sample_interval = 1.0;
  t.values = {0.0, 10.0, 20.0};

  CHECK(value_at(t, 1.25) == Catch::Approx(2.5));
  CHECK(value_at(t, 0.0) == 0.0);    // clamps to front
  CHECK(value_at(t, 99.0) == 20.0);  // clamps to back
  CHECK(t.duration() == Catch::Approx(2.0));

  Trace r = resample(t, 1.0, 0.5, 5);
  CHECK(r.values == std::vector<double>{0.0, 5.0, 10.0, 15.0, 20.0});
}

TEST_CASE("iq round trip is bit-exact") {
  Rng rng(21);
  IQRecording rec;
  rec.sample_rate = 1e6;
  rec.center_frequency = 868.26e6;
  rec.start_time_unix = 1234.5;
  rec.description = "round trip";
  rec.samples.resize(100000);
  for (auto& s : rec.samples)
    s = {static_cast<float>(rng.normal()), static_cast<float>(rng.normal())};

  auto path = (temp_dir() / "roundtrip.iq").string();
  write_iq(rec, path);
  IQRecording back = read_iq(path);

  REQUIRE(back.samples.size() == rec.samples.size());
  CHECK(std::memcmp(back.samples.data(), rec.samples.data(),
                    rec.samples.size() * sizeof(rec.samples[0])) == 0);
  CHECK(back.sample_rate == rec.sample_rate);
  CHECK(back.center_frequency == rec.center_frequency);
  CHECK(back.start_time_unix == rec.start_time_unix);
  CHECK(back.description == rec.description);
}

TEST_CASE("iq errors carry distinct codes") {
  auto dir = temp_dir();

  SECTION("odd float count is a truncated recording") {
    auto path = (dir / "odd.iq").string();
    {
      std::ofstream f(path, std::ios::binary);
      float vals[7] = {0, 1, 2, 3, 4, 5, 6};
      f.write(reinterpret_cast<const char*>(vals), sizeof(vals));
      std::ofstream m(path + ".json");
      m << R"({"sample_rate": 1e6, "center_frequency": 0})";
    }
    try {
      read_iq(path);
      FAIL("expected truncated_recording");
    } catch (const Error& e) {
      CHECK(e.code() == errc::truncated_recording);
    }
  }

  SECTION("missing sidecar") {
    auto path = (dir / "nosidecar.iq").string();
    std::ofstream(path, std::ios::binary).write("\0\0\0\0\0\0\0\0", 8);
    try {
      read_iq(path);
      FAIL("expected invalid_metadata");
    } catch (const Error& e) {
      CHECK(e.code() == errc::invalid_metadata);
    }
  }

  SECTION("sidecar missing sample_rate names the field") {
    auto path = (dir / "nofield.iq").string();
    std::ofstream(path, std::ios::binary).write("\0\0\0\0\0\0\0\0", 8);
    std::ofstream(path + ".json") << R"({"center_frequency": 0})";
    try {
      read_iq(path);
      FAIL("expected invalid_metadata");
    } catch (const Error& e) {
      CHECK(e.code() == errc::invalid_metadata);
      CHECK(std::string(e.what()).find("sample_rate") != std::string::npos);
    }
  }

  SECTION("non-finite samples rejected") {
    auto path = (dir / "nan.iq").string();
    {
      std::ofstream f(path, std::ios::binary);
      float vals[2] = {std::numeric_limits<float>::quiet_NaN(), 0.0f};
      f.write(reinterpret_cast<const char*>(vals), sizeof(vals));
      std::ofstream(path + ".json")
          << R"({"sample_rate": 1e6, "center_frequency": 0})";
    }
    try {
      read_iq(path);
      FAIL("expected non_finite_samples");
    } catch (const Error& e) {
      CHECK(e.code() == errc::non_finite_samples);
    }
  }

  SECTION("missing file") {
    try {
      read_iq((dir / "does_not_exist.iq").string());
      FAIL("expected io_error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::io_error);
    }
  }
}

TEST_CASE("trace csv round trip is lossless") {
  Rng rng(31);
  Trace t;
  t.start_time = 0.0;
  t.sample_interval = 0.05;
  t.values.resize(500);
  for (auto& v : t.values) v = 868.26e6 + rng.normal(0, 500);
  t.values[100] = std::numeric_limits<double>::quiet_NaN();  // missing sample

  auto path = (temp_dir() / "trace.csv").string();
  write_trace_csv(t, path, "frequency_hz");
  Trace back = read_frequency_csv(path);

  REQUIRE(back.values.size() == t.values.size());
  CHECK(back.start_time == t.start_time);
  CHECK(back.sample_interval == Catch::Approx(t.sample_interval).epsilon(1e-12));
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    if (std::isnan(t.values[i]))
      CHECK(std::isnan(back.values[i]));
    else
      CHECK(back.values[i] == t.values[i]);  // %.17g round-trips exactly
  }
}

TEST_CASE("read_resp_csv contract") {
  auto dir = temp_dir();

  SECTION("well-formed three-row file") {
    auto path = (dir / "resp3.csv").string();
    std::ofstream(path) << "time_s,force_n\n0.0,1.5\n0.1,2.5\n0.2,3.5\n";
    RespTrace t = read_resp_csv(path);
    REQUIRE(t.values.size() == 3);
    CHECK(t.sample_interval == 0.1);
    CHECK(t.values[2] == 3.5);
  }

  SECTION("uniform 10 Hz input keeps the exact interval") {
    auto path = (dir / "resp10.csv").string();
    std::ofstream f(path);
    f << "time_s,force_n\n";
    for (int i = 0; i < 50; ++i)
      f << detail::fmt_g17(0.1 * i) << "," << std::sin(0.3 * i) << "\n";
    f.close();
    RespTrace t = read_resp_csv(path);
    CHECK(t.sample_interval == Catch::Approx(0.1).epsilon(1e-12));
    CHECK(t.values.size() == 50);
  }

  SECTION("non-monotonic time") {
    auto path = (dir / "shuffled.csv").string();
    std::ofstream(path) << "time_s,force_n\n0.2,1\n0.0,2\n0.1,3\n";
    try {
      read_resp_csv(path);
      FAIL("expected non_monotonic_time");
    } catch (const Error& e) {
      CHECK(e.code() == errc::non_monotonic_time);
    }
  }

  SECTION("missing force column") {
    auto path = (dir / "nocol.csv").string();
    std::ofstream(path) << "time_s,pressure\n0,1\n1,2\n";
    try {
      read_resp_csv(path);
      FAIL("expected missing_column");
    } catch (const Error& e) {
      CHECK(e.code() == errc::missing_column);
    }
  }

  SECTION("non-uniform timestamps are resampled to the median interval") {
    auto path = (dir / "jitter.csv").string();
    std::ofstream(path)
        << "time_s,force_n\n0.0,0\n0.1,1\n0.25,2.5\n0.3,3\n0.4,4\n";
    RespTrace t = read_resp_csv(path);
    CHECK(t.sample_interval == Catch::Approx(0.1).epsilon(1e-12));
    // Values are linear in time, so resampling reproduces the ramp 10*t.
    for (std::size_t i = 0; i < t.values.size(); ++i)
      CHECK(t.values[i] == Catch::Approx(10.0 * t.time_at(i)).margin(1e-9));
  }
}
