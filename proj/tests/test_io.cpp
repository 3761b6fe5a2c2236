#include <doctest.h>

#include <cstring>
#include <sstream>

#include "nstorus/config.hpp"
#include "nstorus/norm_series.hpp"
#include "nstorus/snapshot.hpp"

using namespace nstorus;

TEST_CASE("NSF1 round trip is bit exact") {
  for (int n : {8, 16}) {
    const Field f = random_divfree(1.0, 3, 2.0, GridSpec(n));
    std::stringstream buf;
    write_snapshot(buf, f);
    const std::string bytes = buf.str();
    CHECK(bytes.size() == 16 + f.grid().mode_count() * 3 * 16);
    CHECK(bytes.substr(0, 4) == "NSF1");
    const Field back = read_snapshot(buf);
    CHECK(back == f);
  }
}

TEST_CASE("NSF1 byte layout") {
  const GridSpec g(4);  // K = 1, 27 modes
  Field f(g);
  f[0][0] = {1.5, -2.0};
  f[26][2] = {0.25, 0.0};
  std::stringstream buf;
  write_snapshot(buf, f);
  const std::string b = buf.str();
  auto u32 = [&](std::size_t at) {
    return std::uint32_t(std::uint8_t(b[at])) | std::uint32_t(std::uint8_t(b[at + 1])) << 8 |
           std::uint32_t(std::uint8_t(b[at + 2])) << 16 | std::uint32_t(std::uint8_t(b[at + 3])) << 24;
  };
  auto f64 = [&](std::size_t at) {
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = bits << 8 | std::uint8_t(b[at + i]);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  };
  CHECK(u32(4) == 4);
  CHECK(u32(8) == 1);
  CHECK(u32(12) == 3);
  CHECK(f64(16) == 1.5);
  CHECK(f64(24) == -2.0);
  CHECK(f64(16 + 26 * 48 + 32) == 0.25);
}

TEST_CASE("NSF1 rejects corrupt input") {
  std::stringstream bad("NSF2xxxxxxxxxxxxxxxx");
  CHECK_THROWS(read_snapshot(bad));
  const Field f = random_divfree(1.0, 3, 2.0, GridSpec(8));
  std::stringstream buf;
  write_snapshot(buf, f);
  std::stringstream cut(buf.str().substr(0, 100));
  CHECK_THROWS(read_snapshot(cut));
}

TEST_CASE("norm CSV round trip") {
  NormSeries s;
  s.push(0.0, 0.1, 1.0 / 3, 1.0 / 9, 0.0);
  s.push(1e-3, 0.7071067811865476, 2e-300, 5e-17, 1e-20);
  std::stringstream buf;
  write_csv(buf, s);
  CHECK(buf.str().rfind("t,l2,h1,enstrophy,div_linf\n", 0) == 0);
  const NormSeries back = read_csv(buf);
  CHECK(back.times == s.times);
  CHECK(back.l2 == s.l2);
  CHECK(back.h1 == s.h1);
  CHECK(back.enstrophy == s.enstrophy);
  CHECK(back.div_linf == s.div_linf);
}

TEST_CASE("norm series validation") {
  NormSeries s;
  s.push(0, 1, 1, 1, 0);
  s.push(0, 1, 1, 1, 0);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      "# desk run\n"
      "N = 12\n"
      "dt=2e-3   # coarse\n"
      "amplitudes = 0.1, 0.4,0.9\n"
      "mode = long\n"
      "horizon = 3\n"
      "solver = hybrid\n"
      "seed = 42\n");
  CHECK(c.N == 12);
  CHECK(c.dt == 2e-3);
  CHECK(c.amplitudes == std::vector<double>{0.1, 0.4, 0.9});
  CHECK(c.mode == HorizonMode::long_term);
  CHECK(c.solver == SolverMode::hybrid);
  CHECK(c.seed == 42);
  CHECK(c.grid().cutoff() == 4);
}

namespace {

std::string offending_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("config errors name the key") {
  CHECK(offending_key("dt = -1\n") == "dt");
  CHECK(offending_key("dt = fast\n") == "dt");
  CHECK(offending_key("frobnicate = 1\n") == "frobnicate");
  CHECK(offending_key("amplitudes = 0.3, 0.2\n") == "amplitudes");
  CHECK(offending_key("amplitudes = 0.1, 0.1\n") == "amplitudes");
  CHECK(offending_key("horizon = 2\n") == "horizon");
  CHECK(offending_key("N = 7\n") == "N");
  CHECK(offending_key("N = 16\nK = 9\n") == "K");
  CHECK(offending_key("samples = 0\n") == "samples");
  CHECK(offending_key("seed =\n") == "seed");
  CHECK(offending_key("mode = medium\n") == "mode");
  CHECK(offending_key("samples = 3.5\n") == "samples");
  CHECK(offending_key("horizon = 2\nmode = long\n") == "");
}

TEST_CASE("config hash is stable under reordering") {
  const ExperimentConfig a = parse_config("N = 16\ndt = 1e-3\nseed = 3\n");
  const ExperimentConfig b = parse_config("seed = 3\n\n# comment\ndt = 0.001\nN = 16\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  const ExperimentConfig c = parse_config("N = 16\ndt = 1e-3\nseed = 4\n");
  CHECK(config_hash(a) != config_hash(c));
  const ExperimentConfig d = parse_config("N = 16\ndt = 1e-3\nseed = 3\nthreads = 8\nout_dir = elsewhere\n");
  CHECK(config_hash(a) == config_hash(d));
}
