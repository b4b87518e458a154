// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sys/wait.h>

#include "irs/config.hpp"

using namespace irs;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run irsopt(const std::string& args) {
  const std::string cmd = std::string(IRSOPT_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("irsopt_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string expect_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  FAIL("expected ConfigError for " << text);
  return {};
}

}  // namespace

TEST_CASE("config: empty document yields the defaults") {
  const RunConfig rc = parse_config_text("");
  const ExperimentConfig& c = rc.experiment;
  CHECK(c.radio.wavelength_m == doctest::Approx(3e-3));
  CHECK(c.radio.bandwidth_hz == 100e6);
  CHECK(c.radio.transmit_power_w == 1.0);
  CHECK(c.radio.noise_density_dbm_hz == -174.0);
  CHECK(c.radio.absorption_per_m == 0.0);
  CHECK(c.bs_spacing == 0.5);
  CHECK(c.ue_spacing == 0.5);
  CHECK(c.q_vector() == Eigen::VectorXd::Ones(c.K));
  CHECK_FALSE(rc.sweep.has_value());
}

TEST_CASE("config: units in key names and command-line overrides") {
  const std::string text = R"({"radio": {"frequency_ghz": 300},
                              "irs": {"count": 2, "area_cm2": 25},
                              "ue": {"count": 2, "elements": 4},
                              "bs": {"elements": 16},
                              "experiment": {"trials": 7, "seed": 99}})";
  const RunConfig a = parse_config_text(text);
  CHECK(a.experiment.radio.wavelength_m == doctest::Approx(1e-3).epsilon(1e-3));
  CHECK(a.experiment.irs_area_m2 == doctest::Approx(25e-4));
  CHECK(a.experiment.trials == 7);
  ConfigOverrides o;
  o.K = 4;
  o.N = 4;
  o.area_cm2 = 1.0;
  const RunConfig b = parse_config_text(text, o);
  CHECK(b.experiment.K == 4);
  CHECK(b.experiment.N == 4);
  CHECK(b.experiment.irs_area_m2 == doctest::Approx(1e-4));
}

TEST_CASE("config: errors name the key path") {
  CHECK(expect_error(R"({"bs": {"elements": "many"}})").find("bs.elements") != std::string::npos);
  CHECK(expect_error(R"({"channel": {"sigma_sh": 3}})").find("channel.sigma_sh") != std::string::npos);
  CHECK(expect_error(R"({"wall": {"material": {"table": [{"incidence_deg": 0, "rho": "x"}]}}})")
            .find("wall.material.table[0].rho") != std::string::npos);
  CHECK(expect_error("{ not json").find("syntax") != std::string::npos);
  CHECK(expect_error(R"({"ue": {"count": 3}, "irs": {"count": 2}})").find("K") != std::string::npos);
}

TEST_CASE("config: dump round-trips") {
  const std::string text = R"({"ue": {"count": 2, "elements": 4}, "irs": {"count": 3, "area_cm2": 4},
                              "wall": {"enabled": true}, "channel": {"paths": 2, "sigma_sh_db": 3},
                              "evaluation": {"quant_bits": 2},
                              "optimizer": {"algorithms": ["HOP", "NR"], "starts": 5},
                              "sweep": {"variable": "K", "values": [1, 2]}})";
  const RunConfig a = parse_config_text(text);
  const std::string dumped = dump_config(a);
  const RunConfig b = parse_config_text(dumped);
  CHECK(dump_config(b) == dumped);
  CHECK(b.experiment.quant_bits == 2);
  CHECK(b.experiment.algorithms.size() == 2);
  CHECK(b.sweep->values == std::vector<double>{1, 2});
}

TEST_CASE("cli: validate passes and prints a JSON summary") {
  const Run r = irsopt("validate --instances 20");
  CHECK(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["ok"] == true);
  CHECK(j["checks"].size() >= 8);
}

TEST_CASE("cli: a corrupted gradient makes validate fail") {
  const Run r = irsopt("validate --instances 20 --corrupt-gradient");
  CHECK(r.status != 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["ok"] == false);
  bool gradient_failed = false;
  for (const auto& c : j["checks"])
    if (c["name"] == "gradient_vs_finite_difference") gradient_failed = !c["passed"].get<bool>();
  CHECK(gradient_failed);
}

TEST_CASE("cli: validate leaves config files and the working tree alone") {
  const fs::path d = scratch("validate");
  const fs::path cfg = d / "cfg.json";
  std::ofstream(cfg) << R"({"ue": {"count": 1}})";
  const auto before = fs::last_write_time(cfg);
  const Run r = irsopt("validate --instances 5");
  CHECK(r.status == 0);
  CHECK(fs::last_write_time(cfg) == before);
  CHECK(std::distance(fs::directory_iterator(d), fs::directory_iterator{}) == 1);
}

TEST_CASE("cli: simulate writes records and CDF") {
  const fs::path d = scratch("simulate");
  const Run r = irsopt("simulate --trials 5 --K 2 --N 2 --out-dir " + d.string());
  CHECK(r.status == 0);
  CHECK(fs::exists(d / "records.csv"));
  CHECK(fs::exists(d / "cdf.csv"));
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["summaries"][0]["trials"] == 5);
}

TEST_CASE("cli: sweep, pattern and optimize") {
  const fs::path d = scratch("misc");
  CHECK(irsopt("sweep --trials 3 --variable K --values 1 2 --out-dir " + d.string()).status == 0);
  CHECK(fs::exists(d / "sweep.csv"));
  CHECK(irsopt("pattern --points 101 --out-dir " + d.string()).status == 0);
  CHECK(fs::exists(d / "irs_pattern_0.csv"));
  CHECK(fs::exists(d / "bs_pattern.csv"));
  const fs::path cfg = d / "opt.json";
  std::ofstream(cfg) << R"({"optimizer": {"algorithms": ["HOP", "NRP"], "starts": 3}})";
  const Run r = irsopt("optimize --trace -c " + cfg.string() + " --out-dir " + d.string());
  CHECK(r.status == 0);
  CHECK(fs::exists(d / "trace.csv"));
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["results"].size() == 2);
}

TEST_CASE("cli: bad input exits nonzero with a machine-readable error") {
  const fs::path d = scratch("bad");
  const fs::path cfg = d / "bad.json";
  std::ofstream(cfg) << R"({"bs": {"elements": "x"}})";
  const Run r = irsopt("simulate -c " + cfg.string() + " --out-dir " + d.string());
  CHECK(r.status != 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["ok"] == false);
  CHECK(j["error"].get<std::string>().find("bs.elements") != std::string::npos);
  CHECK(irsopt("").status != 0);
  CHECK(irsopt("simulate --K 3 --N 2").status != 0);
}
