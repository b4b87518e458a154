// SPDX-License-Identifier: Apache-2.0
//
// JSON configuration. Keys carry their units (area_cm2, boresight_deg, ...);
// unknown keys and type errors are reported with their full key path.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irs/harness.hpp"

namespace irs {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  std::string variable = "K";
  std::vector<double> values;
  bool tie_n_to_k = true;
};

struct RunConfig {
  ExperimentConfig experiment;
  std::optional<SweepSpec> sweep;
};

/// Command-line values that take precedence over the file.
struct ConfigOverrides {
  std::optional<int> K, N, M1, M2, trials;
  std::optional<double> area_cm2;
  std::optional<std::uint64_t> seed;
};

/// Parses JSON text; an empty document yields the defaults.
RunConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides = {});
/// Reads and parses a file. Throws ConfigError for I/O, syntax or schema problems.
RunConfig parse_config(const std::string& path, const ConfigOverrides& overrides = {});

/// Canonical JSON rendering of a configuration (same schema as the input).
std::string dump_config(const RunConfig& cfg);

}  // namespace irs
