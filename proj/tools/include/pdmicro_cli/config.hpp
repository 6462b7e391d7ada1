#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdmicro/green.hpp"

namespace pdm::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Subcommand { map, profile, total_current, sweep, fit_einstein, compare_semiclassical };

/// Throws ConfigError for an unknown name.
[[nodiscard]] Subcommand parse_subcommand(std::string_view name);
[[nodiscard]] std::string_view subcommand_name(Subcommand cmd);

struct RunConfig {
  std::optional<double> field_V_per_m;
  std::optional<double> distance_m;
  std::optional<double> energy_ueV;
  std::optional<std::vector<double>> photon_eV;
  std::optional<double> binding_eV;
  std::optional<SourceKind> source_kind;
  std::optional<int> grid_n;
  std::optional<double> grid_extent_m;
  std::optional<int> profile_samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_prefix;
  std::optional<int> workers;
  std::optional<double> noise_rel;
  std::optional<std::string> input_csv;

  // Keys as written, in file order, for the metadata echo.
  std::vector<std::pair<std::string, std::string>> entries;
};

/// `key = value` lines; `#` starts a comment; blank lines are skipped.
/// Errors carry the line number and the key.
[[nodiscard]] RunConfig parse_config(std::string_view text);

/// Checks that `cfg` holds what `cmd` needs. Throws ConfigError naming the
/// first missing or conflicting key.
void require_for(const RunConfig& cfg, Subcommand cmd);

}  // namespace pdm::cli
