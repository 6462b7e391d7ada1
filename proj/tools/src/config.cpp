#include "pdmicro_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace pdm::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, std::string_view key, const std::string& what) {
  std::ostringstream os;
  os << "line " << line << ": ";
  if (!key.empty()) os << "'" << key << "': ";
  os << what;
  throw ConfigError(os.str());
}

double to_double(int line, std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x)) {
    fail(line, key, "expected a number, got '" + std::string(v) + "'");
  }
  return x;
}

double positive(int line, std::string_view key, std::string_view v) {
  const double x = to_double(line, key, v);
  if (!(x > 0.0)) fail(line, key, "must be positive, got " + std::string(v));
  return x;
}

long long to_integer(int line, std::string_view key, std::string_view v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    fail(line, key, "expected an integer, got '" + std::string(v) + "'");
  }
  return x;
}

int int_at_least(int line, std::string_view key, std::string_view v, long long lo) {
  const long long x = to_integer(line, key, v);
  if (x < lo || x > 1'000'000) {
    fail(line, key, "must lie in [" + std::to_string(lo) + ", 1000000], got " + std::string(v));
  }
  return static_cast<int>(x);
}

std::vector<double> photon_list(int line, std::string_view key, std::string_view v) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t next = std::min(v.find(',', pos), v.size());
    const std::string_view item = trim(v.substr(pos, next - pos));
    if (item.empty()) fail(line, key, "empty entry in list");
    out.push_back(positive(line, key, item));
    pos = next + 1;
  }
  return out;
}

[[noreturn]] void missing(std::string_view key, Subcommand cmd) {
  std::ostringstream os;
  os << "missing required key '" << key << "' for " << subcommand_name(cmd);
  throw ConfigError(os.str());
}

[[noreturn]] void conflict(std::string_view key, Subcommand cmd) {
  std::ostringstream os;
  os << "key '" << key << "' does not apply to " << subcommand_name(cmd);
  throw ConfigError(os.str());
}

}  // namespace

Subcommand parse_subcommand(std::string_view name) {
  if (name == "map") return Subcommand::map;
  if (name == "profile") return Subcommand::profile;
  if (name == "total-current") return Subcommand::total_current;
  if (name == "sweep") return Subcommand::sweep;
  if (name == "fit-einstein") return Subcommand::fit_einstein;
  if (name == "compare-semiclassical") return Subcommand::compare_semiclassical;
  throw ConfigError("unknown subcommand '" + std::string(name) + "'");
}

std::string_view subcommand_name(Subcommand cmd) {
  switch (cmd) {
    case Subcommand::map: return "map";
    case Subcommand::profile: return "profile";
    case Subcommand::total_current: return "total-current";
    case Subcommand::sweep: return "sweep";
    case Subcommand::fit_einstein: return "fit-einstein";
    case Subcommand::compare_semiclassical: return "compare-semiclassical";
  }
  return "?";
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "", "syntax error, expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "", "syntax error, empty key");
    if (value.empty()) fail(line_no, key, "empty value");
    const bool seen = std::any_of(cfg.entries.begin(), cfg.entries.end(),
                                  [&](const auto& e) { return e.first == key; });
    if (seen) fail(line_no, key, "duplicate key");

    if (key == "field_V_per_m") {
      cfg.field_V_per_m = positive(line_no, key, value);
    } else if (key == "distance_m") {
      cfg.distance_m = positive(line_no, key, value);
    } else if (key == "energy_ueV") {
      cfg.energy_ueV = positive(line_no, key, value);
    } else if (key == "photon_eV") {
      cfg.photon_eV = photon_list(line_no, key, value);
    } else if (key == "binding_eV") {
      cfg.binding_eV = positive(line_no, key, value);
    } else if (key == "source_kind") {
      if (value == "s") {
        cfg.source_kind = SourceKind::s_wave;
      } else if (value == "pz") {
        cfg.source_kind = SourceKind::pz_dipole;
      } else {
        fail(line_no, key, "expected 's' or 'pz', got '" + std::string(value) + "'");
      }
    } else if (key == "grid_n") {
      cfg.grid_n = int_at_least(line_no, key, value, 2);
    } else if (key == "grid_extent_m") {
      cfg.grid_extent_m = positive(line_no, key, value);
    } else if (key == "profile_samples") {
      cfg.profile_samples = int_at_least(line_no, key, value, 64);
    } else if (key == "seed") {
      std::uint64_t s = 0;
      const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), s);
      if (ec != std::errc() || p != value.data() + value.size()) {
        fail(line_no, key, "expected a non-negative integer, got '" + std::string(value) + "'");
      }
      cfg.seed = s;
    } else if (key == "output_prefix") {
      cfg.output_prefix = std::string(value);
    } else if (key == "workers") {
      cfg.workers = int_at_least(line_no, key, value, 0);
    } else if (key == "noise_rel") {
      const double x = to_double(line_no, key, value);
      if (!(x >= 0.0 && x < 1.0)) fail(line_no, key, "must lie in [0, 1), got " + std::string(value));
      cfg.noise_rel = x;
    } else if (key == "input_csv") {
      cfg.input_csv = std::string(value);
    } else {
      fail(line_no, key, "unknown key");
    }
    cfg.entries.emplace_back(std::string(key), std::string(value));
  }
  return cfg;
}

void require_for(const RunConfig& cfg, Subcommand cmd) {
  if (!cfg.field_V_per_m) missing("field_V_per_m", cmd);
  switch (cmd) {
    case Subcommand::map:
    case Subcommand::profile:
    case Subcommand::compare_semiclassical:
      if (!cfg.distance_m) missing("distance_m", cmd);
      if (!cfg.energy_ueV) missing("energy_ueV", cmd);
      if (cfg.photon_eV) conflict("photon_eV", cmd);
      if (cfg.binding_eV) conflict("binding_eV", cmd);
      if (cmd == Subcommand::compare_semiclassical && cfg.source_kind &&
          *cfg.source_kind != SourceKind::s_wave) {
        throw ConfigError("compare-semiclassical supports source_kind = s only");
      }
      break;
    case Subcommand::total_current:
      break;
    case Subcommand::fit_einstein:
      if (cfg.input_csv) {
        if (cfg.photon_eV) conflict("photon_eV", cmd);
        break;
      }
      [[fallthrough]];
    case Subcommand::sweep:
      if (!cfg.distance_m) missing("distance_m", cmd);
      if (!cfg.photon_eV) missing("photon_eV", cmd);
      if (!cfg.binding_eV) missing("binding_eV", cmd);
      if (cfg.energy_ueV) conflict("energy_ueV", cmd);
      break;
  }
  if (cfg.input_csv && cmd != Subcommand::fit_einstein) conflict("input_csv", cmd);
}

}  // namespace pdm::cli
