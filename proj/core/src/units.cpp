#include "pdmicro/units.hpp"

#include <cmath>
#include <string>

#include "pdmicro/errors.hpp"

namespace pdm {

FieldScales make_scales(double electric_field_V_per_m, const PhysicalConstants& c) {
  if (!std::isfinite(electric_field_V_per_m) || electric_field_V_per_m <= 0.0) {
    throw DomainError("electric field must be positive and finite, got " +
                      std::to_string(electric_field_V_per_m));
  }
  FieldScales s;
  s.constants = c;
  s.force_F = c.q_e * electric_field_V_per_m;
  s.length_lF = std::cbrt(c.hbar * c.hbar / (2.0 * c.m_e * s.force_F));
  s.energy_epsF = s.force_F * s.length_lF;
  return s;
}

std::optional<EnergyUnit> parse_energy_unit(std::string_view tag) {
  if (tag == "J") return EnergyUnit::joule;
  if (tag == "eV") return EnergyUnit::electronvolt;
  if (tag == "ueV" || tag == "\xC2\xB5" "eV" || tag == "\xCE\xBC" "eV") {
    return EnergyUnit::microelectronvolt;
  }
  if (tag == "u") return EnergyUnit::field;
  return std::nullopt;
}

namespace {

double joules_per_unit(EnergyUnit u, const std::optional<FieldScales>& scales) {
  switch (u) {
    case EnergyUnit::joule:
      return 1.0;
    case EnergyUnit::electronvolt:
      return kElementaryCharge;
    case EnergyUnit::microelectronvolt:
      return kElementaryCharge * 1e-6;
    case EnergyUnit::field:
      if (!scales) throw DomainError("field-unit energy conversion needs FieldScales");
      return scales->energy_epsF;
  }
  throw DomainError("unknown energy unit");
}

}  // namespace

double convert_energy(double value, EnergyUnit from, EnergyUnit to,
                      const std::optional<FieldScales>& scales) {
  if (from == to) return value;
  return value * joules_per_unit(from, scales) / joules_per_unit(to, scales);
}

double convert_energy(double value, std::string_view from, std::string_view to,
                      const std::optional<FieldScales>& scales) {
  const auto f = parse_energy_unit(from);
  const auto t = parse_energy_unit(to);
  if (!f) throw DomainError("unknown energy unit '" + std::string(from) + "'");
  if (!t) throw DomainError("unknown energy unit '" + std::string(to) + "'");
  return convert_energy(value, *f, *t, scales);
}

}  // namespace pdm
