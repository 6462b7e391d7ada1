#pragma once

#include <numbers>
#include <optional>
#include <string_view>

namespace pdm {

// CODATA 2018. h and q_e are exact by the 2019 SI definition; hbar is derived
// from h so that h = 2*pi*hbar holds to rounding.
struct PhysicalConstants {
  double hbar;  // J s
  double m_e;   // kg
  double q_e;   // C
  double h;     // J s
};

inline constexpr double kPlanck = 6.62607015e-34;          // J s, exact
inline constexpr double kElectronMass = 9.1093837015e-31;  // kg, +/- 2.8e-40
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C, exact

inline constexpr PhysicalConstants kCodata2018{
    kPlanck / (2.0 * std::numbers::pi), kElectronMass, kElementaryCharge, kPlanck};

/// Characteristic scales of motion under a uniform force F:
/// l_F = (hbar^2 / 2 m F)^(1/3), eps_F = F l_F, tau_F = hbar / eps_F.
///
/// In these units the Hamiltonian reads H = -laplacian + z, i.e. hbar = 1,
/// m = 1/2 and F = 1. All numerics below run in this system.
struct FieldScales {
  double force_F;      // N
  double length_lF;    // m
  double energy_epsF;  // J
  PhysicalConstants constants = kCodata2018;

  [[nodiscard]] double time_tau() const { return constants.hbar / energy_epsF; }
};

/// Scales for an electric field strength in V/m. Throws DomainError for a
/// non-positive or non-finite field.
[[nodiscard]] FieldScales make_scales(double electric_field_V_per_m,
                                      const PhysicalConstants& c = kCodata2018);

enum class EnergyUnit { joule, electronvolt, microelectronvolt, field };

/// Recognises "J", "eV", "ueV" (also "µeV") and "u" (energy / eps_F).
[[nodiscard]] std::optional<EnergyUnit> parse_energy_unit(std::string_view tag);

/// Linear conversion between energy units. Conversions involving
/// EnergyUnit::field require `scales`; otherwise DomainError is thrown.
[[nodiscard]] double convert_energy(double value, EnergyUnit from, EnergyUnit to,
                                    const std::optional<FieldScales>& scales = std::nullopt);

/// Convenience overload taking unit tags; throws DomainError on unknown tags.
[[nodiscard]] double convert_energy(double value, std::string_view from, std::string_view to,
                                    const std::optional<FieldScales>& scales = std::nullopt);

}  // namespace pdm
