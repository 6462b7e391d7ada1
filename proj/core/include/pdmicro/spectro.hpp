#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdmicro/detector.hpp"
#include "pdmicro/green.hpp"
#include "pdmicro/units.hpp"

namespace pdm {

/// Golden-rule detachment current -strength^2 (2/hbar) Im <s|G(E)|s>, with
/// <s|G|s> the coincidence limit of G (s_wave) or of d^2G/dz dz' (pz_dipole).
/// The overall proportionality constant is conventional; values are in
/// J^-2 m^-3 s^-1 (s_wave) and J^-2 m^-5 s^-1 (pz_dipole). Positive for all
/// finite E.
[[nodiscard]] double golden_rule_current(double energy, const SourceModel& src,
                                         const FieldScales& scales);

/// The same current in field units (-2 strength^2 Im <s|G|s> with
/// hbar = 2m = F = 1) as a function of u = E / eps_F.
[[nodiscard]] double golden_rule_current_field_units(double u, const SourceModel& src);

struct EnergyFit {
  double energy = 0.0;        // J
  double amplitude = 0.0;     // A in j = A j_unit(rho; E)
  double fit_residual = 0.0;  // rms(residual) / rms(data)
  int iterations = 0;
};

/// Fits j(rho) = A j_unit(rho; E) to a measured profile by damped
/// Gauss-Newton (Levenberg-Marquardt) in (E, A). The start value of E comes
/// from the fringe count and a scan over the one-fringe ambiguity. Only
/// profile.rho, profile.j and profile.source are read. Throws FitError for
/// flat or undersampled profiles and when 200 iterations do not bring the
/// relative step below 1e-8.
[[nodiscard]] EnergyFit extract_energy(const RadialProfile& profile, const FieldScales& scales,
                                       double d, int workers = 1);

/// Multiplies every sample by (1 + rel * n_i), n_i standard normal from
/// mt19937_64 seeded with seed_seq{seed, stream}, Box-Muller transformed.
/// Bit-reproducible on any platform.
void add_multiplicative_noise(RadialProfile& profile, double rel, std::uint64_t seed,
                              std::uint64_t stream = 0);

struct SweepPoint {
  double hnu = 0.0;     // J
  double E_true = 0.0;  // J
  double E_fit = 0.0;   // J, NaN when not fitted
  double fit_residual = 0.0;
  bool converged = false;
  std::string note;     // why the point was not fitted
};

struct SweepOptions {
  int profile_samples = 512;
  double noise_rel = 0.0;
  std::uint64_t seed = 42;
  int workers = 0;
};

/// For each photon energy: E_true = hnu - E0, simulated profile on `plane`,
/// optional seeded noise (point i uses stream i), and extract_energy. Points
/// with E_true <= 0.5 eps_F are kept but not fitted; fit failures are
/// recorded per point. Throws DomainError when hnu <= E0 - 5 eps_F.
[[nodiscard]] std::vector<SweepPoint> run_sweep(const std::vector<double>& hnu, double E0_true,
                                                const SourceModel& src, const FieldScales& scales,
                                                const DetectorPlane& plane,
                                                const SweepOptions& opt = {});

struct EinsteinFitResult {
  double slope = 0.0;
  double intercept = 0.0;     // J
  double E0_recovered = 0.0;  // J, = -intercept
  double rms_residual = 0.0;  // J
  int n_points = 0;
};

/// Ordinary least squares of E_fit against hnu over converged points.
/// Throws FitError with fewer than 2 points or identical photon energies.
[[nodiscard]] EinsteinFitResult einstein_fit(const std::vector<SweepPoint>& points);

}  // namespace pdm
