#pragma once

#include <cstddef>
#include <vector>

#include "pdmicro/green.hpp"
#include "pdmicro/units.hpp"

namespace pdm {

/// Square detector at z = -d, centred on the field axis.
struct DetectorPlane {
  double d = 0.5;        // m
  double extent = 2e-3;  // half-width, m
  int n = 128;           // pixels per side
};

/// Current density samples are normalized to the golden-rule current of a
/// unit-strength source, so they are in m^-2 and integrate to strength^2.
struct CurrentMap {
  DetectorPlane plane;
  std::vector<double> j;  // n * n, row-major from (-extent, -extent)
  double energy = 0.0;    // J
  SourceModel source;
};

struct RadialProfile {
  std::vector<double> rho;  // m, uniform, starting at 0
  std::vector<double> j;    // m^-2, normalized as in CurrentMap
  double energy = 0.0;      // J
  double d = 0.0;           // m
  SourceModel source;
  FieldScales scales{};
};

struct FringeReport {
  int n_fringes = 0;
  std::vector<double> maxima_rho;  // m, ascending
  double rho_max_classical = 0.0;  // m
};

/// Downward flux j = -(hbar/m) Im(psi* dpsi/dz) of the source wave through
/// the plane z = point.z, divided by the golden-rule current of the same
/// source at unit strength. Units m^-2.
[[nodiscard]] double current_density(const SpacePoint& point, double energy, const SourceModel& src,
                                     const FieldScales& scales);

/// Semiclassical counterpart of current_density for an s_wave source, from
/// the van Vleck sum and its gradient; same normalization. Valid where
/// semiclassical_wave is.
[[nodiscard]] double semiclassical_current_density(const SpacePoint& point, double energy,
                                                   const FieldScales& scales);

/// Samples current_density at n_samples uniform radii from 0 to
/// min(1.2 rho_max, plane.extent). n_samples >= 64. `workers` = 0 uses all
/// hardware threads; the result does not depend on it.
[[nodiscard]] RadialProfile radial_profile(double energy, const SourceModel& src,
                                           const FieldScales& scales, const DetectorPlane& plane,
                                           int n_samples, int workers = 0);

/// current_density at every pixel centre, row-major from (-extent, -extent).
[[nodiscard]] CurrentMap map_plane(double energy, const SourceModel& src, const FieldScales& scales,
                                   const DetectorPlane& plane, int workers = 0);

/// 2 pi int j rho drho by composite Simpson on the profile grid, in units of
/// the unit-strength golden-rule current. Throws DomainError when the profile
/// stops short of 1.2 rho_max.
[[nodiscard]] double total_flux(const RadialProfile& profile);

/// Indices of local maxima of a radial profile whose topographic prominence
/// is at least `rel_prominence` times the global maximum. rho = 0 is treated
/// as a mirror axis, so a maximum there counts.
[[nodiscard]] std::vector<std::size_t> prominent_maxima(const std::vector<double>& j,
                                                        double rel_prominence);

/// Local maxima with prominence >= 5% of the global maximum; the central
/// maximum at rho = 0 counts. Positions are refined by a three-point
/// parabola. Throws DomainError when the profile has fewer than 8 samples
/// per expected fringe inside rho_max, or is flat.
[[nodiscard]] FringeReport count_fringes(const RadialProfile& profile);

}  // namespace pdm
