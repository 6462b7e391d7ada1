#pragma once

#include <complex>
#include <vector>

#include "pdmicro/units.hpp"

namespace pdm {

/// Cylindrical point. `z` runs along the field axis through the source; the
/// force on the electron points to -z and the detector sits at z = -d.
struct SpacePoint {
  double rho = 0.0;  // m, >= 0
  double z = 0.0;    // m
  double phi = 0.0;  // azimuth, rad
};

using ComplexAmplitude = std::complex<double>;

/// Energy Green function G(r, r'; E) = <r|(E - H + i0)^-1|r'> and its
/// gradient with respect to the first argument.
///
/// Units: value in J^-1 m^-3, gradients in J^-1 m^-4. With this normalization
/// the free-space limit is G = -(m / 2 pi hbar^2) exp(ikR) / R.
struct GreenEvaluation {
  ComplexAmplitude value;
  ComplexAmplitude grad_z;
  ComplexAmplitude grad_rho;
};

enum class SourceKind { s_wave, pz_dipole };

/// Point-source reduction of the propagated dipole state: a delta function
/// (s_wave) or its z-derivative (pz_dipole) at the ion position.
struct SourceModel {
  SourceKind kind = SourceKind::s_wave;
  double strength = 1.0;
};

/// Time-domain propagator for V = F z:
///   K = (m / 2 pi i hbar t)^{3/2}
///       exp{(i/hbar)[m |r - r'|^2 / 2t - F t (z + z') / 2 - F^2 t^3 / 24 m]}
/// in m^-3. Throws DomainError for t <= 0.
[[nodiscard]] ComplexAmplitude kernel(const SpacePoint& r, const SpacePoint& r_src, double t,
                                      const FieldScales& scales);

/// Real stationary points (s) of E t + phase(K) for t > 0, ascending. These
/// are the classical flight times of the paths from r_src to r at energy E.
[[nodiscard]] std::vector<double> stationary_times(const SpacePoint& r, const SpacePoint& r_src,
                                                   double energy, const FieldScales& scales);

/// G = (1/i hbar) int_0^inf exp(i E t / hbar) K dt evaluated by numerical
/// steepest descent: the t-contour is deformed onto the steepest-descent
/// paths through the relevant saddles, so the integrand never oscillates.
/// Relative accuracy about 1e-9. Slow; meant as the reference path.
///
/// Throws DomainError when r == r_src and QuadratureError when no valid
/// contour can be built (saddles coalescing on a caustic) or the
/// integration misses its tolerance.
[[nodiscard]] GreenEvaluation green_energy_quad(const SpacePoint& r, const SpacePoint& r_src,
                                                double energy, const FieldScales& scales);

/// Closed form: with a = z_mean - E/F - R/2 and b = z_mean - E/F + R/2 in
/// field units (z_mean = (z + z')/2, R = |r - r'|),
///   G = (m / 2 hbar^2 R) [Ci(a) Ai'(b) - Ci'(a) Ai(b)],  Ci = Bi + i Ai.
/// Throws DomainError at coincidence; use ldos_at_source there.
[[nodiscard]] GreenEvaluation green_energy(const SpacePoint& r, const SpacePoint& r_src,
                                           double energy, const FieldScales& scales);

/// Im G(0, 0; E) in J^-1 m^-3:
///   -(m / 2 hbar^2 l_F) [Ai'(xi)^2 - xi Ai(xi)^2],  xi = -E / eps_F.
[[nodiscard]] double ldos_at_source(double energy, const FieldScales& scales);

/// Im d^2 G(r, r'; E) / dz dz' at r = r' = 0, in J^-1 m^-5. Drives the
/// golden-rule rate of a pz source.
[[nodiscard]] double ldos_at_source_dzdz(double energy, const FieldScales& scales);

/// Outgoing wave of a point source at the origin: strength * G(r, 0; E) for
/// s_wave, strength * dG(r, r'; E)/dz' at r' = 0 for pz_dipole (an extra
/// m^-1 in the units). Throws DomainError within 1e-3 l_F of the source.
[[nodiscard]] GreenEvaluation source_wave(const SpacePoint& r, double energy,
                                          const SourceModel& src, const FieldScales& scales);

}  // namespace pdm
