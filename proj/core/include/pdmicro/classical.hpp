#pragma once

#include <vector>

#include "pdmicro/green.hpp"
#include "pdmicro/units.hpp"

namespace pdm {

/// One classical path from the source (origin) to a detector point.
struct Trajectory {
  double t_flight = 0.0;      // s
  double launch_angle = 0.0;  // rad from +z; 0 = straight up, pi = straight down
  double action_S = 0.0;      // reduced action int p.dl, J s
  double vanvleck_amp = 0.0;  // |A| in the units of GreenEvaluation::value
  int maslov = 0;             // conjugate points passed before arrival
};

struct TrajectorySet {
  SpacePoint target;
  std::vector<Trajectory> members;  // ascending t_flight
  bool caustic_flag = false;
};

/// Radius of the classically allowed disk on a plane at distance d below the
/// source: 2 sqrt(d zeta + zeta^2), zeta = E / F. Throws DomainError unless
/// E > 0 and d > 0.
[[nodiscard]] double rho_max(double energy, const FieldScales& scales, double d);

/// All launch directions with 1/2 m v0^2 = E that reach `target` (z = -d).
/// Two inside the allowed disk, one (caustic_flag) within 1e-9 relative of
/// its rim, none outside. Throws SolverError when a bracketed root cannot be
/// polished, DomainError for E <= 0 or a target not below the source.
[[nodiscard]] TrajectorySet find_trajectories(const SpacePoint& target, double energy,
                                              const FieldScales& scales);

/// Reduced action W = 2 E t - F v0 cos(theta) t^2 + F^2 t^3 / 3m of a
/// trajectory, in J s. Throws DomainError when the trajectory does not end
/// on `target`.
[[nodiscard]] double action_along(const Trajectory& traj, const SpacePoint& target, double energy,
                                  const FieldScales& scales);

/// Same action by adaptive quadrature of |p| ds along the path.
[[nodiscard]] double action_along_quadrature(const Trajectory& traj, double energy,
                                             const FieldScales& scales);

struct PhaseDifference {
  double delta_phi;        // rad
  double fringe_estimate;  // delta_phi / 2 pi
};

/// Phase difference of the two paths at the pattern center,
/// (4 sqrt(2) / 3) sqrt(m) E^{3/2} / (hbar F); independent of d.
[[nodiscard]] PhaseDifference central_phase_difference(double energy, const FieldScales& scales);

/// Van Vleck sum -sum_i |A_i| exp(i W_i / hbar - i mu_i pi / 2), in the
/// units of GreenEvaluation::value. Throws DomainError outside the allowed
/// disk or within 2% of rho_max from the caustic.
[[nodiscard]] ComplexAmplitude semiclassical_wave(const SpacePoint& target, double energy,
                                                  const FieldScales& scales);

/// semiclassical_wave with its gradient, each path differentiated through
/// its own phase (d/dr of W_i / hbar is the arrival momentum p_i / hbar).
[[nodiscard]] GreenEvaluation semiclassical_evaluation(const SpacePoint& target, double energy,
                                                       const FieldScales& scales);

}  // namespace pdm
