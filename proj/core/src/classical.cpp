#include "pdmicro/classical.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>

#include "green_internal.hpp"
#include "pdmicro/errors.hpp"
#include "quadrature.hpp"

namespace pdm {

using detail::CLD;
using detail::LD;

namespace {

constexpr int kThetaCells = 720;
constexpr LD kJacobianStep = 1e-6L;
constexpr LD kCausticTol = 1e-9L;

// Field units throughout: m = 1/2, F = 1, so v0 = 2 sqrt(E) and the
// acceleration is 2 (toward -z).
struct Shooting {
  LD v0;
  LD d;

  LD time(LD theta) const {
    const LD c = v0 * std::cos(theta);
    const LD root = std::sqrt(c * c + 4.0L * d);
    return c >= 0.0L ? 0.5L * (c + root) : 2.0L * d / (root - c);
  }
  LD rho(LD theta) const { return v0 * std::sin(theta) * time(theta); }
  LD drho(LD theta) const {
    return (rho(theta + kJacobianStep) - rho(theta - kJacobianStep)) / (2.0L * kJacobianStep);
  }
};

LD energy_field_units(double energy, const FieldScales& sc) {
  if (!(energy > 0.0) || !std::isfinite(energy)) {
    throw DomainError("classical: energy must be positive and finite");
  }
  return static_cast<LD>(energy) / sc.energy_epsF;
}

LD depth_field_units(const SpacePoint& target, const FieldScales& sc) {
  if (!(target.z < 0.0) || !std::isfinite(target.z)) {
    throw DomainError("classical: target must lie below the source (z < 0)");
  }
  return -static_cast<LD>(target.z) / sc.length_lF;
}

LD action_field_units(LD e, LD theta, LD t) {
  const LD v0 = 2.0L * std::sqrt(e);
  return 2.0L * e * t - v0 * std::cos(theta) * t * t + 2.0L * t * t * t / 3.0L;
}

// |A| of the path in field units; the free-space limit is 1 / (4 pi R).
LD vanvleck_field_units(const Shooting& sh, LD theta, LD t) {
  const LD vz = sh.v0 * std::cos(theta) - 2.0L * t;
  const LD jac = std::abs(sh.drho(theta));
  if (!(jac > 0.0L)) throw SolverError("semiclassical amplitude: singular shooting Jacobian");
  return 1.0L / (4.0L * std::numbers::pi_v<LD> * std::sqrt(t * std::abs(vz) * jac));
}

int maslov_index(LD v0, LD theta, LD t) {
  const LD c = std::cos(theta);
  if (c <= 0.0L) return 0;
  const LD t_conj = v0 / (2.0L * c);  // contact with the envelope
  return t_conj < t ? 1 : 0;
}

Trajectory make_trajectory(const Shooting& sh, LD e, LD theta, const FieldScales& sc) {
  const LD t = sh.time(theta);
  Trajectory tr;
  tr.t_flight = static_cast<double>(t * sc.time_tau());
  tr.launch_angle = static_cast<double>(theta);
  tr.action_S = static_cast<double>(action_field_units(e, theta, t) * sc.constants.hbar);
  tr.maslov = maslov_index(sh.v0, theta, t);
  tr.vanvleck_amp = 0.0;
  const LD jac = std::abs(sh.drho(theta));
  if (jac > 0.0L) {
    tr.vanvleck_amp = static_cast<double>(vanvleck_field_units(sh, theta, t)) *
                      detail::si_green_factor(sc);
  }
  return tr;
}

// Root of rho(theta) = target inside [lo, hi] where rho is monotone. The
// cell holding the sign change is found on the fixed theta grid, then
// polished by TOMS 748.
LD polish_root(const Shooting& sh, LD target, LD lo, LD hi) {
  const auto g = [&](LD th) { return sh.rho(th) - target; };
  const LD cell = std::numbers::pi_v<LD> / kThetaCells;
  LD a = lo;
  LD ga = g(a);
  for (LD b = std::min(hi, (std::floor(lo / cell) + 1.0L) * cell);; b = std::min(hi, b + cell)) {
    const LD gb = g(b);
    if (ga == 0.0L) return a;
    if (gb == 0.0L) return b;
    if ((ga < 0.0L) != (gb < 0.0L)) {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(
          g, a, b, ga, gb, boost::math::tools::eps_tolerance<LD>(52), iters);
      if (iters >= 200) {
        std::ostringstream os;
        os << "find_trajectories: root polish did not converge in [" << static_cast<double>(a)
           << ", " << static_cast<double>(b) << "]";
        throw SolverError(os.str());
      }
      return 0.5L * (r.first + r.second);
    }
    if (b >= hi) break;
    a = b;
    ga = gb;
  }
  std::ostringstream os;
  os << "find_trajectories: no sign change of rho(theta) - " << static_cast<double>(target)
     << " on [" << static_cast<double>(lo) << ", " << static_cast<double>(hi)
     << "] (rho(lo) = " << static_cast<double>(sh.rho(lo))
     << ", rho(hi) = " << static_cast<double>(sh.rho(hi)) << ")";
  throw SolverError(os.str());
}

}  // namespace

double rho_max(double energy, const FieldScales& scales, double d) {
  if (!(energy > 0.0) || !std::isfinite(energy)) throw DomainError("rho_max: energy must be > 0");
  if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("rho_max: distance must be > 0");
  const double zeta = energy / scales.force_F;
  return 2.0 * std::sqrt(d * zeta + zeta * zeta);
}

TrajectorySet find_trajectories(const SpacePoint& target, double energy, const FieldScales& scales) {
  const LD e = energy_field_units(energy, scales);
  const LD d = depth_field_units(target, scales);
  const Shooting sh{2.0L * std::sqrt(e), d};
  const LD rt = static_cast<LD>(target.rho) / scales.length_lF;
  if (!(rt >= 0.0L)) throw DomainError("find_trajectories: rho must be >= 0");
  const LD rmax = 2.0L * std::sqrt(d * e + e * e);
  // Tangent launch: the path touches the envelope exactly at the plane.
  const LD theta_star = std::acos(std::sqrt(e / (2.0L * e + d)));

  TrajectorySet set;
  set.target = target;
  if (rt > rmax * (1.0L + kCausticTol)) return set;
  if (rt >= rmax * (1.0L - kCausticTol)) {
    set.caustic_flag = true;
    set.members.push_back(make_trajectory(sh, e, theta_star, scales));
    return set;
  }
  LD early = std::numbers::pi_v<LD>;
  LD late = 0.0L;
  if (rt > 0.0L) {
    early = polish_root(sh, rt, theta_star, std::numbers::pi_v<LD>);
    late = polish_root(sh, rt, 0.0L, theta_star);
  }
  set.members.push_back(make_trajectory(sh, e, early, scales));
  set.members.push_back(make_trajectory(sh, e, late, scales));
  if (set.members[0].t_flight > set.members[1].t_flight) std::swap(set.members[0], set.members[1]);
  return set;
}

double action_along(const Trajectory& traj, const SpacePoint& target, double energy,
                    const FieldScales& scales) {
  const LD e = energy_field_units(energy, scales);
  const LD d = depth_field_units(target, scales);
  const LD theta = traj.launch_angle;
  const LD t = static_cast<LD>(traj.t_flight) / scales.time_tau();
  const LD v0 = 2.0L * std::sqrt(e);
  const LD z_end = v0 * std::cos(theta) * t - t * t;
  const LD rho_end = v0 * std::sin(theta) * t;
  const LD rt = static_cast<LD>(target.rho) / scales.length_lF;
  const LD miss = std::hypot(z_end + d, rho_end - rt);
  if (!(t > 0.0L) || miss > 1e-7L * (d + rt)) {
    std::ostringstream os;
    os << "action_along: trajectory misses the target by " << static_cast<double>(miss)
       << " l_F";
    throw DomainError(os.str());
  }
  return static_cast<double>(action_field_units(e, theta, t) * scales.constants.hbar);
}

double action_along_quadrature(const Trajectory& traj, double energy, const FieldScales& scales) {
  const LD e = energy_field_units(energy, scales);
  const LD theta = traj.launch_angle;
  const LD t_end = static_cast<LD>(traj.t_flight) / scales.time_tau();
  const LD v0 = 2.0L * std::sqrt(e);
  const LD c = std::cos(theta);
  // |p| from energy conservation, ds = |v| dt.
  const auto integrand = [&](LD t) {
    const LD z = v0 * c * t - t * t;
    const LD vz = v0 * c - 2.0L * t;
    const LD vr = v0 * std::sin(theta);
    return std::sqrt(std::max(e - z, 0.0L)) * std::hypot(vz, vr);
  };
  detail::QuadOptions opt;
  opt.rel_tol = 1e-14L;
  // Split at the apex, where |v| has a kink for the vertical path.
  const LD apex = 0.5L * v0 * c;
  LD w = 0.0L;
  if (apex > 0.0L && apex < t_end) {
    w = detail::integrate(integrand, 0.0L, apex, "action_along_quadrature", opt) +
        detail::integrate(integrand, apex, t_end, "action_along_quadrature", opt);
  } else {
    w = detail::integrate(integrand, 0.0L, t_end, "action_along_quadrature", opt);
  }
  return static_cast<double>(w * scales.constants.hbar);
}

PhaseDifference central_phase_difference(double energy, const FieldScales& scales) {
  if (!(energy >= 0.0) || !std::isfinite(energy)) {
    throw DomainError("central_phase_difference: energy must be >= 0");
  }
  const PhysicalConstants& c = scales.constants;
  const double dphi = 4.0 * std::numbers::sqrt2 / 3.0 * std::sqrt(c.m_e) * std::pow(energy, 1.5) /
                      (c.hbar * scales.force_F);
  return PhaseDifference{dphi, dphi / (2.0 * std::numbers::pi)};
}

GreenEvaluation semiclassical_evaluation(const SpacePoint& target, double energy,
                                         const FieldScales& scales) {
  const LD e = energy_field_units(energy, scales);
  const LD d = depth_field_units(target, scales);
  const LD rt = static_cast<LD>(target.rho) / scales.length_lF;
  const LD rmax = 2.0L * std::sqrt(d * e + e * e);
  if (rt > 0.98L * rmax) {
    throw DomainError("semiclassical_wave: target outside the allowed disk or within 2% of the caustic");
  }
  const TrajectorySet set = find_trajectories(target, energy, scales);
  const Shooting sh{2.0L * std::sqrt(e), d};
  CLD sum = 0.0L;
  CLD dz = 0.0L;
  CLD drho = 0.0L;
  for (const Trajectory& tr : set.members) {
    const LD theta = tr.launch_angle;
    const LD t = sh.time(theta);
    const LD amp = vanvleck_field_units(sh, theta, t);
    const LD phase = action_field_units(e, theta, t) -
                     static_cast<LD>(tr.maslov) * std::numbers::pi_v<LD> / 2.0L;
    const CLD psi = -std::polar(amp, phase);
    // p = m v = v / 2 in field units.
    const LD pz = 0.5L * (sh.v0 * std::cos(theta) - 2.0L * t);
    const LD prho = 0.5L * sh.v0 * std::sin(theta);
    sum += psi;
    dz += CLD(0.0L, pz) * psi;
    drho += CLD(0.0L, prho) * psi;
  }
  const double f = detail::si_green_factor(scales);
  const double fl = f / scales.length_lF;
  const auto c = [](CLD v, double k) {
    return ComplexAmplitude(static_cast<double>(v.real()) * k, static_cast<double>(v.imag()) * k);
  };
  return GreenEvaluation{c(sum, f), c(dz, fl), c(drho, fl)};
}

ComplexAmplitude semiclassical_wave(const SpacePoint& target, double energy,
                                    const FieldScales& scales) {
  return semiclassical_evaluation(target, energy, scales).value;
}

}  // namespace pdm
