#include "pdmicro/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "green_internal.hpp"
#include "parallel.hpp"
#include "pdmicro/classical.hpp"
#include "pdmicro/errors.hpp"

namespace pdm {

using detail::CLD;
using detail::LD;

namespace {

// Golden-rule current of a unit source in field units: -2 Im <s|G|s>.
LD unit_golden_rule(LD e, SourceKind kind) {
  return kind == SourceKind::s_wave ? -2.0L * detail::ldos_dimensionless(e)
                                    : -2.0L * detail::ldos_dzdz_dimensionless(e);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

void check_plane(const DetectorPlane& plane) {
  if (!(plane.d > 0.0) || !std::isfinite(plane.d)) throw DomainError("detector: d must be > 0");
  if (!(plane.extent > 0.0) || !std::isfinite(plane.extent)) {
    throw DomainError("detector: extent must be > 0");
  }
  if (plane.n < 16) throw DomainError("detector: at least 16 pixels per side required");
}

}  // namespace

double current_density(const SpacePoint& point, double energy, const SourceModel& src,
                       const FieldScales& scales) {
  if (!(src.strength >= 0.0)) throw DomainError("current_density: negative source strength");
  if (src.strength == 0.0) return 0.0;
  const LD l = scales.length_lF;
  const LD e = static_cast<LD>(energy) / scales.energy_epsF;
  const detail::SourceField f = detail::source_field(static_cast<LD>(point.rho) / l,
                                                     static_cast<LD>(point.z) / l, e, src.kind);
  // hbar / m = 2 in field units; downward is -z.
  const LD j = -2.0L * (std::conj(f.psi) * f.dz).imag();
  const LD s2 = static_cast<LD>(src.strength) * src.strength;
  return static_cast<double>(s2 * j / (unit_golden_rule(e, src.kind) * l * l));
}

double semiclassical_current_density(const SpacePoint& point, double energy,
                                     const FieldScales& scales) {
  const GreenEvaluation g = semiclassical_evaluation(point, energy, scales);
  const double si = detail::si_green_factor(scales);
  const double l = scales.length_lF;
  // Back to field units before forming the flux.
  const ComplexAmplitude psi = g.value / si;
  const ComplexAmplitude dz = g.grad_z * (l / si);
  const double j = -2.0 * (std::conj(psi) * dz).imag();
  const LD e = static_cast<LD>(energy) / scales.energy_epsF;
  return j / static_cast<double>(unit_golden_rule(e, SourceKind::s_wave) * l * l);
}

RadialProfile radial_profile(double energy, const SourceModel& src, const FieldScales& scales,
                             const DetectorPlane& plane, int n_samples, int workers) {
  if (!(plane.d > 0.0) || !(plane.extent > 0.0)) throw DomainError("radial_profile: invalid plane");
  if (n_samples < 64) throw DomainError("radial_profile: at least 64 samples required");
  const double rmax = rho_max(energy, scales, plane.d);
  const double top = std::min(1.2 * rmax, plane.extent);
  RadialProfile p;
  p.energy = energy;
  p.d = plane.d;
  p.source = src;
  p.scales = scales;
  p.rho.resize(static_cast<std::size_t>(n_samples));
  p.j.resize(p.rho.size());
  for (int i = 0; i < n_samples; ++i) {
    p.rho[static_cast<std::size_t>(i)] = top * (static_cast<double>(i) / (n_samples - 1));
  }
  detail::parallel_for(p.rho.size(), workers, [&](std::size_t i) {
    p.j[i] = current_density(SpacePoint{p.rho[i], -plane.d, 0.0}, energy, src, scales);
  });
  return p;
}

CurrentMap map_plane(double energy, const SourceModel& src, const FieldScales& scales,
                     const DetectorPlane& plane, int workers) {
  check_plane(plane);
  const int n = plane.n;
  CurrentMap m;
  m.plane = plane;
  m.energy = energy;
  m.source = src;
  m.j.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  // Pixel centres as exact rationals (2i + 1 - n) / n of the extent, so
  // grids whose sizes differ by an odd factor share bit-identical centres.
  const auto centre = [&](int i) {
    return plane.extent * (static_cast<double>(2 * i + 1 - n) / static_cast<double>(n));
  };
  detail::parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t row) {
    const double y = centre(static_cast<int>(row));
    for (int col = 0; col < n; ++col) {
      const double x = centre(col);
      m.j[row * static_cast<std::size_t>(n) + static_cast<std::size_t>(col)] =
          current_density(SpacePoint{std::hypot(x, y), -plane.d, std::atan2(y, x)}, energy, src,
                          scales);
    }
  });
  return m;
}

double total_flux(const RadialProfile& profile) {
  const std::size_t n = profile.rho.size();
  if (n < 4 || profile.j.size() != n) throw DomainError("total_flux: profile too short");
  const double rmax = rho_max(profile.energy, profile.scales, profile.d);
  if (profile.rho.back() < 1.2 * rmax * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "total_flux: profile ends at " << profile.rho.back() << " m, needs 1.2 rho_max = "
       << 1.2 * rmax << " m";
    throw DomainError(os.str());
  }
  const double h = profile.rho[1] - profile.rho[0];
  std::vector<double> w(n, 0.0);
  // Composite Simpson over an even number of intervals, closed by the 3/8
  // rule on the last three when the count is odd.
  const std::size_t intervals = n - 1;
  const std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (simpson_end != intervals) {
    const std::size_t i = simpson_end;
    w[i] += 3.0 * h / 8.0;
    w[i + 1] += 9.0 * h / 8.0;
    w[i + 2] += 9.0 * h / 8.0;
    w[i + 3] += 3.0 * h / 8.0;
  }
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = w[i] * profile.j[i] * profile.rho[i];
  return 2.0 * std::numbers::pi * pairwise_sum(terms.data(), n);
}

std::vector<std::size_t> prominent_maxima(const std::vector<double>& j, double rel_prominence) {
  const std::size_t n = j.size();
  std::vector<std::size_t> out;
  if (n < 2) return out;
  const double top = *std::max_element(j.begin(), j.end());
  std::vector<std::size_t> peaks;
  if (j[0] >= j[1]) peaks.push_back(0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (j[i] > j[i - 1] && j[i] >= j[i + 1]) peaks.push_back(i);
  }
  for (const std::size_t p : peaks) {
    // The walk to the left continues through the mirror image beyond
    // rho = 0; a side that never meets a higher sample keeps the lowest
    // value it saw.
    double right_base = j[p];
    for (std::size_t k = p + 1; k < n && j[k] <= j[p]; ++k) right_base = std::min(right_base, j[k]);
    double left_base = j[p];
    bool higher = false;
    for (std::size_t k = p; k-- > 0 && !higher;) {
      if (j[k] > j[p]) higher = true;
      else left_base = std::min(left_base, j[k]);
    }
    for (std::size_t k = 1; k < n && !higher; ++k) {
      if (j[k] > j[p]) higher = true;
      else left_base = std::min(left_base, j[k]);
    }
    if (j[p] - std::max(left_base, right_base) >= rel_prominence * top) out.push_back(p);
  }
  return out;
}

FringeReport count_fringes(const RadialProfile& profile) {
  const std::vector<double>& j = profile.j;
  const std::vector<double>& r = profile.rho;
  const std::size_t n = j.size();
  if (n < 3 || r.size() != n) throw DomainError("count_fringes: profile too short");
  FringeReport rep;
  rep.rho_max_classical = rho_max(profile.energy, profile.scales, profile.d);

  const double expected = central_phase_difference(profile.energy, profile.scales).fringe_estimate + 1.0;
  const auto inside = static_cast<double>(
      std::count_if(r.begin(), r.end(), [&](double x) { return x <= rep.rho_max_classical; }));
  if (inside < 8.0 * expected) {
    std::ostringstream os;
    os << "count_fringes: " << inside << " samples inside rho_max for about " << expected
       << " fringes; at least 8 per fringe required";
    throw DomainError(os.str());
  }
  const double top = *std::max_element(j.begin(), j.end());
  const double bottom = *std::min_element(j.begin(), j.end());
  if (!(top > bottom)) throw DomainError("count_fringes: flat profile");
  for (const std::size_t p : prominent_maxima(j, 0.05)) {
    double pos = r[p];
    if (p > 0 && p + 1 < n) {
      const double den = j[p - 1] - 2.0 * j[p] + j[p + 1];
      if (den < 0.0) {
        const double off = 0.5 * (j[p - 1] - j[p + 1]) / den;
        pos = r[p] + std::clamp(off, -0.5, 0.5) * (r[p + 1] - r[p]);
      }
    }
    rep.maxima_rho.push_back(pos);
  }
  rep.n_fringes = static_cast<int>(rep.maxima_rho.size());
  return rep;
}

}  // namespace pdm
