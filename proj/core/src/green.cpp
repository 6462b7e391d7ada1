#include <cmath>
#include <numbers>

#include "green_internal.hpp"
#include "pdmicro/errors.hpp"
#include "pdmicro/green.hpp"
#include "pdmicro/specfun.hpp"

namespace pdm {
namespace detail {

namespace {


// Exclusion radius around the source for source_wave, in l_F.
constexpr LD kSourceExclusion = 1e-3L;

}  // namespace

PairGeometry pair_geometry(const SpacePoint& r, const SpacePoint& r_src, const FieldScales& sc) {
  const LD l = sc.length_lF;
  const LD rho = static_cast<LD>(r.rho) / l;
  const LD rho_src = static_cast<LD>(r_src.rho) / l;
  const LD z = static_cast<LD>(r.z) / l;
  const LD z_src = static_cast<LD>(r_src.z) / l;
  const LD dphi = static_cast<LD>(r.phi) - static_cast<LD>(r_src.phi);
  const LD c = dphi == 0.0L ? 1.0L : std::cos(dphi);
  const LD sn = dphi == 0.0L ? 0.0L : std::sin(dphi);
  PairGeometry p;
  p.s = 0.5L * (z + z_src);
  p.dz = z - z_src;
  p.drho = rho - rho_src * c;
  const LD across = rho_src * sn;
  p.R = std::sqrt(p.dz * p.dz + p.drho * p.drho + across * across);
  return p;
}

ClosedFormDerivatives closed_form(LD m, LD R, int order) {
  const LD a = m - 0.5L * R;  // Ci argument
  const LD b = m + 0.5L * R;  // Ai argument
  const AiryLD fa = airy_ld(a);
  const AiryLD fb = airy_ld(b);
  const CLD ci(fa.bi, fa.ai);
  const CLD cip(fa.bip, fa.aip);
  const LD ai = fb.ai;
  const LD aip = fb.aip;

  const CLD w = ci * aip - cip * ai;
  const CLD x = ci * ai;
  const CLD y = cip * aip;
  const CLD w_r = -y + m * x;

  ClosedFormDerivatives d{};
  d.g = w / (4.0L * R);
  if (order < 1) return d;
  d.g_s = x / 4.0L;
  d.g_R = (w_r / R - w / (R * R)) / 4.0L;
  if (order < 2) return d;
  const CLD x_s = cip * ai + ci * aip;
  const CLD x_r = 0.5L * (ci * aip - cip * ai);
  const CLD y_r = 0.5L * (-a * ci * aip + b * cip * ai);
  const CLD w_rr = -y_r + m * x_r;
  d.g_ss = x_s / 4.0L;
  d.g_sR = x_r / 4.0L;
  d.g_RR = (2.0L * w / (R * R * R) - 2.0L * w_r / (R * R) + w_rr / R) / 4.0L;
  return d;
}

GreenField closed_form_field(const PairGeometry& p, LD energy) {
  const ClosedFormDerivatives d = closed_form(p.s - energy, p.R, 1);
  GreenField f;
  f.g = d.g;
  f.dz = 0.5L * d.g_s + (p.dz / p.R) * d.g_R;
  f.drho = (p.drho / p.R) * d.g_R;
  f.dzsrc = 0.5L * d.g_s - (p.dz / p.R) * d.g_R;
  return f;
}

SourceField source_field(LD rho, LD z, LD energy, SourceKind kind) {
  const LD R = std::hypot(rho, z);
  if (!(R >= kSourceExclusion)) {
    throw DomainError("source_wave: point lies inside the source exclusion ball");
  }
  const LD s = 0.5L * z;
  SourceField out;
  if (kind == SourceKind::s_wave) {
    const ClosedFormDerivatives d = closed_form(s - energy, R, 1);
    out.psi = d.g;
    out.dz = 0.5L * d.g_s + (z / R) * d.g_R;
    out.drho = (rho / R) * d.g_R;
    return out;
  }
  const ClosedFormDerivatives d = closed_form(s - energy, R, 2);
  const LD cz = z / R;
  const LD cr = rho / R;
  out.psi = 0.5L * d.g_s - cz * d.g_R;
  const LD dcz_dz = 1.0L / R - z * z / (R * R * R);
  const LD dcz_drho = -z * rho / (R * R * R);
  out.dz = 0.5L * (0.5L * d.g_ss + cz * d.g_sR) - (dcz_dz * d.g_R + cz * (0.5L * d.g_sR + cz * d.g_RR));
  out.drho = 0.5L * d.g_sR * cr - (dcz_drho * d.g_R + cz * d.g_RR * cr);
  return out;
}

LD ldos_dimensionless(LD energy) {
  const LD xi = -energy;
  const AiryLD v = airy_ld(xi);
  return -0.25L * (v.aip * v.aip - xi * v.ai * v.ai);
}

LD ldos_dzdz_dimensionless(LD energy) {
  const LD x = -energy;
  const AiryLD v = airy_ld(x);
  return v.ai * v.aip / 6.0L + (x * v.aip * v.aip - x * x * v.ai * v.ai) / 12.0L;
}

}  // namespace detail

using detail::CLD;
using detail::LD;

ComplexAmplitude kernel(const SpacePoint& r, const SpacePoint& r_src, double t,
                        const FieldScales& scales) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("kernel: time must be positive");
  const detail::PairGeometry p = detail::pair_geometry(r, r_src, scales);
  const LD tt = static_cast<LD>(t) / static_cast<LD>(scales.time_tau());
  const LD phase = p.R * p.R / (4.0L * tt) - p.s * tt - tt * tt * tt / 12.0L;
  // (4 pi i t)^{-3/2} on the principal branch: (4 pi t)^{-3/2} e^{-3 pi i / 4}.
  const LD mag = std::pow(4.0L * detail::LD(std::numbers::pi) * tt, -1.5L);
  const CLD k = std::polar(mag, phase - 0.75L * std::numbers::pi_v<LD>);
  const double l = scales.length_lF;
  return ComplexAmplitude(static_cast<double>(k.real()), static_cast<double>(k.imag())) /
         (l * l * l);
}

std::vector<double> stationary_times(const SpacePoint& r, const SpacePoint& r_src, double energy,
                                     const FieldScales& scales) {
  const detail::PairGeometry p = detail::pair_geometry(r, r_src, scales);
  const LD a = static_cast<LD>(energy) / scales.energy_epsF - p.s;
  const LD disc = a * a - 0.25L * p.R * p.R;
  std::vector<double> out;
  if (a <= 0.0L || disc < 0.0L) return out;
  // t^2 = 2a -+ 2 sqrt(disc); the smaller root via the product t1^2 t2^2 = R^2.
  const LD big = 2.0L * a + 2.0L * std::sqrt(disc);
  const LD small = p.R * p.R / big;
  const LD tau = scales.time_tau();
  out.push_back(static_cast<double>(std::sqrt(small) * tau));
  out.push_back(static_cast<double>(std::sqrt(big) * tau));
  return out;
}

namespace {

GreenEvaluation to_si(const detail::GreenField& f, const FieldScales& sc) {
  const double g = detail::si_green_factor(sc);
  const double gl = g / sc.length_lF;
  const auto c = [](CLD v) {
    return ComplexAmplitude(static_cast<double>(v.real()), static_cast<double>(v.imag()));
  };
  return GreenEvaluation{c(f.g) * g, c(f.dz) * gl, c(f.drho) * gl};
}

void check_energy(double e) {
  if (!std::isfinite(e)) throw DomainError("energy must be finite");
}

}  // namespace

GreenEvaluation green_energy(const SpacePoint& r, const SpacePoint& r_src, double energy,
                             const FieldScales& scales) {
  check_energy(energy);
  const detail::PairGeometry p = detail::pair_geometry(r, r_src, scales);
  if (!(p.R > 0.0L)) {
    throw DomainError("green_energy: r coincides with r_src; use ldos_at_source");
  }
  return to_si(detail::closed_form_field(p, static_cast<LD>(energy) / scales.energy_epsF), scales);
}

GreenEvaluation green_energy_quad(const SpacePoint& r, const SpacePoint& r_src, double energy,
                                  const FieldScales& scales) {
  check_energy(energy);
  const detail::PairGeometry p = detail::pair_geometry(r, r_src, scales);
  if (!(p.R > 0.0L)) throw DomainError("green_energy_quad: r coincides with r_src");
  return to_si(detail::quadrature_field(p, static_cast<LD>(energy) / scales.energy_epsF), scales);
}

double ldos_at_source(double energy, const FieldScales& scales) {
  check_energy(energy);
  return static_cast<double>(detail::ldos_dimensionless(static_cast<LD>(energy) / scales.energy_epsF)) *
         detail::si_green_factor(scales);
}

double ldos_at_source_dzdz(double energy, const FieldScales& scales) {
  check_energy(energy);
  const double l = scales.length_lF;
  return static_cast<double>(
             detail::ldos_dzdz_dimensionless(static_cast<LD>(energy) / scales.energy_epsF)) *
         detail::si_green_factor(scales) / (l * l);
}

GreenEvaluation source_wave(const SpacePoint& r, double energy, const SourceModel& src,
                            const FieldScales& scales) {
  check_energy(energy);
  if (!(src.strength >= 0.0)) throw DomainError("source strength must be non-negative");
  const LD l = scales.length_lF;
  const detail::SourceField f =
      detail::source_field(static_cast<LD>(r.rho) / l, static_cast<LD>(r.z) / l,
                           static_cast<LD>(energy) / scales.energy_epsF, src.kind);
  double unit = detail::si_green_factor(scales) * src.strength;
  if (src.kind == SourceKind::pz_dipole) unit /= scales.length_lF;
  const auto c = [](CLD v) {
    return ComplexAmplitude(static_cast<double>(v.real()), static_cast<double>(v.imag()));
  };
  return GreenEvaluation{c(f.psi) * unit, c(f.dz) * (unit / scales.length_lF),
                         c(f.drho) * (unit / scales.length_lF)};
}

}  // namespace pdm
