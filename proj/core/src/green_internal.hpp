#pragma once

// Dimensionless kernels shared by the green, detector and spectro modules.
// Units: lengths in l_F, energies in eps_F, times in hbar / eps_F, so that
// H = -laplacian + z (hbar = 1, m = 1/2, F = 1).

#include <complex>

#include "pdmicro/green.hpp"

namespace pdm::detail {

using LD = long double;
using CLD = std::complex<LD>;

/// Pair geometry in field units, formed in long double so that phases of
/// order 1e10 rad stay resolved.
struct PairGeometry {
  LD s;       // (z + z') / 2
  LD dz;      // z - z'
  LD drho;    // rho - rho' cos(phi - phi'), i.e. (1/2) dR^2 / drho
  LD R;       // |r - r'|
};

PairGeometry pair_geometry(const SpacePoint& r, const SpacePoint& r_src, const FieldScales& sc);

/// G and its partial derivatives with respect to s = (z + z')/2 and R at
/// fixed energy. `order` 1 fills first derivatives, 2 also the second ones.
struct ClosedFormDerivatives {
  CLD g;
  CLD g_s, g_R;
  CLD g_ss, g_sR, g_RR;
};

ClosedFormDerivatives closed_form(LD s_minus_e, LD R, int order);

/// Value, d/dz, d/drho and d/dz' (source coordinate) of G in field units.
struct GreenField {
  CLD g, dz, drho, dzsrc;
};

GreenField closed_form_field(const PairGeometry& p, LD energy);

/// Wave of a point source at the origin and its gradient, field units.
struct SourceField {
  CLD psi, dz, drho;
};

SourceField source_field(LD rho, LD z, LD energy, SourceKind kind);

/// Im G(0,0;E) and Im d^2G/dz dz'(0,0;E) in field units.
LD ldos_dimensionless(LD energy);
LD ldos_dzdz_dimensionless(LD energy);

/// Steepest-descent reference; returns G, dG/dz, dG/drho, dG/dz'.
GreenField quadrature_field(const PairGeometry& p, LD energy);

inline double si_green_factor(const FieldScales& sc) {
  const double l = sc.length_lF;
  return 1.0 / (sc.energy_epsF * l * l * l);
}

}  // namespace pdm::detail
