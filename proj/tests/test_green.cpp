#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "pdmicro/classical.hpp"
#include "pdmicro/errors.hpp"
#include "pdmicro/green.hpp"
#include "pdmicro/specfun.hpp"
#include "pdmicro/units.hpp"

namespace pdm {
namespace {

using cd = std::complex<double>;

double rel(cd got, cd want) { return std::abs(got - want) / std::abs(want); }

SpacePoint at(double x, double y, double z) { return {std::hypot(x, y), z, std::atan2(y, x)}; }

struct R1 {
  FieldScales sc = make_scales(400.0);
  double E = convert_energy(200.0, "ueV", "J");
  double d = 0.5;
};

cd free_green(double R, double E, const FieldScales& s) {
  const double hb = s.constants.hbar;
  const double m = s.constants.m_e;
  const double k = std::sqrt(2.0 * m * E) / hb;
  return -(m / (2.0 * std::numbers::pi * hb * hb)) * std::exp(cd(0.0, k * R)) / R;
}

TEST(Kernel, ZeroFieldLimit) {
  const FieldScales s = make_scales(1e-9);
  const double hb = s.constants.hbar;
  const double m = s.constants.m_e;
  const SpacePoint r{3e-9, -2e-9, 0.0};
  const SpacePoint r0{0.0, 1e-9, 0.0};
  for (const double t : {1e-15, 1e-14, 3e-14}) {
    const double R2 = 9e-18 + 9e-18;
    const cd pre = std::pow(cd(m / (2.0 * std::numbers::pi * hb * t), 0.0) / cd(0.0, 1.0), 1.5);
    const cd want = pre * std::exp(cd(0.0, m * R2 / (2.0 * hb * t)));
    EXPECT_LE(rel(kernel(r, r0, t, s), want), 1e-8) << t;
  }
}

TEST(Kernel, SymmetricAndGuarded) {
  const FieldScales s = make_scales(400.0);
  const SpacePoint a{2e-7, -1e-7, 0.3};
  const SpacePoint b{0.0, 5e-8, 0.0};
  EXPECT_EQ(kernel(a, b, 1e-9, s), kernel(b, a, 1e-9, s));
  EXPECT_THROW((void)kernel(a, b, 0.0, s), DomainError);
  EXPECT_THROW((void)kernel(a, b, -1e-9, s), DomainError);
}

TEST(Kernel, StationaryTimesAreFlightTimes) {
  const R1 r;
  for (const double frac : {0.0, 0.3, 0.7}) {
    const SpacePoint p{frac * rho_max(r.E, r.sc, r.d), -r.d, 0.0};
    const auto ts = stationary_times(p, SpacePoint{}, r.E, r.sc);
    const TrajectorySet set = find_trajectories(p, r.E, r.sc);
    ASSERT_EQ(ts.size(), 2u);
    ASSERT_EQ(set.members.size(), 2u);
    EXPECT_NEAR(ts[0] / set.members[0].t_flight, 1.0, 1e-6);
    EXPECT_NEAR(ts[1] / set.members[1].t_flight, 1.0, 1e-6);
  }
}

TEST(Green, ClosedFormMatchesOracleInR1) {
  const R1 r;
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> ud(0.05, 0.5), uf(0.0, 0.95);
  for (int i = 0; i < 20; ++i) {
    const double d = ud(gen);
    const SpacePoint p{uf(gen) * rho_max(r.E, r.sc, d), -d, 0.0};
    const GreenEvaluation q = green_energy_quad(p, SpacePoint{}, r.E, r.sc);
    const GreenEvaluation c = green_energy(p, SpacePoint{}, r.E, r.sc);
    EXPECT_LE(rel(c.value, q.value), 1e-6) << i;
    EXPECT_LE(rel(c.grad_z, q.grad_z), 1e-6) << i;
    EXPECT_LE(std::abs(c.grad_rho - q.grad_rho) / std::abs(q.grad_z), 1e-6) << i;
  }
}

TEST(Green, ClosedFormMatchesOracleNearSource) {
  const FieldScales s = make_scales(400.0);
  const double l = s.length_lF;
  for (const double u : {-3.0, 0.0, 2.0, 7.5}) {
    for (const auto& p : {at(0.5 * l, 0.0, -0.2 * l), at(3.0 * l, 1.0 * l, 1.0 * l),
                          at(0.0, 0.0, -6.0 * l), at(2.0 * l, 0.0, 0.5 * l)}) {
      const double E = u * s.energy_epsF;
      const GreenEvaluation q = green_energy_quad(p, SpacePoint{0.0, 0.3 * l, 0.0}, E, s);
      const GreenEvaluation c = green_energy(p, SpacePoint{0.0, 0.3 * l, 0.0}, E, s);
      EXPECT_LE(rel(c.value, q.value), 1e-9) << u;
      EXPECT_LE(rel(c.grad_z, q.grad_z), 1e-9) << u;
    }
  }
}

TEST(Green, Reciprocity) {
  const R1 r;
  const double l = r.sc.length_lF;
  const SpacePoint a{4e-4, -0.3, 0.0};
  const SpacePoint b{0.0, 0.0, 0.0};
  const cd ab = green_energy_quad(a, b, r.E, r.sc).value;
  const cd ba = green_energy_quad(b, a, r.E, r.sc).value;
  EXPECT_LE(rel(ab, ba), 1e-8);
  const SpacePoint c{5.0 * l, 2.0 * l, 0.0};
  const SpacePoint e{1.0 * l, -3.0 * l, 1.2};
  EXPECT_LE(rel(green_energy_quad(c, e, r.E, r.sc).value, green_energy_quad(e, c, r.E, r.sc).value),
            1e-8);
  EXPECT_EQ(green_energy(c, e, r.E, r.sc).value, green_energy(e, c, r.E, r.sc).value);
}

TEST(Green, AzimuthIndependent) {
  const R1 r;
  const cd g0 = green_energy(SpacePoint{3e-4, -r.d, 0.0}, SpacePoint{}, r.E, r.sc).value;
  for (const double phi : {0.7, 2.0, -3.0}) {
    EXPECT_EQ(green_energy(SpacePoint{3e-4, -r.d, phi}, SpacePoint{}, r.E, r.sc).value, g0);
  }
}

TEST(Green, ForbiddenExteriorIsDark) {
  const R1 r;
  const double rm = rho_max(r.E, r.sc, r.d);
  const double inside = std::norm(green_energy_quad(SpacePoint{0.0, -r.d, 0.0}, {}, r.E, r.sc).value);
  const double outside = std::norm(green_energy(SpacePoint{1.2 * rm, -r.d, 0.0}, {}, r.E, r.sc).value);
  EXPECT_TRUE(std::isfinite(inside));
  EXPECT_GE(inside, 1e3 * outside);
}

TEST(Green, FreeFieldLimit) {
  // u = 1e4 with E fixed: the field is weak on the scale of the wavelength.
  const double E = convert_energy(200.0, "ueV", "J");
  const FieldScales s0 = make_scales(1.0);
  const double eps_target = E / 1e4;
  const double field = 1.0 * std::pow(eps_target / s0.energy_epsF, 1.5);
  const FieldScales s = make_scales(field);
  ASSERT_NEAR(E / s.energy_epsF, 1e4, 1e-6);
  const double l = s.length_lF;
  for (const auto& p : {at(0.02 * l, 0.0, 0.0), at(0.0, 0.03 * l, -0.01 * l), at(0.05 * l, 0.0, 0.02 * l)}) {
    const double R = std::hypot(p.rho, p.z);
    const cd want = free_green(R, E, s);
    EXPECT_LE(rel(green_energy(p, {}, E, s).value, want), 1e-3);
    EXPECT_LE(rel(green_energy_quad(p, {}, E, s).value, want), 1e-3);
  }
}

TEST(Green, LdosFreeLimitAndThreshold) {
  const FieldScales s = make_scales(400.0);
  const double hb = s.constants.hbar;
  const double m = s.constants.m_e;
  const double E = 100.0 * s.energy_epsF;
  const double k = std::sqrt(2.0 * m * E) / hb;
  EXPECT_NEAR(ldos_at_source(E, s) / (-m * k / (2.0 * std::numbers::pi * hb * hb)), 1.0, 1e-3);
  // E = 0: the bracket is Ai'(0)^2.
  const double bracket = -ldos_at_source(0.0, s) * 2.0 * hb * hb * s.length_lF / m;
  EXPECT_NEAR(bracket, std::pow(0.2588194037928068, 2), 1e-15);
  EXPECT_NEAR(bracket, 0.066987, 1e-6);
  EXPECT_LT(ldos_at_source(-3.0 * s.energy_epsF, s), 0.0);
}

TEST(Green, LdosMatchesOffDiagonalLimit) {
  const FieldScales s = make_scales(400.0);
  const double l = s.length_lF;
  for (const double u : {-1.0, 0.5, 4.0}) {
    const double E = u * s.energy_epsF;
    const double off = green_energy(SpacePoint{1e-4 * l, 0.0, 0.0}, {}, E, s).value.imag();
    EXPECT_NEAR(off / ldos_at_source(E, s), 1.0, 1e-7) << u;
  }
}

// d^2 Im G / dz dz' at the source from a four-point stencil. Points with
// z = z' sit on the diagonal, where Im G is the ldos shifted in energy.
TEST(Green, LdosDzDzMatchesStencil) {
  const FieldScales s = make_scales(400.0);
  const double l = s.length_lF;
  const double h = 1e-2 * l;
  for (const double u : {-2.0, 0.0, 1.0, 6.0}) {
    const double E = u * s.energy_epsF;
    const double diag_up = ldos_at_source(E - h * s.force_F, s);
    const double diag_dn = ldos_at_source(E + h * s.force_F, s);
    const double cross = green_energy(SpacePoint{0.0, h, 0.0}, SpacePoint{0.0, -h, 0.0}, E, s).value.imag();
    const double fd = (diag_up + diag_dn - 2.0 * cross) / (4.0 * h * h);
    EXPECT_NEAR(ldos_at_source_dzdz(E, s) / fd, 1.0, 1e-3) << u;
  }
}

TEST(Green, GradientMatchesFiniteDifferences) {
  const FieldScales s = make_scales(400.0);
  const double l = s.length_lF;
  const double h = 1e-4 * l;
  for (const double u : {-1.0, 2.0, 10.0}) {
    const double E = u * s.energy_epsF;
    for (const auto& p : {SpacePoint{2.0 * l, -3.0 * l, 0.0}, SpacePoint{0.7 * l, 1.5 * l, 0.0},
                          SpacePoint{5.0 * l, -20.0 * l, 0.0}}) {
      const GreenEvaluation g = green_energy(p, {}, E, s);
      const cd dz = (green_energy({p.rho, p.z + h, 0.0}, {}, E, s).value -
                     green_energy({p.rho, p.z - h, 0.0}, {}, E, s).value) / (2.0 * h);
      const cd dr = (green_energy({p.rho + h, p.z, 0.0}, {}, E, s).value -
                     green_energy({p.rho - h, p.z, 0.0}, {}, E, s).value) / (2.0 * h);
      const double scale = std::abs(g.grad_z) + std::abs(g.grad_rho);
      EXPECT_LE(std::abs(g.grad_z - dz) / scale, 1e-6) << u;
      EXPECT_LE(std::abs(g.grad_rho - dr) / scale, 1e-6) << u;
    }
  }
}

TEST(Green, SatisfiesSchroedingerAwayFromSource) {
  // Field units: (-laplacian + z - E) G = 0, laplacian by a 7-point stencil
  // in Cartesian coordinates.
  const FieldScales s = make_scales(400.0);
  const double l = s.length_lF;
  const double h = 1e-3;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> c(-6.0, 6.0);
  int checked = 0;
  while (checked < 10) {
    const double x = c(gen), y = c(gen), z = c(gen);
    if (std::hypot(x, y, z) < 1.0) continue;
    const double u = 0.5 * c(gen) + 2.0;
    const double E = u * s.energy_epsF;
    const auto G = [&](double xx, double yy, double zz) {
      return green_energy(at(xx * l, yy * l, zz * l), {}, E, s).value;
    };
    const cd g0 = G(x, y, z);
    const cd lap = (G(x + h, y, z) + G(x - h, y, z) + G(x, y + h, z) + G(x, y - h, z) +
                    G(x, y, z + h) + G(x, y, z - h) - 6.0 * g0) / (h * h);
    const cd residual = -lap + (z - u) * g0;
    EXPECT_LE(std::abs(residual) / std::abs(lap), 1e-4) << x << " " << y << " " << z;
    ++checked;
  }
}

TEST(SourceWave, SWaveIsGreenFunction) {
  const R1 r;
  const SpacePoint p{4e-4, -r.d, 0.0};
  const GreenEvaluation a = source_wave(p, r.E, SourceModel{}, r.sc);
  const GreenEvaluation b = green_energy(p, {}, r.E, r.sc);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.grad_z, b.grad_z);
  const GreenEvaluation c = source_wave(p, r.E, SourceModel{SourceKind::s_wave, 2.5}, r.sc);
  EXPECT_EQ(c.value, 2.5 * b.value);
}

TEST(SourceWave, DipoleMatchesOracleDifference) {
  const R1 r;
  const double h = 1e-4 * r.sc.length_lF;
  for (const double rho : {0.0, 3e-4, 7e-4}) {
    const SpacePoint p{rho, -r.d, 0.0};
    const cd fd = (green_energy_quad(p, SpacePoint{0.0, h, 0.0}, r.E, r.sc).value -
                   green_energy_quad(p, SpacePoint{0.0, -h, 0.0}, r.E, r.sc).value) / (2.0 * h);
    const cd an = source_wave(p, r.E, SourceModel{SourceKind::pz_dipole, 1.0}, r.sc).value;
    EXPECT_LE(rel(an, fd), 1e-4) << rho;
  }
}

TEST(SourceWave, DipoleGradientMatchesFiniteDifferences) {
  const FieldScales s = make_scales(400.0);
  const double l = s.length_lF;
  const double h = 1e-4 * l;
  const SourceModel pz{SourceKind::pz_dipole, 1.0};
  const double E = 3.0 * s.energy_epsF;
  for (const auto& p : {SpacePoint{2.0 * l, -3.0 * l, 0.0}, SpacePoint{0.5 * l, 4.0 * l, 0.0}}) {
    const GreenEvaluation g = source_wave(p, E, pz, s);
    const cd dz = (source_wave({p.rho, p.z + h, 0.0}, E, pz, s).value -
                   source_wave({p.rho, p.z - h, 0.0}, E, pz, s).value) / (2.0 * h);
    const cd dr = (source_wave({p.rho + h, p.z, 0.0}, E, pz, s).value -
                   source_wave({p.rho - h, p.z, 0.0}, E, pz, s).value) / (2.0 * h);
    const double scale = std::abs(g.grad_z) + std::abs(g.grad_rho);
    EXPECT_LE(std::abs(g.grad_z - dz) / scale, 1e-6);
    EXPECT_LE(std::abs(g.grad_rho - dr) / scale, 1e-6);
  }
}

TEST(SourceWave, Guards) {
  const R1 r;
  const double l = r.sc.length_lF;
  EXPECT_THROW((void)source_wave(SpacePoint{0.0, -1e-4 * l, 0.0}, r.E, SourceModel{}, r.sc), DomainError);
  EXPECT_THROW((void)green_energy(SpacePoint{}, SpacePoint{}, r.E, r.sc), DomainError);
  EXPECT_THROW((void)green_energy_quad(SpacePoint{}, SpacePoint{}, r.E, r.sc), DomainError);
}

}  // namespace
}  // namespace pdm
