#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "pdmicro/errors.hpp"
#include "pdmicro/units.hpp"

namespace pdm {
namespace {

// Reference values from 30-digit evaluation of the scale definitions with
// the CODATA 2018 constants.
constexpr double kF400 = 6.408706536e-17;
constexpr double kLF400 = 4.5668945301048164e-8;
constexpr double kEpsF400 = 2.9267886824305386e-24;
constexpr double kEpsF400_ueV = 18.267578120419266;
constexpr double kU200 = 10.948358818098748;

TEST(Units, ConstantsConsistent) {
  EXPECT_NEAR(kCodata2018.h / (2.0 * std::numbers::pi * kCodata2018.hbar), 1.0, 1e-12);
  EXPECT_GT(kCodata2018.hbar, 0.0);
  EXPECT_GT(kCodata2018.m_e, 0.0);
  EXPECT_GT(kCodata2018.q_e, 0.0);
}

TEST(Units, ScalesAt400) {
  const FieldScales s = make_scales(400.0);
  EXPECT_NEAR(s.force_F / kF400, 1.0, 1e-14);
  EXPECT_NEAR(s.length_lF / kLF400, 1.0, 1e-12);
  EXPECT_NEAR(s.energy_epsF / kEpsF400, 1.0, 1e-12);
  EXPECT_NEAR(convert_energy(s.energy_epsF, "J", "ueV") / kEpsF400_ueV, 1.0, 1e-12);
  const double closed = std::cbrt(std::pow(s.constants.hbar * s.force_F, 2) / (2.0 * s.constants.m_e));
  EXPECT_NEAR(s.energy_epsF / closed, 1.0, 1e-12);
}

TEST(Units, DimensionlessMode) {
  const PhysicalConstants unit{1.0, 1.0, 1.0, 2.0 * std::numbers::pi};
  const FieldScales s = make_scales(1.0, unit);
  EXPECT_NEAR(s.length_lF, std::pow(2.0, -1.0 / 3.0), 1e-15);
  EXPECT_NEAR(s.length_lF, 0.793700, 1e-6);
}

TEST(Units, RejectsBadField) {
  EXPECT_THROW((void)make_scales(0.0), DomainError);
  EXPECT_THROW((void)make_scales(-1.0), DomainError);
  EXPECT_THROW((void)make_scales(std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW((void)make_scales(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(Units, ConvertExamples) {
  EXPECT_NEAR(convert_energy(200.0, "ueV", "J") / 3.204353268e-23, 1.0, 1e-15);
  EXPECT_EQ(convert_energy(1.0, "J", "J"), 1.0);
  EXPECT_NEAR(convert_energy(200.0, "µeV", "u", make_scales(400.0)) / kU200, 1.0, 1e-12);
  EXPECT_THROW((void)convert_energy(1.0, "ueV", "u"), DomainError);
  EXPECT_THROW((void)convert_energy(1.0, "erg", "J"), DomainError);
  EXPECT_FALSE(parse_energy_unit("keV").has_value());
}

TEST(Units, RoundTripAllPairs) {
  const FieldScales s = make_scales(400.0);
  const EnergyUnit all[] = {EnergyUnit::joule, EnergyUnit::electronvolt,
                            EnergyUnit::microelectronvolt, EnergyUnit::field};
  for (const double v : {1e-30, 3.7e-24, 1.0, -2.5, 1e5}) {
    for (const EnergyUnit a : all) {
      for (const EnergyUnit b : all) {
        const double back = convert_energy(convert_energy(v, a, b, s), b, a, s);
        EXPECT_NEAR(back / v, 1.0, 1e-14);
      }
    }
  }
}

TEST(Units, ScaleCovariance) {
  for (const double f : {1.0, 400.0, 3.3e5}) {
    const FieldScales a = make_scales(f);
    const FieldScales b = make_scales(2.0 * f);
    EXPECT_NEAR(b.energy_epsF / a.energy_epsF / std::pow(2.0, 2.0 / 3.0), 1.0, 1e-12);
    EXPECT_NEAR(a.length_lF / b.length_lF / std::pow(2.0, 1.0 / 3.0), 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace pdm
