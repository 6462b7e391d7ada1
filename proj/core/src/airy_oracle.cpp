#include <cmath>
#include <complex>
#include <numbers>

#include "pdmicro/errors.hpp"
#include "pdmicro/specfun.hpp"
#include "quadrature.hpp"

// Reference Airy values straight from the integral representations
//   Ai(x) = (1/pi) int_0^inf cos(t^3/3 + x t) dt
//   Bi(x) = (1/pi) int_0^inf [exp(-t^3/3 + x t) + sin(t^3/3 + x t)] dt
// with contours chosen so that no integrand is much larger than the result.
//
//  x > 0: Ai and Ai' on the steepest-descent hyperbola u^2 - v^2/3 = x through
//         the saddle t = sqrt(x) of t^3/3 - x t, where the integrand is real
//         and positive. The sine part of Bi on the ray arg t = pi/6.
//  x <= 0: the oscillatory integral on the real segment [0, S] past both
//         stationary points t = +-sqrt(-x), then on the ray S + r e^{i pi/6}.

namespace pdm {
namespace {

using LD = long double;
using CLD = std::complex<LD>;

constexpr LD kPi = std::numbers::pi_v<LD>;

detail::QuadOptions oracle_options() {
  detail::QuadOptions o;
  o.rel_tol = 1e-15L;
  o.l1_floor = 1e-14L;
  return o;
}

// I = int_C exp(i (t^3/3 + x t)) dt and J = int_C t exp(i (t^3/3 + x t)) dt.
struct OscillatoryPair {
  CLD i0;
  CLD i1;
};

OscillatoryPair oscillatory_integrals(LD x) {
  const auto opt = oracle_options();
  const CLD ray = std::polar(1.0L, kPi / 6.0L);
  const auto on_ray = [&](LD start, int power) {
    return [=](LD r) {
      const CLD t = start + r * ray;
      const CLD phase = CLD(0.0L, 1.0L) * (t * t * t / 3.0L + x * t);
      CLD w = std::exp(phase) * ray;
      if (power == 1) w *= t;
      return w;
    };
  };
  constexpr LD kRayLength = 7.0L;  // exp(-r^3/3) < 1e-49 beyond
  OscillatoryPair p{};
  if (x > 0.0L) {
    p.i0 = detail::integrate(on_ray(0.0L, 0), 0.0L, kRayLength, "airy_oracle(ray)", opt);
    p.i1 = detail::integrate(on_ray(0.0L, 1), 0.0L, kRayLength, "airy_oracle(ray)", opt);
    return p;
  }
  const LD s_end = 2.0L * std::sqrt(-x) + 1.0L;
  const auto on_axis = [&](int power) {
    return [=](LD t) {
      const LD psi = t * t * t / 3.0L + x * t;
      CLD w(std::cos(psi), std::sin(psi));
      if (power == 1) w *= t;
      return w;
    };
  };
  // Split the real segment so each panel spans a bounded number of oscillations.
  const int panels = 4 + static_cast<int>(s_end * s_end * s_end / 30.0L);
  for (int power = 0; power < 2; ++power) {
    CLD acc = 0.0L;
    for (int k = 0; k < panels; ++k) {
      const LD a = s_end * k / panels;
      const LD b = s_end * (k + 1) / panels;
      acc += detail::integrate(on_axis(power), a, b, "airy_oracle(axis)", opt);
    }
    acc += detail::integrate(on_ray(s_end, power), 0.0L, kRayLength, "airy_oracle(ray)", opt);
    (power == 0 ? p.i0 : p.i1) = acc;
  }
  return p;
}

// Ai and Ai' for x > 0 on the hyperbola t = u(v) + i v, u = sqrt(x + v^2/3),
// where t^3/3 - x t = -u (2x/3 + 8 v^2 / 9) is real.
void ai_positive(LD x, LD& ai, LD& aip) {
  const auto opt = oracle_options();
  const LD zeta = 2.0L / 3.0L * x * std::sqrt(x);
  // Integrate exp(h(v) + zeta) and restore exp(-zeta) afterwards.
  const auto expo = [x, zeta](LD v) {
    const LD u = std::sqrt(x + v * v / 3.0L);
    return -u * (2.0L * x / 3.0L + 8.0L * v * v / 9.0L) + zeta;
  };
  const LD v_end = 7.0L;
  const LD i_ai = detail::integrate([&](LD v) { return std::exp(expo(v)); }, 0.0L, v_end,
                                    "airy_oracle(hyperbola)", opt);
  const LD i_aip = detail::integrate(
      [&](LD v) {
        const LD u = std::sqrt(x + v * v / 3.0L);
        return (u + v * v / (3.0L * u)) * std::exp(expo(v));
      },
      0.0L, v_end, "airy_oracle(hyperbola)", opt);
  ai = std::exp(-zeta) * i_ai / kPi;
  aip = -std::exp(-zeta) * i_aip / kPi;
}

// int_0^inf t^power exp(-t^3/3 + x t) dt, scaled by exp(-peak) for x > 0.
LD exponential_part(LD x, int power, LD& log_scale) {
  const auto opt = oracle_options();
  const LD root = x > 0.0L ? std::sqrt(x) : 0.0L;
  log_scale = x > 0.0L ? 2.0L / 3.0L * x * root : 0.0L;
  const LD t_end = 2.0L * root + 7.0L;
  const auto f = [=](LD t) {
    const LD w = std::exp(-t * t * t / 3.0L + x * t - log_scale);
    return power == 1 ? t * w : w;
  };
  // Breakpoint at the peak keeps the Gaussian-like bump inside one panel.
  if (root > 0.0L) {
    return detail::integrate(f, 0.0L, root, "airy_oracle(exp)", opt) +
           detail::integrate(f, root, t_end, "airy_oracle(exp)", opt);
  }
  return detail::integrate(f, 0.0L, t_end, "airy_oracle(exp)", opt);
}

}  // namespace

AiryValues airy_oracle(double xd) {
  if (!std::isfinite(xd) || std::fabs(xd) > 40.0) {
    throw DomainError("airy_oracle: argument must satisfy |x| <= 40");
  }
  const LD x = xd;
  const OscillatoryPair osc = oscillatory_integrals(x);
  LD ai = 0.0L, aip = 0.0L;
  if (x > 0.0L) {
    ai_positive(x, ai, aip);
  } else {
    ai = osc.i0.real() / kPi;
    aip = -osc.i1.imag() / kPi;
  }
  LD s0 = 0.0L, s1 = 0.0L;
  const LD e0 = exponential_part(x, 0, s0);
  const LD e1 = exponential_part(x, 1, s1);
  const LD bi = (std::exp(s0) * e0 + osc.i0.imag()) / kPi;
  const LD bip = (std::exp(s1) * e1 + osc.i1.real()) / kPi;
  AiryValues out;
  out.ai = static_cast<double>(ai);
  out.aip = static_cast<double>(aip);
  out.bi = static_cast<double>(bi);
  out.bip = static_cast<double>(bip);
  return out;
}

}  // namespace pdm
