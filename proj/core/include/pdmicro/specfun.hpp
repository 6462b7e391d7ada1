#pragma once

namespace pdm {

/// Ai, Ai', Bi, Bi' at a real argument.
///
/// Bi grows like exp(2 x^{3/2} / 3); once that overflows a double the Bi
/// fields hold the largest finite double and `bi_saturated` is set.
struct AiryValues {
  double ai = 0.0;
  double aip = 0.0;
  double bi = 0.0;
  double bip = 0.0;
  bool bi_saturated = false;
};

/// Fast Airy functions. Relative accuracy 1e-10 or better on [-40, 40]
/// (measured against the oscillation envelope where Ai and Bi have zeros).
/// Throws DomainError for non-finite x.
[[nodiscard]] AiryValues airy(double x);

/// Slow reference values from contour quadrature of the integral
/// representations, e.g. Ai(x) = (1/pi) int_0^inf cos(t^3/3 + x t) dt.
/// Shares no code with airy(). Accuracy about 1e-12; |x| <= 40.
/// Throws QuadratureError if any integral misses its tolerance.
[[nodiscard]] AiryValues airy_oracle(double x);

namespace detail {

struct AiryLD {
  long double ai, aip, bi, bip;
};

/// Extended-precision evaluation used by the Green-function code, where
/// arguments reach 1e7 and the oscillation phase must be resolved to 1e-9.
/// Bi is not saturated here; long double holds exp(zeta) up to x ~ 660.
[[nodiscard]] AiryLD airy_ld(long double x);

}  // namespace detail
}  // namespace pdm
