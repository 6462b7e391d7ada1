#pragma once

// Globally adaptive Gauss-Kronrod (G15/K31) integration of real or complex
// long double integrands. The per-panel rule comes from Boost.Math; the
// driver bisects the panel with the largest |K - G| until the summed
// estimate meets max(rel_tol * |I|, floor * L1). Running out of panels is a
// QuadratureError, never a silent answer.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pdmicro/errors.hpp"

namespace pdm::detail {

struct QuadOptions {
  long double rel_tol = 1e-13L;
  // Rounding floor relative to the L1 norm; integrals that cancel below it
  // are accepted at this absolute level.
  long double l1_floor = 1e-16L;
  int max_panels = 4000;
};

template <class F>
auto integrate(F&& f, long double a, long double b, const char* what,
               const QuadOptions& opt = {}) {
  using Rule = boost::math::quadrature::gauss_kronrod<long double, 31>;
  using Value = decltype(f(a));
  struct Panel {
    long double a, b;
    Value value;
    long double err, l1;
  };
  const auto eval = [&](long double lo, long double hi) {
    long double err = 0.0L, l1 = 0.0L;
    Value v = Rule::integrate(f, lo, hi, 0, 0.0L, &err, &l1);
    return Panel{lo, hi, v, err, l1};
  };
  const auto by_error = [](const Panel& x, const Panel& y) { return x.err < y.err; };

  std::vector<Panel> heap{eval(a, b)};
  using std::abs;
  for (;;) {
    Value total{};
    long double err = 0.0L, l1 = 0.0L;
    for (const auto& p : heap) {
      total += p.value;
      err += p.err;
      l1 += p.l1;
    }
    const long double target =
        std::max(opt.rel_tol * static_cast<long double>(abs(total)), opt.l1_floor * l1);
    if (std::isfinite(static_cast<double>(err)) && err <= target) return total;
    if (static_cast<int>(heap.size()) >= opt.max_panels || !std::isfinite(static_cast<double>(err))) {
      std::ostringstream os;
      os << what << ": quadrature on [" << static_cast<double>(a) << ", "
         << static_cast<double>(b) << "] did not converge after " << heap.size()
         << " panels (error estimate " << static_cast<double>(err) << ", target "
         << static_cast<double>(target) << ", L1 norm " << static_cast<double>(l1) << ")";
      throw QuadratureError(os.str());
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    heap.pop_back();
    const long double mid = 0.5L * (worst.a + worst.b);
    heap.push_back(eval(worst.a, mid));
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(eval(mid, worst.b));
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
}

}  // namespace pdm::detail
