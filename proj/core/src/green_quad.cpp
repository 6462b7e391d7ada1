// Reference evaluation of G(E) = -i int_0^inf e^{iEt} K(t) dt in field units.
//
// With t = lam T, lam^4 = (E - s)^2 + R^2/4, the exponent becomes
// i Lam phi(T), phi(T) = beta T + gamma / T - T^3 / 12, Lam = lam^3 and
// beta^2 + gamma = 1. The T-contour from 0 (approached from below the real
// axis) to infinity at arg -pi/6 is replaced by a chain of steepest-descent
// paths through saddles of phi. Along each path phi - phi_s = i u^2 / Lam'
// exactly, so the integrand is a pure Gaussian in u and carries no
// oscillation however large Lam is.

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "green_internal.hpp"
#include "pdmicro/errors.hpp"
#include "quadrature.hpp"

namespace pdm::detail {

namespace {

constexpr LD kPi = std::numbers::pi_v<LD>;
constexpr LD kGaussCut = 6.5L;       // e^{-v^2} below 5e-19 beyond
constexpr LD kClassifyU2 = 50.0L;    // |phi - phi_s| reached before classifying
constexpr LD kStepFraction = 0.05L;  // |dT| per node relative to |T|
constexpr int kMaxNodes = 200000;

enum Valley { kZero = 0, kA = 1, kB = 2, kC = 3, kNone = -1 };

struct PhaseFn {
  LD beta, gamma;
  CLD phi(CLD t) const { return beta * t + gamma / t - t * t * t / 12.0L; }
  CLD d1(CLD t) const { return beta - gamma / (t * t) - t * t / 4.0L; }
  CLD d2(CLD t) const { return 2.0L * gamma / (t * t * t) - t / 2.0L; }
};

// phi(T_s + d) - phi(T_s) = d^2 B(d), free of cancellation.
struct SaddleLocal {
  CLD ts;
  LD gamma;
  CLD b(CLD d) const { return gamma / (ts * ts * (ts + d)) - (3.0L * ts + d) / 12.0L; }
  CLD db(CLD d) const {
    const CLD q = ts + d;
    return -gamma / (ts * ts * q * q) - 1.0L / 12.0L;
  }
};

CLD sqrt_near(CLD z, CLD ref) {
  const CLD r = std::sqrt(z);
  return std::abs(r - ref) <= std::abs(r + ref) ? r : -r;
}

struct Node {
  LD u;
  CLD d;
  CLD sb;  // sqrt(B(d)) on the continuous branch
};

struct Branch {
  CLD w;
  std::vector<Node> nodes;
  int valley = kNone;
};

struct Solve {
  CLD d, sb, dd;  // d(u), sqrt B, dd/du
};

// Newton for d sqrt(B(d)) = w u starting from (d0, sb0).
std::optional<Solve> solve_at(const SaddleLocal& loc, CLD w, LD u, CLD d0, CLD sb0) {
  CLD d = d0;
  CLD sb = sb0;
  const CLD target = w * u;
  for (int it = 0; it < 60; ++it) {
    sb = sqrt_near(loc.b(d), sb);
    const CLD h = d * sb;
    const CLD hp = sb + d * loc.db(d) / (2.0L * sb);
    const CLD step = (h - target) / hp;
    d -= step;
    const LD scale = std::max(std::abs(loc.ts + d), std::abs(d));
    if (!std::isfinite(static_cast<double>(std::abs(d)))) return std::nullopt;
    if (std::abs(step) <= 64.0L * std::numeric_limits<LD>::epsilon() * scale) {
      sb = sqrt_near(loc.b(d), sb);
      const CLD hp2 = sb + d * loc.db(d) / (2.0L * sb);
      return Solve{d, sb, w / hp2};
    }
  }
  return std::nullopt;
}

bool crosses_cut(CLD a, CLD b) {
  if (a.real() >= 0.0L && b.real() >= 0.0L) return false;
  const bool sa = std::signbit(a.imag());
  const bool sb = std::signbit(b.imag());
  if (sa == sb) return false;
  // Segment crossing of the imaginary-axis sign: locate where it meets Im = 0.
  const LD f = a.imag() / (a.imag() - b.imag());
  const LD x = a.real() + f * (b.real() - a.real());
  return x < 0.0L;
}

int classify(CLD t, LD gamma) {
  const LD at = std::abs(t);
  if (gamma / at >= at * at * at / 12.0L) {
    return t.imag() < 0.0L ? kZero : kNone;
  }
  const LD arg = std::atan2(t.imag(), t.real());
  const LD third = kPi / 3.0L;
  if (arg > -third && arg < 0.0L) return kA;
  if (arg > third && arg < 2.0L * third) return kC;
  if (arg > -kPi && arg < -2.0L * third) return kB;
  return kNone;
}

// Follows one steepest-descent ray of the saddle until the far end can be
// classified and the Gaussian has decayed; kNone when the ray is unusable.
Branch trace(const SaddleLocal& loc, CLD w, LD u_end, const std::vector<CLD>& others) {
  Branch br;
  br.w = w;
  const CLD sb0 = std::sqrt(loc.b(0.0L));
  br.nodes.push_back(Node{0.0L, CLD(0.0L), sb0});
  CLD dd = w / sb0;
  LD u = 0.0L;
  const LD ts_abs = std::abs(loc.ts);
  while (u < u_end) {
    if (static_cast<int>(br.nodes.size()) >= kMaxNodes) return br;
    const Node& last = br.nodes.back();
    const CLD t_last = loc.ts + last.d;
    LD du = kStepFraction * std::abs(t_last) / std::abs(dd);
    du = std::min(du, u_end - u);
    std::optional<Solve> s;
    for (int halving = 0; halving < 40; ++halving) {
      s = solve_at(loc, w, u + du, last.d + dd * du, last.sb);
      if (s && std::abs(s->d - last.d) <= 2.0L * kStepFraction * std::abs(t_last)) break;
      s.reset();
      du *= 0.5L;
    }
    if (!s) return br;
    const CLD t_new = loc.ts + s->d;
    if (crosses_cut(t_last, t_new)) return br;
    for (const CLD& o : others) {
      if (std::abs(t_new - o) < 1e-3L * std::max(std::abs(o), ts_abs)) return br;
    }
    u += du;
    dd = s->dd;
    br.nodes.push_back(Node{u, s->d, s->sb});
  }
  br.valley = classify(loc.ts + br.nodes.back().d, loc.gamma);
  return br;
}

struct SaddleInfo {
  CLD ts;
  CLD phi;
  std::array<Branch, 2> rays;
};

// int_{ray} T^{k-3/2} e^{-Lam u^2} dT/du du for k = -1, 0, 1 (u = v / sqrt Lam).
std::array<CLD, 3> ray_moments(const SaddleLocal& loc, const Branch& br, LD big_lambda) {
  const LD root = std::sqrt(big_lambda);
  const std::vector<Node>& nodes = br.nodes;
  const auto eval = [&](LD v, int k) -> CLD {
    const LD u = v / root;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), u,
                               [](LD x, const Node& n) { return x < n.u; });
    const Node& n = *(it == nodes.begin() ? it : std::prev(it));
    // Predictor from the node slope, then Newton.
    const CLD sb = n.sb;
    const CLD hp = sb + n.d * loc.db(n.d) / (2.0L * sb);
    const auto s = solve_at(loc, br.w, u, n.d + (br.w / hp) * (u - n.u), sb);
    if (!s) throw QuadratureError("green_energy_quad: lost the steepest-descent path");
    const CLD t = loc.ts + s->d;
    // Principal branch of T^{k-3/2}.
    const CLD pw = std::exp((static_cast<LD>(k) - 1.5L) * std::log(t));
    return pw * s->dd * (std::exp(-v * v) / root);
  };
  QuadOptions opt;
  opt.rel_tol = 1e-13L;
  opt.l1_floor = 1e-15L;
  std::array<CLD, 3> out{};
  for (int k = -1; k <= 1; ++k) {
    out[static_cast<std::size_t>(k + 1)] =
        integrate([&](LD v) { return eval(v, k); }, 0.0L, kGaussCut, "green_energy_quad", opt);
  }
  return out;
}

[[noreturn]] void no_contour(const PhaseFn& pf, const char* why) {
  std::ostringstream os;
  os << "green_energy_quad: " << why << " (beta = " << static_cast<double>(pf.beta)
     << ", gamma = " << static_cast<double>(pf.gamma) << ")";
  throw QuadratureError(os.str());
}

// Converts the moments M_k = int T^{k-3/2} e^{i Lam phi} dT into G and its
// gradients.
GreenField assemble(const PairGeometry& p, LD lam, const std::array<CLD, 3>& moments) {
  // -i (4 pi i)^{-3/2} lam^{-1/2}, principal branch.
  const CLD pref = CLD(0.0L, -1.0L) * std::pow(4.0L * kPi, -1.5L) *
                   std::polar(1.0L, -0.75L * kPi) / std::sqrt(lam);
  const CLD g = pref * moments[1];
  const CLD g_s = pref * CLD(0.0L, -lam) * moments[2];
  const CLD g_q = pref * CLD(0.0L, 0.25L / lam) * moments[0];  // dG / d(R^2)
  GreenField f;
  f.g = g;
  f.dz = 0.5L * g_s + 2.0L * p.dz * g_q;
  f.drho = 2.0L * p.drho * g_q;
  f.dzsrc = 0.5L * g_s - 2.0L * p.dz * g_q;
  return f;
}

}  // namespace

GreenField quadrature_field(const PairGeometry& p, LD energy) {
  const LD a = energy - p.s;
  const LD r2 = p.R * p.R;
  const LD lam = std::sqrt(std::sqrt(a * a + 0.25L * r2));
  const LD big_lambda = lam * lam * lam;
  PhaseFn pf{a / (lam * lam), 0.25L * r2 / (lam * lam * lam * lam)};

  // Saddles: T^4 / 4 - beta T^2 + gamma = 0.
  const CLD disc = std::sqrt(CLD(pf.beta * pf.beta - pf.gamma));
  CLD q1 = 2.0L * pf.beta + 2.0L * disc;
  CLD q2 = 2.0L * pf.beta - 2.0L * disc;
  if (std::abs(q2) > std::abs(q1)) std::swap(q1, q2);
  q2 = 4.0L * pf.gamma / q1;
  std::vector<CLD> saddles;
  for (const CLD q : {q1, q2}) {
    const CLD r = std::sqrt(q);
    for (CLD t : {r, -r}) {
      for (int it = 0; it < 8; ++it) t -= pf.d1(t) / pf.d2(t);
      saddles.push_back(t);
    }
  }

  const LD u_end = std::max(std::sqrt(kClassifyU2), kGaussCut / std::sqrt(big_lambda));
  const CLD w = std::polar(1.0L, kPi / 4.0L);
  std::vector<SaddleInfo> infos;
  for (std::size_t i = 0; i < saddles.size(); ++i) {
    const CLD ts = saddles[i];
    if (ts.real() < 0.0L && std::abs(ts.imag()) <= 1e-12L * std::abs(ts)) continue;
    std::vector<CLD> others;
    for (std::size_t j = 0; j < saddles.size(); ++j) {
      if (j != i) others.push_back(saddles[j]);
    }
    for (const CLD& o : others) {
      if (std::abs(o - ts) < 1e-6L * std::abs(ts)) no_contour(pf, "coalescing saddles (caustic)");
    }
    SaddleLocal loc{ts, pf.gamma};
    SaddleInfo info{ts, pf.phi(ts), {trace(loc, w, u_end, others), trace(loc, -w, u_end, others)}};
    if (info.rays[0].valley == kNone || info.rays[1].valley == kNone) continue;
    if (info.rays[0].valley == info.rays[1].valley) continue;
    infos.push_back(std::move(info));
  }

  std::array<CLD, 3> moments{};
  if (pf.beta < 0.0L && pf.beta * pf.beta > pf.gamma) {
    // Both saddles lie on the negative imaginary axis and the ray of the
    // inner one runs into the outer one (a Stokes line). Integrate along
    // the axis up to the outer saddle, then leave along its ray to infinity.
    const LD y1 = std::sqrt(-q2.real());
    const LD y2 = std::sqrt(-q1.real());
    const auto expo = [&](LD y) {
      return big_lambda * (pf.beta * y - pf.gamma / y + y * y * y / 12.0L);
    };
    const LD f1 = expo(y1);
    QuadOptions opt;
    opt.rel_tol = 1e-12L;
    for (int k = -1; k <= 1; ++k) {
      const LD pw = static_cast<LD>(k) - 1.5L;
      // On (0, y1] in the variable x = ln y; the e^{-Lam gamma / y} wall is
      // cut where the integrand has fallen by e^{-60}.
      const auto g = [&](LD x) {
        const LD y = std::exp(x);
        return std::exp(expo(y) - f1 + (pw + 1.0L) * x);
      };
      const LD x1 = std::log(y1);
      LD x0 = x1;
      while (expo(std::exp(x0)) - f1 + (pw + 1.0L) * (x0 - x1) > -60.0L && x0 > x1 - 2000.0L) {
        x0 -= 0.5L;
      }
      const auto f = [&](LD y) { return std::exp(expo(y) - f1 + pw * std::log(y)); };
      const LD axis = integrate(g, x0, x1, "green_energy_quad(axis)", opt) +
                      integrate(f, y1, y2, "green_energy_quad(axis)", opt);
      // (-i y)^{pw} (-i) = y^{pw} e^{-i pi (pw + 1) / 2}
      moments[static_cast<std::size_t>(k + 1)] =
          std::exp(f1) * axis * std::polar(1.0L, -0.5L * kPi * (pw + 1.0L));
    }
    const CLD t2(0.0L, -y2);
    const SaddleInfo* outer = nullptr;
    for (const SaddleInfo& info : infos) {
      if (std::abs(info.ts - t2) <= 1e-9L * y2) outer = &info;
    }
    if (outer == nullptr) no_contour(pf, "outer saddle on the imaginary axis has no usable rays");
    const int exit_side = outer->rays[0].valley == kA ? 0 : (outer->rays[1].valley == kA ? 1 : -1);
    if (exit_side < 0) no_contour(pf, "outer saddle does not reach the contour end");
    SaddleLocal loc{outer->ts, pf.gamma};
    const auto out = ray_moments(loc, outer->rays[static_cast<std::size_t>(exit_side)], big_lambda);
    const CLD lp = big_lambda * outer->phi;
    const CLD factor = std::polar(std::exp(-lp.imag()), lp.real());
    for (std::size_t k = 0; k < 3; ++k) moments[k] += factor * out[k];
    return assemble(p, lam, moments);
  }

  // Breadth-first search over valleys, saddles as edges.
  std::array<int, 4> via_saddle{-1, -1, -1, -1};
  std::array<int, 4> prev_valley{-1, -1, -1, -1};
  std::array<bool, 4> seen{true, false, false, false};
  std::deque<int> queue{kZero};
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (std::size_t i = 0; i < infos.size(); ++i) {
      for (int side = 0; side < 2; ++side) {
        if (infos[i].rays[side].valley != v) continue;
        const int next = infos[i].rays[1 - side].valley;
        if (seen[next]) continue;
        seen[next] = true;
        via_saddle[next] = static_cast<int>(i);
        prev_valley[next] = v;
        queue.push_back(next);
      }
    }
  }
  if (!seen[kA]) no_contour(pf, "no steepest-descent chain from T = 0 to infinity");

  for (int v = kA; v != kZero; v = prev_valley[v]) {
    const SaddleInfo& info = infos[static_cast<std::size_t>(via_saddle[v])];
    const int exit_side = info.rays[0].valley == v ? 0 : 1;
    SaddleLocal loc{info.ts, pf.gamma};
    const auto out = ray_moments(loc, info.rays[exit_side], big_lambda);
    const auto in = ray_moments(loc, info.rays[1 - exit_side], big_lambda);
    // e^{i Lam phi_s}, with the large real phase reduced in long double.
    const CLD lp = big_lambda * info.phi;
    const CLD factor = std::polar(std::exp(-lp.imag()), lp.real());
    for (std::size_t k = 0; k < 3; ++k) moments[k] += factor * (out[k] - in[k]);
  }

  return assemble(p, lam, moments);
}

}  // namespace pdm::detail
