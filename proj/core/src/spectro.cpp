#include "pdmicro/spectro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "green_internal.hpp"
#include "parallel.hpp"
#include "pdmicro/classical.hpp"
#include "pdmicro/errors.hpp"

namespace pdm {

using detail::LD;

namespace {

constexpr int kMaxIterations = 200;
constexpr double kStepTol = 1e-8;

// u = E / eps_F from the central phase difference 2 pi N = (4/3) u^{3/2}.
double u_from_fringes(double n) { return std::cbrt(std::pow(1.5 * std::numbers::pi * n, 2.0)); }

struct ProfileModel {
  const RadialProfile& data;
  const FieldScales& scales;
  double d;
  int workers;

  std::vector<double> unit(double u) const {
    std::vector<double> m(data.rho.size());
    const SourceModel src{data.source.kind, 1.0};
    const double e = u * scales.energy_epsF;
    detail::parallel_for(m.size(), workers, [&](std::size_t i) {
      m[i] = current_density(SpacePoint{data.rho[i], -d, 0.0}, e, src, scales);
    });
    return m;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  LD s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<LD>(a[i]) * b[i];
  return static_cast<double>(s);
}

double sse(const std::vector<double>& m, double amp, const std::vector<double>& y) {
  LD s = 0.0L;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const LD r = static_cast<LD>(amp) * m[i] - y[i];
    s += r * r;
  }
  return static_cast<double>(s);
}

}  // namespace

double golden_rule_current_field_units(double u, const SourceModel& src) {
  if (!std::isfinite(u)) throw DomainError("golden_rule_current: energy must be finite");
  const LD im = src.kind == SourceKind::s_wave ? detail::ldos_dimensionless(u)
                                               : detail::ldos_dzdz_dimensionless(u);
  return static_cast<double>(-2.0L * static_cast<LD>(src.strength) * src.strength * im);
}

double golden_rule_current(double energy, const SourceModel& src, const FieldScales& scales) {
  const double im = src.kind == SourceKind::s_wave ? ldos_at_source(energy, scales)
                                                   : ldos_at_source_dzdz(energy, scales);
  return -src.strength * src.strength * (2.0 / scales.constants.hbar) * im;
}

EnergyFit extract_energy(const RadialProfile& profile, const FieldScales& scales, double d,
                         int workers) {
  const std::vector<double>& y = profile.j;
  const std::size_t n = y.size();
  if (n < 16 || profile.rho.size() != n) throw FitError("extract_energy: profile too short");
  if (!(d > 0.0)) throw DomainError("extract_energy: distance must be > 0");
  const double top = *std::max_element(y.begin(), y.end());
  const double bottom = *std::min_element(y.begin(), y.end());
  if (!(top > bottom) || !(top > 0.0)) throw FitError("extract_energy: flat profile");
  const double y_norm = dot(y, y);

  const ProfileModel model{profile, scales, d, workers};

  // Start: fringe count, then a scan across the count's ambiguity with the
  // amplitude eliminated linearly.
  const auto count = static_cast<double>(prominent_maxima(y, 0.05).size());
  const double n_lo = std::max(count - 2.0, 0.05);
  const double n_hi = count + 1.0;
  double best_u = 0.0;
  double best_amp = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (double nf = n_lo; nf <= n_hi + 1e-12; nf += 1.0 / 16.0) {
    const double u = u_from_fringes(nf);
    const std::vector<double> m = model.unit(u);
    const double mm = dot(m, m);
    if (!(mm > 0.0)) continue;
    const double amp = dot(m, y) / mm;
    const double c = sse(m, amp, y);
    if (c < best_cost) {
      best_cost = c;
      best_u = u;
      best_amp = amp;
    }
  }
  if (!(best_cost < std::numeric_limits<double>::infinity())) {
    throw FitError("extract_energy: no trial energy produces a nonzero model profile");
  }
  {
    const double rmax = rho_max(best_u * scales.energy_epsF, scales, d);
    const double fringes = (4.0 / 3.0) * std::pow(best_u, 1.5) / (2.0 * std::numbers::pi) + 1.0;
    const auto inside = static_cast<double>(std::count_if(
        profile.rho.begin(), profile.rho.end(), [&](double r) { return r <= rmax; }));
    if (inside < 8.0 * fringes) {
      std::ostringstream os;
      os << "extract_energy: undersampled profile (" << inside << " samples inside rho_max for "
         << fringes << " fringes)";
      throw FitError(os.str());
    }
  }

  // Levenberg-Marquardt on (u, A) with Marquardt scaling of the diagonal.
  double u = best_u;
  double amp = best_amp;
  std::vector<double> m = model.unit(u);
  double cost = sse(m, amp, y);
  double lambda = 1e-3;
  for (int it = 1; it <= kMaxIterations; ++it) {
    if (cost == 0.0) return EnergyFit{u * scales.energy_epsF, amp, 0.0, it - 1};
    const double h = 1e-6 * u;
    const std::vector<double> mp = model.unit(u + h);
    const std::vector<double> mn = model.unit(u - h);
    std::vector<double> ju(n);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      ju[i] = amp * (mp[i] - mn[i]) / (2.0 * h);
      r[i] = amp * m[i] - y[i];
    }
    const double a11 = dot(ju, ju);
    const double a12 = dot(ju, m);
    const double a22 = dot(m, m);
    const double g1 = -dot(ju, r);
    const double g2 = -dot(m, r);
    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      const double b11 = a11 * (1.0 + lambda);
      const double b22 = a22 * (1.0 + lambda);
      const double det = b11 * b22 - a12 * a12;
      if (!(std::abs(det) > 0.0)) {
        lambda *= 4.0;
        continue;
      }
      const double du = (g1 * b22 - a12 * g2) / det;
      const double da = (b11 * g2 - a12 * g1) / det;
      const double u_new = u + du;
      if (!(u_new > 0.0)) {
        lambda *= 4.0;
        continue;
      }
      const double a_new = amp + da;
      std::vector<double> m_new = model.unit(u_new);
      const double c_new = sse(m_new, a_new, y);
      if (c_new <= cost) {
        accepted = true;
        u = u_new;
        amp = a_new;
        m = std::move(m_new);
        cost = c_new;
        lambda = std::max(lambda / 3.0, 1e-12);
        const bool small = std::abs(du) <= kStepTol * std::abs(u) &&
                           std::abs(da) <= kStepTol * std::abs(amp);
        if (small) {
          return EnergyFit{u * scales.energy_epsF, amp, std::sqrt(cost / y_norm), it};
        }
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) {
      // No descent direction left at this damping: the cost is at its floor.
      return EnergyFit{u * scales.energy_epsF, amp, std::sqrt(cost / y_norm), it};
    }
  }
  std::ostringstream os;
  os << "extract_energy: no convergence after " << kMaxIterations << " iterations (E = "
     << u * scales.energy_epsF << " J)";
  throw FitError(os.str());
}

void add_multiplicative_noise(RadialProfile& profile, double rel, std::uint64_t seed,
                              std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 gen(seq);
  const auto uniform = [&] {
    // (0, 1], 53 random bits.
    return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
  };
  for (std::size_t i = 0; i < profile.j.size(); i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * std::numbers::pi * uniform();
    profile.j[i] *= 1.0 + rel * r * std::cos(t);
    if (i + 1 < profile.j.size()) profile.j[i + 1] *= 1.0 + rel * r * std::sin(t);
  }
}

std::vector<SweepPoint> run_sweep(const std::vector<double>& hnu, double E0_true,
                                  const SourceModel& src, const FieldScales& scales,
                                  const DetectorPlane& plane, const SweepOptions& opt) {
  for (const double h : hnu) {
    if (!(h > E0_true - 5.0 * scales.energy_epsF) || !std::isfinite(h)) {
      throw DomainError("run_sweep: photon energy below E0 - 5 eps_F");
    }
  }
  std::vector<SweepPoint> out(hnu.size());
  detail::parallel_for(hnu.size(), opt.workers, [&](std::size_t i) {
    SweepPoint& p = out[i];
    p.hnu = hnu[i];
    p.E_true = hnu[i] - E0_true;
    p.E_fit = std::numeric_limits<double>::quiet_NaN();
    if (!(p.E_true > 0.5 * scales.energy_epsF)) {
      p.note = "below the fringe-detection threshold (E_true <= 0.5 eps_F)";
      return;
    }
    try {
      RadialProfile prof = radial_profile(p.E_true, src, scales, plane, opt.profile_samples, 1);
      if (opt.noise_rel > 0.0) add_multiplicative_noise(prof, opt.noise_rel, opt.seed, i);
      const EnergyFit fit = extract_energy(prof, scales, plane.d, 1);
      p.E_fit = fit.energy;
      p.fit_residual = fit.fit_residual;
      p.converged = true;
    } catch (const std::exception& e) {
      p.note = e.what();
    }
  });
  return out;
}

EinsteinFitResult einstein_fit(const std::vector<SweepPoint>& points) {
  std::vector<const SweepPoint*> ok;
  for (const auto& p : points) {
    if (p.converged && std::isfinite(p.E_fit)) ok.push_back(&p);
  }
  if (ok.size() < 2) throw FitError("einstein_fit: fewer than 2 converged points");
  const auto n = static_cast<LD>(ok.size());
  LD mx = 0.0L, my = 0.0L;
  for (const auto* p : ok) {
    mx += p->hnu;
    my += p->E_fit;
  }
  mx /= n;
  my /= n;
  LD sxx = 0.0L, sxy = 0.0L;
  for (const auto* p : ok) {
    const LD dx = static_cast<LD>(p->hnu) - mx;
    sxx += dx * dx;
    sxy += dx * (static_cast<LD>(p->E_fit) - my);
  }
  if (!(sxx > 0.0L)) throw FitError("einstein_fit: singular design (all photon energies equal)");
  const LD slope = sxy / sxx;
  const LD intercept = my - slope * mx;
  LD ss = 0.0L;
  for (const auto* p : ok) {
    const LD r = static_cast<LD>(p->E_fit) - (intercept + slope * p->hnu);
    ss += r * r;
  }
  EinsteinFitResult res;
  res.slope = static_cast<double>(slope);
  res.intercept = static_cast<double>(intercept);
  res.E0_recovered = static_cast<double>(-intercept);
  res.rms_residual = static_cast<double>(std::sqrt(ss / n));
  res.n_points = static_cast<int>(ok.size());
  return res;
}

}  // namespace pdm
