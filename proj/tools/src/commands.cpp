#include "pdmicro_cli/commands.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pdmicro/classical.hpp"
#include "pdmicro/detector.hpp"
#include "pdmicro/errors.hpp"
#include "pdmicro/spectro.hpp"
#include "pdmicro/units.hpp"

namespace pdm::cli {

namespace {

constexpr int kDefaultGridN = 128;
constexpr int kDefaultProfileSamples = 512;
constexpr double kViewMargin = 1.2;       // default extent in units of rho_max
constexpr double kCompareReach = 0.9;     // compare-semiclassical stops here, x rho_max
constexpr const char* kSweepHeader = "hnu_eV,E_true_eV,E_fit_eV,residual";

struct Context {
  const RunConfig& cfg;
  Subcommand cmd;
  FieldScales scales;
  SourceModel src;
  int workers;

  std::string prefix() const { return cfg.output_prefix.value_or("pdmicro"); }
  double energy_J() const { return convert_energy(*cfg.energy_ueV, "ueV", "J"); }
};

std::string metadata(const Context& ctx,
                     const std::vector<std::pair<std::string, double>>& extra) {
  std::string s = "# pdmicro " + std::string(subcommand_name(ctx.cmd)) + "\n";
  for (const auto& [k, v] : ctx.cfg.entries) {
    // Neither changes the numbers, so they stay out of the artifacts.
    if (k == "workers" || k == "output_prefix") continue;
    s += "# " + k + " = " + v + "\n";
  }
  s += "# epsF_J = " + format_double(ctx.scales.energy_epsF) + "\n";
  s += "# lF_m = " + format_double(ctx.scales.length_lF) + "\n";
  for (const auto& [k, v] : extra) s += "# " + k + " = " + format_double(v) + "\n";
  return s;
}

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (const double v : values) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
  out += '\n';
}

std::string profile_csv(const Context& ctx, const RadialProfile& prof,
                        std::vector<std::pair<std::string, double>> extra) {
  std::string out = metadata(ctx, extra);
  out += "rho_m,j_norm\n";
  for (std::size_t i = 0; i < prof.rho.size(); ++i) append_row(out, {prof.rho[i], prof.j[i]});
  return out;
}

std::string pgm(const CurrentMap& map, double j_max) {
  const int n = map.plane.n;
  std::string out = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n65535\n";
  out.reserve(out.size() + 2 * static_cast<std::size_t>(n) * n);
  for (int row = n - 1; row >= 0; --row) {  // top row is +extent
    for (int col = 0; col < n; ++col) {
      const double j = map.j[static_cast<std::size_t>(row) * n + col];
      const double v = j_max > 0.0 ? std::clamp(j / j_max, 0.0, 1.0) : 0.0;
      const auto q = static_cast<unsigned>(std::lround(v * 65535.0));
      out += static_cast<char>((q >> 8) & 0xff);
      out += static_cast<char>(q & 0xff);
    }
  }
  return out;
}

DetectorPlane plane_for(const Context& ctx, double energy) {
  const double d = *ctx.cfg.distance_m;
  DetectorPlane plane;
  plane.d = d;
  plane.extent = ctx.cfg.grid_extent_m.value_or(kViewMargin * rho_max(energy, ctx.scales, d));
  plane.n = ctx.cfg.grid_n.value_or(kDefaultGridN);
  return plane;
}

RunResult run_map(const Context& ctx) {
  const double e = ctx.energy_J();
  const DetectorPlane plane = plane_for(ctx, e);
  const CurrentMap map = map_plane(e, ctx.src, ctx.scales, plane, ctx.workers);
  const double j_max = *std::max_element(map.j.begin(), map.j.end());
  const RadialProfile prof =
      radial_profile(e, ctx.src, ctx.scales, plane,
                     ctx.cfg.profile_samples.value_or(kDefaultProfileSamples), ctx.workers);
  RunResult r;
  r.files.push_back({ctx.prefix() + "_map.pgm", pgm(map, j_max)});
  r.files.push_back(
      {ctx.prefix() + "_profile.csv",
       profile_csv(ctx, prof,
                   {{"rho_max_m", rho_max(e, ctx.scales, plane.d)},
                    {"grid_extent_m", plane.extent},
                    {"j_max", j_max}})});
  return r;
}

RunResult run_profile(const Context& ctx) {
  const double e = ctx.energy_J();
  const DetectorPlane plane = plane_for(ctx, e);
  const RadialProfile prof =
      radial_profile(e, ctx.src, ctx.scales, plane,
                     ctx.cfg.profile_samples.value_or(kDefaultProfileSamples), ctx.workers);
  const FringeReport rep = count_fringes(prof);
  const PhaseDifference pd = central_phase_difference(e, ctx.scales);
  RunResult r;
  r.files.push_back({ctx.prefix() + "_profile.csv",
                     profile_csv(ctx, prof, {{"rho_max_m", rep.rho_max_classical}})});
  std::string f = metadata(ctx, {{"rho_max_m", rep.rho_max_classical},
                                 {"delta_phi_rad", pd.delta_phi},
                                 {"fringe_estimate", pd.fringe_estimate}});
  f += "# n_fringes = " + std::to_string(rep.n_fringes) + "\n";
  f += "index,rho_m\n";
  for (std::size_t i = 0; i < rep.maxima_rho.size(); ++i) {
    f += std::to_string(i) + "," + format_double(rep.maxima_rho[i]) + "\n";
  }
  r.files.push_back({ctx.prefix() + "_fringes.csv", std::move(f)});
  r.summary = "n_fringes = " + std::to_string(rep.n_fringes) +
              ", delta_phi / 2 pi = " + format_double(pd.fringe_estimate);
  return r;
}

RunResult run_total_current(const Context& ctx) {
  std::string out = metadata(ctx, {});
  out += "E_over_epsF,J_norm\n";
  for (int k = -100; k <= 600; ++k) {  // [-5, 30] eps_F in steps of 1/20
    const double u = k / 20.0;
    append_row(out, {u, golden_rule_current_field_units(u, SourceModel{ctx.src.kind, 1.0})});
  }
  RunResult r;
  r.files.push_back({ctx.prefix() + "_total_current.csv", std::move(out)});
  return r;
}

std::vector<SweepPoint> sweep_points(const Context& ctx) {
  const double e0 = convert_energy(*ctx.cfg.binding_eV, "eV", "J");
  std::vector<double> hnu;
  double widest = 0.0;
  for (const double h : *ctx.cfg.photon_eV) {
    hnu.push_back(convert_energy(h, "eV", "J"));
    const double e = hnu.back() - e0;
    if (e > 0.0) widest = std::max(widest, rho_max(e, ctx.scales, *ctx.cfg.distance_m));
  }
  DetectorPlane plane;
  plane.d = *ctx.cfg.distance_m;
  plane.extent = ctx.cfg.grid_extent_m.value_or(widest > 0.0 ? kViewMargin * widest : 1.0);
  SweepOptions opt;
  opt.profile_samples = ctx.cfg.profile_samples.value_or(kDefaultProfileSamples);
  opt.noise_rel = ctx.cfg.noise_rel.value_or(0.0);
  opt.seed = ctx.cfg.seed.value_or(42);
  opt.workers = ctx.workers;
  return run_sweep(hnu, e0, ctx.src, ctx.scales, plane, opt);
}

std::string sweep_csv(const Context& ctx, const std::vector<SweepPoint>& pts) {
  std::string out = metadata(ctx, {});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].converged) out += "# point " + std::to_string(i) + ": " + pts[i].note + "\n";
  }
  out += kSweepHeader;
  out += '\n';
  const double q = ctx.scales.constants.q_e;
  for (const SweepPoint& p : pts) append_row(out, {p.hnu / q, p.E_true / q, p.E_fit / q, p.fit_residual});
  return out;
}

RunResult run_sweep_cmd(const Context& ctx) {
  const std::vector<SweepPoint> pts = sweep_points(ctx);
  RunResult r;
  r.files.push_back({ctx.prefix() + "_sweep.csv", sweep_csv(ctx, pts)});
  const auto ok = std::count_if(pts.begin(), pts.end(), [](const auto& p) { return p.converged; });
  r.summary = std::to_string(ok) + " of " + std::to_string(pts.size()) + " points fitted";
  return r;
}

std::vector<SweepPoint> read_sweep_csv(const std::string& path, double q) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("input_csv: cannot open '" + path + "'");
  std::vector<SweepPoint> pts;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (!header) {
      if (line != kSweepHeader) throw ConfigError(where + "expected header '" + kSweepHeader + "'");
      header = true;
      continue;
    }
    std::array<double, 4> v{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t k = 0; k < v.size(); ++k) {
      const auto [next, ec] = std::from_chars(p, end, v[k]);
      if (ec != std::errc() || (k + 1 < v.size() ? (next == end || *next != ',') : next != end)) {
        throw ConfigError(where + "expected 4 comma-separated numbers");
      }
      p = next + 1;
    }
    SweepPoint sp;
    sp.hnu = v[0] * q;
    sp.E_true = v[1] * q;
    sp.E_fit = v[2] * q;
    sp.fit_residual = v[3];
    sp.converged = std::isfinite(sp.E_fit);
    pts.push_back(sp);
  }
  if (!header) throw ConfigError("input_csv: '" + path + "' has no header line");
  return pts;
}

RunResult run_fit_einstein(const Context& ctx) {
  const double q = ctx.scales.constants.q_e;
  const std::vector<SweepPoint> pts =
      ctx.cfg.input_csv ? read_sweep_csv(*ctx.cfg.input_csv, q) : sweep_points(ctx);
  const EinsteinFitResult fit = einstein_fit(pts);
  std::string out = metadata(ctx, {});
  out += "slope,intercept_eV,E0_eV,rms_eV,n_points\n";
  out += format_double(fit.slope) + "," + format_double(fit.intercept / q) + "," +
         format_double(fit.E0_recovered / q) + "," + format_double(fit.rms_residual / q) + "," +
         std::to_string(fit.n_points) + "\n";
  RunResult r;
  r.files.push_back({ctx.prefix() + "_einstein.csv", std::move(out)});
  r.summary = "slope = " + format_double(fit.slope) + ", E0 = " +
              format_double(fit.E0_recovered / q) + " eV, rms = " +
              format_double(fit.rms_residual / q) + " eV (" + std::to_string(fit.n_points) +
              " points)";
  return r;
}

template <class Body>
void parallel_rows(std::size_t n, int workers, Body body) {
  std::size_t w = workers > 0 ? static_cast<std::size_t>(workers)
                              : std::max(1u, std::thread::hardware_concurrency());
  w = std::min(w, std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += w) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RunResult run_compare(const Context& ctx) {
  const double e = ctx.energy_J();
  const double d = *ctx.cfg.distance_m;
  const double rmax = rho_max(e, ctx.scales, d);
  const auto n = static_cast<std::size_t>(ctx.cfg.profile_samples.value_or(kDefaultProfileSamples));
  std::vector<double> rho(n), exact(n), semi(n);
  parallel_rows(n, ctx.workers, [&](std::size_t i) {
    rho[i] = kCompareReach * rmax * static_cast<double>(i) / static_cast<double>(n - 1);
    const SpacePoint p{rho[i], -d, 0.0};
    exact[i] = current_density(p, e, SourceModel{}, ctx.scales);
    semi[i] = semiclassical_current_density(p, e, ctx.scales);
  });
  const double top = *std::max_element(exact.begin(), exact.end());
  std::string out = metadata(ctx, {{"rho_max_m", rmax}, {"j_exact_max", top}});
  out += "# rel_err = |j_semi - j_exact| / max(j_exact)\n";
  out += "rho_m,j_exact,j_semi,rel_err\n";
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rel = std::abs(semi[i] - exact[i]) / top;
    worst = std::max(worst, rel);
    append_row(out, {rho[i], exact[i], semi[i], rel});
  }
  RunResult r;
  r.files.push_back({ctx.prefix() + "_compare.csv", std::move(out)});
  r.summary = "max rel_err = " + format_double(worst);
  return r;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  std::array<char, 32> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  (void)ec;
  return std::string(buf.data(), p);
}

RunResult run_subcommand(Subcommand cmd, const RunConfig& cfg, int workers) {
  require_for(cfg, cmd);
  const Context ctx{cfg, cmd, make_scales(*cfg.field_V_per_m),
                    SourceModel{cfg.source_kind.value_or(SourceKind::s_wave), 1.0},
                    workers >= 0 ? workers : cfg.workers.value_or(0)};
  switch (cmd) {
    case Subcommand::map: return run_map(ctx);
    case Subcommand::profile: return run_profile(ctx);
    case Subcommand::total_current: return run_total_current(ctx);
    case Subcommand::sweep: return run_sweep_cmd(ctx);
    case Subcommand::fit_einstein: return run_fit_einstein(ctx);
    case Subcommand::compare_semiclassical: return run_compare(ctx);
  }
  throw ConfigError("unhandled subcommand");
}

void write_outputs(const std::vector<OutputFile>& files) {
  std::vector<std::string> written;
  try {
    for (const OutputFile& f : files) {
      written.push_back(f.path);
      std::ofstream out(f.path, std::ios::binary | std::ios::trunc);
      out.write(f.bytes.data(), static_cast<std::streamsize>(f.bytes.size()));
      out.close();
      if (!out) throw std::runtime_error("cannot write '" + f.path + "'");
    }
  } catch (...) {
    for (const std::string& p : written) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
    throw;
  }
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return 2;
  } catch (const FitError&) {
    return 4;
  } catch (...) {
    return 3;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Photodetachment microscope simulator"};
  app.require_subcommand(1);
  std::string config_path;
  int workers = -1;
  std::string prefix;
  const std::array<std::pair<const char*, const char*>, 6> cmds{{
      {"map", "detector current map (PGM) and radial profile"},
      {"profile", "radial profile and fringe report"},
      {"total-current", "golden-rule current over [-5, 30] eps_F"},
      {"sweep", "photon-energy sweep with energy extraction"},
      {"fit-einstein", "linear fit of extracted energies against photon energy"},
      {"compare-semiclassical", "exact against semiclassical current density"},
  }};
  for (const auto& [name, help] : cmds) {
    CLI::App* sc = app.add_subcommand(name, help);
    sc->add_option("config", config_path, "configuration file")->required();
    sc->add_option("--workers", workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sc->add_option("--output-prefix", prefix, "overrides output_prefix");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const Subcommand cmd = parse_subcommand(app.get_subcommands().front()->get_name());

  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    RunConfig cfg = parse_config(text.str());
    if (!prefix.empty()) cfg.output_prefix = prefix;
    const RunResult res = run_subcommand(cmd, cfg, workers);
    write_outputs(res.files);
    if (!res.summary.empty()) std::cout << res.summary << "\n";
    for (const OutputFile& f : res.files) std::cout << "wrote " << f.path << "\n";
    return 0;
  } catch (const std::exception& e) {
    const int code = exit_code_for_current_exception();
    std::cerr << "pdmicro " << subcommand_name(cmd) << ": "
              << (code == 2 ? "config error: " : "") << e.what() << "\n";
    return code;
  }
}

}  // namespace pdm::cli
