#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdmicro/classical.hpp"
#include "pdmicro/detector.hpp"
#include "pdmicro/units.hpp"
#include "pdmicro_cli/commands.hpp"
#include "pdmicro_cli/config.hpp"

namespace pdm::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kR1 =
    "field_V_per_m = 400\ndistance_m = 0.5\nenergy_ueV = 200\nsource_kind = s\n";

std::string config_error(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pdmicro_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "pdmicro");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

TEST(Config, HappyPath) {
  const RunConfig c = parse_config(kR1);
  EXPECT_EQ(*c.field_V_per_m, 400.0);
  EXPECT_EQ(*c.distance_m, 0.5);
  EXPECT_EQ(*c.energy_ueV, 200.0);
  EXPECT_EQ(*c.source_kind, SourceKind::s_wave);
  EXPECT_EQ(c.entries.size(), 4u);
  EXPECT_NO_THROW(require_for(c, Subcommand::profile));
}

TEST(Config, CommentsListsAndIntegers) {
  const RunConfig c = parse_config(
      "# header\n\nfield_V_per_m = 400 # trailing\nphoton_eV = 1.5, 1.6,1.7\n"
      "binding_eV=1.4612\nsource_kind = pz\ngrid_n = 33\nseed = 18446744073709551615\r\n");
  ASSERT_TRUE(c.photon_eV.has_value());
  EXPECT_EQ(*c.photon_eV, (std::vector<double>{1.5, 1.6, 1.7}));
  EXPECT_EQ(*c.grid_n, 33);
  EXPECT_EQ(*c.seed, 18446744073709551615ull);
  EXPECT_EQ(*c.source_kind, SourceKind::pz_dipole);
}

TEST(Config, Errors) {
  EXPECT_NE(config_error("field_V_per_m = -1").find("'field_V_per_m'"), std::string::npos);
  const std::string typo = config_error("fielb_V_per_m = 400");
  EXPECT_NE(typo.find("line 1"), std::string::npos);
  EXPECT_NE(typo.find("unknown key"), std::string::npos);
  EXPECT_NE(config_error("field_V_per_m = 400\n\njunk line\n").find("line 3"), std::string::npos);
  EXPECT_NE(config_error("grid_n = 12.5").find("integer"), std::string::npos);
  EXPECT_NE(config_error("distance_m = abc").find("number"), std::string::npos);
  EXPECT_NE(config_error("source_kind = d").find("source_kind"), std::string::npos);
  EXPECT_NE(config_error("seed = 1\nseed = 2").find("duplicate"), std::string::npos);
  EXPECT_NE(config_error("profile_samples = 10").find("profile_samples"), std::string::npos);
  EXPECT_NE(config_error("photon_eV = 1.5,,1.6").find("photon_eV"), std::string::npos);
  EXPECT_NE(config_error("energy_ueV = ").find("empty value"), std::string::npos);
}

TEST(Config, RequiredKeysPerSubcommand) {
  const auto missing = [](const std::string& text, Subcommand cmd) -> std::string {
    try {
      require_for(parse_config(text), cmd);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(missing("field_V_per_m = 400\ndistance_m = 0.5", Subcommand::profile).find("energy_ueV"),
            std::string::npos);
  EXPECT_NE(missing("distance_m = 0.5", Subcommand::map).find("field_V_per_m"), std::string::npos);
  EXPECT_NE(missing(kR1, Subcommand::sweep).find("photon_eV"), std::string::npos);
  EXPECT_NE(missing(std::string(kR1) + "photon_eV = 1.5\n", Subcommand::profile).find("photon_eV"),
            std::string::npos);
  EXPECT_EQ(missing("field_V_per_m = 400", Subcommand::total_current), "");
  EXPECT_EQ(missing("field_V_per_m = 400\ninput_csv = x.csv", Subcommand::fit_einstein), "");
}

TEST(Format, ShortestRoundTrip) {
  for (const double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0, 400.0}) {
    const std::string s = format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, x) << s;
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(400.0), "400");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Commands, ProfileMatchesInProcessCount) {
  RunConfig c = parse_config(std::string(kR1) + "output_prefix = r1\nprofile_samples = 600\n");
  const RunResult res = run_subcommand(Subcommand::profile, c, 2);
  ASSERT_EQ(res.files.size(), 2u);
  EXPECT_EQ(res.files[0].path, "r1_profile.csv");
  EXPECT_EQ(res.files[1].path, "r1_fringes.csv");
  const FieldScales sc = make_scales(400.0);
  const double E = convert_energy(200.0, "ueV", "J");
  DetectorPlane pl;
  pl.d = 0.5;
  pl.extent = 1.2 * rho_max(E, sc, 0.5);
  const FringeReport rep = count_fringes(radial_profile(E, SourceModel{}, sc, pl, 600, 1));
  EXPECT_NE(res.files[1].bytes.find("# n_fringes = " + std::to_string(rep.n_fringes) + "\n"),
            std::string::npos);
  std::istringstream in(res.files[1].bytes);
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (rows < 0) EXPECT_EQ(line, "index,rho_m");
    ++rows;
  }
  EXPECT_EQ(rows, rep.n_fringes);
  EXPECT_NE(res.files[0].bytes.find("\nrho_m,j_norm\n"), std::string::npos);
  EXPECT_NE(res.files[0].bytes.find("# rho_max_m = "), std::string::npos);
  EXPECT_NE(res.files[0].bytes.find("# epsF_J = "), std::string::npos);
  EXPECT_NE(res.files[0].bytes.find("# lF_m = "), std::string::npos);
}

TEST(Commands, MapPgmLayout) {
  const RunConfig c = parse_config(std::string(kR1) + "grid_n = 16\n");
  const RunResult res = run_subcommand(Subcommand::map, c, 1);
  ASSERT_EQ(res.files.size(), 2u);
  const std::string& pgm = res.files[0].bytes;
  const std::string header = "P5\n16 16\n65535\n";
  ASSERT_EQ(pgm.substr(0, header.size()), header);
  ASSERT_EQ(pgm.size(), header.size() + 2u * 16 * 16);
  EXPECT_NE(res.files[1].bytes.find("# j_max = "), std::string::npos);
  // Top row is the +extent edge: compare it with the map's last row.
  const FieldScales sc = make_scales(400.0);
  const double E = convert_energy(200.0, "ueV", "J");
  DetectorPlane pl{0.5, 1.2 * rho_max(E, sc, 0.5), 16};
  const CurrentMap m = map_plane(E, SourceModel{}, sc, pl, 1);
  const double top = *std::max_element(m.j.begin(), m.j.end());
  for (int col = 0; col < 16; ++col) {
    const auto hi = static_cast<unsigned char>(pgm[header.size() + 2 * col]);
    const auto lo = static_cast<unsigned char>(pgm[header.size() + 2 * col + 1]);
    const double want = std::lround(std::clamp(m.j[15 * 16 + col] / top, 0.0, 1.0) * 65535.0);
    EXPECT_EQ(hi * 256 + lo, want);
  }
}

TEST(Commands, TotalCurrentGrid) {
  const RunResult res = run_subcommand(Subcommand::total_current, parse_config("field_V_per_m = 400"));
  const std::string& s = res.files[0].bytes;
  EXPECT_NE(s.find("\nE_over_epsF,J_norm\n-5,"), std::string::npos);
  EXPECT_NE(s.find("\n30,"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), std::count(s.begin(), s.end(), '#') + 1 + 701);
}

TEST(Commands, DeterministicAcrossWorkers) {
  const std::string sweep_cfg =
      "field_V_per_m = 400\ndistance_m = 0.5\nbinding_eV = 1.4612\n"
      "photon_eV = 1.4612365352, 1.4612730703, 1.4613096055\nnoise_rel = 0.01\n"
      "profile_samples = 256\n";
  const std::vector<std::pair<Subcommand, std::string>> runs = {
      {Subcommand::map, std::string(kR1) + "grid_n = 24\nprofile_samples = 128\n"},
      {Subcommand::profile, std::string(kR1) + "profile_samples = 300\n"},
      {Subcommand::total_current, "field_V_per_m = 400\nsource_kind = pz\n"},
      {Subcommand::sweep, sweep_cfg},
      {Subcommand::fit_einstein, sweep_cfg},
      {Subcommand::compare_semiclassical, std::string(kR1) + "profile_samples = 100\n"},
  };
  for (const auto& [cmd, text] : runs) {
    const RunConfig c = parse_config(text + "workers = 3\n");
    const RunResult a = run_subcommand(cmd, c, 1);
    const RunResult b = run_subcommand(cmd, c, 0);
    const RunResult again = run_subcommand(cmd, c);
    ASSERT_EQ(a.files.size(), b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      EXPECT_EQ(a.files[i].bytes, b.files[i].bytes) << subcommand_name(cmd);
      EXPECT_EQ(a.files[i].bytes, again.files[i].bytes) << subcommand_name(cmd);
    }
  }
}

TEST(Commands, FitEinsteinFromCsv) {
  const fs::path dir = scratch("fit");
  const fs::path csv = dir / "in.csv";
  std::ofstream(csv) << "# made by hand\nhnu_eV,E_true_eV,E_fit_eV,residual\n"
                        "1.5,0.1,0.1,0\n1.6,0.2,0.2,0\n1.7,0.3,nan,0\n1.8,0.4,0.4,0\n";
  const RunConfig c = parse_config("field_V_per_m = 400\ninput_csv = " + csv.string() + "\n");
  const RunResult r = run_subcommand(Subcommand::fit_einstein, c);
  EXPECT_NE(r.files[0].bytes.find("slope,intercept_eV,E0_eV,rms_eV,n_points\n"), std::string::npos);
  EXPECT_NE(r.summary.find("(3 points)"), std::string::npos);
  const std::size_t at = r.summary.find("E0 = ");
  ASSERT_NE(at, std::string::npos);
  EXPECT_NEAR(std::stod(r.summary.substr(at + 5)), 1.4, 1e-12);
  fs::remove_all(dir);
}

TEST(Commands, CompareSchema) {
  const RunResult r =
      run_subcommand(Subcommand::compare_semiclassical, parse_config(std::string(kR1) + "profile_samples = 64\n"));
  EXPECT_NE(r.files[0].bytes.find("\nrho_m,j_exact,j_semi,rel_err\n0,"), std::string::npos);
}

TEST(Outputs, PartialWritesRemoved) {
  const fs::path dir = scratch("partial");
  const std::vector<OutputFile> files = {{(dir / "a.csv").string(), "x\n"},
                                         {(dir / "missing" / "b.csv").string(), "y\n"}};
  EXPECT_ANY_THROW(write_outputs(files));
  EXPECT_FALSE(fs::exists(dir / "a.csv"));
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream((dir / name).string()) << text;
    return (dir / name).string();
  };
  const std::string prefix = (dir / "out").string();
  EXPECT_EQ(run({"profile", write("ok.cfg", kR1), "--output-prefix", prefix}), 0);
  EXPECT_TRUE(fs::exists(prefix + "_profile.csv"));
  EXPECT_TRUE(fs::exists(prefix + "_fringes.csv"));
  EXPECT_EQ(run({"profile", write("bad.cfg", "fielb_V_per_m = 400\n")}), 2);
  EXPECT_EQ(run({"profile", (dir / "nope.cfg").string()}), 2);
  EXPECT_EQ(run({"bogus", write("x.cfg", kR1)}), 2);
  // Too few samples for the fringe guard: a numerical failure, nothing written.
  const std::string p2 = (dir / "num").string();
  EXPECT_EQ(run({"profile", write("num.cfg", std::string(kR1) + "profile_samples = 64\n"),
                 "--output-prefix", p2}),
            3);
  EXPECT_FALSE(fs::exists(p2 + "_profile.csv"));
  std::ofstream(dir / "one.csv") << "hnu_eV,E_true_eV,E_fit_eV,residual\n1.5,0.1,0.1,0\n";
  EXPECT_EQ(run({"fit-einstein",
                 write("fit.cfg", "field_V_per_m = 400\ninput_csv = " + (dir / "one.csv").string() + "\n"),
                 "--output-prefix", (dir / "fit").string()}),
            4);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace pdm::cli
