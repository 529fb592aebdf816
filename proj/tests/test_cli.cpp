#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "diracstab/cli.hpp"
#include "diracstab/errors.hpp"
#include "diracstab/io.hpp"
#include "diracstab/linearize.hpp"

using namespace diracstab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "diracstab-test" / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("csv formatting round-trips doubles") {
  CHECK(io::format_double(1.0 / 3.0) == "0.33333333333333331");
  const auto csv = io::csv_string({{"x", "1/m"}, {"y", "m"}}, {{0.1, -2.5e-17}, {3.0, 4.0}});
  CHECK(csv.substr(0, csv.find('\n')) == "x [1/m],y [m]");
  CHECK(csv.find("0.10000000000000001") != std::string::npos);
  CHECK(std::stod(csv.substr(csv.find(",-") + 1)) == -2.5e-17);
}

TEST_CASE("config serialization round-trip and hashing") {
  cli::RunConfig cfg;
  cfg.command = "sweep";
  cfg.omega = 0.123456789012345678;  // more digits than double carries
  cfg.npoints = 734;
  cfg.contour.samples = 91;
  cfg.suite = "carleman";

  const auto text = cli::to_json_string(cfg);
  const auto back = cli::config_from_json_string(text);
  CHECK(cli::to_json_string(back) == text);  // lossless
  CHECK(back.omega == cfg.omega);
  CHECK(back.npoints == 734);
  CHECK(back.contour.samples == 91);

  CHECK(cli::config_hash(cfg) == cli::config_hash(back));
  CHECK(cli::config_hash(cfg).size() == 16);
  cfg.seed += 1;
  CHECK(cli::config_hash(cfg) != cli::config_hash(back));

  // partial override keeps unmentioned fields
  const auto merged = cli::config_from_json_string("{\"omega\": 0.5}", back);
  CHECK(merged.omega == 0.5);
  CHECK(merged.npoints == 734);

  CHECK_THROWS_AS(cli::config_from_json_string("{\"omegaa\": 0.5}"), ConfigInvalid);
  CHECK_THROWS_AS(cli::config_from_json_string("not json"), ConfigInvalid);
}

TEST_CASE("config validation") {
  cli::RunConfig cfg;
  CHECK_NOTHROW(cli::validate(cfg));

  auto expect_field = [](cli::RunConfig c, const std::string& field) {
    try {
      cli::validate(c);
      FAIL("expected ConfigInvalid for " << field);
    } catch (const ConfigInvalid& e) {
      CHECK(e.field == field);
    }
  };
  cli::RunConfig c = cfg;
  c.omega = 1.5;
  c.command = "spectrum";
  expect_field(c, "omega");
  c = cfg;
  c.command = "orbit";
  expect_field(c, "command");
  c = cfg;
  c.tol_eig = 0.0;
  expect_field(c, "tol_eig");
  c = cfg;
  c.npoints = 511;
  expect_field(c, "npoints");
  c = cfg;
  c.command = "sweep";
  c.omega_start = 0.95;
  c.omega_end = 0.9;
  expect_field(c, "omega_end");
  c = cfg;
  c.command = "verify";
  c.suite = "everything";
  expect_field(c, "suite");
  c = cfg;
  c.contour.re_lo = 3.0;
  expect_field(c, "contour");
}

TEST_CASE("invalid config: error artifact, nonzero exit, no solve output") {
  cli::RunConfig cfg;
  cfg.command = "spectrum";
  cfg.omega = 1.5;
  cfg.outdir = fresh_dir("invalid").string();
  CHECK(cli::run(cfg) != 0);
  CHECK(fs::exists(fs::path(cfg.outdir) / "error.json"));
  CHECK(!fs::exists(fs::path(cfg.outdir) / "spectrum.csv"));
  const auto err = slurp(fs::path(cfg.outdir) / "error.json");
  CHECK(err.find("ConfigInvalid") != std::string::npos);
  CHECK(err.find("omega") != std::string::npos);
}

TEST_CASE("profile run: artifacts and determinism") {
  cli::RunConfig cfg;
  cfg.command = "profile";
  cfg.omega = 0.9;
  cfg.npoints = 256;
  cfg.outdir = fresh_dir("profile-a").string();
  REQUIRE(cli::run(cfg) == 0);
  const fs::path a(cfg.outdir);
  CHECK(fs::exists(a / "config.json"));
  CHECK(fs::exists(a / "profile.csv"));
  CHECK(fs::exists(a / "profile.json"));
  CHECK(slurp(a / "profile.json").find(cli::config_hash(cfg)) != std::string::npos);

  // header row names units; one data row per grid node
  const auto csv = slurp(a / "profile.csv");
  CHECK(csv.substr(0, csv.find('\n')).find("[") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == cfg.npoints + 1);

  // identical config + seed reproduces byte-identical artifacts
  const auto json_first = slurp(a / "profile.json");
  const auto csv_first = slurp(a / "profile.csv");
  REQUIRE(cli::run(cfg) == 0);
  CHECK(slurp(a / "profile.json") == json_first);
  CHECK(slurp(a / "profile.csv") == csv_first);

  // numeric tables do not depend on where they are written
  cli::RunConfig cfg2 = cfg;
  cfg2.outdir = fresh_dir("profile-b").string();
  REQUIRE(cli::run(cfg2) == 0);
  CHECK(slurp(fs::path(cfg2.outdir) / "profile.csv") == csv_first);
}

TEST_CASE("verify runs write one JSON report per suite") {
  for (const std::string suite : {"derrick", "hardy", "carleman"}) {
    cli::RunConfig cfg;
    cfg.command = "verify";
    cfg.suite = suite;
    cfg.outdir = fresh_dir("suite-" + suite).string();
    REQUIRE(cli::run(cfg) == 0);
    const auto body = slurp(fs::path(cfg.outdir) / (suite + ".json"));
    CHECK(body.find("config_hash") != std::string::npos);
    if (suite != "derrick") CHECK(body.find("\"pass\": true") != std::string::npos);
  }
  // bare derrick command is a shorthand for the suite
  cli::RunConfig cfg;
  cfg.command = "derrick";
  cfg.outdir = fresh_dir("derrick-cmd").string();
  REQUIRE(cli::run(cfg) == 0);
  CHECK(slurp(fs::path(cfg.outdir) / "derrick.json").find("growth_rate") != std::string::npos);
}

TEST_CASE("spectrum plot SVG") {
  spectra::SpectrumResult empty;
  const auto svg = io::plot_spectrum(empty);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  CHECK(svg.find("<circle") == std::string::npos);  // axes only
  CHECK(svg.find("href") == std::string::npos);     // self-contained

  spectra::SpectrumResult spec;
  spec.bands = linearize::essential_bands(0.95, 1.0);
  spec.eigenvalues = {Complex(0, 1.9), Complex(0, -1.9), Complex(0, 0.3)};
  spec.labels = {spectra::Label::point, spectra::Label::point, spectra::Label::essential_artifact};
  const auto svg2 = io::plot_spectrum(spec);
  CHECK(std::count(svg2.begin(), svg2.end(), '\n') > 8);
  CHECK(svg2.find("<rect") != std::string::npos);    // shaded bands
  CHECK(svg2.find("<circle") != std::string::npos);  // markers
}

TEST_CASE("branch plot emits one polyline per branch") {
  continuation::BranchTrace a, b;
  for (double omega : {0.90, 0.95, 0.99}) {
    a.omegas.push_back(omega);
    a.lambdas.push_back(Complex(0, 2 * omega));
    b.omegas.push_back(omega);
    b.lambdas.push_back(Complex(0, 0));
  }
  const auto svg = io::plot_branches({a, b});
  size_t n = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) { ++n; pos += 9; }
  CHECK(n == 2);
}

TEST_CASE("fnv hash is stable") {
  CHECK(io::hash_hex("") == "cbf29ce484222325");
  CHECK(io::hash_hex("a") != io::hash_hex("b"));
}
