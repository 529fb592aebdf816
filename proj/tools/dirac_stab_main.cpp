#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "diracstab/cli.hpp"

extern "C" void openblas_set_num_threads(int);

namespace {

void add_common_flags(CLI::App* cmd, diracstab::cli::RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--m", cfg.m, "fermion mass");
  cmd->add_option("--k", cfg.k, "nonlinearity power f(s) = s^k");
  cmd->add_option("--omega", cfg.omega, "frequency inside the gap (-m, m)");
  cmd->add_option("--omega-start", cfg.omega_start, "sweep start frequency");
  cmd->add_option("--omega-end", cfg.omega_end, "sweep end frequency");
  cmd->add_option("--steps", cfg.steps, "sweep sample count");
  cmd->add_option("--L", cfg.L, "grid half-length (with --no-auto-rescale)");
  cmd->add_option("--npoints", cfg.npoints, "grid points (even)");
  cmd->add_flag("!--no-auto-rescale", cfg.auto_rescale, "fix L instead of L = eps_times_L / eps");
  cmd->add_option("--eps-times-L", cfg.eps_times_L, "box size in units of 1/eps");
  cmd->add_option("--tol-eig", cfg.tol_eig, "eigenpair residual tolerance (x ||A||)");
  cmd->add_option("--rho-loc", cfg.rho_loc, "localization threshold for point labels");
  cmd->add_option("--delta0", cfg.delta0, "zero-cluster radius in units of m");
  cmd->add_option("--tol-2omega", cfg.tol_2omega, "acceptance distance to 2 omega i");
  cmd->add_option("--matching-radius", cfg.matching_radius, "branch matching radius (0 = adaptive)");
  cmd->add_option("--evans-rtol", cfg.evans_rtol, "Evans RK45 relative tolerance");
  cmd->add_option("--contour-re-lo", cfg.contour.re_lo, "contour rectangle: low Re edge");
  cmd->add_option("--contour-re-hi", cfg.contour.re_hi, "contour rectangle: high Re edge");
  cmd->add_option("--contour-im-lo", cfg.contour.im_lo, "contour rectangle: low Im edge");
  cmd->add_option("--contour-im-hi", cfg.contour.im_hi, "contour rectangle: high Im edge");
  cmd->add_option("--contour-samples", cfg.contour.samples, "initial contour samples");
  cmd->add_option("--suite", cfg.suite, "verify suite: derrick|hardy|matexp|carleman");
  cmd->add_option("--out", cfg.outdir, "output directory");
  cmd->add_option("--seed", cfg.seed, "RNG seed for sampled suites");
  cmd->add_option("--config", config_path, "JSON config file; its fields override flags");
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("DIRAC_STAB_THREADS"))
    openblas_set_num_threads(std::max(1, std::atoi(threads)));

  CLI::App app{"numerical laboratory for solitary waves of the 1D nonlinear Dirac equation"};
  app.require_subcommand(1);

  diracstab::cli::RunConfig cfg;
  std::string config_path;
  for (const char* name : {"profile", "spectrum", "sweep", "evans", "verify", "derrick"}) {
    auto* sub = app.add_subcommand(name);
    add_common_flags(sub, cfg, config_path);
    sub->callback([&cfg, name] { cfg.command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) {
      std::fprintf(stderr, "cannot read config file: %s\n", config_path.c_str());
      return 2;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    try {
      cfg = diracstab::cli::config_from_json_string(ss.str(), cfg);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "invalid config file: %s\n", e.what());
      return 2;
    }
  }

  const int status = diracstab::cli::run(cfg);
  if (status != 0)
    std::fprintf(stderr, "run failed; see %s/error.json\n", cfg.outdir.c_str());
  return status;
}
