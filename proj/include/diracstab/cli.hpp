#pragma once

#include <string>

namespace diracstab::cli {

struct ContourSpec {
  double re_lo = 1e-3, re_hi = 3.0;
  double im_lo = -3.0, im_hi = 3.0;
  int samples = 60;
};

/// Everything a run needs; round-trips losslessly through JSON.
struct RunConfig {
  std::string command = "spectrum";  // profile|spectrum|sweep|evans|verify|derrick
  double m = 1.0;
  int k = 1;
  double omega = 0.9;
  double omega_start = 0.9, omega_end = 0.99;
  int steps = 3;

  double L = 40.0;
  int npoints = 1024;
  bool auto_rescale = true;
  double eps_times_L = 15.0;

  double tol_eig = 1e-8;
  double rho_loc = 1e-6;
  double delta0 = 1e-4;
  double tol_2omega = 1e-6;
  double matching_radius = 0.0;  // 0 = adaptive
  double evans_rtol = 1e-10;
  ContourSpec contour;

  std::string suite = "derrick";  // verify command: derrick|hardy|matexp|carleman
  std::string outdir = "out";
  unsigned seed = 1234;
};

/// Throws ConfigInvalid (with the field path) on the first violated invariant.
void validate(const RunConfig& config);

std::string to_json_string(const RunConfig& config);

/// Parse a (possibly partial) JSON object over the given defaults; unknown
/// keys throw ConfigInvalid.
RunConfig config_from_json_string(const std::string& text, RunConfig base = {});

/// FNV-1a hash of the canonical serialization; embedded in every JSON report.
std::string config_hash(const RunConfig& config);

/// Execute one command end to end: validates, solves, writes config echo plus
/// CSV/JSON/SVG artifacts under config.outdir. Returns 0 on success; on any
/// failure writes error.json with a machine-readable report and returns 1.
int run(const RunConfig& config);

}  // namespace diracstab::cli
