#pragma once

#include <vector>

#include "diracstab/evans.hpp"
#include "diracstab/profiles.hpp"
#include "diracstab/spectra.hpp"

namespace diracstab::continuation {

struct SweepConfig {
  double m = 1.0;
  int k = 1;
  bool auto_rescale = true;     // L = eps_times_L / eps
  double eps_times_L = 15.0;
  double fixed_L = 40.0;        // used when auto_rescale is off
  int npoints = 1024;
  bool continuation_seed = true;
  bool attach_krein = false;    // assemble L and attach the Krein data
  double delta0 = 1e-4;         // zero-cluster merge radius, units of m
  spectra::EigenOptions eig;
  spectra::ClassifyOptions cls;
};

struct SweepResult {
  SweepConfig config;
  std::vector<double> omegas;
  profiles::WaveFamily family;
  std::vector<spectra::SpectrumResult> spectra;
  std::vector<double> charges;
};

/// Solve + diagonalize + classify along an increasing omega list; profiles are
/// seeded by continuation from the previous omega (grids may differ).
SweepResult sweep(const std::vector<double>& omegas, const SweepConfig& cfg = {});

/// One eigenvalue branch followed across the sweep. The zero cluster is merged
/// into a single branch (multiplicity 4) represented by its largest member.
struct BranchTrace {
  double m = 1.0;
  int start = 0;        // sweep index of the birth
  int multiplicity = 1;
  std::vector<double> omegas;
  std::vector<Complex> lambdas;
  std::vector<Complex> rescaled;  // lambda / (m^2 - omega^2)
  std::vector<spectra::Label> labels;
  std::vector<bool> matched;      // false exactly at the birth entry
  bool died_early = false;
};

/// Nearest-neighbor threading of point/embedded-candidate eigenvalues across
/// consecutive omegas. matching_radius <= 0 selects the adaptive default
/// 0.1 |d omega| |d lambda/d omega| with floor 1e-4.
std::vector<BranchTrace> track(const SweepResult& sweep, double matching_radius = 0.0);

struct RescaledLimit {
  Complex lambda_b;
  double error = 0.0;  // difference of the last two extrapolation orders
  int points_used = 0;
};

/// Richardson extrapolation of the rescaled branch in eps^2 = m^2 - omega^2.
/// Throws NotSmallBranch when |Lambda| grows along the branch instead of
/// settling (e.g. the 2 omega i branch).
RescaledLimit rescaled_limit(const BranchTrace& branch);

/// Reference point spectrum of the NLS linearization for compare_nls.
struct NlsReference {
  int k = 1;
  double m = 1.0;
  int kernel_cluster_size = 0;
  std::vector<Complex> nonzero_point;  // localized nonzero eigenvalues of jl
  std::vector<double> l_minus_point;   // point spectrum of l_minus below the band
};

NlsReference nls_reference(int k, double m, const Grid1D& grid);

enum class NlsVerdict { in_nls_spectrum, in_l_minus_spectrum, violation };
std::string verdict_name(NlsVerdict v);

NlsVerdict compare_nls(Complex lambda_b, const NlsReference& ref, double tol);

enum class Verdict { STABLE, UNSTABLE, INCONCLUSIVE };
std::string verdict_name(Verdict v);

struct StabilityEntry {
  double omega = 0.0;
  Verdict verdict = Verdict::INCONCLUSIVE;
  bool grid_unstable = false;
  bool evans_unstable = false;
  Complex offending;  // grid eigenvalue with the largest real part when unstable
};

/// Combine grid evidence (point-labeled eigenvalues with Re > tol) with Evans
/// evidence (right-half-plane winding) into a per-omega verdict.
std::vector<StabilityEntry> stability_report(const SweepResult& sweep,
                                             const std::vector<evans::EvansScan>& scans,
                                             double tol = 1e-6);

}  // namespace diracstab::continuation
