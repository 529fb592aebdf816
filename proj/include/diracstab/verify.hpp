#pragma once

#include <functional>
#include <string>
#include <vector>

#include "diracstab/clifford.hpp"
#include "diracstab/grid.hpp"

namespace diracstab::verify {

/// Pointwise multiplier norm ||w u||_{L^2} by trapezoid quadrature; u may be a
/// stacked multi-component grid function (component-major).
struct WeightedNorm {
  Grid1D grid;
  Vector weight;  // one value per node

  static WeightedNorm power(const Grid1D& grid, double s);         // <x>^s
  static WeightedNorm exponential(const Grid1D& grid, double tau); // e^{tau |x|}

  double operator()(const CVector& u) const;
  double operator()(const Vector& u) const;
};

struct InequalityReport {
  std::string id;
  int samples = 0;
  double worst_ratio = 0.0;  // max over samples of LHS / RHS
  int worst_sample = -1;
  double constant = 1.0;     // multiplicative constant folded into the RHS
  double tol = 1e-8;
  bool pass = false;         // worst_ratio <= 1 + tol
};

/// Scalar sample function with its exact derivative (no grid differentiation).
struct SampleFn {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// Mixed family of smooth compactly-supported bumps exp(-1/(1-t^2)) and
/// cutoff Gaussians, all supported inside (lo, hi); deterministic per seed.
std::vector<SampleFn> sample_family(int count, double lo, double hi, unsigned seed);

/// Derrick instability demo for the 1D wave equation with g(theta) =
/// theta - theta^3 and the stationary pulse theta(x) = sqrt(2) sech x.
struct DerrickReport {
  double kinetic = 0.0;             // T = int theta'^2 / 2
  double potential = 0.0;           // V = int G(theta), G' = g
  double dilation_residual = 0.0;   // |(n-2) T + n V| at n = 1
  double min_eigenvalue = 0.0;      // bottom of l = -d^2/dx^2 + 1 - 6 sech^2 x
  double growth_rate = 0.0;         // c = sqrt(-min_eigenvalue)
  double growth_rate_block = 0.0;   // largest real eigenvalue of [[0, I], [-l, 0]]
  double zero_mode_residual = 0.0;  // ||l theta'|| / ||theta'||
};

DerrickReport derrick_demo(const Grid1D& grid);

/// Generalized Hardy inequality int w' |f|^2 <= 4 int (w^2 / w') |f'|^2 on
/// (0, infinity), tested over the given samples (supports must lie in x > 0).
/// Throws NonmonotoneWeight when w' <= 0 at a positive node.
struct WeightFn {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

InequalityReport hardy_sample(const WeightFn& w, const Grid1D& grid,
                              const std::vector<SampleFn>& samples);

/// ||exp(i alpha (m beta - lambda) x)|| <= C1(lambda) = sqrt((|l|+m)/(|l|-m))
/// for real |lambda| > m, norms by singular value over the given x samples.
InequalityReport matrix_exp_bound(const std::vector<double>& lambdas, double m,
                                  const clifford::DiracRep& rep, const Vector& xs);

/// At |lambda| = m the group is no longer bounded; fit of the operator norm
/// against kappa <x> over the x samples.
struct ThresholdGrowth {
  double kappa = 0.0;      // least-squares slope of norm vs <x>
  double worst_excess = 0.0;  // max over x of norm / (kappa <x>) - 1
};

ThresholdGrowth matrix_exp_threshold(double m, const clifford::DiracRep& rep,
                                     const Vector& xs);

/// Carleman estimate with linear weight phi(r) = tau r, r = |x|, n = 1:
///   ||(lambda^2 - m^2 + tau^2/2)^{1/2} e^phi v||
///     <= ||(1/4 + 2 lambda^2 r / tau + 2 r tau)^{1/2} e^phi (D_m - lambda) v||
/// over two-component samples supported in |x| > support_radius. Throws
/// HypothesisFails when the admissibility condition on the support is violated.
InequalityReport carleman_sample(double lambda, double m, const std::vector<double>& taus,
                                 double support_radius, const clifford::DiracRep& rep,
                                 const Grid1D& grid, int n_samples, unsigned seed);

/// Empirical ratio statistics for ||<x>^s u||_{H^1} vs ||<x>^{s+1} (D_m - lambda) u||.
/// The constant is not explicit, so nothing is asserted here beyond bookkeeping:
/// the record tracks the worst ratio per dilation u(x) -> u(sigma x).
/// Throws ThresholdLambda at lambda = +-m (the weight gap there is 2, not 1).
struct RatioRecord {
  double lambda = 0.0;
  double s = 0.0;
  std::vector<double> sigmas;
  std::vector<double> worst_ratio;  // per sigma, over the sample set
  double spread = 0.0;              // max / min of worst_ratio across sigmas
};

RatioRecord dirac_hardy_ratio(double lambda, double s, double m,
                              const clifford::DiracRep& rep, const Grid1D& grid,
                              int n_samples, unsigned seed);

}  // namespace diracstab::verify
