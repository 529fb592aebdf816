#pragma once

#include <utility>
#include <vector>

#include "diracstab/clifford.hpp"
#include "diracstab/grid.hpp"
#include "diracstab/linearize.hpp"
#include "diracstab/profiles.hpp"

namespace diracstab::spectra {

enum class Label { unclassified, point, essential_artifact, embedded_candidate, threshold };

std::string label_name(Label label);

struct SpectrumResult {
  std::vector<Complex> eigenvalues;  // sorted lexicographically by (Re, Im)
  CMatrix eigenvectors;              // matching columns, unit Euclidean norm
  Vector residuals;                  // ||A zeta - lambda zeta||_2 per pair
  double op_norm = 0.0;              // 1-norm of the operator (residual scale)
  Vector localization;               // rho = ||zeta||_{|x| > L/2} / ||zeta||
  std::vector<Complex> krein_l;      // <zeta, L zeta>
  std::vector<Complex> krein_j;      // <zeta, J zeta>
  std::vector<Label> labels;
  linearize::EssentialBands bands;
  Grid1D grid;
  int block_dim = 0;
};

struct EigenOptions {
  double tol_eig = 1e-8;     // residual bound: tol_eig * ||A||_1 * ||zeta||
  bool force_general = false;  // bypass the half-size block fast path
  double zero_cluster_scale = 1e-4;  // x m: radius of the inverse-iteration polish
};

/// Full dense eigendecomposition. Symmetric kinds go through dsyev; JL/jl use
/// the half-size reduction when the assembled matrix is exactly [[0,B],[-C,0]]
/// (component-major ordering with a real profile), falling back to dgeev.
/// Near-zero eigenpairs are polished by inverse subspace iteration.
SpectrumResult eigensolve(const linearize::RealBlockOperator& op, const EigenOptions& opts = {});

struct ClassifyOptions {
  double rho_loc = 1e-6;   // localization threshold on |x| > L/2
  double tol_thr = 1e-4;   // distance to a band endpoint for the threshold label
  double band_tol = 1e-6;  // distance to the bands below which lambda is "on" them
};

SpectrumResult classify(SpectrumResult raw, const linearize::EssentialBands& bands,
                        const Grid1D& grid, const ClassifyOptions& opts = {});

/// Quadrature inner products (<zeta, L zeta>, <zeta, J zeta>).
std::pair<Complex, Complex> krein(const CVector& zeta, const Matrix& l, const Matrix& jbig,
                                  double h);

/// Fill the per-eigenpair Krein data of a computed spectrum.
void attach_krein(SpectrumResult& spectrum, const linearize::RealBlockOperator& l_op,
                  const Matrix& jbig);

struct TwoOmegaReport {
  double identity_residual = 0.0;  // ||L (alpha0 phi)_r + 2 omega (alpha0 phi)_r||_inf
  Complex nearest;                 // computed eigenvalue nearest to 2 omega i
  double distance = 0.0;
  double rho = 0.0;
  Label label = Label::unclassified;
};

/// Check the +-2 omega i eigenvalue: the exact operator identity on alpha0 phi
/// and the presence of a matching localized eigenvalue in the spectrum.
TwoOmegaReport verify_2omega(const profiles::SolitaryWave& wave, const clifford::DiracRep& rep,
                             const linearize::RealBlockOperator& l_op,
                             const SpectrumResult& spectrum);

/// Quadruplet symmetry: eigenvalues missing one of the partners -l, conj(l),
/// -conj(l) within tol. Empty result = fully symmetric spectrum.
std::vector<Complex> check_symmetry(const std::vector<Complex>& eigenvalues, double tol);

std::vector<Complex> off_axis_set(const std::vector<Complex>& eigenvalues, double re_tol);
double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

struct EmbeddingReport {
  std::vector<Complex> off_axis_a;
  std::vector<Complex> off_axis_b;
  double hausdorff = 0.0;
};

/// Diagonalize the linearization in rep_a and in its doubling rep_b and compare
/// the off-axis point spectra (representation independence).
EmbeddingReport embedding_invariance(const profiles::SolitaryWave& wave,
                                     const clifford::DiracRep& rep_a,
                                     const clifford::DiracRep& rep_b, double re_tol = 1e-6);

}  // namespace diracstab::spectra
