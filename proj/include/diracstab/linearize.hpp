#pragma once

#include "diracstab/clifford.hpp"
#include "diracstab/grid.hpp"
#include "diracstab/profiles.hpp"

namespace diracstab::linearize {

enum class OperatorKind { JL, L, L_minus, V, jl, l_plus, l_minus };

std::string kind_name(OperatorKind kind);

/// A dense discretized operator acting on block_dim components sampled over a
/// periodic grid; storage is component-major (component index varies slowest).
/// All operators here are real in the realified representation.
struct RealBlockOperator {
  Matrix matrix;
  Grid1D grid;
  int block_dim = 0;
  OperatorKind kind = OperatorKind::L;
  double omega = 0.0;
  double m = 1.0;
  int k = 1;
};

/// sigma_ess(JL) = i(R \ (-m+|omega|, m-|omega|)): two vertical bands on the
/// imaginary axis starting at the gap edge, with thresholds at m+|omega|.
struct EssentialBands {
  double omega = 0.0;
  double m = 1.0;
  double gap_edge = 0.0;   // m - |omega|
  double threshold = 0.0;  // m + |omega|

  // distance from lambda to the bands
  double distance(Complex lambda) const;
  // distance from lambda to the nearest of the four band endpoints
  // +-i(m-|omega|), +-i(m+|omega|)
  double endpoint_distance(Complex lambda) const;
};

EssentialBands essential_bands(double omega, double m);

struct NldOperators {
  RealBlockOperator JL;
  RealBlockOperator L;
  RealBlockOperator L_minus;
  RealBlockOperator V;  // potential part: L - (D_m - omega)
};

/// Discretize the linearization at a solitary wave in the realified system:
///   L = D_m - omega - f(eta) bbeta - 2 f'(eta) (bbeta phi)(bbeta phi)^T,
///   eta(x) = phi(x)^T bbeta phi(x),  JL = J_big L.
/// With full = false only JL and L are materialized (memory-lean path for
/// large grids); L_minus and V come back empty.
NldOperators assemble_nld_linearization(const profiles::SolitaryWave& wave,
                                        const clifford::RealifiedRep& rep, bool full = true);

struct NlsOperators {
  RealBlockOperator jl;
  RealBlockOperator l_plus;
  RealBlockOperator l_minus;
};

/// NLS linearization on the full-line grid (profile extended evenly):
///   l_minus = 1/2m - Lap/2m - u^2k,  l_plus = l_minus - 2k u^2k,
///   jl = [[0, l_minus], [-l_plus, 0]].
NlsOperators assemble_nls_linearization(const profiles::RadialProfile& u, double m, int k,
                                        const Grid1D& grid);

/// Grid-replicated symplectic matrix J_big (signed permutation).
Matrix grid_J(const clifford::RealifiedRep& rep, const Grid1D& grid);

}  // namespace diracstab::linearize
