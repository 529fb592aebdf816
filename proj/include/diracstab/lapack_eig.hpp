#pragma once

#include "diracstab/grid.hpp"

namespace diracstab::lapack {

struct EigResult {
  CVector values;
  CMatrix vectors;  // right eigenvectors, matching columns
};

/// Full nonsymmetric eigendecomposition (Hessenberg + shifted QR via dgeev).
/// Throws NoConvergenceQR with the failing index when QR fails to converge.
EigResult eig_general(const Matrix& a);

struct SymEigResult {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

/// Symmetric eigendecomposition via dsyev.
SymEigResult eig_symmetric(const Matrix& a);

}  // namespace diracstab::lapack
