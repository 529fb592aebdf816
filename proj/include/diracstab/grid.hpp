#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace diracstab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

/// Truncated periodic grid on [-L, L) with N_g equispaced nodes.
struct Grid1D {
  double L = 0.0;   // half-length
  int npoints = 0;  // even
  bool periodic = true;

  Grid1D() = default;
  Grid1D(double half_length, int n) : L(half_length), npoints(n) {
    if (half_length <= 0.0) throw std::invalid_argument("Grid1D: L must be positive");
    if (n <= 0 || n % 2 != 0) throw std::invalid_argument("Grid1D: point count must be even and positive");
  }

  double spacing() const { return 2.0 * L / npoints; }
  double node(int i) const { return -L + i * spacing(); }
  Vector nodes() const {
    Vector x(npoints);
    for (int i = 0; i < npoints; ++i) x[i] = node(i);
    return x;
  }
  // index of the reflected node x -> -x (the grid is periodic, -L == L)
  int reflect(int i) const { return i == 0 ? 0 : npoints - i; }
  // periodic trapezoid rule == h * sum
  double quad(const Vector& f) const { return spacing() * f.sum(); }
  Complex quad(const CVector& f) const { return spacing() * f.sum(); }
};

// Fourier-spectral first-derivative matrix (dense, skew-symmetric).
// Differentiates trigonometric interpolants exactly below the Nyquist mode;
// the sawtooth mode is mapped to zero.
Matrix differentiation_matrix(const Grid1D& grid);

// Grid momenta of the discrete derivative, matching differentiation_matrix
// (Nyquist entry is zero): xi_j for j = 0..N_g-1 in FFT ordering.
Vector grid_momenta(const Grid1D& grid);

}  // namespace diracstab
