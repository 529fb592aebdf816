#include "diracstab/grid.hpp"

#include <cmath>

namespace diracstab {

Matrix differentiation_matrix(const Grid1D& grid) {
  const int n = grid.npoints;
  const double scale = M_PI / grid.L;  // map period 2L -> 2*pi
  Matrix d = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int k = i - j;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = scale * 0.5 * sign / std::tan(M_PI * k / n);
    }
  }
  // enforce exact skew-symmetry against rounding in tan()
  Matrix ds = 0.5 * (d - d.transpose());
  return ds;
}

Vector grid_momenta(const Grid1D& grid) {
  const int n = grid.npoints;
  Vector xi(n);
  const double base = M_PI / grid.L;
  for (int j = 0; j < n; ++j) {
    int m = (j <= n / 2) ? j : j - n;
    if (j == n / 2) m = 0;  // Nyquist mode differentiates to zero
    xi[j] = base * m;
  }
  return xi;
}

}  // namespace diracstab
