#include "diracstab/lapack_eig.hpp"

#include <lapacke.h>

#include "diracstab/errors.hpp"

namespace diracstab::lapack {

EigResult eig_general(const Matrix& a) {
  const auto n = static_cast<lapack_int>(a.rows());
  Matrix work = a;  // overwritten by dgeev
  Vector wr(n), wi(n);
  Matrix vr(n, n);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n, wr.data(), wi.data(),
                    nullptr, n, vr.data(), n);
  if (info < 0)
    throw std::invalid_argument("eig_general: bad argument to dgeev");
  if (info > 0)
    throw NoConvergenceQR("eig_general: QR iteration failed to converge", static_cast<int>(info));

  EigResult out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (lapack_int j = 0; j < n; ++j) {
    out.values[j] = Complex(wr[j], wi[j]);
    if (wi[j] > 0.0) {  // complex-conjugate pair stored as two real columns
      out.vectors.col(j) = vr.col(j).cast<Complex>() + Complex(0, 1) * vr.col(j + 1).cast<Complex>();
    } else if (wi[j] < 0.0) {
      out.vectors.col(j) = vr.col(j - 1).cast<Complex>() - Complex(0, 1) * vr.col(j).cast<Complex>();
    } else {
      out.vectors.col(j) = vr.col(j).cast<Complex>();
    }
  }
  return out;
}

SymEigResult eig_symmetric(const Matrix& a) {
  const auto n = static_cast<lapack_int>(a.rows());
  SymEigResult out;
  out.vectors = a;
  out.values.resize(n);
  const lapack_int info =
      LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n, out.values.data());
  if (info < 0) throw std::invalid_argument("eig_symmetric: bad argument to dsyev");
  if (info > 0)
    throw NoConvergenceQR("eig_symmetric: eigensolver failed to converge", static_cast<int>(info));
  return out;
}

}  // namespace diracstab::lapack
