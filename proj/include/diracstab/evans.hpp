#pragma once

#include <vector>

#include "diracstab/clifford.hpp"
#include "diracstab/profiles.hpp"

namespace diracstab::evans {

/// Spatial decay/growth rates of the constant-coefficient system at x -> +-inf.
/// The four rates are +-sqrt(m^2 - (omega -+ i lambda)^2); counts use a 1e-12
/// tolerance on the real part.
struct AsymptoticRates {
  Complex lambda;
  double omega = 0.0;
  double m = 1.0;
  std::vector<Complex> rates;  // size 2N
  int n_minus = 0;             // Re < -tol (decaying as x -> +inf)
  int n_zero = 0;
  int n_plus = 0;
};

AsymptoticRates asymptotic_rates(Complex lambda, double omega, double m,
                                 const clifford::DiracRep& rep);

/// Evans determinant at lambda. log_value is log of the analytic Evans
/// function (full solution determinant, gauge fixed by the frame bases);
/// reduced is the determinant of the orthonormalized matched frames at
/// x_match, |reduced| <= O(1), vanishing exactly at eigenvalues.
struct EvansValue {
  Complex log_value;
  Complex reduced;
};

/// One-off evaluation: returns the reduced (normalized) Evans determinant.
Complex evans_value(Complex lambda, const profiles::SolitaryWave& wave,
                    const clifford::DiracRep& rep, double x_match = 0.0);

struct Contour {
  std::vector<Complex> points;  // closed polyline, closure edge implied

  static Contour rectangle(double re_lo, double re_hi, double im_lo, double im_hi);
  static Contour circle(Complex center, double radius, int nodes = 16);
};

struct EvansScan {
  Contour contour;
  std::vector<Complex> lambdas;     // samples in traversal order, closure repeated
  std::vector<Complex> log_values;  // log E normalized by exp(2 L s(lambda))
  int winding = 0;
  int refinements = 0;
};

/// Reusable Evans solver for one wave: cubic-spline potential, adaptive RK45
/// (Dormand-Prince) with continuous QR re-orthonormalization, frames seeded by
/// the spectral projectors of the asymptotic matrix applied to fixed bases so
/// that E(lambda) stays analytic along a scan.
class EvansSystem {
 public:
  EvansSystem(const profiles::SolitaryWave& wave, const clifford::DiracRep& rep,
              double rtol = 1e-10);

  /// frame_base == nullptr: self-seeded orthonormal frames (standalone value).
  EvansValue value(Complex lambda, double x_match = 0.0, const CMatrix* frame_base = nullptr,
                   const CMatrix* frame_base_right = nullptr) const;

  /// Winding number of E around the contour with adaptive refinement until
  /// every argument step is below pi/2.
  EvansScan winding(const Contour& contour, int n_samples, double tol_band = 1e-4) const;

  AsymptoticRates rates(Complex lambda) const;

  /// Orthonormal bases of the unstable (left) and stable (right) asymptotic
  /// subspaces at lambda; pass these to value() to fix the gauge of a scan.
  std::pair<CMatrix, CMatrix> seed_frames(Complex lambda) const;

  double omega() const { return omega_; }
  double m() const { return m_; }

 private:
  CMatrix a_infinity(Complex lambda) const;
  CMatrix a_at(double x, Complex lambda) const;

  double omega_, m_, half_length_, rtol_;
  profiles::Nonlinearity f_;
  Matrix kinv_;   // (J K)^{-1}, real
  Matrix jmat_;   // realified J
  Matrix bbeta_;  // realified beta
  // natural cubic splines of the two real profile components
  Vector nodes_, v_, u_, v2_, u2_;  // values and second derivatives
};

EvansScan winding(const Contour& contour, const profiles::SolitaryWave& wave,
                  const clifford::DiracRep& rep, int n_samples, double tol_band = 1e-4);

/// Structural no-embedded-eigenvalue certificate beyond the threshold:
/// at every sampled lambda = i y, y in (m+|omega|, lambda_max], all asymptotic
/// rates are purely imaginary, so no decaying Jost solutions exist.
struct ThresholdCertificate {
  double omega = 0.0, m = 1.0, lambda_max = 0.0;
  int samples = 0;
  bool certified = false;
  std::vector<double> failed_at;  // Im lambda of any failures
};

ThresholdCertificate threshold_certificate(double omega, double m, double lambda_max,
                                           const clifford::DiracRep& rep, int n_samples = 100);

}  // namespace diracstab::evans
