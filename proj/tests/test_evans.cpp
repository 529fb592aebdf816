#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "diracstab/errors.hpp"
#include "diracstab/evans.hpp"
#include "diracstab/linearize.hpp"
#include "diracstab/spectra.hpp"

using namespace diracstab;

namespace {

profiles::SolitaryWave cubic_wave(double omega, double L, int ng) {
  Grid1D grid(L, ng);
  return profiles::nld_solitary_wave(omega, 1.0, profiles::Nonlinearity::power(1), grid);
}

// golden-section minimizer of |E(iy)| over [lo, hi]
double axis_zero(const evans::EvansSystem& sys, double lo, double hi) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double y) { return std::abs(sys.value(Complex(0.0, y)).reduced); };
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-9) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("asymptotic rates: closed forms and counts") {
  const auto rep = clifford::build_dirac_rep(1);

  auto r0 = evans::asymptotic_rates(Complex(0.0, 0.0), 0.95, 1.0, rep);
  REQUIRE(r0.rates.size() == 4);
  const double eps = std::sqrt(1.0 - 0.95 * 0.95);
  int pos = 0, neg = 0;
  for (const auto& r : r0.rates) {
    CHECK(std::abs(r.imag()) < 1e-14);
    CHECK(std::abs(std::abs(r.real()) - eps) < 1e-12);
    (r.real() > 0 ? pos : neg)++;
  }
  CHECK(pos == 2);
  CHECK(neg == 2);
  CHECK(r0.n_minus == 2);
  CHECK(r0.n_zero == 0);
  CHECK(r0.n_plus == 2);

  // beyond the threshold on the imaginary axis: all rates oscillatory
  auto rthr = evans::asymptotic_rates(Complex(0.0, 1.95 * 1.01), 0.95, 1.0, rep);
  CHECK(rthr.n_zero == 4);

  // exactly at the gap edge: degenerate rate flagged
  auto redge = evans::asymptotic_rates(Complex(0.0, 0.05), 0.95, 1.0, rep);
  CHECK(redge.n_zero >= 1);

  // between gap edge and threshold: decaying directions still exist
  auto remb = evans::asymptotic_rates(Complex(0.0, 1.8), 0.9, 1.0, rep);
  CHECK(remb.n_zero == 2);
  CHECK(remb.n_minus == 1);
  CHECK(remb.n_plus == 1);
}

TEST_CASE("asymptotic rates agree with the first-order system matrix") {
  // independent route: eigenvalues of (J K)^{-1} (lambda - J(m bbeta - omega))
  const auto rrep = clifford::realify(clifford::build_dirac_rep(1));
  const Matrix kin = rrep.minus_i_alpha()[0];
  const Matrix jk = rrep.J * kin;
  const double omega = 0.7, m = 1.0;
  for (Complex lambda : {Complex(0.1, 0.2), Complex(0.0, 0.25), Complex(1.0, -0.5)}) {
    const CMatrix a = jk.inverse().cast<Complex>() *
                      (lambda * CMatrix::Identity(4, 4) -
                       (rrep.J * (m * rrep.bbeta - omega * Matrix::Identity(4, 4))).cast<Complex>());
    Eigen::ComplexEigenSolver<CMatrix> es(a);
    auto closed = evans::asymptotic_rates(lambda, omega, m, clifford::build_dirac_rep(1)).rates;
    for (int i = 0; i < 4; ++i) {
      double best = 1e300;
      for (const auto& c : closed) best = std::min(best, std::abs(es.eigenvalues()[i] - c));
      CHECK(best < 1e-12);
    }
  }
}

TEST_CASE("threshold certificate") {
  const auto rep = clifford::build_dirac_rep(1);
  auto cert = evans::threshold_certificate(0.95, 1.0, 5.0, rep, 100);
  CHECK(cert.certified);
  CHECK(cert.failed_at.empty());
  CHECK(cert.samples == 100);

  auto cert0 = evans::threshold_certificate(0.0, 1.0, 1.5, rep, 50);
  CHECK(cert0.certified);

  CHECK_THROWS_AS(evans::threshold_certificate(0.95, 1.0, 1.0, rep), ConfigInvalid);
}

TEST_CASE("Evans zero at 2 omega i and agreement with the grid, omega = 0.25") {
  const auto rep = clifford::build_dirac_rep(1);
  const auto wave = cubic_wave(0.25, 60.0, 640);
  evans::EvansSystem sys(wave, rep);

  // known eigenvalue: E vanishes at +-0.5i, not nearby
  CHECK(std::abs(sys.value(Complex(0.0, 0.5)).reduced) < 1e-5);
  CHECK(std::abs(sys.value(Complex(0.0, -0.5)).reduced) < 1e-5);
  CHECK(std::abs(sys.value(Complex(0.0, 0.52)).reduced) > 1e-3);
  CHECK(std::abs(sys.value(Complex(0.0, 0.45)).reduced) > 1e-3);

  // on the essential spectrum the frame split fails
  CHECK_THROWS_AS(sys.value(Complex(0.0, 0.8)), NotHyperbolic);

  // grid spectrum: the nonzero gap eigenvalues match Evans zeros within 1e-5
  const auto ops =
      linearize::assemble_nld_linearization(wave, clifford::realify(rep), false);
  const auto spec = spectra::classify(spectra::eigensolve(ops.JL),
                                      linearize::essential_bands(0.25, 1.0), wave.grid);
  std::vector<double> gap_eigs;
  for (size_t i = 0; i < spec.eigenvalues.size(); ++i) {
    const auto l = spec.eigenvalues[i];
    if (std::abs(l.real()) < 1e-7 && l.imag() > 1e-3 && l.imag() < 0.75 - 1e-6 &&
        spec.localization[static_cast<long>(i)] < 1e-2)
      gap_eigs.push_back(l.imag());
  }
  REQUIRE(gap_eigs.size() == 2);  // 0.5 and one further gap eigenvalue
  std::sort(gap_eigs.begin(), gap_eigs.end());
  CHECK(std::abs(gap_eigs[0] - 0.5) < 1e-6);
  for (double y : gap_eigs) {
    const double zero = axis_zero(sys, y - 0.01, y + 0.01);
    CHECK(std::abs(zero - y) < 1e-5);
  }
  // conversely: no Evans zero hides between the known ones
  for (double y : {0.2, 0.35, 0.58, 0.7}) {
    CHECK(std::abs(sys.value(Complex(0.0, y)).reduced) > 1e-3);
  }

  // argument principle: one zero in a small circle around 0.5i, four at 0
  CHECK(sys.winding(evans::Contour::circle(Complex(0.0, 0.5), 0.05), 24).winding == 1);
  CHECK(sys.winding(evans::Contour::circle(Complex(0.0, 0.0), 0.03), 32).winding == 4);
}

TEST_CASE("E is analytic: Cauchy-Riemann residual") {
  const auto rep = clifford::build_dirac_rep(1);
  const auto wave = cubic_wave(0.9, 48.0, 512);
  evans::EvansSystem sys(wave, rep);
  for (Complex c : {Complex(1.0, 1.0), Complex(0.5, 0.2), Complex(0.05, 0.5)}) {
    const auto [bl, br] = sys.seed_frames(c);
    auto lv = [&](Complex z) { return sys.value(z, 0.0, &bl, &br).log_value; };
    const double h = 1e-4;
    const Complex ddre = (lv(c + h) - lv(c - h)) / (2.0 * h);
    const Complex ddim = (lv(c + Complex(0, h)) - lv(c - Complex(0, h))) / (2.0 * h);
    CHECK(std::abs(ddre - ddim / Complex(0, 1)) < 1e-4 * std::abs(ddre));
  }
}

TEST_CASE("right half-plane winding is zero for the stable cubic wave") {
  const auto rep = clifford::build_dirac_rep(1);
  const auto wave = cubic_wave(0.9, 48.0, 512);
  evans::EvansSystem sys(wave, rep);
  const auto scan = sys.winding(evans::Contour::rectangle(1e-3, 3.0, -3.0, 3.0), 60);
  CHECK(scan.winding == 0);

  // contour crossing the essential spectrum is refused
  CHECK_THROWS_AS(sys.winding(evans::Contour::rectangle(-0.5, 0.5, 0.5, 1.5), 20),
                  ContourTouchesEssential);
}

TEST_CASE("quadruplet symmetry of the computed zero set") {
  const auto rep = clifford::build_dirac_rep(1);
  const auto wave = cubic_wave(0.25, 60.0, 640);
  evans::EvansSystem sys(wave, rep);
  // zeros found at +y are also zeros at -y (lambda -> conj, lambda -> -lambda)
  for (double y : {0.5, 0.63888}) {
    const double up = std::abs(sys.value(Complex(0.0, axis_zero(sys, y - 0.01, y + 0.01))).reduced);
    const double dn =
        std::abs(sys.value(Complex(0.0, -axis_zero(sys, y - 0.01, y + 0.01))).reduced);
    CHECK(up < 1e-4);
    CHECK(dn < 1e-4);
  }
}
