#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "diracstab/continuation.hpp"
#include "diracstab/errors.hpp"

using namespace diracstab;
using namespace diracstab::continuation;

namespace {

SweepConfig fast_config() {
  SweepConfig cfg;
  cfg.npoints = 512;
  cfg.eps_times_L = 15.0;
  cfg.cls.rho_loc = 1e-2;  // moderate grids: eps L / 2 = 7.5
  return cfg;
}

// hand-built sweep with only the fields track() consumes
SweepResult synthetic_sweep(const std::vector<double>& omegas,
                            const std::vector<std::vector<Complex>>& eigs) {
  SweepResult s;
  s.config.m = 1.0;
  s.omegas = omegas;
  for (const auto& set : eigs) {
    spectra::SpectrumResult spec;
    spec.eigenvalues = set;
    spec.labels.assign(set.size(), spectra::Label::point);
    s.spectra.push_back(std::move(spec));
  }
  return s;
}

}  // namespace

TEST_CASE("sweep: cubic family, kernel cluster and 2 omega pair at each omega") {
  const auto res = sweep({0.90, 0.95, 0.99}, fast_config());
  REQUIRE(res.spectra.size() == 3);
  REQUIRE(res.family.waves.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    const auto& spec = res.spectra[i];
    const double omega = res.omegas[i];
    int cluster = 0;
    bool up = false, dn = false;
    for (size_t j = 0; j < spec.eigenvalues.size(); ++j) {
      const Complex l = spec.eigenvalues[j];
      if (std::abs(l) < 1e-4) ++cluster;
      const bool pointlike = spec.labels[j] == spectra::Label::point ||
                             spec.labels[j] == spectra::Label::embedded_candidate;
      if (pointlike && std::abs(l - Complex(0, 2 * omega)) < 1e-5) up = true;
      if (pointlike && std::abs(l + Complex(0, 2 * omega)) < 1e-5) dn = true;
    }
    CHECK(cluster == 4);
    CHECK(up);
    CHECK(dn);
    CHECK(res.family.waves[i].residual_norm < 1e-10);
    CHECK(res.charges[i] > 0.0);
  }
  // grid rescaling: L grows as omega approaches m
  CHECK(res.family.waves[2].grid.L > res.family.waves[0].grid.L);
}

TEST_CASE("sweep input validation") {
  CHECK_THROWS_AS(sweep({}, fast_config()), InsufficientFamily);
  CHECK_THROWS_AS(sweep({0.9, 0.8}, fast_config()), InsufficientFamily);
  CHECK_THROWS_AS(sweep({0.9, 1.0}, fast_config()), OutsideGap);
  // degenerate single-omega sweep works
  CHECK(sweep({0.95}, fast_config()).spectra.size() == 1);
}

TEST_CASE("track: 2 omega branch and the merged kernel branch") {
  const auto res = sweep({0.90, 0.95, 0.99}, fast_config());
  const auto branches = track(res, 0.2);

  const BranchTrace* kernel = nullptr;
  const BranchTrace* up = nullptr;
  for (const auto& br : branches) {
    if (br.multiplicity == 4) kernel = &br;
    if (br.multiplicity == 1 && br.lambdas.front().imag() > 1.0) up = &br;
  }
  REQUIRE(kernel != nullptr);
  CHECK(kernel->omegas.size() == 3);
  CHECK(kernel->start == 0);
  CHECK(!kernel->died_early);
  for (const auto& l : kernel->lambdas) CHECK(std::abs(l) < 1e-4);

  REQUIRE(up != nullptr);
  REQUIRE(up->omegas.size() == 3);
  for (size_t i = 0; i < 3; ++i)
    CHECK(std::abs(up->lambdas[i] / Complex(0, 1) - 2.0 * up->omegas[i]) < 1e-5);
  CHECK(up->matched[0] == false);
  CHECK(up->matched[1] == true);
}

TEST_CASE("track: death of a disappearing synthetic eigenvalue") {
  const auto s = synthetic_sweep({0.90, 0.91, 0.92},
                                 {{Complex(0, 0.30), Complex(0, 0.70)},
                                  {Complex(0, 0.3001), Complex(0, 0.7001)},
                                  {Complex(0, 0.3002)}});
  const auto branches = track(s, 0.01);
  int died = 0, survived = 0;
  for (const auto& br : branches) {
    if (br.multiplicity != 1) continue;
    (br.died_early ? died : survived)++;
  }
  CHECK(died == 1);
  CHECK(survived == 1);
}

TEST_CASE("rescaled limit") {
  // synthetic branch lambda = c eps^2 extrapolates to c exactly
  BranchTrace synth;
  synth.m = 1.0;
  const Complex c(0.3, 1.2);
  for (double omega : {0.90, 0.93, 0.96, 0.99}) {
    const double eps2 = 1.0 - omega * omega;
    synth.omegas.push_back(omega);
    synth.lambdas.push_back(c * eps2);
    synth.rescaled.push_back(c);
  }
  const auto fit = rescaled_limit(synth);
  CHECK(std::abs(fit.lambda_b - c) < 1e-10);

  // the 2 omega i branch is not a small branch
  BranchTrace two;
  two.m = 1.0;
  for (double omega : {0.90, 0.95, 0.99}) {
    const double eps2 = 1.0 - omega * omega;
    two.omegas.push_back(omega);
    two.lambdas.push_back(Complex(0, 2 * omega));
    two.rescaled.push_back(Complex(0, 2 * omega) / eps2);
  }
  CHECK_THROWS_AS(rescaled_limit(two), NotSmallBranch);

  BranchTrace tiny;
  tiny.omegas = {0.9, 0.95};
  tiny.rescaled = {Complex(0, 0), Complex(0, 0)};
  CHECK_THROWS_AS(rescaled_limit(tiny), InsufficientFamily);
}

TEST_CASE("rescaled kernel branch lands in the NLS spectrum") {
  const auto res = sweep({0.90, 0.95, 0.99}, fast_config());
  const auto branches = track(res, 0.2);
  const BranchTrace* kernel = nullptr;
  for (const auto& br : branches)
    if (br.multiplicity == 4) kernel = &br;
  REQUIRE(kernel != nullptr);
  for (const auto& l : kernel->rescaled) CHECK(std::abs(l) < 1e-3);
  const auto fit = rescaled_limit(*kernel);
  CHECK(std::abs(fit.lambda_b) < 1e-4);

  Grid1D grid(25.0, 512);
  const auto ref = nls_reference(1, 1.0, grid);
  CHECK(ref.kernel_cluster_size >= 2);
  CHECK(ref.nonzero_point.empty());  // cubic 1D NLS: point spectrum is {0}

  CHECK(compare_nls(fit.lambda_b, ref, 1e-3) == NlsVerdict::in_nls_spectrum);
  CHECK(compare_nls(Complex(0, 5), ref, 1e-3) == NlsVerdict::violation);

  NlsReference planted = ref;
  planted.nonzero_point.push_back(Complex(0, 0.25));
  CHECK(compare_nls(Complex(0, 0.2501), planted, 1e-3) == NlsVerdict::in_nls_spectrum);
  planted.l_minus_point.push_back(0.4);
  CHECK(compare_nls(Complex(0.4, 0), planted, 1e-3) == NlsVerdict::in_l_minus_spectrum);
}

TEST_CASE("VK monitor: dQ/domega keeps one sign near omega = m") {
  SweepConfig cfg = fast_config();
  const auto res = sweep({0.90, 0.93, 0.96, 0.99}, cfg);
  const auto vk = profiles::vk_derivative(res.omegas, res.charges);
  REQUIRE(vk.size() >= 2);
  for (const auto& s : vk) CHECK(!s.sign_change);
}

TEST_CASE("stability report") {
  const auto rep = clifford::build_dirac_rep(1);
  auto cfg = fast_config();
  const auto res = sweep({0.95}, cfg);
  const auto scan = evans::winding(evans::Contour::rectangle(1e-3, 3.0, -3.0, 3.0),
                                   res.family.waves[0], rep, 60);
  const auto verdicts = stability_report(res, {scan});
  REQUIRE(verdicts.size() == 1);
  CHECK(verdicts[0].verdict == Verdict::STABLE);
  CHECK(!verdicts[0].grid_unstable);
  CHECK(!verdicts[0].evans_unstable);

  // planted instability: inflated derivative callback, both methods agree
  SweepResult fake = res;
  auto& wave = fake.family.waves[0];
  wave.f.derivative = [](double) { return 4.0; };
  const auto rrep = clifford::realify(rep);
  const auto ops = linearize::assemble_nld_linearization(wave, rrep, false);
  fake.spectra[0] = spectra::classify(spectra::eigensolve(ops.JL),
                                      linearize::essential_bands(0.95, 1.0), wave.grid, cfg.cls);
  const auto fake_scan = evans::winding(evans::Contour::rectangle(1e-3, 3.0, -3.0, 3.0), wave,
                                        rep, 60);
  const auto bad = stability_report(fake, {fake_scan});
  CHECK(bad[0].verdict == Verdict::UNSTABLE);
  CHECK(bad[0].offending.real() > 0.1);
  CHECK(fake_scan.winding > 0);

  // disagreement between the two methods is surfaced, not hidden
  evans::EvansScan forged = scan;
  forged.winding = 1;
  CHECK(stability_report(res, {forged})[0].verdict == Verdict::INCONCLUSIVE);

  CHECK_THROWS_AS(stability_report(res, {}), DimensionMismatch);
}
