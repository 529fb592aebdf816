// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
// Heavier criteria pin their grids and tolerances inline; artifacts for the
// CLI-driven checks are written under the system temp directory.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "diracstab/cli.hpp"
#include "diracstab/clifford.hpp"
#include "diracstab/continuation.hpp"
#include "diracstab/evans.hpp"
#include "diracstab/linearize.hpp"
#include "diracstab/profiles.hpp"
#include "diracstab/spectra.hpp"
#include "diracstab/verify.hpp"

using namespace diracstab;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int failures = 0;

void report(int num, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", num, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Fn>
void criterion(int num, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(num, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// spectrum.csv rows: re_lambda, im_lambda, residual, localization, label code
struct SpectrumRow {
  double re, im, residual, rho;
  int label;
};

std::vector<SpectrumRow> read_spectrum_csv(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::vector<SpectrumRow> rows;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    SpectrumRow r{};
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    ss >> r.re >> r.im >> r.residual >> r.rho >> r.label;
    rows.push_back(r);
  }
  return rows;
}

profiles::SolitaryWave cubic_wave(double omega, const Grid1D& grid) {
  return profiles::nld_solitary_wave(omega, 1.0, profiles::Nonlinearity::power(1), grid);
}

}  // namespace

int main() {
  const fs::path workdir = fs::temp_directory_path() / "diracstab-acceptance";
  fs::remove_all(workdir);
  const auto rep1 = clifford::build_dirac_rep(1, true);
  const auto rrep1 = clifford::realify(rep1);
  constexpr int kPointLabel = static_cast<int>(spectra::Label::point);

  // 1. Clifford exactness for n = 1, 2, 3 (with the optional generators)
  criterion(1, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    int violations = 0;
    for (int n : {1, 2, 3}) {
      const auto rep = clifford::build_dirac_rep(n, true, true);
      violations += static_cast<int>(clifford::check_relations(rep).size());
      violations += static_cast<int>(clifford::check_relations(clifford::realify(rep)).size());
    }
    const double dt = seconds_since(t0);
    report(1, violations == 0 && dt < 1.0,
           fmt("Clifford/realification identities n=1..3: %d violations (%.2fs, limit 1s)",
               violations, dt));
  });

  // 2. NLS ground state against the closed form sech(x) (k = 1, m = 1)
  criterion(2, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = profiles::nls_ground_state(1, 1, 1.0, 40.0, 2048);
    double sup = 0.0;
    for (long i = 0; i < p.r.size(); ++i)
      sup = std::max(sup, std::abs(p.u[i] - profiles::nls_ground_state_1d(1, 1.0, p.r[i])));
    const double dt = seconds_since(t0);
    report(2, sup < 1e-8 && dt < 5.0,
           fmt("NLS ground state vs sech closed form: sup error %.2e (tol 1e-8, %.2fs, limit 5s)",
               sup, dt));
  });

  // 3. NLD profiles: residual, decay rate, nonrelativistic remainder order
  criterion(3, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_res = 0.0, worst_decay_rel = 0.0;
    for (double omega : {0.9, 0.95, 0.99}) {
      const double eps = std::sqrt(1.0 - omega * omega);
      const auto wave = cubic_wave(omega, Grid1D(15.0 / eps, 1024));
      worst_res = std::max(worst_res, wave.residual_norm);
      const auto fit = profiles::decay_rate(wave);
      worst_decay_rel = std::max(worst_decay_rel, std::abs(fit.mu_est - eps) / eps);
    }
    // ||phi_P - eps u_1(eps .)||_inf / eps at eps = 0.2 and eps = 0.1
    auto remainder = [&](double eps, double L) {
      const auto w = cubic_wave(std::sqrt(1.0 - eps * eps), Grid1D(L, 1024));
      double mx = 0.0;
      for (int i = 0; i < w.grid.npoints; ++i)
        mx = std::max(mx, std::abs(w.spinor(0, i).real() -
                                   eps * profiles::nls_ground_state_1d(
                                             1, 1.0, eps * w.grid.node(i))));
      return mx / eps;
    };
    const double ratio = remainder(0.2, 75.0) / remainder(0.1, 150.0);
    const double dt = seconds_since(t0);
    report(3,
           worst_res < 1e-10 && worst_decay_rel < 0.05 && ratio >= 3.0 && dt < 60.0,
           fmt("profiles omega=0.9/0.95/0.99: residual %.2e (tol 1e-10), decay off by %.2f%% "
               "(tol 5%%), halving-eps remainder ratio %.2f (>= 3), %.1fs (limit 60s)",
               worst_res, 100.0 * worst_decay_rel, ratio, dt));
  });

  // shared spectrum for criteria 4 and 6: omega = 0.9, L = 34.4, N = 1024.
  // rho_loc = 1e-2 matches the tail size e^{-eps L / 2} ~ 5e-4 of this box.
  spectra::SpectrumResult shared_spec;
  linearize::EssentialBands shared_bands;
  criterion(4, [&] {
    const Grid1D grid(34.4, 1024);
    const auto wave = cubic_wave(0.9, grid);
    const auto ops = linearize::assemble_nld_linearization(wave, rrep1, false);
    shared_bands = linearize::essential_bands(0.9, 1.0);
    spectra::ClassifyOptions cls;
    cls.rho_loc = 1e-2;
    shared_spec = spectra::classify(spectra::eigensolve(ops.JL), shared_bands, grid, cls);

    int deloc = 0, within = 0, adjacent = 0;
    double worst_far = 0.0;
    for (size_t i = 0; i < shared_spec.eigenvalues.size(); ++i) {
      if (shared_spec.labels[i] != spectra::Label::essential_artifact) continue;
      ++deloc;
      if (shared_bands.distance(shared_spec.eigenvalues[i]) <= 1e-6) {
        ++within;
      } else {
        // finite-box edge states sit within the gap-edge smearing width
        const double ep = shared_bands.endpoint_distance(shared_spec.eigenvalues[i]);
        if (ep < 0.05) ++adjacent;
        worst_far = std::max(worst_far, ep);
      }
    }
    const double frac = deloc > 0 ? static_cast<double>(within) / deloc : 0.0;
    report(4, frac >= 0.99 && within + adjacent == deloc,
           fmt("essential bands: %d/%d delocalized within 1e-6 (%.2f%%), remainder %d all "
               "threshold-adjacent (worst endpoint distance %.2e < 0.05)",
               within, deloc, 100.0 * frac, deloc - within, worst_far));
  });

  // 5. +-2 omega i eigenvalue and the operator identity
  criterion(5, [&] {
    double worst_dist = 0.0, worst_id = 0.0;
    struct Cfg { double omega, L; int N; };
    for (const Cfg& c : {Cfg{0.25, 60.0, 640}, Cfg{0.5, 36.0, 576}, Cfg{0.95, 100.0, 1600}}) {
      const Grid1D grid(c.L, c.N);
      const auto wave = cubic_wave(c.omega, grid);
      const auto ops = linearize::assemble_nld_linearization(wave, rrep1, false);
      const auto spec = spectra::classify(spectra::eigensolve(ops.JL),
                                          linearize::essential_bands(c.omega, 1.0), grid);
      const auto two = spectra::verify_2omega(wave, rep1, ops.L, spec);
      worst_dist = std::max(worst_dist, two.distance);
      worst_id = std::max(worst_id, two.identity_residual);
    }
    report(5, worst_dist < 1e-6 && worst_id < 1e-8,
           fmt("2 omega i at omega=0.25/0.5/0.95: worst |lambda - 2 omega i| %.2e (tol 1e-6), "
               "worst identity residual %.2e (tol 1e-8)",
               worst_dist, worst_id));
  });

  // 6. Quadruplet symmetry and embedding invariance under doubling
  criterion(6, [&] {
    if (shared_spec.eigenvalues.empty()) throw std::runtime_error("criterion 4 spectrum missing");
    const auto missing = spectra::check_symmetry(shared_spec.eigenvalues, 1e-7);

    const Grid1D grid(30.0, 256);
    const auto wave = cubic_wave(0.9, grid);
    const auto rep_a = clifford::build_dirac_rep(1);
    const auto rep_b = clifford::double_rep(rep_a);
    const auto stable = spectra::embedding_invariance(wave, rep_a, rep_b);
    auto fake = wave;
    fake.f.derivative = [](double) { return 4.0; };
    const auto unstable = spectra::embedding_invariance(fake, rep_a, rep_b);
    report(6,
           missing.empty() && stable.hausdorff < 1e-6 && !unstable.off_axis_a.empty() &&
               unstable.hausdorff < 1e-6,
           fmt("symmetry: %zu unmatched quadruplet partners (tol 1e-7); embedding Hausdorff "
               "%.2e stable / %.2e synthetic-unstable (%zu off-axis pairs, tol 1e-6)",
               missing.size(), stable.hausdorff, unstable.hausdorff,
               unstable.off_axis_a.size()));
  });

  // 7. Krein identity over the synthetic-unstable (supercritical NLS) operator
  criterion(7, [&] {
    const Grid1D grid(24.0, 896);
    const auto prof = profiles::nls_ground_state(1, 3, 1.0, 24.0, 449);
    const auto ops = linearize::assemble_nls_linearization(prof, 1.0, 3, grid);
    const auto spec = spectra::classify(spectra::eigensolve(ops.jl),
                                        linearize::essential_bands(0.0, 0.5), grid);
    const int ng = grid.npoints;
    Matrix l_mat = Matrix::Zero(2 * ng, 2 * ng);
    l_mat.topLeftCorner(ng, ng) = ops.l_plus.matrix;
    l_mat.bottomRightCorner(ng, ng) = ops.l_minus.matrix;
    Matrix jbig = Matrix::Zero(2 * ng, 2 * ng);
    jbig.topRightCorner(ng, ng).setIdentity();
    jbig.bottomLeftCorner(ng, ng) = -Matrix::Identity(ng, ng);

    int off_axis = 0;
    double worst = 0.0;
    for (size_t i = 0; i < spec.eigenvalues.size(); ++i) {
      if (std::abs(spec.eigenvalues[i].real()) <= 1e-6) continue;
      ++off_axis;
      const auto [lz, jz] =
          spectra::krein(spec.eigenvectors.col(static_cast<long>(i)), l_mat, jbig, 1.0);
      worst = std::max({worst, std::abs(lz), std::abs(jz)});
    }
    report(7, off_axis > 0 && worst < 1e-6,
           fmt("Krein identity over %d eigenpairs with |Re lambda| > 1e-6: worst "
               "|<z,Lz>|, |<z,Jz>| = %.2e (tol 1e-6)",
               off_axis, worst));
  });

  // 8 + 13. Headline stability at N_g = 2048 through the CLI, then determinism
  struct HeadlineRun {
    double omega;
    fs::path spec_dir, evans_dir;
  };
  std::vector<HeadlineRun> headline;
  auto headline_configs = [&](double omega, const fs::path& specdir, const fs::path& evansdir) {
    cli::RunConfig sc;
    sc.command = "spectrum";
    sc.omega = omega;
    sc.npoints = 2048;
    sc.eps_times_L = 15.0;
    sc.rho_loc = 1e-2;  // tails e^{-eps L / 2} ~ 5e-4 at this box size
    sc.outdir = specdir.string();
    cli::RunConfig ec = sc;
    ec.command = "evans";
    ec.outdir = evansdir.string();
    return std::pair{sc, ec};
  };
  criterion(8, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string note;
    for (double omega : {0.9, 0.95, 0.99}) {
      const fs::path specdir = workdir / fmt("headline-spec-%.2f", omega);
      const fs::path evansdir = workdir / fmt("headline-evans-%.2f", omega);
      const auto [sc, ec] = headline_configs(omega, specdir, evansdir);
      if (cli::run(sc) != 0 || cli::run(ec) != 0)
        throw std::runtime_error("headline CLI run failed at omega " + std::to_string(omega));
      headline.push_back({omega, specdir, evansdir});

      int unstable_points = 0, cluster = 0;
      for (const auto& r : read_spectrum_csv(specdir / "spectrum.csv")) {
        if (r.label == kPointLabel && r.re > 1e-6) ++unstable_points;
        if (std::hypot(r.re, r.im) < 1e-4) ++cluster;
      }
      const int winding = json::parse(slurp(evansdir / "evans.json")).at("winding").get<int>();
      ok = ok && unstable_points == 0 && winding == 0 && cluster == 4;
      note += fmt("omega %.2f: %d unstable points, winding %d, cluster %d; ", omega,
                  unstable_points, winding, cluster);
    }
    const double dt = seconds_since(t0);
    report(8, ok && dt < 600.0,
           note + fmt("total %.0fs at N_g = 2048 (limit 600s)", dt));
  });

  // 9. Embedded-threshold certificate beyond i(m + |omega|)
  criterion(9, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    for (double omega : {0.5, 0.95}) {
      const auto cert = evans::threshold_certificate(omega, 1.0, 5.0, rep1, 100);
      ok = ok && cert.certified && cert.samples == 100 && cert.failed_at.empty();
    }
    const double dt = seconds_since(t0);
    report(9, ok && dt < 1.0,
           fmt("threshold certificate omega=0.5/0.95, 100 samples in i(m+|omega|, 5]: "
               "no decaying directions (%.3fs, limit 1s)",
               dt));
  });

  // 10. Rescaled nonrelativistic limit of the zero-cluster branch
  criterion(10, [&] {
    continuation::SweepConfig cfg;
    cfg.npoints = 512;
    cfg.eps_times_L = 15.0;
    cfg.cls.rho_loc = 1e-2;
    const auto res = continuation::sweep({0.90, 0.95, 0.99}, cfg);
    const auto branches = continuation::track(res, 0.2);
    const continuation::BranchTrace* kernel = nullptr;
    for (const auto& b : branches)
      if (b.multiplicity == 4) kernel = &b;
    if (kernel == nullptr) throw std::runtime_error("kernel branch not found");
    double worst_rescaled = 0.0;
    for (const auto& lam : kernel->rescaled)
      worst_rescaled = std::max(worst_rescaled, std::abs(lam));
    const auto fit = continuation::rescaled_limit(*kernel);
    const auto ref = continuation::nls_reference(1, 1.0, Grid1D(25.0, 512));
    const auto verdict = continuation::compare_nls(fit.lambda_b, ref, 1e-3);
    report(10,
           worst_rescaled < 1e-3 && std::abs(fit.lambda_b) < 1e-4 &&
               ref.nonzero_point.empty() &&
               verdict == continuation::NlsVerdict::in_nls_spectrum,
           fmt("rescaled kernel branch: |Lambda| <= %.2e (tol 1e-3), extrapolated "
               "|Lambda_b| = %.2e (tol 1e-4), NLS jl nonzero point set size %zu, verdict %s",
               worst_rescaled, std::abs(fit.lambda_b), ref.nonzero_point.size(),
               continuation::verdict_name(verdict).c_str()));
  });

  // 11. Derrick demo: Poeschl-Teller bottom, growth rate, dilation identity
  criterion(11, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = verify::derrick_demo(Grid1D(26.0, 512));
    const double dt = seconds_since(t0);
    report(11,
           std::abs(d.min_eigenvalue + 3.0) < 1e-4 &&
               std::abs(d.growth_rate - std::sqrt(3.0)) < 1e-4 &&
               d.dilation_residual < 1e-8 && dt < 5.0,
           fmt("Derrick demo: min eigenvalue %.6f (-3 +- 1e-4), growth rate %.6f "
               "(sqrt(3) +- 1e-4), dilation residual %.2e (tol 1e-8), %.2fs (limit 5s)",
               d.min_eigenvalue, d.growth_rate, d.dilation_residual, dt));
  });

  // 12. Inequality suites: Hardy, matrix exponential, Carleman (+ tau gain)
  criterion(12, [&] {
    const unsigned seed = 1234;
    const verify::WeightFn wx{[](double x) { return x; }, [](double) { return 1.0; }};
    const auto hardy = verify::hardy_sample(wx, Grid1D(10.0, 2048),
                                            verify::sample_family(100, 0.3, 9.7, seed));

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> lam_dist(1.05, 50.0);
    std::vector<double> lambdas(100);
    for (auto& l : lambdas) l = lam_dist(rng);
    Vector xs(2001);
    for (int i = 0; i < 2001; ++i) xs[i] = -50.0 + 0.05 * i;
    const auto matexp = verify::matrix_exp_bound(lambdas, 1.0, rep1, xs);

    const Grid1D cgrid(12.0, 1024);
    const auto carleman =
        verify::carleman_sample(1.5, 1.0, {1.0, 2.0, 4.0}, 2.0, rep1, cgrid, 50, seed);
    std::vector<double> logtau, loggain;
    for (double tau : {4.0, 8.0, 16.0}) {
      const auto rt = verify::carleman_sample(1.5, 1.0, {tau}, 2.0, rep1, cgrid, 50, seed);
      logtau.push_back(std::log(tau));
      loggain.push_back(std::log(1.0 / rt.worst_ratio));
    }
    const double slope = (loggain.back() - loggain.front()) / (logtau.back() - logtau.front());

    const bool ok = hardy.pass && hardy.samples >= 100 && hardy.constant == 4.0 &&
                    matexp.pass && matexp.samples >= 100 && carleman.pass &&
                    carleman.samples >= 100 && std::abs(slope - 0.5) <= 0.1;
    report(12, ok,
           fmt("Hardy %d samples worst ratio %.6f, matrix-exp %d samples worst ratio %.6f, "
               "Carleman %d samples worst ratio %.6f (all <= 1 + 1e-8); tau-gain slope %.3f "
               "(0.5 +- 0.1)",
               hardy.samples, hardy.worst_ratio, matexp.samples, matexp.worst_ratio,
               carleman.samples, carleman.worst_ratio, slope));
  });

  // 13. Determinism: repeat the criterion 8 configs, compare CSV bytes
  criterion(13, [&] {
    if (headline.empty()) throw std::runtime_error("criterion 8 artifacts missing");
    bool identical = true;
    for (const auto& h : headline) {
      const fs::path specdir2 = workdir / fmt("repeat-spec-%.2f", h.omega);
      const fs::path evansdir2 = workdir / fmt("repeat-evans-%.2f", h.omega);
      const auto [sc, ec] = headline_configs(h.omega, specdir2, evansdir2);
      if (cli::run(sc) != 0 || cli::run(ec) != 0)
        throw std::runtime_error("repeat CLI run failed");
      identical = identical &&
                  slurp(h.spec_dir / "spectrum.csv") == slurp(specdir2 / "spectrum.csv") &&
                  slurp(h.evans_dir / "evans.csv") == slurp(evansdir2 / "evans.csv");
    }
    report(13, identical,
           identical ? "repeated headline runs: spectrum.csv and evans.csv bit-identical"
                     : "repeated headline runs: CSV artifacts differ");
  });

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
