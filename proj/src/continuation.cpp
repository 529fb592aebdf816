#include "diracstab/continuation.hpp"

#include <algorithm>
#include <cmath>

#include "diracstab/errors.hpp"
#include "diracstab/linearize.hpp"

namespace diracstab::continuation {

SweepResult sweep(const std::vector<double>& omegas, const SweepConfig& cfg) {
  if (omegas.empty()) throw InsufficientFamily("sweep: empty omega list");
  for (size_t i = 0; i + 1 < omegas.size(); ++i)
    if (omegas[i + 1] <= omegas[i]) throw InsufficientFamily("sweep: omegas must increase");

  SweepResult out;
  out.config = cfg;
  out.omegas = omegas;
  const auto rrep = clifford::realify(clifford::build_dirac_rep(1));
  const auto f = profiles::Nonlinearity::power(cfg.k);

  for (double omega : omegas) {
    if (std::abs(omega) >= cfg.m) throw OutsideGap("sweep: omega outside the spectral gap");
    const double eps = std::sqrt(cfg.m * cfg.m - omega * omega);
    const double L = cfg.auto_rescale ? cfg.eps_times_L / eps : cfg.fixed_L;
    Grid1D grid(L, cfg.npoints);

    // continuation seeding helps while consecutive boxes are comparable; after
    // a large rescale the interpolated seed is worse than the closed-form
    // ansatz and can stall the Newton line search
    const profiles::SolitaryWave* seed = nullptr;
    if (cfg.continuation_seed && !out.family.waves.empty()) {
      const double ratio = out.family.waves.back().grid.L / L;
      if (ratio > 0.75 && ratio < 4.0 / 3.0) seed = &out.family.waves.back();
    }
    auto wave = profiles::nld_solitary_wave(omega, cfg.m, f, grid, seed);

    const auto ops = linearize::assemble_nld_linearization(wave, rrep, cfg.attach_krein);
    auto spec = spectra::classify(spectra::eigensolve(ops.JL, cfg.eig),
                                  linearize::essential_bands(omega, cfg.m), grid, cfg.cls);
    if (cfg.attach_krein)
      spectra::attach_krein(spec, ops.L, linearize::grid_J(rrep, grid));

    out.charges.push_back(profiles::charge(wave));
    out.family.waves.push_back(std::move(wave));
    out.spectra.push_back(std::move(spec));
  }
  return out;
}

namespace {

struct Candidate {
  Complex lambda;
  spectra::Label label;
  int multiplicity = 1;
};

// point/embedded-candidate eigenvalues with the zero cluster collapsed into a
// single entry represented by its member of largest modulus
std::vector<Candidate> trackable(const spectra::SpectrumResult& spec, double delta0_abs) {
  std::vector<Candidate> out;
  Candidate cluster{Complex(0.0, 0.0), spectra::Label::point, 0};
  for (size_t i = 0; i < spec.eigenvalues.size(); ++i) {
    const auto label = spec.labels[i];
    if (label != spectra::Label::point && label != spectra::Label::embedded_candidate) continue;
    const Complex l = spec.eigenvalues[i];
    if (std::abs(l) < delta0_abs) {
      ++cluster.multiplicity;
      if (std::abs(l) > std::abs(cluster.lambda)) cluster.lambda = l;
    } else {
      out.push_back({l, label, 1});
    }
  }
  if (cluster.multiplicity > 0) out.push_back(cluster);
  return out;
}

}  // namespace

std::vector<BranchTrace> track(const SweepResult& sweep, double matching_radius) {
  if (sweep.spectra.size() < 2) throw InsufficientFamily("track: need at least two spectra");
  const double delta0_abs = sweep.config.delta0 * sweep.config.m;

  std::vector<BranchTrace> branches;
  std::vector<int> alive;  // branch index per current candidate

  for (size_t step = 0; step < sweep.spectra.size(); ++step) {
    const auto cand = trackable(sweep.spectra[step], delta0_abs);
    std::vector<int> owner(cand.size(), -1);

    if (step > 0) {
      const double domega = sweep.omegas[step] - sweep.omegas[step - 1];
      // greedy nearest-neighbor assignment, closest pairs first
      struct Pair {
        double dist;
        int branch, cand_idx;
      };
      std::vector<Pair> pairs;
      for (int b : alive) {
        auto& br = branches[b];
        double radius = matching_radius;
        if (radius <= 0.0) {
          double slope = 0.0;
          const auto n = br.lambdas.size();
          if (n >= 2) {
            const double prev_do = br.omegas[n - 1] - br.omegas[n - 2];
            if (prev_do > 0.0) slope = std::abs(br.lambdas[n - 1] - br.lambdas[n - 2]) / prev_do;
          }
          radius = std::max(1e-4, 0.1 * std::abs(domega) * slope);
        }
        for (size_t c = 0; c < cand.size(); ++c) {
          const double d = std::abs(cand[c].lambda - br.lambdas.back());
          if (d <= radius && cand[c].multiplicity == br.multiplicity)
            pairs.push_back({d, b, static_cast<int>(c)});
        }
      }
      std::sort(pairs.begin(), pairs.end(),
                [](const Pair& a, const Pair& b) { return a.dist < b.dist; });
      std::vector<char> branch_taken(branches.size(), 0);
      for (const auto& p : pairs) {
        if (branch_taken[p.branch] || owner[p.cand_idx] >= 0) continue;
        branch_taken[p.branch] = 1;
        owner[p.cand_idx] = p.branch;
      }
      for (int b : alive)
        if (!branch_taken[b] && !branches[b].died_early)
          branches[b].died_early = (step < sweep.spectra.size());
    }

    alive.clear();
    for (size_t c = 0; c < cand.size(); ++c) {
      int b = owner[c];
      const bool born = (b < 0);
      if (born) {
        b = static_cast<int>(branches.size());
        branches.push_back({});
        branches[b].m = sweep.config.m;
        branches[b].start = static_cast<int>(step);
        branches[b].multiplicity = cand[c].multiplicity;
      }
      auto& br = branches[b];
      const double omega = sweep.omegas[step];
      br.omegas.push_back(omega);
      br.lambdas.push_back(cand[c].lambda);
      br.rescaled.push_back(cand[c].lambda / (sweep.config.m * sweep.config.m - omega * omega));
      br.labels.push_back(cand[c].label);
      br.matched.push_back(!born);
      alive.push_back(b);
    }
  }
  // a branch that reached the final spectrum did not die
  for (auto& br : branches)
    if (br.start + static_cast<int>(br.omegas.size()) ==
        static_cast<int>(sweep.spectra.size()))
      br.died_early = false;
  return branches;
}

RescaledLimit rescaled_limit(const BranchTrace& branch) {
  const auto n = branch.rescaled.size();
  if (n < 3) throw InsufficientFamily("rescaled_limit: need at least three samples");

  const double first = std::abs(branch.rescaled.front());
  const double last = std::abs(branch.rescaled.back());
  if (last > 1.0 && last > 5.0 * std::max(first, 1e-300))
    throw NotSmallBranch("rescaled_limit: |lambda| is not O(m^2 - omega^2) along the branch");

  // Neville extrapolation to eps^2 = 0 over the last <= 4 samples
  const size_t use = std::min<size_t>(4, n);
  std::vector<double> t(use);
  std::vector<Complex> p(use);
  for (size_t i = 0; i < use; ++i) {
    const double omega = branch.omegas[n - use + i];
    t[i] = branch.m * branch.m - omega * omega;
    p[i] = branch.rescaled[n - use + i];
  }
  Complex prev_order = p[use - 1];
  for (size_t level = 1; level < use; ++level) {
    for (size_t i = 0; i + level < use; ++i)
      p[i] = (t[i + level] * p[i] - t[i] * p[i + 1]) / (t[i + level] - t[i]);
    if (level == use - 2) prev_order = p[0];
  }
  RescaledLimit out;
  out.lambda_b = p[0];
  out.error = std::abs(p[0] - prev_order);
  out.points_used = static_cast<int>(use);
  return out;
}

NlsReference nls_reference(int k, double m, const Grid1D& grid) {
  const int nr = grid.npoints / 2 + 1;
  const auto prof = profiles::nls_ground_state(1, k, m, grid.L, nr);
  const auto ops = linearize::assemble_nls_linearization(prof, m, k, grid);
  const double edge = 1.0 / (2.0 * m);
  spectra::ClassifyOptions cls;
  cls.rho_loc = 1e-4;  // reference kernel tails on moderate boxes
  const auto spec = spectra::classify(spectra::eigensolve(ops.jl),
                                      linearize::essential_bands(0.0, edge), grid, cls);
  NlsReference ref;
  ref.k = k;
  ref.m = m;
  for (size_t i = 0; i < spec.eigenvalues.size(); ++i) {
    if (spec.labels[i] != spectra::Label::point && spec.labels[i] != spectra::Label::embedded_candidate)
      continue;
    const Complex l = spec.eigenvalues[i];
    if (std::abs(l) < 1e-4 * m)
      ++ref.kernel_cluster_size;
    else
      ref.nonzero_point.push_back(l);
  }
  // l_minus point spectrum: symmetric, localized below the continuum edge
  const auto lm = spectra::eigensolve(ops.l_minus);
  for (size_t i = 0; i < lm.eigenvalues.size(); ++i) {
    const double e = lm.eigenvalues[i].real();
    if (e >= edge - 1e-6) continue;
    const CVector z = lm.eigenvectors.col(static_cast<long>(i));
    double outer = 0.0;
    for (int g = 0; g < grid.npoints; ++g)
      if (std::abs(grid.node(g)) > grid.L / 2.0) outer += std::norm(z[g]);
    if (std::sqrt(outer) / z.norm() < 1e-4) ref.l_minus_point.push_back(e);
  }
  return ref;
}

std::string verdict_name(NlsVerdict v) {
  switch (v) {
    case NlsVerdict::in_nls_spectrum: return "in-nls-spectrum";
    case NlsVerdict::in_l_minus_spectrum: return "in-l-minus-spectrum";
    case NlsVerdict::violation: return "violation";
  }
  return "?";
}

NlsVerdict compare_nls(Complex lambda_b, const NlsReference& ref, double tol) {
  double d_nls = ref.kernel_cluster_size > 0 ? std::abs(lambda_b) : 1e300;
  for (const auto& l : ref.nonzero_point) d_nls = std::min(d_nls, std::abs(lambda_b - l));
  if (d_nls <= tol) return NlsVerdict::in_nls_spectrum;
  double d_lm = 1e300;
  for (double e : ref.l_minus_point) d_lm = std::min(d_lm, std::abs(lambda_b - e));
  if (d_lm <= tol) return NlsVerdict::in_l_minus_spectrum;
  return NlsVerdict::violation;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::STABLE: return "STABLE";
    case Verdict::UNSTABLE: return "UNSTABLE";
    case Verdict::INCONCLUSIVE: return "INCONCLUSIVE";
  }
  return "?";
}

std::vector<StabilityEntry> stability_report(const SweepResult& sweep,
                                             const std::vector<evans::EvansScan>& scans,
                                             double tol) {
  if (scans.size() != sweep.spectra.size())
    throw DimensionMismatch("stability_report: one Evans scan per omega required");
  std::vector<StabilityEntry> out;
  for (size_t i = 0; i < sweep.spectra.size(); ++i) {
    StabilityEntry e;
    e.omega = sweep.omegas[i];
    const auto& spec = sweep.spectra[i];
    double worst = tol;
    for (size_t j = 0; j < spec.eigenvalues.size(); ++j) {
      if (spec.labels[j] != spectra::Label::point &&
          spec.labels[j] != spectra::Label::embedded_candidate)
        continue;
      if (spec.eigenvalues[j].real() > worst) {
        worst = spec.eigenvalues[j].real();
        e.offending = spec.eigenvalues[j];
        e.grid_unstable = true;
      }
    }
    e.evans_unstable = scans[i].winding != 0;
    if (e.grid_unstable == e.evans_unstable)
      e.verdict = e.grid_unstable ? Verdict::UNSTABLE : Verdict::STABLE;
    else
      e.verdict = Verdict::INCONCLUSIVE;
    out.push_back(e);
  }
  return out;
}

}  // namespace diracstab::continuation
