#include "diracstab/spectra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include "diracstab/errors.hpp"
#include "diracstab/lapack_eig.hpp"

namespace diracstab::spectra {

std::string label_name(Label label) {
  switch (label) {
    case Label::unclassified: return "unclassified";
    case Label::point: return "point";
    case Label::essential_artifact: return "essential-artifact";
    case Label::embedded_candidate: return "embedded-candidate";
    case Label::threshold: return "threshold";
  }
  return "?";
}

namespace {

bool symmetric_kind(linearize::OperatorKind kind) {
  using K = linearize::OperatorKind;
  return kind == K::L || kind == K::L_minus || kind == K::V || kind == K::l_plus ||
         kind == K::l_minus;
}

void sort_pairs(SpectrumResult& r) {
  std::vector<int> idx(r.eigenvalues.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (r.eigenvalues[a].real() != r.eigenvalues[b].real())
      return r.eigenvalues[a].real() < r.eigenvalues[b].real();
    return r.eigenvalues[a].imag() < r.eigenvalues[b].imag();
  });
  std::vector<Complex> vals(idx.size());
  CMatrix vecs(r.eigenvectors.rows(), r.eigenvectors.cols());
  const bool with_res = r.residuals.size() == static_cast<long>(idx.size());
  Vector res(with_res ? r.residuals.size() : 0);
  for (size_t i = 0; i < idx.size(); ++i) {
    vals[i] = r.eigenvalues[idx[i]];
    vecs.col(i) = r.eigenvectors.col(idx[i]);
    if (with_res) res[static_cast<long>(i)] = r.residuals[idx[i]];
  }
  r.eigenvalues = std::move(vals);
  r.eigenvectors = std::move(vecs);
  if (with_res) r.residuals = std::move(res);
}

// residuals in column chunks: two real GEMMs per chunk keep memory flat
void compute_residuals(SpectrumResult& r, const Matrix& a) {
  const long n = a.rows();
  const long npairs = static_cast<long>(r.eigenvalues.size());
  r.residuals.resize(npairs);
  const long chunk = std::min<long>(256, npairs);
  Matrix zr(n, chunk), zi(n, chunk);
  for (long s = 0; s < npairs; s += chunk) {
    const long w = std::min(chunk, npairs - s);
    for (long j = 0; j < w; ++j) {
      zr.col(j) = r.eigenvectors.col(s + j).real();
      zi.col(j) = r.eigenvectors.col(s + j).imag();
    }
    const Matrix wr = a * zr.leftCols(w);
    const Matrix wi = a * zi.leftCols(w);
    for (long j = 0; j < w; ++j) {
      const Complex lam = r.eigenvalues[static_cast<size_t>(s + j)];
      const CVector z = r.eigenvectors.col(s + j);
      const CVector az =
          wr.col(j).cast<Complex>() + Complex(0, 1) * wi.col(j).cast<Complex>();
      r.residuals[s + j] = (az - lam * z).norm();
    }
  }
}

// inverse subspace iteration around zero: replaces the near-zero cluster's
// eigenpairs with Rayleigh-Ritz refinements from a common invariant subspace.
// When the off-diagonal blocks B, -C of A = [[0, B], [-C, 0]] are supplied,
// each inverse step uses two half-size LU solves instead of a full-size one.
// Returns the polished indices.
std::vector<int> polish_zero_cluster(SpectrumResult& r, const Matrix& a, double radius,
                                     const Matrix* bblk = nullptr,
                                     const Matrix* cblk = nullptr) {
  std::vector<int> cluster;
  for (size_t i = 0; i < r.eigenvalues.size(); ++i)
    if (std::abs(r.eigenvalues[i]) < radius) cluster.push_back(static_cast<int>(i));
  if (cluster.empty()) return cluster;

  const auto n = a.rows();
  const int nc = static_cast<int>(cluster.size());
  std::mt19937 rng(0x5eed);
  std::normal_distribution<double> gauss;
  Matrix q(n, nc);
  for (long i = 0; i < n; ++i)
    for (int j = 0; j < nc; ++j) q(i, j) = gauss(rng);

  std::optional<Eigen::PartialPivLU<Matrix>> lu_a, lu_b, lu_c;
  if (bblk != nullptr && cblk != nullptr) {
    lu_b.emplace(*bblk);
    lu_c.emplace(*cblk);
  } else {
    lu_a.emplace(a);
  }
  auto solve = [&](const Matrix& rhs) -> Matrix {
    if (lu_a) return lu_a->solve(rhs);
    // A z = rhs splits: B z_2 = rhs_1 and -C z_1 = rhs_2
    const long h = rhs.rows() / 2;
    Matrix z(rhs.rows(), rhs.cols());
    z.topRows(h) = -lu_c->solve(rhs.bottomRows(h));
    z.bottomRows(h) = lu_b->solve(rhs.topRows(h));
    return z;
  };

  for (int it = 0; it < 8; ++it) {
    Matrix z = solve(q);
    Eigen::HouseholderQR<Matrix> qr(z);
    q = qr.householderQ() * Matrix::Identity(n, nc);
  }
  const Matrix h = q.transpose() * a * q;
  const auto small = lapack::eig_general(h);
  for (int j = 0; j < nc; ++j) {
    CVector z = q.cast<Complex>() * small.vectors.col(j);
    z /= z.norm();
    r.eigenvalues[cluster[j]] = small.values[j];
    r.eigenvectors.col(cluster[j]) = z;
  }
  return cluster;
}

// Reflection symmetry x -> -x of the half-size reduced matrix, with a fixed
// sign per component block. When present, the dense eigensolve splits into
// two half-size parity sectors (a ~4x cheaper QR iteration); the eigenpair
// residuals computed against the full operator validate the split.
struct SectorVec {
  long i0, i1;  // support indices (i1 = -1 for a self-mirrored node)
  double c0, c1;
};

struct ParitySplit {
  bool found = false;
  std::vector<int> signs;  // per component block
};

ParitySplit detect_parity(const Matrix& m, int ng) {
  ParitySplit out;
  const long dim = m.rows();
  if (ng <= 1 || ng % 2 != 0 || dim % ng != 0) return out;
  const long ncomp = dim / ng;
  if (ncomp < 1 || ncomp > 2) return out;
  const double tol = 1e-12 * m.cwiseAbs().maxCoeff();
  const auto candidates = ncomp == 1 ? std::vector<std::vector<int>>{{1}, {-1}}
                                     : std::vector<std::vector<int>>{{1, 1}, {1, -1}};
  auto mirror = [&](long i) {
    const long c = i / ng, g = i % ng;
    return c * ng + (ng - g) % ng;
  };
  for (const auto& s : candidates) {
    bool ok = true;
    for (long i = 0; i < dim && ok; ++i) {
      const long pi = mirror(i);
      const double si = s[static_cast<size_t>(i / ng)];
      for (long j = 0; j < dim; ++j) {
        const double mirrored = si * s[static_cast<size_t>(j / ng)] * m(mirror(j), pi);
        if (std::abs(mirrored - m(j, i)) > tol) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      out.found = true;
      out.signs = s;
      return out;
    }
  }
  return out;
}

std::array<std::vector<SectorVec>, 2> sector_bases(const std::vector<int>& signs, int ng) {
  std::array<std::vector<SectorVec>, 2> out;  // [even, odd] under signed reflection
  const double r = 1.0 / std::sqrt(2.0);
  for (long c = 0; c < static_cast<long>(signs.size()); ++c) {
    const double s = signs[static_cast<size_t>(c)];
    for (int g : {0, ng / 2})
      out[s > 0 ? 0 : 1].push_back({c * ng + g, -1, 1.0, 0.0});
    for (int g = 1; g < ng / 2; ++g) {
      const long i = c * ng + g, ip = c * ng + (ng - g);
      out[0].push_back({i, ip, r, s * r});
      out[1].push_back({i, ip, r, -s * r});
    }
  }
  return out;
}

Matrix project_sector(const Matrix& m, const std::vector<SectorVec>& basis) {
  const long nb = static_cast<long>(basis.size());
  Matrix out(nb, nb);
  for (long bj = 0; bj < nb; ++bj) {
    const auto& vb = basis[static_cast<size_t>(bj)];
    for (long bi = 0; bi < nb; ++bi) {
      const auto& va = basis[static_cast<size_t>(bi)];
      double acc = va.c0 * vb.c0 * m(va.i0, vb.i0);
      if (vb.i1 >= 0) acc += va.c0 * vb.c1 * m(va.i0, vb.i1);
      if (va.i1 >= 0) acc += va.c1 * vb.c0 * m(va.i1, vb.i0);
      if (va.i1 >= 0 && vb.i1 >= 0) acc += va.c1 * vb.c1 * m(va.i1, vb.i1);
      out(bi, bj) = acc;
    }
  }
  return out;
}

CVector lift_sector(const std::vector<SectorVec>& basis, const CVector& y, long dim) {
  CVector x = CVector::Zero(dim);
  for (size_t b = 0; b < basis.size(); ++b) {
    x[basis[b].i0] += basis[b].c0 * y[static_cast<long>(b)];
    if (basis[b].i1 >= 0) x[basis[b].i1] += basis[b].c1 * y[static_cast<long>(b)];
  }
  return x;
}

}  // namespace

SpectrumResult eigensolve(const linearize::RealBlockOperator& op, const EigenOptions& opts) {
  const Matrix& a = op.matrix;
  if (!a.allFinite()) throw std::invalid_argument("eigensolve: matrix has non-finite entries");
  const auto n = a.rows();

  SpectrumResult out;
  out.grid = op.grid;
  out.block_dim = op.block_dim;
  out.op_norm = a.cwiseAbs().colwise().sum().maxCoeff();

  if (symmetric_kind(op.kind)) {
    const auto sym = lapack::eig_symmetric(a);
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (long i = 0; i < n; ++i) {
      out.eigenvalues[static_cast<size_t>(i)] = sym.values[i];
      out.eigenvectors.col(i) = sym.vectors.col(i).cast<Complex>();
    }
    sort_pairs(out);
    compute_residuals(out, a);
    return out;
  }

  const auto half = n / 2;
  const bool block_form = !opts.force_general && n % 2 == 0 &&
                          a.topLeftCorner(half, half).cwiseAbs().maxCoeff() == 0.0 &&
                          a.bottomRightCorner(half, half).cwiseAbs().maxCoeff() == 0.0;

  // a defective zero cluster splits like (eps * ||.||)^(1/4) under QR: the
  // polish radius must cover that smear (squared norms in the half-size path)
  const double mach = std::numeric_limits<double>::epsilon();

  if (!block_form) {
    const auto full = lapack::eig_general(a);
    out.eigenvalues.assign(full.values.data(), full.values.data() + n);
    out.eigenvectors = full.vectors;
    for (long i = 0; i < n; ++i) out.eigenvectors.col(i) /= out.eigenvectors.col(i).norm();
    polish_zero_cluster(out, a,
                        std::max(opts.zero_cluster_scale * op.m,
                                 10.0 * std::pow(mach * out.op_norm, 0.25)));
  } else {
    // A = [[0, B], [-C, 0]]: eigenpairs from the half-size M = -BC.
    // M x = lambda^2 x, zeta = (x, -C x / lambda); +-lambda exactly paired.
    const Matrix b = a.topRightCorner(half, half);
    const Matrix c = -a.bottomLeftCorner(half, half);
    const Matrix msq = -b * c;

    lapack::EigResult halfeig;
    const auto parity = detect_parity(msq, op.grid.npoints);
    if (parity.found) {
      halfeig.values.resize(half);
      halfeig.vectors.resize(half, half);
      long at = 0;
      for (const auto& basis : sector_bases(parity.signs, op.grid.npoints)) {
        const auto sec = lapack::eig_general(project_sector(msq, basis));
        for (long j = 0; j < sec.values.size(); ++j, ++at) {
          halfeig.values[at] = sec.values[j];
          halfeig.vectors.col(at) = lift_sector(basis, sec.vectors.col(j), half);
        }
      }
    } else {
      halfeig = lapack::eig_general(msq);
    }

    // chunked real GEMMs: residuals against M (with zeta assembled exactly
    // from x, the full residual is ||M x - lambda^2 x|| / (|lambda| ||zeta||))
    // and the lower block y = -C x / lambda of each eigenvector
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    out.residuals.resize(n);
    {
      const long chunk = std::min<long>(256, half);
      Matrix xr(half, chunk), xi(half, chunk);
      for (long s0 = 0; s0 < half; s0 += chunk) {
        const long w = std::min(chunk, half - s0);
        for (long j = 0; j < w; ++j) {
          xr.col(j) = halfeig.vectors.col(s0 + j).real();
          xi.col(j) = halfeig.vectors.col(s0 + j).imag();
        }
        const Matrix mr = msq * xr.leftCols(w);
        const Matrix mi = msq * xi.leftCols(w);
        const Matrix cr = c * xr.leftCols(w);
        const Matrix ci = c * xi.leftCols(w);
        for (long j = 0; j < w; ++j) {
          const long jj = s0 + j;
          const Complex mu = halfeig.values[jj];
          const Complex lambda = std::sqrt(mu);
          const CVector x = halfeig.vectors.col(jj);
          const CVector cx =
              cr.col(j).cast<Complex>() + Complex(0, 1) * ci.col(j).cast<Complex>();
          CVector y;
          double res;
          if (std::abs(lambda) > 1e-300) {
            const CVector mx =
                mr.col(j).cast<Complex>() + Complex(0, 1) * mi.col(j).cast<Complex>();
            const double halfres = (mx - mu * x).norm();
            y = -cx / lambda;
            res = (halfres + std::abs(lambda * lambda - mu) * x.norm()) / std::abs(lambda);
          } else {
            y = CVector::Zero(half);
            res = cx.norm();
          }
          for (int s = 0; s < 2; ++s) {
            const Complex lam = s == 0 ? lambda : -lambda;
            CVector z(n);
            z.head(half) = x;
            z.tail(half) = s == 0 ? y : CVector(-y);
            const double zn = z.norm();
            z /= zn;
            out.eigenvalues[static_cast<size_t>(2 * jj + s)] = lam;
            out.eigenvectors.col(2 * jj + s) = z;
            out.residuals[2 * jj + s] = res / zn;
          }
        }
      }
    }
    const double msq_norm = msq.cwiseAbs().colwise().sum().maxCoeff();
    const auto polished =
        polish_zero_cluster(out, a,
                            std::max(opts.zero_cluster_scale * op.m,
                                     10.0 * std::pow(mach * msq_norm, 0.25)),
                            &b, &c);
    for (int i : polished) {
      const CVector z = out.eigenvectors.col(i);
      const Vector ar = a * Vector(z.real());
      const Vector ai = a * Vector(z.imag());
      const CVector az = ar.cast<Complex>() + Complex(0, 1) * ai.cast<Complex>();
      out.residuals[i] = (az - out.eigenvalues[static_cast<size_t>(i)] * z).norm();
    }
  }

  sort_pairs(out);
  if (out.residuals.size() != n) compute_residuals(out, a);
  return out;
}

SpectrumResult classify(SpectrumResult raw, const linearize::EssentialBands& bands,
                        const Grid1D& grid, const ClassifyOptions& opts) {
  const auto n = raw.eigenvalues.size();
  const int ng = grid.npoints;
  const int bd = raw.block_dim > 0 ? raw.block_dim
                                   : static_cast<int>(raw.eigenvectors.rows()) / ng;
  raw.bands = bands;
  raw.localization.resize(static_cast<long>(n));
  raw.labels.assign(n, Label::unclassified);

  for (size_t i = 0; i < n; ++i) {
    const CVector z = raw.eigenvectors.col(static_cast<long>(i));
    double outer = 0.0;
    for (int c = 0; c < bd; ++c)
      for (int g = 0; g < ng; ++g)
        if (std::abs(grid.node(g)) > grid.L / 2.0) outer += std::norm(z[c * ng + g]);
    const double rho = std::sqrt(outer) / z.norm();
    raw.localization[static_cast<long>(i)] = rho;

    const Complex lambda = raw.eigenvalues[i];
    if (bands.endpoint_distance(lambda) < opts.tol_thr) {
      raw.labels[i] = Label::threshold;
    } else if (rho < opts.rho_loc) {
      raw.labels[i] = bands.distance(lambda) > opts.band_tol ? Label::point
                                                             : Label::embedded_candidate;
    } else {
      raw.labels[i] = Label::essential_artifact;
    }
  }
  return raw;
}

std::pair<Complex, Complex> krein(const CVector& zeta, const Matrix& l, const Matrix& jbig,
                                  double h) {
  auto apply = [&](const Matrix& a) {
    const Vector re = a * Vector(zeta.real());
    const Vector im = a * Vector(zeta.imag());
    return CVector(re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>());
  };
  return {zeta.dot(apply(l)) * h, zeta.dot(apply(jbig)) * h};
}

void attach_krein(SpectrumResult& spectrum, const linearize::RealBlockOperator& l_op,
                  const Matrix& jbig) {
  const double h = spectrum.grid.spacing();
  spectrum.krein_l.clear();
  spectrum.krein_j.clear();
  const long n = l_op.matrix.rows();
  const long npairs = static_cast<long>(spectrum.eigenvalues.size());
  const long chunk = std::min<long>(256, std::max<long>(npairs, 1));
  Matrix zr(n, chunk), zi(n, chunk);
  for (long s = 0; s < npairs; s += chunk) {
    const long w = std::min(chunk, npairs - s);
    for (long j = 0; j < w; ++j) {
      zr.col(j) = spectrum.eigenvectors.col(s + j).real();
      zi.col(j) = spectrum.eigenvectors.col(s + j).imag();
    }
    const Matrix lr = l_op.matrix * zr.leftCols(w);
    const Matrix li = l_op.matrix * zi.leftCols(w);
    const Matrix jr = jbig * zr.leftCols(w);
    const Matrix ji = jbig * zi.leftCols(w);
    for (long j = 0; j < w; ++j) {
      const CVector z = spectrum.eigenvectors.col(s + j);
      const CVector lz =
          lr.col(j).cast<Complex>() + Complex(0, 1) * li.col(j).cast<Complex>();
      const CVector jz =
          jr.col(j).cast<Complex>() + Complex(0, 1) * ji.col(j).cast<Complex>();
      spectrum.krein_l.push_back(z.dot(lz) * h);
      spectrum.krein_j.push_back(z.dot(jz) * h);
    }
  }
}

TwoOmegaReport verify_2omega(const profiles::SolitaryWave& wave, const clifford::DiracRep& rep,
                             const linearize::RealBlockOperator& l_op,
                             const SpectrumResult& spectrum) {
  if (!rep.alpha0) throw MissingAlpha0("verify_2omega: representation lacks alpha0");
  if (rep.N != wave.N) throw DimensionMismatch("verify_2omega: dimensions disagree");

  const int ng = wave.grid.npoints;
  const int nn = wave.N;
  const CMatrix rotated = *rep.alpha0 * wave.spinor;  // alpha0 phi, per node
  Vector psi(2 * nn * ng);
  for (int c = 0; c < nn; ++c)
    for (int g = 0; g < ng; ++g) {
      psi[c * ng + g] = rotated(c, g).real();
      psi[(nn + c) * ng + g] = rotated(c, g).imag();
    }

  TwoOmegaReport report;
  report.identity_residual =
      (l_op.matrix * psi + 2.0 * wave.omega * psi).cwiseAbs().maxCoeff();

  const Complex target(0.0, 2.0 * wave.omega);
  double best = std::numeric_limits<double>::infinity();
  size_t best_i = 0;
  for (size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    const double dist = std::abs(spectrum.eigenvalues[i] - target);
    if (dist < best) {
      best = dist;
      best_i = i;
    }
  }
  report.nearest = spectrum.eigenvalues[best_i];
  report.distance = best;
  if (spectrum.localization.size() > static_cast<long>(best_i))
    report.rho = spectrum.localization[static_cast<long>(best_i)];
  if (spectrum.labels.size() > best_i) report.label = spectrum.labels[best_i];
  return report;
}

std::vector<Complex> check_symmetry(const std::vector<Complex>& eigenvalues, double tol) {
  std::vector<Complex> unpaired;
  auto has = [&](Complex target) {
    for (const auto& mu : eigenvalues)
      if (std::abs(mu - target) <= tol) return true;
    return false;
  };
  for (const auto& lambda : eigenvalues) {
    if (std::abs(lambda) <= tol) continue;
    if (!has(-lambda) || !has(std::conj(lambda)) || !has(-std::conj(lambda)))
      unpaired.push_back(lambda);
  }
  return unpaired;
}

std::vector<Complex> off_axis_set(const std::vector<Complex>& eigenvalues, double re_tol) {
  std::vector<Complex> out;
  for (const auto& lambda : eigenvalues)
    if (std::abs(lambda.real()) > re_tol) out.push_back(lambda);
  return out;
}

double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto one_sided = [](const std::vector<Complex>& from, const std::vector<Complex>& to) {
    double worst = 0.0;
    for (const auto& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

EmbeddingReport embedding_invariance(const profiles::SolitaryWave& wave,
                                     const clifford::DiracRep& rep_a,
                                     const clifford::DiracRep& rep_b, double re_tol) {
  if (rep_b.N != 2 * rep_a.N)
    throw NotAnEmbedding("embedding_invariance: rep_b is not a doubling of rep_a");
  auto check_blocks = [&](const CMatrix& big, const CMatrix& small) {
    const int nn = rep_a.N;
    if (big.topRightCorner(nn, nn).cwiseAbs().maxCoeff() != 0.0 ||
        big.bottomLeftCorner(nn, nn).cwiseAbs().maxCoeff() != 0.0)
      throw NotAnEmbedding("embedding_invariance: block projector fails to commute");
    if ((big.topLeftCorner(nn, nn) - small).cwiseAbs().maxCoeff() != 0.0)
      throw NotAnEmbedding("embedding_invariance: doubled matrices do not restrict to rep_a");
  };
  for (size_t j = 0; j < rep_a.alpha.size(); ++j) check_blocks(rep_b.alpha[j], rep_a.alpha[j]);
  check_blocks(rep_b.beta, rep_a.beta);

  profiles::SolitaryWave wave_b = wave;
  wave_b.N = rep_b.N;
  wave_b.spinor = CMatrix::Zero(rep_b.N, wave.grid.npoints);
  wave_b.spinor.topRows(wave.N) = wave.spinor;

  const auto ops_a = linearize::assemble_nld_linearization(wave, clifford::realify(rep_a));
  const auto ops_b = linearize::assemble_nld_linearization(wave_b, clifford::realify(rep_b));
  const auto spec_a = eigensolve(ops_a.JL);
  const auto spec_b = eigensolve(ops_b.JL);

  EmbeddingReport report;
  report.off_axis_a = off_axis_set(spec_a.eigenvalues, re_tol);
  report.off_axis_b = off_axis_set(spec_b.eigenvalues, re_tol);
  report.hausdorff = hausdorff_distance(report.off_axis_a, report.off_axis_b);
  return report;
}

}  // namespace diracstab::spectra
