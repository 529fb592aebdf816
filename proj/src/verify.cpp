#include "diracstab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "diracstab/errors.hpp"
#include "diracstab/lapack_eig.hpp"

namespace diracstab::verify {

namespace {

double bracket(double x) { return std::sqrt(1.0 + x * x); }  // <x>

double bump(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }

double bump_prime(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double d = 1.0 - t * t;
  return bump(t) * (-2.0 * t / (d * d));
}

// scaling-and-squaring matrix exponential with a truncated Taylor series;
// plenty for the small Dirac blocks this module exponentiates
CMatrix expm(const CMatrix& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.5) ++squarings;
  const CMatrix b = a / std::pow(2.0, squarings);
  CMatrix term = CMatrix::Identity(a.rows(), a.cols());
  CMatrix sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

double operator_norm(const CMatrix& a) {
  return Eigen::JacobiSVD<CMatrix>(a).singularValues()(0);
}

}  // namespace

WeightedNorm WeightedNorm::power(const Grid1D& grid, double s) {
  WeightedNorm w{grid, Vector(grid.npoints)};
  for (int i = 0; i < grid.npoints; ++i) w.weight[i] = std::pow(bracket(grid.node(i)), s);
  return w;
}

WeightedNorm WeightedNorm::exponential(const Grid1D& grid, double tau) {
  WeightedNorm w{grid, Vector(grid.npoints)};
  for (int i = 0; i < grid.npoints; ++i) w.weight[i] = std::exp(tau * std::abs(grid.node(i)));
  return w;
}

double WeightedNorm::operator()(const CVector& u) const {
  const int n = grid.npoints;
  double acc = 0.0;
  for (long i = 0; i < u.size(); ++i) {
    const double w = weight[static_cast<int>(i % n)];
    acc += w * w * std::norm(u[i]);
  }
  return std::sqrt(grid.spacing() * acc);
}

double WeightedNorm::operator()(const Vector& u) const {
  CVector c = u.cast<Complex>();
  return (*this)(c);
}

std::vector<SampleFn> sample_family(int count, double lo, double hi, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double span = hi - lo;
  std::vector<SampleFn> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double c = lo + span * (0.15 + 0.7 * unit(rng));
    const double rmax = 0.95 * std::min(c - lo, hi - c);
    const double r = rmax * (0.3 + 0.7 * unit(rng));
    const double amp = 0.2 + 1.8 * unit(rng);
    if (i % 2 == 0) {
      out.push_back({[=](double x) { return amp * bump((x - c) / r); },
                     [=](double x) { return amp * bump_prime((x - c) / r) / r; }});
    } else {
      // Gaussian under a wide bump cutoff so the support stays inside (lo, hi)
      const double sigma = r / 3.0;
      const double c0 = (lo + hi) / 2.0, r0 = span / 2.0;
      auto gauss = [=](double x) { return amp * std::exp(-0.5 * std::pow((x - c) / sigma, 2)); };
      out.push_back(
          {[=](double x) { return gauss(x) * bump((x - c0) / r0); },
           [=](double x) {
             return gauss(x) * (bump_prime((x - c0) / r0) / r0 -
                                (x - c) / (sigma * sigma) * bump((x - c0) / r0));
           }});
    }
  }
  return out;
}

DerrickReport derrick_demo(const Grid1D& grid) {
  const int n = grid.npoints;
  Vector theta(n), theta_p(n), pot(n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.node(i);
    const double sech = 1.0 / std::cosh(x);
    theta[i] = std::sqrt(2.0) * sech;
    theta_p[i] = -std::sqrt(2.0) * sech * std::tanh(x);
    pot[i] = 1.0 - 6.0 * sech * sech;  // g'(theta) with g(theta) = theta - theta^3
  }

  DerrickReport rep;
  rep.kinetic = grid.quad(Vector(0.5 * theta_p.array().square()));
  rep.potential =
      grid.quad(Vector(0.5 * theta.array().square() - 0.25 * theta.array().square().square()));
  rep.dilation_residual = std::abs(-rep.kinetic + rep.potential);  // (n-2) T + n V, n = 1

  const Matrix d = differentiation_matrix(grid);
  Matrix lop = d.transpose() * d;  // -d^2/dx^2 (d is skew-symmetric)
  lop.diagonal() += pot;

  const auto sym = lapack::eig_symmetric(lop);
  rep.min_eigenvalue = sym.values[0];
  rep.growth_rate = std::sqrt(std::max(0.0, -sym.values[0]));
  rep.zero_mode_residual = (lop * theta_p).norm() / theta_p.norm();

  // first-order form of rho_tt = -l rho; the unstable mode sits at +c
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topRightCorner(n, n) = Matrix::Identity(n, n);
  block.bottomLeftCorner(n, n) = -lop;
  const auto eig = lapack::eig_general(block);
  rep.growth_rate_block = eig.values.real().maxCoeff();
  return rep;
}

InequalityReport hardy_sample(const WeightFn& w, const Grid1D& grid,
                              const std::vector<SampleFn>& samples) {
  const double h = grid.spacing();
  std::vector<double> wv, wp;
  std::vector<double> xs;
  for (int i = 0; i < grid.npoints; ++i) {
    const double x = grid.node(i);
    if (x <= 0.0) continue;
    const double dw = w.derivative(x);
    if (dw <= 0.0)
      throw NonmonotoneWeight("hardy_sample: w' <= 0 at x = " + std::to_string(x));
    xs.push_back(x);
    wv.push_back(w.value(x));
    wp.push_back(dw);
  }

  InequalityReport rep;
  rep.id = "generalized-hardy";
  rep.constant = 4.0;
  for (size_t s = 0; s < samples.size(); ++s) {
    double lhs = 0.0, rhs = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
      const double f = samples[s].value(xs[i]);
      const double fp = samples[s].derivative(xs[i]);
      lhs += wp[i] * f * f;
      rhs += wv[i] * wv[i] / wp[i] * fp * fp;
    }
    lhs *= h;
    rhs *= 4.0 * h;
    const double ratio = lhs / rhs;
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_sample = static_cast<int>(s);
    }
    ++rep.samples;
  }
  rep.pass = rep.worst_ratio <= 1.0 + rep.tol;
  return rep;
}

InequalityReport matrix_exp_bound(const std::vector<double>& lambdas, double m,
                                  const clifford::DiracRep& rep, const Vector& xs) {
  InequalityReport out;
  out.id = "matrix-exp-c1";
  const Complex I(0.0, 1.0);
  for (size_t s = 0; s < lambdas.size(); ++s) {
    const double lambda = lambdas[s];
    if (std::abs(lambda) <= m)
      throw ThresholdLambda("matrix_exp_bound: need |lambda| > m for the C1 branch");
    const double c1 = std::sqrt((std::abs(lambda) + m) / (std::abs(lambda) - m));
    const CMatrix gen =
        I * (rep.alpha[0] * (m * rep.beta - lambda * CMatrix::Identity(rep.N, rep.N)));
    double worst = 0.0;
    for (long i = 0; i < xs.size(); ++i)
      worst = std::max(worst, operator_norm(expm(gen * xs[i])));
    const double ratio = worst / c1;
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_sample = static_cast<int>(s);
      out.constant = c1;
    }
    ++out.samples;
  }
  out.pass = out.worst_ratio <= 1.0 + out.tol;
  return out;
}

ThresholdGrowth matrix_exp_threshold(double m, const clifford::DiracRep& rep,
                                     const Vector& xs) {
  const Complex I(0.0, 1.0);
  const CMatrix gen = I * (rep.alpha[0] * (m * rep.beta - m * CMatrix::Identity(rep.N, rep.N)));
  double num = 0.0, den = 0.0;
  std::vector<double> norms(xs.size());
  for (long i = 0; i < xs.size(); ++i) {
    norms[i] = operator_norm(expm(gen * xs[i]));
    const double b = bracket(xs[i]);
    num += norms[i] * b;
    den += b * b;
  }
  ThresholdGrowth fit;
  fit.kappa = num / den;
  for (long i = 0; i < xs.size(); ++i)
    fit.worst_excess = std::max(fit.worst_excess, norms[i] / (fit.kappa * bracket(xs[i])) - 1.0);
  return fit;
}

InequalityReport carleman_sample(double lambda, double m, const std::vector<double>& taus,
                                 double support_radius, const clifford::DiracRep& rep,
                                 const Grid1D& grid, int n_samples, unsigned seed) {
  const double margin = 4.0 * grid.spacing();
  const double lo = support_radius + margin;
  const double hi = grid.L - margin;
  if (lo >= hi)
    throw DimensionMismatch("carleman_sample: support window is empty on this grid");

  for (double tau : taus) {
    if (tau <= 0.0) throw HypothesisFails("carleman_sample: tau must be positive");
    // admissibility at the inner support radius (phi'' = 0, n = 1):
    //   tau^2 / 2 >= 3 / (8 r) + m / (8 r tau),   lambda^2 - m^2 + tau^2 / 2 > 0
    const double r = lo;
    if (0.5 * tau * tau < 3.0 / (8.0 * r) + m / (8.0 * r * tau))
      throw HypothesisFails("carleman_sample: support too close to the origin for this tau");
    if (lambda * lambda - m * m + 0.5 * tau * tau <= 0.0)
      throw HypothesisFails("carleman_sample: lambda inside the forbidden window");
  }

  const auto up = sample_family(n_samples, lo, hi, seed);
  const auto dn = sample_family(n_samples, lo, hi, seed + 1);
  std::mt19937 rng(seed + 2);
  std::uniform_real_distribution<double> side(0.0, 1.0);

  InequalityReport out;
  out.id = "carleman-linear-weight";
  const Complex I(0.0, 1.0);
  const CMatrix alpha = rep.alpha[0];
  const CMatrix beta = rep.beta;

  for (int s = 0; s < n_samples; ++s) {
    const double sgn = side(rng) < 0.5 ? 1.0 : -1.0;  // support on one side of 0
    for (size_t t = 0; t < taus.size(); ++t) {
      const double tau = taus[t];
      double lhs = 0.0, rhs = 0.0;
      for (int i = 0; i < grid.npoints; ++i) {
        const double x = grid.node(i);
        const double r = std::abs(x);
        if (r <= support_radius) continue;
        Eigen::Vector2cd v(up[s].value(sgn * x), dn[s].value(sgn * x));
        Eigen::Vector2cd vp(sgn * up[s].derivative(sgn * x), sgn * dn[s].derivative(sgn * x));
        if (v.norm() == 0.0 && vp.norm() == 0.0) continue;
        const Eigen::Vector2cd dv = -I * (alpha * vp) + m * (beta * v) - lambda * v;
        const double w = std::exp(tau * r);
        lhs += (lambda * lambda - m * m + 0.5 * tau * tau) * w * w * v.squaredNorm();
        rhs += (0.25 + 2.0 * lambda * lambda * r / tau + 2.0 * r * tau) * w * w * dv.squaredNorm();
      }
      const double ratio = std::sqrt(lhs / rhs);
      if (ratio > out.worst_ratio) {
        out.worst_ratio = ratio;
        out.worst_sample = static_cast<int>(s * taus.size() + t);
      }
      ++out.samples;
    }
  }
  out.pass = out.worst_ratio <= 1.0 + out.tol;
  return out;
}

RatioRecord dirac_hardy_ratio(double lambda, double s, double m,
                              const clifford::DiracRep& rep, const Grid1D& grid,
                              int n_samples, unsigned seed) {
  if (std::abs(std::abs(lambda) - m) < 1e-9 * std::max(m, 1.0))
    throw ThresholdLambda("dirac_hardy_ratio: lambda at a threshold needs the <x>^{s+2} weight");

  // unit-scale supports keep <x>^s and <x>^{s+1} comparable, so the dilation
  // family probes the differential scaling rather than the weight mismatch
  const double base = std::min(grid.L / 3.0, 1.5);
  const auto up = sample_family(n_samples, -base, base, seed);
  const auto dn = sample_family(n_samples, -base, base, seed + 1);

  RatioRecord rec;
  rec.lambda = lambda;
  rec.s = s;
  const auto ws = WeightedNorm::power(grid, s);
  const auto ws1 = WeightedNorm::power(grid, s + 1.0);
  const Complex I(0.0, 1.0);
  const CMatrix alpha = rep.alpha[0];
  const CMatrix beta = rep.beta;
  const int n = grid.npoints;

  for (double sigma : {1.0, 2.0, 4.0, 8.0}) {
    double worst = 0.0;
    for (int k = 0; k < n_samples; ++k) {
      CVector u(2 * n), du(2 * n), op(2 * n);
      for (int i = 0; i < n; ++i) {
        const double x = grid.node(i);
        const Eigen::Vector2cd v(up[k].value(x * sigma), dn[k].value(x * sigma));
        const Eigen::Vector2cd vp(up[k].derivative(x * sigma) * sigma,
                                  dn[k].derivative(x * sigma) * sigma);
        const Eigen::Vector2cd dv = -I * (alpha * vp) + m * (beta * v) - lambda * v;
        u[i] = v[0];
        u[n + i] = v[1];
        du[i] = vp[0];
        du[n + i] = vp[1];
        op[i] = dv[0];
        op[n + i] = dv[1];
      }
      const double h1 = std::hypot(ws(u), ws(du));
      const double den = ws1(op);
      if (den > 0.0) worst = std::max(worst, h1 / den);
    }
    rec.sigmas.push_back(sigma);
    rec.worst_ratio.push_back(worst);
  }
  const auto [lo, hi] = std::minmax_element(rec.worst_ratio.begin(), rec.worst_ratio.end());
  rec.spread = *hi / *lo;
  return rec;
}

}  // namespace diracstab::verify
