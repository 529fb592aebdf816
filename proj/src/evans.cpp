#include "diracstab/evans.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>

#include "diracstab/errors.hpp"
#include "diracstab/linearize.hpp"

namespace diracstab::evans {

namespace {

constexpr double kReTol = 1e-12;  // rate-sign tolerance

// +-sqrt(m^2 - (omega -+ i lambda)^2), multiplicity N/2 per sign pair (2N total)
std::vector<Complex> closed_form_rates(Complex lambda, double omega, double m, int n_comp) {
  std::vector<Complex> rates;
  for (double t : {1.0, -1.0}) {
    const Complex e = omega - t * Complex(0, 1) * lambda;
    const Complex r = std::sqrt(Complex(m * m) - e * e);
    for (int j = 0; j < n_comp / 2; ++j) {
      rates.push_back(r);
      rates.push_back(-r);
    }
  }
  return rates;
}

// natural cubic spline second derivatives on uniform nodes
Vector spline_second_derivatives(const Vector& x, const Vector& y) {
  const auto n = static_cast<int>(x.size());
  Vector m2 = Vector::Zero(n);
  if (n < 3) return m2;
  Vector diag(n - 2), rhs(n - 2), upper(n - 2);
  for (int i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
    diag[i - 1] = 2.0 * (h0 + h1);
    upper[i - 1] = h1;
    rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
  }
  // Thomas algorithm (lower diagonal equals the previous upper)
  for (int i = 1; i + 1 < n - 1; ++i) {
    const double w = (x[i + 1] - x[i]) / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (int i = n - 3; i >= 0; --i) {
    double v = rhs[i];
    if (i + 1 < n - 2) v -= upper[i] * m2[i + 2];
    m2[i + 1] = v / diag[i];
  }
  return m2;
}

double spline_eval(const Vector& x, const Vector& y, const Vector& m2, double t) {
  const auto n = static_cast<int>(x.size());
  if (t <= x[0] || t >= x[n - 1]) return 0.0;  // profile vanishes off the box
  const double h = x[1] - x[0];
  auto i = static_cast<int>((t - x[0]) / h);
  i = std::clamp(i, 0, n - 2);
  const double a = (x[i + 1] - t) / h, b = (t - x[i]) / h;
  return a * y[i] + b * y[i + 1] +
         ((a * a * a - a) * m2[i] + (b * b * b - b) * m2[i + 1]) * h * h / 6.0;
}

Complex wrap_angle(Complex dlog) {
  double a = dlog.imag();
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return {dlog.real(), a};
}

}  // namespace

AsymptoticRates asymptotic_rates(Complex lambda, double omega, double m,
                                 const clifford::DiracRep& rep) {
  AsymptoticRates out;
  out.lambda = lambda;
  out.omega = omega;
  out.m = m;
  out.rates = closed_form_rates(lambda, omega, m, rep.N);
  for (const auto& r : out.rates) {
    if (r.real() < -kReTol)
      ++out.n_minus;
    else if (r.real() > kReTol)
      ++out.n_plus;
    else
      ++out.n_zero;
  }
  return out;
}

EvansSystem::EvansSystem(const profiles::SolitaryWave& wave, const clifford::DiracRep& rep,
                         double rtol)
    : omega_(wave.omega), m_(wave.m), half_length_(wave.grid.L), rtol_(rtol), f_(wave.f) {
  if (rep.n != 1 || wave.N != rep.N || rep.N != 2)
    throw DimensionMismatch("EvansSystem: 1D two-component representation required");
  const auto rrep = clifford::realify(rep);
  const Matrix kin = rrep.minus_i_alpha()[0];
  jmat_ = rrep.J;
  bbeta_ = rrep.bbeta;
  kinv_ = (jmat_ * kin).inverse();

  const int ng = wave.grid.npoints;
  nodes_.resize(ng + 1);
  v_.resize(ng + 1);
  u_.resize(ng + 1);
  for (int i = 0; i < ng; ++i) {
    nodes_[i] = wave.grid.node(i);
    v_[i] = wave.spinor(0, i).real();
    u_[i] = wave.spinor(1, i).real();
  }
  nodes_[ng] = wave.grid.L;  // periodic wrap node
  v_[ng] = v_[0];
  u_[ng] = u_[0];
  v2_ = spline_second_derivatives(nodes_, v_);
  u2_ = spline_second_derivatives(nodes_, u_);
}

AsymptoticRates EvansSystem::rates(Complex lambda) const {
  clifford::DiracRep dummy;
  dummy.N = 2;
  return asymptotic_rates(lambda, omega_, m_, dummy);
}

CMatrix EvansSystem::a_infinity(Complex lambda) const {
  const Matrix const_part = jmat_ * (m_ * bbeta_ - omega_ * Matrix::Identity(4, 4));
  return lambda * kinv_.cast<Complex>() - (kinv_ * const_part).cast<Complex>();
}

CMatrix EvansSystem::a_at(double x, Complex lambda) const {
  const double v = spline_eval(nodes_, v_, v2_, x);
  const double u = spline_eval(nodes_, u_, u2_, x);
  const double eta = v * v - u * u;
  Vector phi = Vector::Zero(4);
  phi[0] = v;
  phi[1] = u;
  const Vector bphi = bbeta_ * phi;
  Matrix w = -f_.value(eta) * bbeta_ - 2.0 * f_.derivative(eta) * (bphi * bphi.transpose());
  const Matrix full = jmat_ * (m_ * bbeta_ - omega_ * Matrix::Identity(4, 4) + w);
  return lambda * kinv_.cast<Complex>() - (kinv_ * full).cast<Complex>();
}

namespace {

// Dormand-Prince 5(4) for the frame ODE Y' = A(x) Y with QR renormalization
// after each accepted step; returns the orthonormal frame at x_end and the
// accumulated complex log-determinant of the stripped triangular factors.
struct FrameResult {
  CMatrix q;
  Complex logdet{0.0, 0.0};
};

template <typename RHS>
FrameResult integrate_frame(CMatrix y, double x0, double x1, double rtol, const RHS& rhs) {
  const double atol = rtol * 1e-2;
  const double dir = (x1 > x0) ? 1.0 : -1.0;
  double x = x0, h = dir * 0.01;
  Complex logdet(0.0, 0.0);
  long steps = 0;

  auto renorm = [&](CMatrix& m) {
    Eigen::HouseholderQR<CMatrix> qr(m);
    CMatrix r = qr.matrixQR().topRows(m.cols()).template triangularView<Eigen::Upper>();
    m = qr.householderQ() * CMatrix::Identity(m.rows(), m.cols());
    for (int i = 0; i < r.rows(); ++i) {
      const Complex d = r(i, i);
      if (d == Complex(0.0, 0.0)) throw IntegrationFailure("frame lost rank");
      logdet += std::log(d);
      // keep Q's column orientation tied to R's phase so the product is exact
      m.col(i) *= d / std::abs(d);
      logdet -= std::log(d / std::abs(d));
    }
  };

  while (dir * (x1 - x) > 1e-14 * std::abs(x1 - x0)) {
    if (dir * (x + h) > dir * x1) h = x1 - x;
    const CMatrix k1 = rhs(x) * y;
    const CMatrix k2 = rhs(x + h / 5.0) * (y + h * (k1 / 5.0));
    const CMatrix k3 = rhs(x + 3.0 * h / 10.0) * (y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    const CMatrix k4 = rhs(x + 4.0 * h / 5.0) *
                       (y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    const CMatrix k5 =
        rhs(x + 8.0 * h / 9.0) * (y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                           64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    const CMatrix k6 =
        rhs(x + h) * (y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 +
                               49.0 / 176.0 * k4 - 5103.0 / 18656.0 * k5));
    const CMatrix y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                                2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    const CMatrix k7 = rhs(x + h) * y5;
    const CMatrix y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                                393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                                187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);

    const double scale = atol + rtol * std::max(y.cwiseAbs().maxCoeff(), y5.cwiseAbs().maxCoeff());
    const double err = (y5 - y4).cwiseAbs().maxCoeff() / scale;
    if (err <= 1.0) {
      x += h;
      y = y5;
      renorm(y);
    }
    const double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
    h *= factor;
    if (std::abs(h) < 1e-12 || ++steps > 400000)
      throw IntegrationFailure("step size collapsed in the frame integration");
  }
  return {std::move(y), logdet};
}

}  // namespace

EvansValue EvansSystem::value(Complex lambda, double x_match, const CMatrix* frame_base,
                              const CMatrix* frame_base_right) const {
  const auto r = rates(lambda);
  if (r.n_zero != 0 || r.n_minus != 2 || r.n_plus != 2)
    throw NotHyperbolic("evans_value: lambda lies on the essential spectrum");

  const CMatrix a_inf = a_infinity(lambda);
  Eigen::ComplexEigenSolver<CMatrix> es(a_inf);
  if (es.info() != Eigen::Success) throw IntegrationFailure("asymptotic eigenproblem failed");

  auto group_frame = [&](double sign, const CMatrix* base) {
    std::vector<int> sel;
    for (int i = 0; i < 4; ++i)
      if (sign * es.eigenvalues()[i].real() > kReTol) sel.push_back(i);
    if (sel.size() != 2) throw NotHyperbolic("evans_value: unexpected rate split");
    if (base == nullptr) {
      CMatrix cols(4, 2);
      cols.col(0) = es.eigenvectors().col(sel[0]);
      cols.col(1) = es.eigenvectors().col(sel[1]);
      Eigen::HouseholderQR<CMatrix> qr(cols);
      return CMatrix(qr.householderQ() * CMatrix::Identity(4, 2));
    }
    // spectral projector applied to the fixed base keeps E analytic in lambda
    CMatrix sfilter = CMatrix::Zero(4, 4);
    for (int i : sel) sfilter(i, i) = Complex(1.0, 0.0);
    const CMatrix proj = es.eigenvectors() * sfilter * es.eigenvectors().inverse();
    CMatrix y0 = proj * (*base);
    Eigen::JacobiSVD<CMatrix> svd(y0);
    if (svd.singularValues().minCoeff() < 1e-6)
      throw IntegrationFailure("frame base degenerate along the contour");
    return y0;
  };

  CMatrix y_left = group_frame(+1.0, frame_base);                // growing: decays at -inf
  CMatrix y_right = group_frame(-1.0, frame_base_right);         // decaying at +inf
  auto rhs = [&](double x) { return a_at(x, lambda); };
  const auto left = integrate_frame(std::move(y_left), -half_length_, x_match, rtol_, rhs);
  const auto right = integrate_frame(std::move(y_right), half_length_, x_match, rtol_, rhs);

  CMatrix concat(4, 4);
  concat.leftCols(2) = left.q;
  concat.rightCols(2) = right.q;
  const Complex det4 = concat.determinant();
  EvansValue out;
  out.reduced = det4;
  out.log_value = std::log(det4) + left.logdet + right.logdet;
  return out;
}

std::pair<CMatrix, CMatrix> EvansSystem::seed_frames(Complex lambda) const {
  Eigen::ComplexEigenSolver<CMatrix> es(a_infinity(lambda));
  if (es.info() != Eigen::Success) throw IntegrationFailure("asymptotic eigenproblem failed");
  auto pick = [&](double sign) {
    CMatrix cols(4, 2);
    int c = 0;
    for (int i = 0; i < 4 && c < 2; ++i)
      if (sign * es.eigenvalues()[i].real() > kReTol) cols.col(c++) = es.eigenvectors().col(i);
    if (c != 2) throw NotHyperbolic("seed_frames: lambda lies on the essential spectrum");
    Eigen::HouseholderQR<CMatrix> qr(cols);
    return CMatrix(qr.householderQ() * CMatrix::Identity(4, 2));
  };
  return {pick(+1.0), pick(-1.0)};
}

Complex evans_value(Complex lambda, const profiles::SolitaryWave& wave,
                    const clifford::DiracRep& rep, double x_match) {
  return EvansSystem(wave, rep).value(lambda, x_match).reduced;
}

Contour Contour::rectangle(double re_lo, double re_hi, double im_lo, double im_hi) {
  Contour c;
  c.points = {Complex(re_lo, im_lo), Complex(re_hi, im_lo), Complex(re_hi, im_hi),
              Complex(re_lo, im_hi)};
  return c;
}

Contour Contour::circle(Complex center, double radius, int nodes) {
  Contour c;
  for (int i = 0; i < nodes; ++i) {
    const double t = 2.0 * M_PI * i / nodes;
    c.points.push_back(center + radius * Complex(std::cos(t), std::sin(t)));
  }
  return c;
}

EvansScan EvansSystem::winding(const Contour& contour, int n_samples, double tol_band) const {
  if (contour.points.size() < 3)
    throw ConfigInvalid("contour", "winding: need a closed polyline with >= 3 vertices");
  const auto bands = linearize::essential_bands(omega_, m_);

  // arc-length parametrization over [0, 1)
  const auto nv = static_cast<int>(contour.points.size());
  std::vector<double> cum(nv + 1, 0.0);
  for (int i = 0; i < nv; ++i)
    cum[i + 1] = cum[i] + std::abs(contour.points[(i + 1) % nv] - contour.points[i]);
  const double total = cum[nv];
  auto at = [&](double t) {
    const double s = t * total;
    int i = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin()) - 1;
    i = std::clamp(i, 0, nv - 1);
    const double frac = (s - cum[i]) / (cum[i + 1] - cum[i]);
    return contour.points[i] + frac * (contour.points[(i + 1) % nv] - contour.points[i]);
  };

  // frame bases fixed at the first sample: E stays single-valued around the loop
  const Complex lambda0 = at(0.0);
  if (bands.distance(lambda0) <= tol_band)
    throw ContourTouchesEssential("winding: contour touches the essential spectrum");
  const auto r0 = rates(lambda0);
  if (r0.n_zero != 0) throw ContourTouchesEssential("winding: start point not hyperbolic");

  const auto [base_left, base_right] = seed_frames(lambda0);

  // log E minus the asymptotic growth 2 L s(lambda), s = sum of the two
  // positive-real-part rates: an analytic nonvanishing normalizer, so the
  // winding is unchanged while the phase stops racing along the contour
  std::map<double, Complex> cache;
  auto log_at = [&](double t) {
    auto it = cache.find(t);
    if (it != cache.end()) return it->second;
    const Complex lam = at(t);
    if (bands.distance(lam) <= tol_band)
      throw ContourTouchesEssential("winding: refined sample touches the essential spectrum");
    Complex lv = value(lam, 0.0, &base_left, &base_right).log_value;
    for (const auto& r : rates(lam).rates)
      if (r.real() > 0.0) lv -= 2.0 * half_length_ * r;
    cache.emplace(t, lv);
    return lv;
  };

  std::vector<double> ts;
  for (int i = 0; i < std::max(n_samples, 3 * nv); ++i)
    ts.push_back(static_cast<double>(i) / std::max(n_samples, 3 * nv));
  // vertices must be sample points so corners are never cut
  for (int i = 0; i < nv; ++i) ts.push_back(cum[i] / total);
  ts.push_back(1.0);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-12; }),
           ts.end());

  // Refinement triggers on both the argument step and the modulus step, and
  // flags spill onto neighboring segments: a segment symmetrically straddling
  // an even-order zero wraps its (near-multiple-of-2pi) argument jump to ~0,
  // so only its neighbors reveal the phase race.
  EvansScan scan;
  scan.contour = contour;
  for (int pass = 0; pass < 40; ++pass) {
    const size_t nseg = ts.size() - 1;
    std::vector<char> bad(nseg, 0);
    for (size_t j = 0; j < nseg; ++j) {
      const Complex dl = wrap_angle(log_at(ts[j + 1]) - log_at(ts[j]));
      if (std::abs(dl.imag()) >= 0.5 * M_PI || std::abs(dl.real()) >= 2.0) bad[j] = 1;
    }
    std::vector<char> mark(nseg, 0);
    for (size_t j = 0; j < nseg; ++j)
      if (bad[j]) {
        mark[j] = 1;
        if (j > 0) mark[j - 1] = 1;
        if (j + 1 < nseg) mark[j + 1] = 1;
      }
    std::vector<double> inserts;
    for (size_t j = 0; j < nseg; ++j)
      if (mark[j] && ts[j + 1] - ts[j] > 1e-10) inserts.push_back(0.5 * (ts[j] + ts[j + 1]));
    if (inserts.empty()) break;
    ++scan.refinements;
    ts.insert(ts.end(), inserts.begin(), inserts.end());
    std::sort(ts.begin(), ts.end());
  }

  double total_arg = 0.0;
  for (size_t j = 0; j + 1 < ts.size(); ++j)
    total_arg += wrap_angle(log_at(ts[j + 1]) - log_at(ts[j])).imag();
  for (double t : ts) {
    scan.lambdas.push_back(at(t));
    scan.log_values.push_back(log_at(t));
  }
  scan.winding = static_cast<int>(std::lround(total_arg / (2.0 * M_PI)));
  return scan;
}

EvansScan winding(const Contour& contour, const profiles::SolitaryWave& wave,
                  const clifford::DiracRep& rep, int n_samples, double tol_band) {
  return EvansSystem(wave, rep).winding(contour, n_samples, tol_band);
}

ThresholdCertificate threshold_certificate(double omega, double m, double lambda_max,
                                           const clifford::DiracRep& rep, int n_samples) {
  const double threshold = m + std::abs(omega);
  if (!(lambda_max > threshold))
    throw ConfigInvalid("lambda_max", "threshold_certificate: lambda_max must exceed m + |omega|");
  ThresholdCertificate cert;
  cert.omega = omega;
  cert.m = m;
  cert.lambda_max = lambda_max;
  cert.samples = n_samples;
  cert.certified = true;
  for (int i = 1; i <= n_samples; ++i) {
    const double y = threshold + (lambda_max - threshold) * i / n_samples;
    const auto r = asymptotic_rates(Complex(0.0, y), omega, m, rep);
    if (r.n_zero != 2 * rep.N) {
      cert.certified = false;
      cert.failed_at.push_back(y);
    }
  }
  return cert;
}

}  // namespace diracstab::evans
