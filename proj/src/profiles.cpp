#include "diracstab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diracstab/errors.hpp"

namespace diracstab::profiles {

namespace {

double ipow(double x, int p) {
  double out = 1.0;
  for (int i = 0; i < p; ++i) out *= x;
  return out;
}

// ---- shooting for the radial ground state ------------------------------------

struct Shot {
  int cls = 0;  // +1 crossed zero (amplitude too large), -1 turned around, 0 survived
  std::vector<double> r, u;  // recorded trajectory (only when requested)
};

Shot shoot(int n, int k, double m, double u0, double r_span, bool record) {
  const double h = 1e-3;
  double r = 0.0, u = u0, p = 0.0;
  auto du = [](double, double, double pp) { return pp; };
  auto dp = [&](double rr, double uu, double pp) {
    const double force = uu - 2.0 * m * ipow(uu, 2 * k + 1);
    if (rr < 1e-14) return force / n;
    return force - (n - 1) * pp / rr;
  };
  Shot shot;
  if (record) {
    shot.r.push_back(r);
    shot.u.push_back(u);
  }
  while (r < r_span) {
    const double k1u = du(r, u, p), k1p = dp(r, u, p);
    const double k2u = du(r + h / 2, u + h / 2 * k1u, p + h / 2 * k1p);
    const double k2p = dp(r + h / 2, u + h / 2 * k1u, p + h / 2 * k1p);
    const double k3u = du(r + h / 2, u + h / 2 * k2u, p + h / 2 * k2p);
    const double k3p = dp(r + h / 2, u + h / 2 * k2u, p + h / 2 * k2p);
    const double k4u = du(r + h, u + h * k3u, p + h * k3p);
    const double k4p = dp(r + h, u + h * k3u, p + h * k3p);
    u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    r += h;
    if (u < 0.0) {
      shot.cls = +1;
      return shot;
    }
    if (p > 1e-14) {
      shot.cls = -1;
      return shot;
    }
    if (record) {
      shot.r.push_back(r);
      shot.u.push_back(u);
    }
  }
  shot.cls = 0;
  return shot;
}

double interp_trajectory(const Shot& shot, double r) {
  if (shot.r.empty()) return 0.0;
  const double r_last = shot.r.back();
  if (r >= r_last) {
    // extend by unit-rate exponential decay (the linear far field)
    return shot.u.back() * std::exp(-(r - r_last));
  }
  const double h = 1e-3;
  const auto i = static_cast<size_t>(r / h);
  if (i + 1 >= shot.r.size()) return shot.u.back();
  const double t = (r - shot.r[i]) / h;
  return (1.0 - t) * shot.u[i] + t * shot.u[i + 1];
}

double shoot_amplitude(int n, int k, double m, double r_span) {
  const double u_turn = std::pow(1.0 / (2.0 * m), 1.0 / (2.0 * k));
  const double u_homo = std::pow((k + 1.0) / (2.0 * m), 1.0 / (2.0 * k));
  double lo = u_turn * 1.01;
  if (shoot(n, k, m, lo, r_span, false).cls > 0)
    throw NoConvergence("nls_ground_state: shooting bracket failed at the lower end", 0.0);
  double hi = u_homo * 1.05;
  int grow = 0;
  while (shoot(n, k, m, hi, r_span, false).cls <= 0) {
    hi *= 1.3;
    if (++grow > 60)
      throw NoConvergence("nls_ground_state: no overshoot found while growing the bracket", 0.0);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const int cls = shoot(n, k, m, mid, r_span, false).cls;
    if (cls == 0) break;  // trajectory survived the whole span: converged enough
    (cls > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Armijo backtracking on the 2-norm of the residual; factor 0.5, minimum step 2^-20.
// Returns the accepted step, or 0 when no decrease was found.
template <typename Resid>
double line_search(const Resid& residual_norm2, const Vector& w, const Vector& delta,
                   double f0) {
  double s = 1.0;
  while (s >= std::pow(2.0, -20)) {
    if (residual_norm2(w + s * delta) <= (1.0 - 1e-4 * s) * f0) return s;
    s *= 0.5;
  }
  return 0.0;
}

RadialProfile ground_state_line(int k, double m, double r_max, int N_r, const Shot& traj) {
  const int ng = 2 * (N_r - 1);
  Grid1D grid(r_max, ng);
  // d is circulant, so d^2 is the circulant generated by d * d.col(0)
  const Matrix d2 = [&] {
    const Matrix d = differentiation_matrix(grid);
    const Vector c2 = d * d.col(0);
    Matrix out(ng, ng);
    for (int j = 0; j < ng; ++j)
      for (int i = 0; i < ng; ++i) out(i, j) = c2[(i - j + ng) % ng];
    return out;
  }();

  Vector w(ng);
  for (int i = 0; i < ng; ++i) w[i] = interp_trajectory(traj, std::abs(grid.node(i)));

  auto evenize = [&](Vector& v) {
    for (int i = 1; i < ng / 2; ++i) {
      const double avg = 0.5 * (v[i] + v[grid.reflect(i)]);
      v[i] = avg;
      v[grid.reflect(i)] = avg;
    }
  };
  evenize(w);

  auto residual = [&](const Vector& v) {
    Vector fr = d2 * v - v;
    for (int i = 0; i < ng; ++i) fr[i] += 2.0 * m * ipow(v[i], 2 * k + 1);
    return fr;
  };
  auto rnorm2 = [&](const Vector& v) { return residual(v).norm(); };

  // Newton steps solved in the even sector (profile and Jacobian are
  // reflection-symmetric): self nodes 0 and ng/2 plus pairs (i, ng - i)
  const int nb = ng / 2 + 1;
  const double rt = 1.0 / std::sqrt(2.0);
  auto support = [&](int b, int idx[2], double coef[2]) {
    if (b == 0 || b == ng / 2) {
      idx[0] = b;
      coef[0] = 1.0;
      return 1;
    }
    idx[0] = b;
    idx[1] = ng - b;
    coef[0] = coef[1] = rt;
    return 2;
  };
  Matrix je(nb, nb);
  Vector re(nb), diag(ng);
  Eigen::PartialPivLU<Matrix> lu;
  bool refactor = true;  // the factorization is reused while progress is fast

  double res_inf = residual(w).cwiseAbs().maxCoeff();
  double res_prev = res_inf;
  for (int it = 0; it < 60 && res_inf > 1e-12; ++it) {
    const Vector fr = residual(w);
    if (refactor) {
      for (int i = 0; i < ng; ++i)
        diag[i] = -1.0 + 2.0 * m * (2 * k + 1) * ipow(w[i], 2 * k);
      for (int b = 0; b < nb; ++b) {
        int jb[2];
        double cb[2];
        const int wb = support(b, jb, cb);
        for (int a = 0; a < nb; ++a) {
          int ia[2];
          double ca[2];
          const int wa = support(a, ia, ca);
          double acc = 0.0;
          for (int q = 0; q < wb; ++q)
            for (int p = 0; p < wa; ++p) {
              double entry = d2(ia[p], jb[q]);
              if (ia[p] == jb[q]) entry += diag[ia[p]];
              acc += ca[p] * cb[q] * entry;
            }
          je(a, b) = acc;
        }
      }
      lu.compute(je);
    }
    for (int b = 0; b < nb; ++b) {
      int jb[2];
      double cb[2];
      const int wb = support(b, jb, cb);
      double racc = 0.0;
      for (int q = 0; q < wb; ++q) racc += cb[q] * fr[jb[q]];
      re[b] = -racc;
    }
    const Vector de = lu.solve(re);
    Vector delta = Vector::Zero(ng);
    for (int b = 0; b < nb; ++b) {
      int ib[2];
      double cb[2];
      const int wb = support(b, ib, cb);
      for (int p = 0; p < wb; ++p) delta[ib[p]] += cb[p] * de[b];
    }
    const double s = line_search(rnorm2, w, delta, fr.norm());
    if (s == 0.0) break;
    w += s * delta;
    evenize(w);
    res_inf = residual(w).cwiseAbs().maxCoeff();
    if (s < 1.0 / 64.0) break;  // collapsed step: at the discretization floor
    refactor = s < 1.0 || res_inf > 0.3 * res_prev;
    res_prev = res_inf;
  }
  if (res_inf >= 1e-10)
    throw NoConvergence("nls_ground_state: Newton stalled", res_inf);

  RadialProfile out;
  out.n = 1;
  out.k = k;
  out.m = m;
  out.r.resize(N_r);
  out.u.resize(N_r);
  for (int i = 0; i < N_r - 1; ++i) {
    out.r[i] = i * grid.spacing();
    out.u[i] = w[ng / 2 + i];
  }
  out.r[N_r - 1] = r_max;
  out.u[N_r - 1] = w[0];
  out.amplitude = out.u[0];
  out.residual_norm = res_inf;
  return out;
}

RadialProfile ground_state_radial_fd(int n, int k, double m, double r_max, int N_r,
                                     const Shot& traj) {
  const double h = r_max / (N_r - 1);
  const int nu = N_r - 1;  // unknowns u_0..u_{N_r-2}; u(r_max) = 0
  Vector w(nu);
  for (int i = 0; i < nu; ++i) w[i] = interp_trajectory(traj, i * h);

  auto residual = [&](const Vector& v) {
    Vector fr(nu);
    auto at = [&](int i) { return i < nu ? v[i] : 0.0; };
    fr[0] = n * 2.0 * (at(1) - v[0]) / (h * h) - v[0] + 2.0 * m * ipow(v[0], 2 * k + 1);
    for (int i = 1; i < nu; ++i) {
      const double r = i * h;
      fr[i] = (at(i + 1) - 2.0 * v[i] + v[i - 1]) / (h * h) +
              (n - 1) / r * (at(i + 1) - v[i - 1]) / (2.0 * h) - v[i] +
              2.0 * m * ipow(v[i], 2 * k + 1);
    }
    return fr;
  };
  auto rnorm2 = [&](const Vector& v) { return residual(v).norm(); };

  double res_inf = residual(w).cwiseAbs().maxCoeff();
  for (int it = 0; it < 80 && res_inf > 1e-12; ++it) {
    const Vector fr = residual(w);
    Matrix jac = Matrix::Zero(nu, nu);
    jac(0, 0) = -n * 2.0 / (h * h) - 1.0 + 2.0 * m * (2 * k + 1) * ipow(w[0], 2 * k);
    if (nu > 1) jac(0, 1) = n * 2.0 / (h * h);
    for (int i = 1; i < nu; ++i) {
      const double r = i * h;
      jac(i, i - 1) = 1.0 / (h * h) - (n - 1) / (2.0 * h * r);
      jac(i, i) = -2.0 / (h * h) - 1.0 + 2.0 * m * (2 * k + 1) * ipow(w[i], 2 * k);
      if (i + 1 < nu) jac(i, i + 1) = 1.0 / (h * h) + (n - 1) / (2.0 * h * r);
    }
    Vector delta = Eigen::PartialPivLU<Matrix>(jac).solve(Vector(-fr));
    const double s = line_search(rnorm2, w, delta, fr.norm());
    if (s == 0.0) break;
    w += s * delta;
    res_inf = residual(w).cwiseAbs().maxCoeff();
  }
  if (res_inf >= 1e-10)
    throw NoConvergence("nls_ground_state: Newton stalled", res_inf);

  RadialProfile out;
  out.n = n;
  out.k = k;
  out.m = m;
  out.r.resize(N_r);
  out.u.resize(N_r);
  for (int i = 0; i < N_r; ++i) {
    out.r[i] = i * h;
    out.u[i] = i < nu ? w[i] : 0.0;
  }
  out.amplitude = out.u[0];
  out.residual_norm = res_inf;
  return out;
}

void check_shape(const RadialProfile& p) {
  const double floor = 1e-10 * p.amplitude;  // below solver accuracy: treated as zero
  for (int i = 0; i + 1 < p.u.size(); ++i) {
    if (p.u[i] <= floor) break;  // below here the tail is numerically zero
    if (p.u[i] <= 0.0 || p.u[i + 1] > p.u[i] * (1.0 + 1e-10) + floor)
      throw NoConvergence("nls_ground_state: profile is not positive decreasing",
                          p.residual_norm);
  }
}

}  // namespace

Nonlinearity Nonlinearity::power(int k) {
  Nonlinearity f;
  f.k = k;
  f.value = [k](double eta) { return ipow(eta, k); };
  f.derivative = [k](double eta) { return k * ipow(eta, k - 1); };
  return f;
}

double nls_ground_state_1d(int k, double m, double y) {
  const double amp = std::pow((k + 1.0) / (2.0 * m), 1.0 / (2.0 * k));
  return amp * std::pow(1.0 / std::cosh(k * y), 1.0 / k);
}

double nls_ground_state_1d_deriv(int k, double m, double y) {
  return -std::tanh(k * y) * nls_ground_state_1d(k, m, y);
}

RadialProfile nls_ground_state(int n, int k, double m, double r_max, int N_r) {
  if (n < 1 || n > 3 || (n == 3 && k != 1))
    throw InadmissiblePair("nls_ground_state: ground states exist only for n <= 3, with k = 1 when n = 3");
  if (k < 1) throw InadmissiblePair("nls_ground_state: k must be a positive integer");
  if (m <= 0.0) throw InadmissiblePair("nls_ground_state: m must be positive");
  if (N_r < 8) throw InadmissiblePair("nls_ground_state: N_r too small");

  const double r_span = std::max(25.0, std::min(r_max, 60.0));
  const double u0 = shoot_amplitude(n, k, m, r_span);
  const Shot traj = shoot(n, k, m, u0, r_span, true);

  RadialProfile out = (n == 1) ? ground_state_line(k, m, r_max, N_r, traj)
                               : ground_state_radial_fd(n, k, m, r_max, N_r, traj);
  check_shape(out);
  return out;
}

Vector SolitaryWave::realified() const {
  const int ng = grid.npoints;
  Vector out(2 * N * ng);
  for (int c = 0; c < N; ++c)
    for (int g = 0; g < ng; ++g) {
      out[c * ng + g] = spinor(c, g).real();
      out[(N + c) * ng + g] = spinor(c, g).imag();
    }
  return out;
}

double SolitaryWave::norm() const { return std::sqrt(charge(*this)); }

SolitaryWave nld_solitary_wave(double omega, double m, const Nonlinearity& f, const Grid1D& grid,
                               const SolitaryWave* seed) {
  if (m <= 0.0) throw OutsideGap("nld_solitary_wave: m must be positive");
  if (!(std::abs(omega) < m))
    throw OutsideGap("nld_solitary_wave: no solitary waves for |omega| >= m");

  SolitaryWave wave;
  wave.omega = omega;
  wave.m = m;
  wave.f = f;
  wave.grid = grid;
  wave.N = 2;

  const double eps = wave.epsilon();
  const int ng = grid.npoints;
  if (grid.spacing() > 0.1)
    wave.warnings.push_back("grid spacing exceeds 0.1; unit length scale under-resolved");
  if (grid.L < 10.0 / eps)
    wave.warnings.push_back("grid half-length below 10/epsilon; tail truncation may be large");

  const Matrix d = differentiation_matrix(grid);

  Vector v(ng), u(ng);
  if (seed) {
    // linear interpolation of the seed's (real) spinor, zero outside its grid
    const Grid1D& sg = seed->grid;
    auto sample = [&](int row, double x) {
      const double t = (x + sg.L) / sg.spacing();
      const auto i = static_cast<long>(std::floor(t));
      if (i < 0 || i + 1 >= sg.npoints) return 0.0;
      const double w1 = t - i;
      return (1.0 - w1) * seed->spinor(row, i).real() + w1 * seed->spinor(row, i + 1).real();
    };
    for (int i = 0; i < ng; ++i) {
      v[i] = sample(0, grid.node(i));
      u[i] = sample(1, grid.node(i));
    }
  } else {
    // nonrelativistic ansatz: v ~ eps^(1/k) u_k(eps x), u ~ v'/(2m)
    const double sv = std::pow(eps, 1.0 / f.k);
    for (int i = 0; i < ng; ++i) {
      const double x = grid.node(i);
      v[i] = sv * nls_ground_state_1d(f.k, m, eps * x);
      u[i] = sv * eps * nls_ground_state_1d_deriv(f.k, m, eps * x) / (2.0 * m);
    }
  }

  auto symmetrize = [&](Vector& ve, Vector& uo) {
    for (int i = 1; i < ng / 2; ++i) {
      const int j = grid.reflect(i);
      const double a = 0.5 * (ve[i] + ve[j]);
      ve[i] = a;
      ve[j] = a;
      const double b = 0.5 * (uo[i] - uo[j]);
      uo[i] = b;
      uo[j] = -b;
    }
    uo[0] = 0.0;
    uo[ng / 2] = 0.0;
  };
  symmetrize(v, u);

  auto residual = [&](const Vector& w) {
    const auto ve = w.head(ng);
    const auto uo = w.tail(ng);
    Vector fvals(ng), out(2 * ng);
    for (int i = 0; i < ng; ++i) fvals[i] = f.value(ve[i] * ve[i] - uo[i] * uo[i]);
    out.head(ng) = -d * uo + (m - omega) * ve - fvals.cwiseProduct(ve);
    out.tail(ng) = d * ve - (m + omega) * uo + fvals.cwiseProduct(uo);
    return out;
  };
  auto rnorm2 = [&](const Vector& w) { return residual(w).norm(); };

  Vector w(2 * ng);
  w.head(ng) = v;
  w.tail(ng) = u;

  double res_inf = residual(w).cwiseAbs().maxCoeff();
  int stalls = 0;
  for (int it = 0; it < 80 && res_inf > 1e-11; ++it) {
    const Vector fr = residual(w);
    Matrix jac(2 * ng, 2 * ng);
    jac.topRightCorner(ng, ng) = -d;
    jac.bottomLeftCorner(ng, ng) = d;
    jac.topLeftCorner(ng, ng).setZero();
    jac.bottomRightCorner(ng, ng).setZero();
    for (int i = 0; i < ng; ++i) {
      const double vi = w[i], ui = w[ng + i];
      const double eta = vi * vi - ui * ui;
      const double fv = f.value(eta), fp = f.derivative(eta);
      jac(i, i) = (m - omega) - fv - 2.0 * fp * vi * vi;
      jac(i, ng + i) += 2.0 * fp * ui * vi;
      jac(ng + i, i) += 2.0 * fp * ui * vi;
      jac(ng + i, ng + i) = -(m + omega) + fv - 2.0 * fp * ui * ui;
    }
    Vector delta = Eigen::PartialPivLU<Matrix>(jac).solve(Vector(-fr));
    {
      Vector dv = delta.head(ng), du = delta.tail(ng);
      symmetrize(dv, du);
      delta.head(ng) = dv;
      delta.tail(ng) = du;
    }
    const double s = line_search(rnorm2, w, delta, fr.norm());
    if (s == 0.0) {
      if (++stalls >= 2) break;
      continue;
    }
    w += s * delta;
    {
      Vector wv = w.head(ng), wu = w.tail(ng);
      symmetrize(wv, wu);
      w.head(ng) = wv;
      w.tail(ng) = wu;
    }
    res_inf = residual(w).cwiseAbs().maxCoeff();
  }
  if (!(res_inf < 1e-10))
    throw NoConvergence("nld_solitary_wave: Newton stalled", res_inf);

  if (w[ng / 2] < 0.0) w = -w;  // gauge: particle component positive at x = 0

  wave.spinor = CMatrix::Zero(2, ng);
  for (int i = 0; i < ng; ++i) {
    wave.spinor(0, i) = w[i];
    wave.spinor(1, i) = w[ng + i];
  }
  wave.residual_norm = res_inf;
  return wave;
}

double charge(const SolitaryWave& wave) {
  Vector density(wave.grid.npoints);
  for (int i = 0; i < wave.grid.npoints; ++i) density[i] = wave.spinor.col(i).squaredNorm();
  return wave.grid.quad(density);
}

std::vector<VkSample> vk_derivative(const std::vector<double>& omegas,
                                    const std::vector<double>& charges) {
  if (omegas.size() != charges.size())
    throw DimensionMismatch("vk_derivative: omega/charge length mismatch");
  if (omegas.size() < 3)
    throw InsufficientFamily("vk_derivative: need at least 3 family members");
  std::vector<VkSample> out;
  for (size_t i = 1; i + 1 < omegas.size(); ++i) {
    const double h1 = omegas[i] - omegas[i - 1];
    const double h2 = omegas[i + 1] - omegas[i];
    if (h1 <= 0.0 || h2 <= 0.0)
      throw InsufficientFamily("vk_derivative: omegas must be strictly increasing");
    VkSample s;
    s.omega = omegas[i];
    s.dq_domega = (h1 * h1 * charges[i + 1] + (h2 * h2 - h1 * h1) * charges[i] -
                   h2 * h2 * charges[i - 1]) /
                  (h1 * h2 * (h1 + h2));
    s.step = 0.5 * (h1 + h2);
    s.sign_change = !out.empty() && (out.back().dq_domega > 0.0) != (s.dq_domega > 0.0);
    out.push_back(s);
  }
  return out;
}

std::vector<VkSample> vk_derivative(const WaveFamily& family) {
  std::vector<double> omegas, charges;
  for (const auto& w : family.waves) {
    omegas.push_back(w.omega);
    charges.push_back(charge(w));
  }
  return vk_derivative(omegas, charges);
}

DecayFit decay_rate(const Vector& x, const Vector& values) {
  if (x.size() != values.size()) throw DimensionMismatch("decay_rate: length mismatch");
  const double vmax = values.maxCoeff();
  const double xmax = x.maxCoeff();
  if (!(vmax > 0.0)) throw TailUnderflow("decay_rate: input is zero");
  const double floor =
      std::max(1e2 * std::numeric_limits<double>::epsilon(), 1e-13 * vmax);
  const double onset = vmax * std::exp(-2.0);

  std::vector<double> xs, ls;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || x[i] > 0.85 * xmax) continue;  // periodic wrap pollutes the far end
    if (values[i] >= onset || values[i] <= floor) continue;
    xs.push_back(x[i]);
    ls.push_back(std::log(values[i]));
  }
  if (xs.size() < 10)
    throw TailUnderflow("decay_rate: tail numerically zero (super-exponential or zero)");

  const auto np = static_cast<double>(xs.size());
  double sx = 0, sl = 0, sxx = 0, sxl = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sl += ls[i];
    sxx += xs[i] * xs[i];
    sxl += xs[i] * ls[i];
  }
  const double slope = (np * sxl - sx * sl) / (np * sxx - sx * sx);
  const double intercept = (sl - slope * sx) / np;
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double fit = intercept + slope * xs[i];
    ss_res += (ls[i] - fit) * (ls[i] - fit);
    ss_tot += (ls[i] - sl / np) * (ls[i] - sl / np);
  }

  DecayFit out;
  out.mu_est = -slope;
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  out.window_lo = xs.front();
  out.window_hi = xs.back();
  out.points = static_cast<int>(xs.size());
  return out;
}

DecayFit decay_rate(const SolitaryWave& wave) {
  const int ng = wave.grid.npoints;
  Vector norms(ng);
  for (int i = 0; i < ng; ++i) norms[i] = wave.spinor.col(i).norm();
  return decay_rate(wave.grid.nodes(), norms);
}

}  // namespace diracstab::profiles
