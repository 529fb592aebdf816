#pragma once

#include <functional>
#include <string>
#include <vector>

#include "diracstab/grid.hpp"

namespace diracstab::profiles {

/// Scalar nonlinearity f supplied as (value, derivative) callbacks.
/// The pure power f(eta) = eta^k is the built-in default.
struct Nonlinearity {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  int k = 1;  // leading power at eta = 0

  static Nonlinearity power(int k);
};

/// Ground state u_k of  u'' + ((n-1)/r) u' = u - 2m u^(2k+1)  on the half line,
/// positive and decreasing, sampled on uniform radial nodes.
struct RadialProfile {
  int n = 1;
  int k = 1;
  double m = 1.0;
  Vector r;
  Vector u;
  double amplitude = 0.0;      // u(0)
  double residual_norm = 0.0;  // sup-norm of the discretized ODE residual
};

/// Closed-form 1D ground state u_k(y) = ((k+1)/(2m))^(1/2k) sech^(1/k)(k y)
/// and its derivative; used to seed the Dirac solver near omega = m.
double nls_ground_state_1d(int k, double m, double y);
double nls_ground_state_1d_deriv(int k, double m, double y);

RadialProfile nls_ground_state(int n, int k, double m, double r_max, int N_r);

/// A standing-wave profile of the 1D nonlinear Dirac equation
///   omega phi = D_m phi - f(phi* beta phi) beta phi
/// in the representation alpha = sigma_2, beta = sigma_3, for which the profile
/// can be taken real: phi = (v, u) with v even and u odd.
struct SolitaryWave {
  double omega = 0.0;
  double m = 1.0;
  Nonlinearity f;
  Grid1D grid;
  int N = 2;           // spinor dimension
  CMatrix spinor;      // N x N_g, column i = phi(x_i)
  double residual_norm = 0.0;
  std::vector<std::string> warnings;

  double epsilon() const { return std::sqrt(m * m - omega * omega); }

  // particle/antiparticle components (projections (1 +- beta)/2 with beta = sigma_3)
  CVector particle() const { return spinor.row(0).transpose(); }
  CVector antiparticle() const { return spinor.row(1).transpose(); }

  // realified sample vector, component-major: (Re phi_1, .., Re phi_N, Im phi_1, ..)
  Vector realified() const;

  // L2 norm of the realified samples (periodic quadrature)
  double norm() const;
};

SolitaryWave nld_solitary_wave(double omega, double m, const Nonlinearity& f, const Grid1D& grid,
                               const SolitaryWave* seed = nullptr);

struct WaveFamily {
  std::vector<SolitaryWave> waves;  // increasing omega
};

/// Q = ||phi||^2 by periodic quadrature.
double charge(const SolitaryWave& wave);

struct VkSample {
  double omega = 0.0;
  double dq_domega = 0.0;
  double step = 0.0;        // mean one-sided step of the centered stencil
  bool sign_change = false; // sign differs from the previous sample
};

std::vector<VkSample> vk_derivative(const std::vector<double>& omegas,
                                    const std::vector<double>& charges);
std::vector<VkSample> vk_derivative(const WaveFamily& family);

struct DecayFit {
  double mu_est = 0.0;  // fitted rate: ||phi(x)|| ~ exp(-mu x) on the window
  double r_squared = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int points = 0;
};

/// Least-squares slope of log(values) over an automatically chosen tail window
/// on the positive half-axis. `values` are pointwise norms at ascending nodes x.
DecayFit decay_rate(const Vector& x, const Vector& values);
DecayFit decay_rate(const SolitaryWave& wave);

}  // namespace diracstab::profiles
