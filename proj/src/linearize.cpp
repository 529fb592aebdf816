#include "diracstab/linearize.hpp"

#include <cmath>

#include "diracstab/errors.hpp"

namespace diracstab::linearize {

std::string kind_name(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::JL: return "JL";
    case OperatorKind::L: return "L";
    case OperatorKind::L_minus: return "L_minus";
    case OperatorKind::V: return "V";
    case OperatorKind::jl: return "jl";
    case OperatorKind::l_plus: return "l_plus";
    case OperatorKind::l_minus: return "l_minus";
  }
  return "?";
}

double EssentialBands::distance(Complex lambda) const {
  const double re = std::abs(lambda.real());
  const double im = std::abs(lambda.imag());
  if (im >= gap_edge) return re;
  return std::hypot(re, gap_edge - im);
}

double EssentialBands::endpoint_distance(Complex lambda) const {
  const double re = std::abs(lambda.real());
  const double im = std::abs(lambda.imag());
  return std::min(std::hypot(re, im - gap_edge), std::hypot(re, im - threshold));
}

EssentialBands essential_bands(double omega, double m) {
  if (std::abs(omega) > m)
    throw OutsideGap("essential_bands: |omega| must not exceed m");
  EssentialBands bands;
  bands.omega = omega;
  bands.m = m;
  bands.gap_edge = m - std::abs(omega);
  bands.threshold = m + std::abs(omega);
  return bands;
}

namespace {

// A[(c,g),(c',g')] += K(c,c') * D(g,g')  (Kronecker product, component-major)
void add_kron(Matrix& a, const Matrix& coeff, const Matrix& d) {
  const int ng = static_cast<int>(d.rows());
  for (int c = 0; c < coeff.rows(); ++c)
    for (int cp = 0; cp < coeff.cols(); ++cp)
      if (coeff(c, cp) != 0.0)
        a.block(c * ng, cp * ng, ng, ng) += coeff(c, cp) * d;
}

// A[(c,g),(c',g)] += K(c,c') * w(g)  (pointwise multiplication operator)
void add_pointwise(Matrix& a, const Matrix& coeff, const Vector& w) {
  const int ng = static_cast<int>(w.size());
  for (int c = 0; c < coeff.rows(); ++c)
    for (int cp = 0; cp < coeff.cols(); ++cp)
      if (coeff(c, cp) != 0.0)
        for (int g = 0; g < ng; ++g) a(c * ng + g, cp * ng + g) += coeff(c, cp) * w[g];
}

RealBlockOperator make_op(Matrix mat, const Grid1D& grid, int block_dim, OperatorKind kind,
                          double omega, double m, int k) {
  RealBlockOperator op;
  op.matrix = std::move(mat);
  op.grid = grid;
  op.block_dim = block_dim;
  op.kind = kind;
  op.omega = omega;
  op.m = m;
  op.k = k;
  return op;
}

}  // namespace

NldOperators assemble_nld_linearization(const profiles::SolitaryWave& wave,
                                        const clifford::RealifiedRep& rep, bool full) {
  if (rep.n != 1)
    throw DimensionMismatch("assemble_nld_linearization: only the 1D discretization is built");
  if (wave.N != rep.N)
    throw DimensionMismatch("assemble_nld_linearization: wave and representation disagree");

  const Grid1D& grid = wave.grid;
  const int ng = grid.npoints;
  const int bd = 2 * rep.N;
  const int size = bd * ng;

  const Matrix d = differentiation_matrix(grid);
  const Matrix kin = rep.minus_i_alpha()[0];  // real antisymmetric
  const Matrix bbeta = rep.bbeta;

  // realified profile samples, per node
  const Vector phi = wave.realified();
  Matrix phi_cols(bd, ng);  // column g = realified phi(x_g)
  for (int c = 0; c < bd; ++c)
    for (int g = 0; g < ng; ++g) phi_cols(c, g) = phi[c * ng + g];

  Vector eta(ng), fval(ng), fder(ng);
  Matrix bphi = bbeta * phi_cols;
  for (int g = 0; g < ng; ++g) {
    eta[g] = phi_cols.col(g).dot(bphi.col(g));
    fval[g] = wave.f.value(eta[g]);
    fder[g] = wave.f.derivative(eta[g]);
  }

  // L_minus = D_m - omega - f(eta) bbeta
  Matrix lm = Matrix::Zero(size, size);
  add_kron(lm, kin, d);
  add_pointwise(lm, bbeta, Vector::Constant(ng, wave.m));
  lm.diagonal().array() -= wave.omega;
  add_pointwise(lm, bbeta, Vector(-fval));
  lm = 0.5 * (lm + lm.transpose()).eval();

  // L = L_minus - 2 f'(eta) (bbeta phi)(bbeta phi)^T per node
  Matrix l = lm;
  for (int g = 0; g < ng; ++g) {
    if (fder[g] == 0.0) continue;
    for (int c = 0; c < bd; ++c)
      for (int cp = 0; cp < bd; ++cp)
        l(c * ng + g, cp * ng + g) -= 2.0 * fder[g] * bphi(c, g) * bphi(cp, g);
  }
  l = 0.5 * (l + l.transpose()).eval();

  NldOperators out;
  if (full) {
    // V = L - (D_m - omega): the profile-supported zero-order part
    Matrix v = Matrix::Zero(size, size);
    add_pointwise(v, bbeta, Vector(-fval));
    for (int g = 0; g < ng; ++g) {
      if (fder[g] == 0.0) continue;
      for (int c = 0; c < bd; ++c)
        for (int cp = 0; cp < bd; ++cp)
          v(c * ng + g, cp * ng + g) -= 2.0 * fder[g] * bphi(c, g) * bphi(cp, g);
    }
    out.L_minus = make_op(std::move(lm), grid, bd, OperatorKind::L_minus, wave.omega, wave.m,
                          wave.f.k);
    out.V = make_op(std::move(v), grid, bd, OperatorKind::V, wave.omega, wave.m, wave.f.k);
  }
  lm.resize(0, 0);

  // J_big is the signed block swap [[0, I], [-I, 0]], so J L is a row shuffle
  Matrix jl(size, size);
  jl.topRows(size / 2) = l.bottomRows(size / 2);
  jl.bottomRows(size / 2) = -l.topRows(size / 2);
  out.L = make_op(std::move(l), grid, bd, OperatorKind::L, wave.omega, wave.m, wave.f.k);
  out.JL = make_op(std::move(jl), grid, bd, OperatorKind::JL, wave.omega, wave.m, wave.f.k);
  return out;
}

NlsOperators assemble_nls_linearization(const profiles::RadialProfile& u, double m, int k,
                                        const Grid1D& grid) {
  if (u.n != 1)
    throw DimensionMismatch("assemble_nls_linearization: full-line grid requires n = 1");
  if (u.r.size() < 2) throw DimensionMismatch("assemble_nls_linearization: empty profile");

  const int ng = grid.npoints;
  const Matrix d = differentiation_matrix(grid);
  const Matrix lap = d * d;

  // even extension of the radial samples onto the grid, zero beyond r_max
  const double rh = u.r[1] - u.r[0];
  Vector usq(ng);  // u^2k at the nodes
  for (int i = 0; i < ng; ++i) {
    const double r = std::abs(grid.node(i));
    const double t = r / rh;
    const auto j = static_cast<long>(std::floor(t));
    double val = 0.0;
    if (j + 1 < u.u.size()) {
      const double w1 = t - j;
      val = (1.0 - w1) * u.u[j] + w1 * u.u[j + 1];
    } else if (j < u.u.size()) {
      val = u.u[j];
    }
    usq[i] = std::pow(val, 2.0 * k);
  }

  Matrix lminus = (1.0 / (2.0 * m)) * (Matrix::Identity(ng, ng) - lap);
  lminus.diagonal() -= usq;
  lminus = 0.5 * (lminus + lminus.transpose()).eval();

  Matrix lplus = lminus;
  lplus.diagonal() -= 2.0 * k * usq;

  Matrix jl = Matrix::Zero(2 * ng, 2 * ng);
  jl.topRightCorner(ng, ng) = lminus;
  jl.bottomLeftCorner(ng, ng) = -lplus;

  NlsOperators out;
  out.l_minus = make_op(std::move(lminus), grid, 1, OperatorKind::l_minus, 0.0, m, k);
  out.l_plus = make_op(std::move(lplus), grid, 1, OperatorKind::l_plus, 0.0, m, k);
  out.jl = make_op(std::move(jl), grid, 2, OperatorKind::jl, 0.0, m, k);
  return out;
}

Matrix grid_J(const clifford::RealifiedRep& rep, const Grid1D& grid) {
  const int ng = grid.npoints;
  const int bd = 2 * rep.N;
  Matrix jbig = Matrix::Zero(bd * ng, bd * ng);
  add_kron(jbig, rep.J, Matrix::Identity(ng, ng));
  return jbig;
}

}  // namespace diracstab::linearize
