#include "diracstab/clifford.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace diracstab::clifford {

namespace {

const Complex I(0.0, 1.0);

CMatrix pauli(int k) {
  CMatrix s(2, 2);
  switch (k) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -I, I, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// The 2d+1 mutually anticommuting hermitian involutions on C^(2^d):
//   G_{2j-1} = s3^(j-1) x s1 x I...,  G_{2j} = s3^(j-1) x s2 x I...,
//   G_{2d+1} = s3^d.
// Returned reordered so that, at d = 1, the first generator is sigma_2 and the
// last is sigma_3 (the conventional 1D pair alpha = sigma_2, beta = sigma_3).
std::vector<CMatrix> generator_family(int d) {
  std::vector<CMatrix> gens;
  CMatrix id2 = CMatrix::Identity(2, 2);
  for (int j = 1; j <= d; ++j) {
    for (int pk : {2, 1}) {
      CMatrix g = CMatrix::Identity(1, 1);
      for (int slot = 1; slot <= d; ++slot) {
        if (slot < j) g = kron(g, pauli(3));
        else if (slot == j) g = kron(g, pauli(pk));
        else g = kron(g, id2);
      }
      gens.push_back(g);
    }
  }
  CMatrix last = CMatrix::Identity(1, 1);
  for (int slot = 0; slot < d; ++slot) last = kron(last, pauli(3));
  gens.push_back(last);
  return gens;
}

bool is_zero(const CMatrix& m) { return m.cwiseAbs().maxCoeff() == 0.0; }

void check_pair(std::vector<std::string>& bad, const CMatrix& a, const CMatrix& b,
                const std::string& what) {
  if (!is_zero(a * b + b * a)) bad.push_back("{" + what + "} != 0");
}

void check_involution(std::vector<std::string>& bad, const CMatrix& a, const std::string& what) {
  CMatrix sq = a * a;
  if (!is_zero(sq - CMatrix::Identity(a.rows(), a.cols()))) bad.push_back(what + "^2 != I");
  if (!is_zero(CMatrix(a - a.adjoint()))) bad.push_back(what + " not hermitian");
}

nlohmann::json matrix_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      rows.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

}  // namespace

DiracRep build_dirac_rep(int n, bool want_alpha0, bool want_gamma) {
  if (n < 1) throw std::invalid_argument("build_dirac_rep: n must be >= 1");
  const int wanted = n + 1 + (want_alpha0 ? 1 : 0) + (want_gamma ? 1 : 0);
  int d = (n + 1) / 2;
  while (2 * d + 1 < wanted) ++d;
  auto gens = generator_family(d);

  DiracRep rep;
  rep.n = n;
  rep.N = 1 << d;
  rep.beta = gens.back();  // s3^d: real diagonal
  int next = 0;
  for (int j = 0; j < n; ++j) rep.alpha.push_back(gens[next++]);
  if (want_alpha0) rep.alpha0 = gens[next++];
  if (want_gamma) {
    CMatrix g = gens[next++];
    rep.gamma = g;
    // a +1 eigenvector of gamma: normalize (e + g e) for the first e not in ker
    CVector e = CVector::Zero(rep.N);
    for (int i = 0; i < rep.N; ++i) {
      e.setZero();
      e[i] = 1.0;
      CVector v = e + g * e;
      if (v.norm() > 0.5) {
        rep.gamma_fixed = v / v.norm();
        break;
      }
    }
  }
  return rep;
}

RealifiedRep realify(const DiracRep& rep) {
  const int N = rep.N;
  auto realify_clinear = [N](const CMatrix& m) {
    // realification of a C-linear map: [[Re, -Im], [Im, Re]]
    Matrix out(2 * N, 2 * N);
    out.topLeftCorner(N, N) = m.real();
    out.topRightCorner(N, N) = -m.imag();
    out.bottomLeftCorner(N, N) = m.imag();
    out.bottomRightCorner(N, N) = m.real();
    return out;
  };

  RealifiedRep rr;
  rr.n = rep.n;
  rr.N = N;
  for (const auto& a : rep.alpha) {
    CMatrix b(2 * N, 2 * N);
    b.topLeftCorner(N, N) = I * a.imag();
    b.topRightCorner(N, N) = I * a.real();
    b.bottomLeftCorner(N, N) = -I * a.real();
    b.bottomRightCorner(N, N) = I * a.imag();
    rr.balpha.push_back(b);
  }
  rr.bbeta = realify_clinear(rep.beta);
  rr.J = Matrix::Zero(2 * N, 2 * N);
  rr.J.topRightCorner(N, N) = Matrix::Identity(N, N);
  rr.J.bottomLeftCorner(N, N) = -Matrix::Identity(N, N);
  if (rep.alpha0) rr.balpha0 = realify_clinear(*rep.alpha0);
  if (rep.gamma) rr.bgamma = realify_clinear(*rep.gamma);
  return rr;
}

std::vector<Matrix> RealifiedRep::minus_i_alpha() const {
  std::vector<Matrix> out;
  for (const auto& b : balpha) out.push_back((Complex(0, -1) * b).real());
  return out;
}

DiracRep double_rep(const DiracRep& rep) {
  DiracRep out;
  out.n = rep.n;
  out.N = 2 * rep.N;
  auto dbl = [&](const CMatrix& m) {
    CMatrix big = CMatrix::Zero(out.N, out.N);
    big.topLeftCorner(rep.N, rep.N) = m;
    big.bottomRightCorner(rep.N, rep.N) = m;
    return big;
  };
  for (const auto& a : rep.alpha) out.alpha.push_back(dbl(a));
  out.beta = dbl(rep.beta);
  if (rep.alpha0) out.alpha0 = dbl(*rep.alpha0);
  return out;
}

std::vector<std::string> check_relations(const DiracRep& rep) {
  std::vector<std::string> bad;
  for (size_t j = 0; j < rep.alpha.size(); ++j) {
    check_involution(bad, rep.alpha[j], "alpha" + std::to_string(j + 1));
    for (size_t k = j + 1; k < rep.alpha.size(); ++k)
      check_pair(bad, rep.alpha[j], rep.alpha[k],
                 "alpha" + std::to_string(j + 1) + ",alpha" + std::to_string(k + 1));
    check_pair(bad, rep.alpha[j], rep.beta, "alpha" + std::to_string(j + 1) + ",beta");
  }
  check_involution(bad, rep.beta, "beta");
  if (rep.alpha0) {
    check_involution(bad, *rep.alpha0, "alpha0");
    for (size_t j = 0; j < rep.alpha.size(); ++j)
      check_pair(bad, *rep.alpha0, rep.alpha[j], "alpha0,alpha" + std::to_string(j + 1));
    check_pair(bad, *rep.alpha0, rep.beta, "alpha0,beta");
  }
  if (rep.gamma) {
    check_involution(bad, *rep.gamma, "gamma");
    for (size_t j = 0; j < rep.alpha.size(); ++j)
      check_pair(bad, *rep.gamma, rep.alpha[j], "gamma,alpha" + std::to_string(j + 1));
    check_pair(bad, *rep.gamma, rep.beta, "gamma,beta");
    if (rep.gamma_fixed &&
        CVector(*rep.gamma * *rep.gamma_fixed - *rep.gamma_fixed).norm() > 1e-15)
      bad.push_back("gamma does not fix designated direction");
  }
  return bad;
}

std::vector<std::string> check_relations(const RealifiedRep& rep) {
  std::vector<std::string> bad;
  const int M = 2 * rep.N;
  CMatrix Jc = rep.J.cast<Complex>();
  CMatrix bb = rep.bbeta.cast<Complex>();
  if (!is_zero(CMatrix(Jc + Jc.transpose()))) bad.push_back("J not skew-symmetric");
  if (!is_zero(CMatrix(Jc * Jc + CMatrix::Identity(M, M)))) bad.push_back("J^2 != -I");
  check_involution(bad, bb, "bbeta");
  for (size_t j = 0; j < rep.balpha.size(); ++j) {
    const std::string nm = "balpha" + std::to_string(j + 1);
    check_involution(bad, rep.balpha[j], nm);
    for (size_t k = j + 1; k < rep.balpha.size(); ++k)
      check_pair(bad, rep.balpha[j], rep.balpha[k], nm + ",balpha" + std::to_string(k + 1));
    check_pair(bad, rep.balpha[j], bb, nm + ",bbeta");
    if (!is_zero(CMatrix(Jc * rep.balpha[j] - rep.balpha[j] * Jc)))
      bad.push_back("[J," + nm + "] != 0");
  }
  if (!is_zero(CMatrix(Jc * bb - bb * Jc))) bad.push_back("[J,bbeta] != 0");
  return bad;
}

std::string to_json(const DiracRep& rep) {
  nlohmann::json j;
  j["n"] = rep.n;
  j["N"] = rep.N;
  j["alpha"] = nlohmann::json::array();
  for (const auto& a : rep.alpha) j["alpha"].push_back(matrix_json(a));
  j["beta"] = matrix_json(rep.beta);
  if (rep.alpha0) j["alpha0"] = matrix_json(*rep.alpha0);
  if (rep.gamma) j["gamma"] = matrix_json(*rep.gamma);
  return j.dump(2);
}

std::string to_json(const RealifiedRep& rep) {
  nlohmann::json j;
  j["n"] = rep.n;
  j["N"] = rep.N;
  j["balpha"] = nlohmann::json::array();
  for (const auto& a : rep.balpha) j["balpha"].push_back(matrix_json(a));
  j["bbeta"] = matrix_json(rep.bbeta.cast<Complex>());
  j["J"] = matrix_json(rep.J.cast<Complex>());
  return j.dump(2);
}

}  // namespace diracstab::clifford
