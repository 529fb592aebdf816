#pragma once

#include <optional>
#include <string>
#include <vector>

#include "diracstab/grid.hpp"

namespace diracstab::clifford {

/// A set of self-adjoint N x N Dirac matrices for spatial dimension n:
/// (alpha^j)^2 = beta^2 = I, {alpha^j, alpha^k} = 2 delta_jk, {alpha^j, beta} = 0.
/// Entries lie in {0, +-1, +-i}; all identities hold exactly in double arithmetic.
struct DiracRep {
  int n = 0;  // spatial dimension
  int N = 0;  // spinor dimension, power of 2
  std::vector<CMatrix> alpha;       // n matrices
  CMatrix beta;
  std::optional<CMatrix> alpha0;    // anticommutes with all alpha and beta
  std::optional<CMatrix> gamma;     // ditto; fixes the direction gamma_fixed
  std::optional<CVector> gamma_fixed;
};

/// Realification per the 2N-dimensional block convention:
///   balpha^j = [[i Im a, i Re a], [-i Re a, i Im a]]   (hermitian, imaginary entries)
///   bbeta    = [[Re b, -Im b], [Im b, Re b]]           (real symmetric)
///   J        = [[0, I_N], [-I_N, 0]]
/// -i * balpha^j is a real matrix, so the realified Dirac operator
/// D_m = -i balpha . grad + m bbeta has real coefficients.
struct RealifiedRep {
  int n = 0;
  int N = 0;          // spinor dimension of the source rep; blocks are 2N x 2N
  std::vector<CMatrix> balpha;
  Matrix bbeta;
  Matrix J;
  std::optional<Matrix> balpha0;  // realified alpha0 when the source rep has one
  std::optional<Matrix> bgamma;

  // real matrices -i * balpha^j, the first-derivative coefficients of D_m
  std::vector<Matrix> minus_i_alpha() const;
};

/// Build Dirac matrices for spatial dimension n >= 1 by the tensor-product
/// (creation/annihilation) construction; N = 2^ceil(n/2), doubled when the
/// requested extra generators (alpha0, gamma) do not fit at the minimal size.
DiracRep build_dirac_rep(int n, bool want_alpha0 = false, bool want_gamma = false);

RealifiedRep realify(const DiracRep& rep);

/// Doubled representation diag(alpha, alpha), diag(beta, beta) with the
/// commuting projector P = diag(I_N, 0); used by the embedding-invariance checks.
DiracRep double_rep(const DiracRep& rep);

/// Reports of violated Clifford / realification identities; empty iff valid.
std::vector<std::string> check_relations(const DiracRep& rep);
std::vector<std::string> check_relations(const RealifiedRep& rep);

std::string to_json(const DiracRep& rep);
std::string to_json(const RealifiedRep& rep);

}  // namespace diracstab::clifford
