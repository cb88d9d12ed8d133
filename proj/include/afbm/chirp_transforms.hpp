#pragma once

#include "afbm/types.hpp"

namespace afbm {

// Chirp rates of one affine transform. c1 is the pre-chirp (applied to the
// input, time side), c2 the post-chirp (output, affine-domain side).
struct ChirpParams {
  double c1 = 0.0;
  double c2 = 0.0;
  bool operator==(const ChirpParams&) const = default;
};

// diag entries exp(-j 2 pi c m^2); m^2 is reduced exactly before scaling
template <class T = double> CVec<T> chirp_vector(double c, Index n) {
  if (n < 1) throw invalid_dimension("chirp size must be >= 1");
  CVec<T> v(n);
  for (Index m = 0; m < n; ++m) {
    double mm = static_cast<double>(m) * static_cast<double>(m);
    v(m) = cis_neg<T>(c * mm);
  }
  return v;
}

template <class T = double> Eigen::DiagonalMatrix<Cx<T>, Eigen::Dynamic> chirp_diag(double c, Index n) {
  return chirp_vector<T>(c, n).asDiagonal();
}

// unitary DFT, F(a,b) = exp(-j 2 pi ab/n)/sqrt(n)
template <class T = double> CMat<T> dft_matrix(Index n) {
  if (n < 1) throw invalid_dimension("DFT size must be >= 1");
  CMat<T> F(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) F(a, b) = cis_neg<T>(static_cast<double>((a * b) % n) / n) * static_cast<T>(s);
  return F;
}

// W = diag(chirp c2) F diag(chirp c1)
template <class T = double> CMat<T> daft_matrix(Index n, const ChirpParams& p) {
  CMat<T> W = dft_matrix<T>(n);
  const CVec<T> pre = chirp_vector<T>(p.c1, n);
  const CVec<T> post = chirp_vector<T>(p.c2, n);
  W = post.asDiagonal() * W * pre.asDiagonal();
  return W;
}

// first L rows of the P-point DAFT
template <class T = double> CMat<T> pruned_daft(Index L, Index P, const ChirpParams& p) {
  if (L < 1 || L > P) throw invalid_dimension("pruned DAFT needs 1 <= L <= P");
  return daft_matrix<T>(P, p).topRows(L);
}

// N x P zero-padding selector: I_{P/2} top-left, I_{P/2} bottom-right
inline MatXd zero_pad_selector(Index N, Index P) {
  if (P < 2 || P % 2 != 0 || P > N) throw invalid_dimension("zero-pad selector needs even P <= N");
  MatXd T = MatXd::Zero(N, P);
  const Index h = P / 2;
  T.topLeftCorner(h, h).setIdentity();
  T.bottomRightCorner(h, h).setIdentity();
  return T;
}

// Q_P = W_N^H T F_P Wt_P^H (W_N = F_N when chirp_N is zero)
template <class T = double>
CMat<T> qp_block(Index N, Index P, Index L, const ChirpParams& chirp_P, const ChirpParams& chirp_N = {}) {
  if (L < 1 || L > P || P > N) throw invalid_dimension("qp_block needs L <= P <= N");
  const CMat<T> Wt = pruned_daft<T>(L, P, chirp_P);
  const CMat<T> FP = dft_matrix<T>(P);
  const CMat<T> WN = daft_matrix<T>(N, chirp_N);
  const CMat<T> Tm = zero_pad_selector(N, P).template cast<Cx<T>>();
  CMat<T> inner = FP * Wt.adjoint();
  return WN.adjoint() * (Tm * inner);
}

// I_K kron Q_P
template <class T = double> CMat<T> q_frame(Index K, const CMat<T>& Qp) {
  if (K < 1) throw invalid_dimension("K must be >= 1");
  CMat<T> Q = CMat<T>::Zero(K * Qp.rows(), K * Qp.cols());
  for (Index k = 0; k < K; ++k) Q.block(k * Qp.rows(), k * Qp.cols(), Qp.rows(), Qp.cols()) = Qp;
  return Q;
}

}  // namespace afbm
