#include "afbm/afbm_modem.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <vector>

namespace afbm {

CVecd Waveform::modulate(const CVecd& x) const {
  if (x.size() != num_symbols()) throw invalid_dimension("modulate: symbol count mismatch");
  return tx_matrix() * x;
}

MatXd mapping_block(Index L) {
  if (L < 4 || L % 4 != 0) throw invalid_dimension("L must be a positive multiple of 4");
  const Index q = L / 4;
  MatXd X = MatXd::Zero(L, L / 2);
  X.topLeftCorner(q, q).setIdentity();
  X.bottomRightCorner(q, q).setIdentity();
  return X;
}

MatXd mapping_matrix(Index L, Index K) {
  const MatXd Xb = mapping_block(L);
  MatXd X = MatXd::Zero(L * K, L * K / 2);
  for (Index k = 0; k < K; ++k) X.block(k * L, k * L / 2, L, L / 2) = Xb;
  return X;
}

CVecd map_symbols(const CVecd& x, Index L, Index K) {
  if (L < 4 || L % 4 != 0) throw invalid_dimension("L must be a positive multiple of 4");
  if (x.size() != K * L / 2) throw invalid_dimension("map_symbols: length must be K*L/2");
  const Index q = L / 4;
  CVecd a = CVecd::Zero(L * K);
  for (Index k = 0; k < K; ++k) {
    a.segment(k * L, q) = x.segment(k * L / 2, q);
    a.segment(k * L + L - q, q) = x.segment(k * L / 2 + q, q);
  }
  return a;
}

CVecd unmap_symbols(const CVecd& a, Index L, Index K) {
  if (a.size() != K * L) throw invalid_dimension("unmap_symbols: length must be K*L");
  const Index q = L / 4;
  CVecd x(K * L / 2);
  for (Index k = 0; k < K; ++k) {
    x.segment(k * L / 2, q) = a.segment(k * L, q);
    x.segment(k * L / 2 + q, q) = a.segment(k * L + L - q, q);
  }
  return x;
}

namespace {

void check_params(const WaveformParams& p) {
  if (p.L < 4 || p.L % 4 != 0) throw invalid_dimension("L must be a positive multiple of 4");
  if (p.N < 4 || p.N % 2 != 0) throw invalid_dimension("N must be even");
  if (p.P % 2 != 0) throw invalid_dimension("P must be even");
  if (p.P < p.L) throw invalid_dimension("P must be >= L");
  if (p.P > p.N) throw invalid_dimension("P must be < N");
  if (p.K < 1) throw invalid_dimension("K must be >= 1");
  if (!(p.Es > 0.0)) throw std::invalid_argument("Es must be positive");
}

bool active(Index l, Index L) { return l < L / 4 || l >= L - L / 4; }

Compensation compensation_from(const CMatd& B, Index L) {
  Compensation c;
  c.c_tilde = B.colwise().squaredNorm().transpose();
  c.b_tilde = VecXd::Zero(L);
  for (Index l = 0; l < L; ++l) {
    if (!active(l, L)) continue;
    if (c.c_tilde(l) <= 1e-12) throw degenerate_error("compensation: c_tilde vanishes on an active index");
    c.b_tilde(l) = 1.0 / std::sqrt(c.c_tilde(l));
  }
  CMatd BC = B * c.b_tilde.asDiagonal();
  CMatd R = BC.adjoint() * BC;
  double off = 0.0;
  for (Index a = 0; a < L; ++a)
    for (Index b = 0; b < L; ++b)
      if (a != b && active(a, L) && active(b, L)) off += std::norm(R(a, b));
  c.residual_offdiag = std::sqrt(off);
  return c;
}

}  // namespace

Compensation compensation(const WaveformParams& p) {
  check_params(p);
  const PrototypeFilter f = make_filter(p.filter, p.N);
  const CMatd WL = daft_matrix(p.L, p.chirp_L);
  const CMatd Qp = qp_block(p.N, p.P, p.L, p.chirp_P, p.chirp_N);
  const CMatd B = single_symbol_matrix(f).cast<cd>() * (Qp * WL);
  return compensation_from(B, p.L);
}

AfbmModem::AfbmModem(const WaveformParams& p) : p_(p) {
  check_params(p_);
  filt_ = make_filter(p_.filter, p_.N);
  const CMatd WL = daft_matrix(p_.L, p_.chirp_L);
  Qp_ = qp_block(p_.N, p_.P, p_.L, p_.chirp_P, p_.chirp_N);
  const CMatd B = single_symbol_matrix(filt_).cast<cd>() * (Qp_ * WL);
  comp_ = compensation_from(B, p_.L);
  Cf_ = WL * comp_.b_tilde.asDiagonal();

  G_ = frame_filter_matrix(filt_, p_.K);
  M_ = G_.rows();
  // K L/2 unit-energy symbols over K N/2 nominal samples
  gain_ = std::sqrt(static_cast<double>(p_.N) / static_cast<double>(p_.L));

  const CMatd blk = Qp_ * Cf_ * mapping_block(p_.L).cast<cd>();  // N x L/2
  CMatd QX = CMatd::Zero(p_.N * p_.K, p_.data_length());
  for (Index k = 0; k < p_.K; ++k) QX.block(k * p_.N, k * p_.L / 2, p_.N, p_.L / 2) = blk;
  const Eigen::SparseMatrix<cd> Gc = G_.cast<cd>();
  A_ = gain_ * (Gc * QX);
}

std::string AfbmModem::name() const {
  switch (p_.filter) {
    case FilterKind::Phydyas: return "afbm-phydyas";
    case FilterKind::Hermite: return "afbm-hermite";
    case FilterKind::Rectangular: return "afbm-rect";
  }
  return "afbm";
}

CMatd AfbmModem::observe(const CMatd& R) const {
  if (R.rows() != M_) throw invalid_dimension("observe: row count must equal M");
  const Eigen::SparseMatrix<cd> Gt = G_.transpose().cast<cd>();
  return Gt * R;
}

CVecd AfbmModem::demodulate(const CVecd& r) const {
  if (r.size() != M_) throw invalid_dimension("demodulate: length must equal M");
  return A_.adjoint() * r;
}

CMatd AfbmModem::filtered_td_channel(const CMatd& H) const {
  if (H.rows() != M_ || H.cols() != M_) throw invalid_dimension("channel must be M x M");
  return observe(H * A_);
}

CMatd AfbmModem::afb_effective_channel(const CMatd& H) const {
  if (H.rows() != M_ || H.cols() != M_) throw invalid_dimension("channel must be M x M");
  return A_.adjoint() * (H * A_);
}

CMatd AfbmModem::afb_effective_channel(const DDChannel& ch) const { return A_.adjoint() * ch.apply<double>(A_); }

CMatd AfdmModem::observe(const CMatd& R) const {
  if (R.rows() != A_.rows()) throw invalid_dimension("observe: row count must equal the frame length");
  if (A_.rows() != p_.D) return A_.adjoint() * R;
  // W R = diag(post) F diag(pre) R, column-wise FFT
  Eigen::FFT<double> fft;
  const double s = 1.0 / std::sqrt(static_cast<double>(p_.D));
  CMatd Y(p_.D, R.cols());
  std::vector<cd> in(p_.D), out;
  for (Index c = 0; c < R.cols(); ++c) {
    for (Index i = 0; i < p_.D; ++i) in[i] = pre_(i) * R(i, c);
    fft.fwd(out, in);
    for (Index i = 0; i < p_.D; ++i) Y(i, c) = post_(i) * out[i] * s;
  }
  return Y;
}

AfdmModem::AfdmModem(const AfdmParams& p) : p_(p) {
  pre_ = chirp_vector(p_.chirp.c1, p_.D);
  post_ = chirp_vector(p_.chirp.c2, p_.D);
  if (p_.D < 1) throw invalid_dimension("AFDM size must be >= 1");
  const CMatd Wh = daft_matrix(p_.D, p_.chirp).adjoint();
  const Index out = p_.out_len > 0 ? p_.out_len : p_.D;
  if (out < p_.D) throw invalid_dimension("AFDM output length must be >= D");
  if (out == p_.D) {
    A_ = Wh;
    return;
  }
  // band-limited interpolation: spectrum of the D-sample frame placed around DC
  const CMatd FD = dft_matrix(p_.D);
  const CMatd Fo = dft_matrix(out);
  CMatd Z = CMatd::Zero(out, p_.D);
  const Index pos = (p_.D + 1) / 2;
  for (Index i = 0; i < pos; ++i) Z(i, i) = 1.0;
  for (Index i = pos; i < p_.D; ++i) Z(out - p_.D + i, i) = 1.0;
  const double s = std::sqrt(static_cast<double>(out) / static_cast<double>(p_.D));
  A_ = s * (Fo.adjoint() * (Z * (FD * Wh)));
}

AfdmParams matched_afdm(const WaveformParams& p, double f_max, Index xi) {
  AfdmParams a;
  a.D = p.K * p.P / 2;
  const Index out = p.K * p.N / 2;
  a.out_len = out > a.D ? out : 0;
  ChannelBudget b;
  b.f_max = f_max * static_cast<double>(a.D) / static_cast<double>(p.N);
  b.xi = xi;
  b.P_daft = a.D;
  a.chirp.c1 = validate_budget(b).c1;
  a.chirp.c2 = 0.0;
  return a;
}

GramReport gram_diagonality(const CMatd& H) {
  GramReport g;
  g.gram = H.adjoint() * H;
  double on = 0.0, all = 0.0;
  for (Index j = 0; j < g.gram.cols(); ++j)
    for (Index i = 0; i < g.gram.rows(); ++i) {
      double e = std::norm(g.gram(i, j));
      all += e;
      if (i == j) on += e;
    }
  if (on <= 0.0) throw degenerate_error("gram diagonality undefined for a zero matrix");
  g.ratio = (all - on) / on;
  return g;
}

}  // namespace afbm
