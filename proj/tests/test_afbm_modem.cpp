#include "doctest.h"

#include "afbm/afbm_modem.hpp"
#include "afbm/metrics.hpp"

using namespace afbm;

namespace {

WaveformParams small_params(FilterKind f, Index L = 16, Index N = 32, Index P = 32, Index K = 4) {
  WaveformParams p;
  p.L = L;
  p.N = N;
  p.P = P;
  p.K = K;
  p.filter = f;
  p.chirp_L = {0.0, 1.0 / (kPi * L * L)};
  p.chirp_P = {0.01, 1.0 / (kPi * P * P)};
  p.chirp_N = {0.0, 1.0 / (kPi * N * N)};
  return p;
}

}  // namespace

TEST_CASE("mapping keeps the outer quarters") {
  const MatXd X = mapping_block(8);
  CHECK(X.rows() == 8);
  CHECK(X.cols() == 4);
  CHECK(X(0, 0) == 1.0);
  CHECK(X(1, 1) == 1.0);
  CHECK(X(6, 2) == 1.0);
  CHECK(X(7, 3) == 1.0);
  CHECK(X.middleRows(2, 4).isZero(0));
  CHECK(X.transpose() * X == MatXd::Identity(4, 4));
  CHECK_THROWS_AS(mapping_block(6), invalid_dimension);

  std::mt19937_64 rng(1);
  const CVecd x = complex_normal_vector(3 * 8, rng, 1.0);
  const CVecd a = map_symbols(x, 16, 3);
  CHECK((a - mapping_matrix(16, 3).cast<cd>() * x).norm() == 0.0);
  CHECK((unmap_symbols(a, 16, 3) - x).norm() == 0.0);
}

TEST_CASE("frame dimensions") {
  const AfbmModem ph(small_params(FilterKind::Phydyas));
  CHECK(ph.frame_length() == 4 * 32 + 3 * 16);
  CHECK(ph.num_symbols() == 32);
  CHECK(ph.obs_length() == 128);
  CHECK(ph.tx_matrix().rows() == ph.frame_length());
  CHECK(ph.tx_matrix().cols() == 32);
  const AfbmModem he(small_params(FilterKind::Hermite));
  CHECK(he.frame_length() == 48 + 3 * 16);
  CHECK(ph.gain() == doctest::Approx(std::sqrt(2.0)));
  CHECK(ph.name() == "afbm-phydyas");
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(AfbmModem(small_params(FilterKind::Hermite, 16, 32, 40)), invalid_dimension);
  CHECK_THROWS_AS(AfbmModem(small_params(FilterKind::Hermite, 16, 32, 8)), invalid_dimension);
  CHECK_THROWS_AS(AfbmModem(small_params(FilterKind::Hermite, 10, 32, 32)), invalid_dimension);
  CHECK_THROWS_AS(AfbmModem(small_params(FilterKind::Hermite, 16, 32, 32, 0)), invalid_dimension);
}

TEST_CASE("compensation equalises active column energies") {
  for (FilterKind f : {FilterKind::Phydyas, FilterKind::Hermite}) {
    const WaveformParams p = small_params(f);
    const Compensation c = compensation(p);
    CHECK(c.c_tilde.size() == p.L);
    for (Index l = 0; l < p.L; ++l) {
      const bool act = l < p.L / 4 || l >= p.L - p.L / 4;
      if (act)
        CHECK(c.b_tilde(l) * c.b_tilde(l) * c.c_tilde(l) == doctest::Approx(1.0));
      else
        CHECK(c.b_tilde(l) == 0.0);
    }
    CHECK(std::isfinite(c.residual_offdiag));
  }
}

TEST_CASE("rectangular one-symbol frame collapses to the inner transform") {
  WaveformParams p = small_params(FilterKind::Rectangular, 8, 8, 8, 1);
  p.chirp_P = {};
  p.chirp_N = {};
  const AfbmModem m(p);
  const Compensation& c = m.comp();
  // Q_P is the inverse DFT and the filter is the identity: every column has unit energy
  for (Index l = 0; l < 8; ++l) CHECK(c.c_tilde(l) == doctest::Approx(1.0));
  CHECK(c.residual_offdiag < 1e-12);
  const CMatd AhA = m.tx_matrix().adjoint() * m.tx_matrix();
  CHECK((AhA - m.gain() * m.gain() * CMatd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("noiseless identity-channel loopback has no decision errors") {
  std::mt19937_64 rng(3);
  for (FilterKind f : {FilterKind::Phydyas, FilterKind::Hermite}) {
    const AfbmModem m(small_params(f, 32, 64, 64, 6));
    for (int t = 0; t < 20; ++t) {
      const CVecd x = qpsk_symbols(m.num_symbols(), rng);
      const CVecd y = m.demodulate(m.modulate(x));
      CHECK(qpsk_bit_errors(y, x) == 0);
    }
  }
}

TEST_CASE("modulate and demodulate are adjoint") {
  std::mt19937_64 rng(4);
  const AfbmModem m(small_params(FilterKind::Hermite));
  const CVecd x = complex_normal_vector(m.num_symbols(), rng, 1.0);
  const CVecd r = complex_normal_vector(m.frame_length(), rng, 1.0);
  const cd lhs = m.modulate(x).dot(r);
  const cd rhs = x.dot(m.demodulate(r));
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
  CHECK((m.modulate(x) - m.tx_matrix() * x).norm() < 1e-12);
}

TEST_CASE("steady-state sample power is Es") {
  const AfbmModem m(small_params(FilterKind::Phydyas, 16, 32, 32, 16));
  const VecXd pw = m.tx_matrix().rowwise().squaredNorm();
  // middle of the frame, away from the ramp tails
  const double mid = pw.segment(pw.size() / 2 - 16, 32).mean();
  CHECK(mid == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("effective channels") {
  std::mt19937_64 rng(6);
  const AfbmModem m(small_params(FilterKind::Hermite));
  ChannelBudget b{4, 1.0, 1, 32};
  const DDChannel ch(random_paths(3, b, rng), m.frame_length(), m.channel_c1(), 32.0);
  const CMatd H = ch.matrix();
  CHECK((m.filtered_td_channel(H) - m.filtered_td_channel(ch)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m.afb_effective_channel(H) - m.afb_effective_channel(ch)).cwiseAbs().maxCoeff() < 1e-12);
  const CMatd Hf = m.obs_channel(ch);
  CHECK(Hf.rows() == m.obs_length());
  CHECK(Hf.cols() == m.num_symbols());
  // identity channel: effective AFB channel is A^H A
  const CMatd I = CMatd::Identity(m.frame_length(), m.frame_length());
  CHECK((m.afb_effective_channel(I) - m.tx_matrix().adjoint() * m.tx_matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("afdm baseline") {
  AfdmParams a;
  a.D = 16;
  a.chirp = {3.0 / 32.0, 0.0};
  const AfdmModem m(a);
  const CMatd& A = m.tx_matrix();
  CHECK((A.adjoint() * A - CMatd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((A - daft_matrix(16, a.chirp).adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  std::mt19937_64 rng(8);
  const CMatd R = CMatd::NullaryExpr(16, 3, [&](Index, Index) { return complex_normal(rng, 1.0); });
  // FFT path matches the dense transform
  CHECK((m.observe(R) - A.adjoint() * R).cwiseAbs().maxCoeff() < 1e-12);

  a.out_len = 32;
  const AfdmModem mi(a);
  CHECK(mi.frame_length() == 32);
  CHECK((mi.tx_matrix().adjoint() * mi.tx_matrix() - 2.0 * CMatd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-10);
  a.out_len = 8;
  CHECK_THROWS_AS(AfdmModem{a}, invalid_dimension);
}

TEST_CASE("matched afdm occupies the AFBM band and duration") {
  const WaveformParams p = small_params(FilterKind::Phydyas, 16, 32, 24, 4);
  const AfdmParams a = matched_afdm(p, 1.0, 1);
  CHECK(a.D == 48);
  CHECK(a.out_len == 64);
  CHECK(a.chirp.c2 == 0.0);
  // f_max in DAF bins = 1 * 48 / 32 = 1.5 -> ceil 2
  CHECK(a.chirp.c1 == doctest::Approx((2.0 * (2 + 1) + 1) / (2.0 * 48)));
  const AfdmParams b = matched_afdm(small_params(FilterKind::Phydyas), 1.0, 1);
  CHECK(b.out_len == 0);
  CHECK(b.D == 64);
}

TEST_CASE("gram diagonality") {
  CHECK(gram_diagonality(CMatd::Identity(5, 5)).ratio == 0.0);
  CMatd H(2, 2);
  H << 1.0, 1.0, 0.0, 1.0;
  // H^H H = [[1,1],[1,2]] -> off 2, on 5
  CHECK(gram_diagonality(H).ratio == doctest::Approx(0.4));
  CHECK_THROWS_AS(gram_diagonality(CMatd::Zero(3, 3)), degenerate_error);
}
