#include "doctest.h"

#include "afbm/dd_channel.hpp"
#include "afbm/gabp_detector.hpp"
#include "afbm/metrics.hpp"

using namespace afbm;

namespace {

CMatd random_matrix(Index r, Index c, std::mt19937_64& rng, double var) {
  return CMatd::NullaryExpr(r, c, [&](Index, Index) { return complex_normal(rng, var); });
}

}  // namespace

TEST_CASE("qpsk denoiser") {
  const double c = std::sqrt(0.5);
  // zero belief carries no information
  Denoised d = qpsk_denoise(cd(0, 0), 1.0, 1.0);
  CHECK(std::abs(d.mean) == 0.0);
  CHECK(d.var == doctest::Approx(1.0));
  // confident belief snaps to the constellation point
  d = qpsk_denoise(cd(c, -c), 1e-6, 1.0);
  CHECK(std::abs(d.mean - cd(c, -c)) < 1e-12);
  CHECK(d.var < 1e-12);
  // closed form per quadrature
  d = qpsk_denoise(cd(0.3, 0.1), 0.5, 2.0);
  CHECK(d.mean.real() == doctest::Approx(std::tanh(2.0 * 0.3 / 0.5)));
  CHECK(d.mean.imag() == doctest::Approx(std::tanh(2.0 * 0.1 / 0.5)));
  CHECK(d.var == doctest::Approx(2.0 - std::norm(d.mean)));
  // odd symmetry and bounded output
  Denoised e = qpsk_denoise(cd(-0.3, -0.1), 0.5, 2.0);
  CHECK(std::abs(e.mean + d.mean) < 1e-15);
  // a vanishing variance is floored, not divided by
  d = qpsk_denoise(cd(0.2, -0.2), 0.0, 1.0);
  CHECK(std::isfinite(d.mean.real()));
  CHECK(std::abs(d.mean.real() - c) < 1e-12);
}

TEST_CASE("config validation") {
  const CMatd H = CMatd::Identity(4, 4);
  GabpConfig cfg;
  cfg.i_max = 0;
  CHECK_THROWS_AS(gabp_detect<double>(CVecd::Zero(4), H, cfg), std::invalid_argument);
  cfg = {};
  cfg.beta = 0.0;
  CHECK_THROWS_AS(gabp_detect<double>(CVecd::Zero(4), H, cfg), std::invalid_argument);
  cfg = {};
  cfg.beta = 1.5;
  CHECK_THROWS_AS(gabp_detect<double>(CVecd::Zero(4), H, cfg), std::invalid_argument);
  cfg = {};
  CHECK_THROWS_AS(gabp_detect<double>(CVecd::Zero(5), H, cfg), invalid_dimension);
}

TEST_CASE("identity channel: one iteration recovers the symbols") {
  std::mt19937_64 rng(2);
  const CVecd x = qpsk_symbols(16, rng);
  GabpConfig cfg;
  cfg.i_max = 1;
  cfg.beta = 1.0;
  cfg.sigma2 = 1e-3;
  const CVecd xh = gabp_detect<double>(x, CMatd::Identity(16, 16), cfg);
  CHECK((xh - x).norm() < 1e-12);
}

TEST_CASE("tall random channel at high SNR") {
  std::mt19937_64 rng(4);
  const Index Nr = 96, Mx = 24;
  int errors = 0;
  for (int t = 0; t < 20; ++t) {
    const CMatd H = random_matrix(Nr, Mx, rng, 1.0 / Mx);
    const CVecd x = qpsk_symbols(Mx, rng);
    const double s2 = 1e-2;
    const CVecd r = add_noise(H * x, s2, rng);
    GabpConfig cfg;
    cfg.sigma2 = s2;
    std::vector<double> trace;
    const CVecd xh = gabp_detect<double>(r, H, cfg, &trace);
    CHECK(trace.size() == 20);
    errors += static_cast<int>(qpsk_bit_errors(xh, x));
    // residual ends close to the noise floor
    CHECK(trace.back() < 3.0 * s2);
    CHECK(trace.back() <= trace.front());
  }
  CHECK(errors == 0);
}

TEST_CASE("gabp is close to lmmse on a sparse channel") {
  std::mt19937_64 rng(5);
  const Index M = 64;
  ChannelBudget b{4, 1.0, 1, 64};
  Index eg = 0, el = 0;
  for (int t = 0; t < 40; ++t) {
    const CMatd H = DDChannel(random_paths(3, b, rng), M, 0.02, M).matrix();
    const CVecd x = qpsk_symbols(M, rng);
    const double s2 = 0.1;
    const CVecd r = add_noise(H * x, s2, rng);
    GabpConfig cfg;
    cfg.sigma2 = s2;
    eg += qpsk_bit_errors(gabp_detect<double>(r, H, cfg), x);
    el += qpsk_bit_errors(lmmse<double>(r, H, s2), x);
  }
  // never much worse than the linear estimator
  CHECK(static_cast<double>(eg) <= 1.5 * static_cast<double>(el) + 10.0);
}

TEST_CASE("float and double detectors agree") {
  std::mt19937_64 rng(6);
  const CMatd H = random_matrix(48, 16, rng, 1.0 / 16);
  const CVecd x = qpsk_symbols(16, rng);
  const CVecd r = add_noise(H * x, 0.05, rng);
  GabpConfig cfg;
  cfg.sigma2 = 0.05;
  const CVecd xd = gabp_detect<double>(r, H, cfg);
  const CVec<float> xf = gabp_detect<float>(r.cast<std::complex<float>>(), H.cast<std::complex<float>>(), cfg);
  CHECK((xf.cast<cd>() - xd).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("zero columns are reported and left at zero") {
  std::mt19937_64 rng(7);
  CMatd H = random_matrix(12, 4, rng, 0.25);
  H.col(2).setZero();
  const GabpDetector<double> det(H);
  REQUIRE(det.undetectable().size() == 1);
  CHECK(det.undetectable()[0] == 2);
  GabpConfig cfg;
  cfg.sigma2 = 0.01;
  const CVecd xh = det.detect(H * qpsk_symbols(4, rng), cfg);
  CHECK(xh(2) == cd(0, 0));
  CHECK(xh.allFinite());
}

TEST_CASE("detector is deterministic and reusable") {
  std::mt19937_64 rng(8);
  const CMatd H = random_matrix(32, 8, rng, 0.125);
  const CVecd r = add_noise(H * qpsk_symbols(8, rng), 0.1, rng);
  const GabpDetector<double> det(H);
  GabpConfig cfg;
  cfg.sigma2 = 0.1;
  const CVecd a = det.detect(r, cfg), b = det.detect(r, cfg);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - gabp_detect<double>(r, H, cfg)).norm() == 0.0);
}

TEST_CASE("lmmse") {
  std::mt19937_64 rng(9);
  const CMatd H = random_matrix(20, 10, rng, 0.1);
  const CVecd x = complex_normal_vector(10, rng, 1.0);
  // zero noise on a full column rank channel: exact up to the ridge
  bool ridged = false;
  const CVecd xh = LmmseSolver<double>(H).solve(H * x, 0.0, &ridged);
  CHECK(ridged);
  CHECK((xh - x).norm() < 1e-6);
  const double s2 = 0.3;
  const CVecd r = complex_normal_vector(20, rng, 1.0);
  const CMatd S = H.adjoint() * H + s2 * CMatd::Identity(10, 10);
  const CVecd ref = S.ldlt().solve(H.adjoint() * r);
  CHECK((lmmse<double>(r, H, s2) - ref).norm() < 1e-10);
  CHECK((lmmse_ftd<double>(r, H, s2) - ref).norm() < 1e-10);
  CHECK((lmmse_afb<double>(r, H, s2) - ref).norm() < 1e-10);
  CHECK_THROWS(lmmse<double>(r, H, -1.0));
  CHECK_THROWS_AS(lmmse<double>(CVecd::Zero(3), H, 0.1), invalid_dimension);
}
