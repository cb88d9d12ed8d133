#include "doctest.h"

#include "afbm/metrics.hpp"
#include "afbm/pda_sensing.hpp"

using namespace afbm;

namespace {

WaveformParams sense_params() {
  WaveformParams p;
  p.L = 16;
  p.N = 32;
  p.P = 32;
  p.K = 2;
  p.filter = FilterKind::Phydyas;
  p.chirp_L = {0.0, 1.0 / (kPi * 256)};
  p.chirp_P = {validate_budget({7, 1.5, 0, 32}).c1, 1.0 / (kPi * 1024)};
  return p;
}

}  // namespace

TEST_CASE("grid layout") {
  const DelayDopplerGrid g = make_grid(8, 5, 7, 2.0);
  CHECK(g.size() == 40);
  CHECK(g.delays.front() == 0);
  CHECK(g.delays.back() == 7);
  CHECK(g.dopplers.front() == doctest::Approx(-2.0));
  CHECK(g.dopplers[2] == doctest::Approx(0.0));
  CHECK(g.dopplers.back() == doctest::Approx(2.0));
  CHECK(g.index(1, 3) == 8);
  const DelayDopplerGrid one = make_grid(1, 1, 7, 2.0);
  CHECK(one.delays[0] == 0);
  CHECK(one.dopplers[0] == 0.0);
  CHECK_THROWS_AS(make_grid(0, 3, 7, 1.0), invalid_dimension);
}

TEST_CASE("unit conversions") {
  Radio r{4e9, 1e6, 256};
  CHECK(delay_to_range(1.0, r) == doctest::Approx(kSpeedOfLight * 1e-6 / 2.0));
  CHECK(delay_to_range(0.0, r) == 0.0);
  // one Doppler bin = fs / N Hz
  CHECK(doppler_to_velocity(1.0, r) == doctest::Approx((1e6 / 256.0) * kSpeedOfLight / 8e9));
  CHECK(doppler_to_velocity(-1.0, r) == doctest::Approx(-doppler_to_velocity(1.0, r)));
}

TEST_CASE("em update closed form") {
  VecXd rho(4);
  rho << 1.0, 0.0, 0.5, 0.5;
  CVecd h(4);
  h << cd(2, 0), cd(9, 9), cd(0, 1), cd(0, -1);
  VecXd v = VecXd::Constant(4, 0.1);
  BGParams t = em_update(rho, h, v, true);
  CHECK(t.rho == doctest::Approx(0.5));
  CHECK(t.h_bar == cd(0, 0));
  // (1*(4+0.1) + 0.5*(1+0.1) + 0.5*(1+0.1)) / 2
  CHECK(t.sigma_bar == doctest::Approx((4.1 + 1.1) / 2.0));
  t = em_update(rho, h, v, false);
  CHECK(std::abs(t.h_bar - cd(1, 0)) < 1e-12);
  CHECK_THROWS_AS(em_update(rho, h.head(3), v, true), invalid_dimension);
}

TEST_CASE("dictionary atoms are single path observations") {
  const AfbmModem wf(sense_params());
  std::mt19937_64 rng(1);
  const CVecd pilot = qpsk_symbols(wf.num_symbols(), rng);
  const DelayDopplerGrid g = make_grid(4, 3, 6, 1.5);
  const SensingDictionary d = build_dictionary(wf, pilot, g, 32.0);
  CHECK(d.E.rows() == wf.obs_length());
  CHECK(d.E.cols() == 12);
  const DDChannel ch({PathParams{cd(1, 0), g.delays[2], g.dopplers[1]}}, wf.frame_length(), wf.channel_c1(), 32.0);
  const CVecd ref = wf.observe_vec(ch.apply<double>(CMatd(wf.modulate(pilot))));
  CHECK((d.E.col(g.index(2, 1)) - ref).norm() < 1e-10 * ref.norm());
}

TEST_CASE("noiseless on-grid targets are recovered") {
  const AfbmModem wf(sense_params());
  const DelayDopplerGrid g = make_grid(8, 7, 7, 1.5);
  std::mt19937_64 rng(2);
  const SensingDictionary d = build_dictionary(wf, qpsk_symbols(wf.num_symbols(), rng), g, 32.0);
  CVecd h = CVecd::Zero(g.size());
  h(g.index(1, 2)) = cd(0.8, 0.3);
  h(g.index(5, 6)) = cd(-0.2, 0.6);
  const CVecd r = d.E * h;
  PdaConfig cfg;
  cfg.N0 = 1e-6;
  cfg.num_targets = 2;
  const PdaResult est = pda_estimate(r, d, cfg);
  CHECK((est.h_hat - h).cwiseAbs().maxCoeff() < 1e-3);
  Radio radio{4e9, 1e6, 32};
  const auto targets = extract_targets(est, g, 2, radio);
  REQUIRE(targets.size() == 2);
  CHECK(targets[0].atom_k == 1);
  CHECK(targets[0].atom_d == 2);
  CHECK(targets[1].atom_k == 5);
  CHECK(targets[1].atom_d == 6);
  CHECK(targets[0].range_m == doctest::Approx(delay_to_range(g.delays[1], radio)));
  CHECK(targets[1].velocity_mps == doctest::Approx(doppler_to_velocity(g.dopplers[6], radio)));
  CHECK(est.rho_hat.allFinite());
  CHECK((est.rho_hat.array() >= 0.0).all());
  CHECK((est.rho_hat.array() <= 1.0).all());
}

TEST_CASE("pda input validation") {
  const AfbmModem wf(sense_params());
  const DelayDopplerGrid g = make_grid(2, 2, 3, 1.0);
  std::mt19937_64 rng(3);
  const SensingDictionary d = build_dictionary(wf, qpsk_symbols(wf.num_symbols(), rng), g, 32.0);
  PdaConfig cfg;
  CHECK_THROWS_AS(pda_estimate(CVecd::Zero(3), d, cfg), invalid_dimension);
  cfg.N0 = 0.0;
  CHECK_THROWS(pda_estimate(CVecd::Zero(d.E.rows()), d, cfg));
  cfg = {};
  cfg.num_targets = 5;
  CHECK_THROWS(pda_estimate(CVecd::Zero(d.E.rows()), d, cfg));
}

TEST_CASE("extract targets ranks by rho |h|^2 with a stable tie rule") {
  const DelayDopplerGrid g = make_grid(2, 2, 1, 1.0);
  PdaResult est;
  est.rho_hat = VecXd::Constant(4, 0.5);
  est.h_hat = CVecd::Ones(4);
  est.h_hat(3) = 2.0;
  const auto t = extract_targets(est, g, 3, Radio{});
  REQUIRE(t.size() == 3);
  CHECK(t[0].atom_k == 1);
  CHECK(t[0].atom_d == 1);
  CHECK(g.index(t[1].atom_k, t[1].atom_d) == 0);
  CHECK(g.index(t[2].atom_k, t[2].atom_d) == 1);
  CHECK(extract_targets(est, g, 10, Radio{}).size() == 4);
}
