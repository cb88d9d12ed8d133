#include "afbm/pda_sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace afbm {

DelayDopplerGrid make_grid(Index K_tau, Index D_nu, Index ell_max, double f_max) {
  if (K_tau < 1 || D_nu < 1) throw invalid_dimension("grid needs at least one bin per axis");
  DelayDopplerGrid g;
  for (Index k = 0; k < K_tau; ++k)
    g.delays.push_back(K_tau == 1 ? 0 : static_cast<Index>(std::llround(static_cast<double>(k * ell_max) / (K_tau - 1))));
  for (Index d = 0; d < D_nu; ++d)
    g.dopplers.push_back(D_nu == 1 ? 0.0 : -f_max + 2.0 * f_max * static_cast<double>(d) / static_cast<double>(D_nu - 1));
  return g;
}

SensingDictionary build_dictionary(const Waveform& wf, const CVecd& x_pilot, const DelayDopplerGrid& grid,
                                   double doppler_period) {
  SensingDictionary dict{CMatd(wf.obs_length(), grid.size()), grid, x_pilot};
  const CVecd s = wf.modulate(x_pilot);
  for (std::size_t k = 0; k < grid.delays.size(); ++k)
    for (std::size_t d = 0; d < grid.dopplers.size(); ++d) {
      DDChannel ch({PathParams{cd(1.0, 0.0), grid.delays[k], grid.dopplers[d]}}, wf.frame_length(), wf.channel_c1(),
                   doppler_period);
      const Index col = grid.index(static_cast<Index>(k), static_cast<Index>(d));
      dict.E.col(col) = wf.observe(ch.apply<double>(s));
      if (dict.E.col(col).squaredNorm() == 0.0) throw degenerate_error("pilot does not excite a grid atom");
    }
  return dict;
}

BGParams em_update(const VecXd& rho_hat, const CVecd& h_hat, const VecXd& var_hat, bool pin_mean) {
  const Index G = rho_hat.size();
  if (h_hat.size() != G || var_hat.size() != G) throw invalid_dimension("em_update: length mismatch");
  BGParams t;
  t.rho = rho_hat.mean();
  const double mass = std::max(G * t.rho, 1e-300);
  if (!pin_mean) {
    cd acc(0.0, 0.0);
    for (Index m = 0; m < G; ++m) acc += rho_hat(m) * h_hat(m);
    t.h_bar = acc / mass;
  }
  double acc = 0.0;
  for (Index m = 0; m < G; ++m) acc += rho_hat(m) * (std::norm(h_hat(m) - t.h_bar) + var_hat(m));
  t.sigma_bar = acc / mass;
  return t;
}

PdaResult pda_estimate(const CVecd& r_bar, const SensingDictionary& dict, const PdaConfig& cfg) {
  const CMatd& E = dict.E;
  const Index Nn = E.rows(), G = E.cols();
  if (r_bar.size() != Nn) throw invalid_dimension("pda: observation length mismatch");
  if (!(cfg.N0 > 0.0)) throw std::invalid_argument("pda: N0 must be positive");
  if (cfg.num_targets < 1 || cfg.num_targets > G) throw std::invalid_argument("pda: bad target count");
  constexpr double kRhoMin = 1e-6, kRhoMax = 1.0 - 1e-6;

  PdaResult res;
  BGParams th{static_cast<double>(cfg.num_targets) / G, cd(0.0, 0.0), 1.0 / cfg.num_targets};
  res.h_hat = CVecd::Zero(G);
  res.var_hat = VecXd::Constant(G, 1.0 / G);
  res.rho_hat = VecXd::Constant(G, th.rho);
  VecXd slab_var(G);
  CVecd slab_mean(G);

  for (int it = 0; it < cfg.i_max; ++it) {
    // common covariance, factored once per iteration
    CMatd Sigma = E * res.var_hat.asDiagonal() * E.adjoint();
    Sigma.diagonal().array() += cfg.N0;
    Eigen::LLT<CMatd> llt(Sigma);
    if (llt.info() != Eigen::Success) {
      Sigma.diagonal().array() += cfg.N0 * 1e-6;
      llt.compute(Sigma);
      ++res.jitter_events;
    }
    const CMatd Z = llt.solve(E);  // Sigma^{-1} E
    const CVecd u = Z.adjoint() * (r_bar - E * res.h_hat);

    const double rho = std::clamp(th.rho, kRhoMin, kRhoMax);
    for (Index m = 0; m < G; ++m) {
      const double eta = std::max(std::real(Z.col(m).dot(E.col(m))), cfg.var_floor);
      const cd h_ext = res.h_hat(m) + u(m) / eta;
      double v_ext = (1.0 - eta * res.var_hat(m)) / eta;
      if (v_ext < cfg.var_floor) {
        v_ext = cfg.var_floor;
        ++res.var_clamps;
      }
      const double sb = th.sigma_bar;
      // sparsity rate in the log domain
      const double expo = -std::norm(h_ext) / v_ext + std::norm(h_ext - th.h_bar) / (v_ext + sb);
      const double lg = std::log((1.0 - rho) / rho) + std::log((v_ext + sb) / v_ext) + expo;
      const double rho_m = lg > 700.0 ? 0.0 : 1.0 / (std::exp(lg) + 1.0);
      slab_mean(m) = (sb * h_ext + v_ext * th.h_bar) / (v_ext + sb);
      slab_var(m) = sb * v_ext / (v_ext + sb);
      res.rho_hat(m) = rho_m;
      res.h_hat(m) = cfg.beta * rho_m * slab_mean(m) + (1.0 - cfg.beta) * res.h_hat(m);
      res.var_hat(m) = cfg.beta * ((1.0 - rho_m) * rho_m * std::norm(slab_mean(m)) + rho_m * slab_var(m)) +
                       (1.0 - cfg.beta) * res.var_hat(m);
    }
    th = em_update(res.rho_hat, slab_mean, slab_var, true);
    th.rho = std::clamp(th.rho, kRhoMin, kRhoMax);
    th.sigma_bar = std::max(th.sigma_bar, cfg.var_floor);
  }
  res.theta = th;
  return res;
}

double delay_to_range(double ell, const Radio& radio) { return kSpeedOfLight * (ell / radio.fs) / 2.0; }

double doppler_to_velocity(double f, const Radio& radio) {
  const double nu = f * radio.fs / static_cast<double>(radio.N);
  return nu * kSpeedOfLight / (2.0 * radio.fc);
}

std::vector<Target> extract_targets(const PdaResult& est, const DelayDopplerGrid& grid, Index num_targets,
                                    const Radio& radio) {
  const Index G = grid.size();
  std::vector<Index> order(G);
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<double> score(G);
  for (Index m = 0; m < G; ++m) score[m] = est.rho_hat(m) * std::norm(est.h_hat(m));
  // delay-major index order doubles as the tie rule
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return score[a] > score[b]; });
  std::vector<Target> out;
  const Index D = static_cast<Index>(grid.dopplers.size());
  for (Index i = 0; i < std::min(num_targets, G); ++i) {
    Target t;
    const Index m = order[i];
    t.atom_k = m / D;
    t.atom_d = m % D;
    const double ell = static_cast<double>(grid.delays[t.atom_k]), f = grid.dopplers[t.atom_d];
    t.tau_s = ell / radio.fs;
    t.range_m = delay_to_range(ell, radio);
    t.nu_hz = f * radio.fs / static_cast<double>(radio.N);
    t.velocity_mps = doppler_to_velocity(f, radio);
    t.gain = est.h_hat(m);
    t.rho = est.rho_hat(m);
    out.push_back(t);
  }
  return out;
}

}  // namespace afbm
