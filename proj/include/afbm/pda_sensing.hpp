#pragma once

#include <vector>

#include "afbm/afbm_modem.hpp"

namespace afbm {

struct DelayDopplerGrid {
  std::vector<Index> delays;     // integer sample delays, ascending
  std::vector<double> dopplers;  // digital Doppler, ascending
  Index size() const { return static_cast<Index>(delays.size() * dopplers.size()); }
  Index index(Index k, Index d) const { return k * static_cast<Index>(dopplers.size()) + d; }
};

// K_tau delays spread over [0, ell_max], D_nu Dopplers over [-f_max, f_max]
DelayDopplerGrid make_grid(Index K_tau, Index D_nu, Index ell_max, double f_max);

struct SensingDictionary {
  CMatd E;  // obs_length x G, delay-major
  DelayDopplerGrid grid;
  CVecd x_pilot;
};

SensingDictionary build_dictionary(const Waveform& wf, const CVecd& x_pilot, const DelayDopplerGrid& grid,
                                   double doppler_period);

struct BGParams {
  double rho = 0.0;
  cd h_bar{0.0, 0.0};
  double sigma_bar = 0.0;
};

BGParams em_update(const VecXd& rho_hat, const CVecd& h_hat, const VecXd& var_hat, bool pin_mean = true);

struct PdaConfig {
  double N0 = 1e-2;
  Index num_targets = 1;
  int i_max = 30;
  double beta = 0.7;
  double var_floor = 1e-12;
};

struct PdaResult {
  CVecd h_hat;
  VecXd rho_hat;
  VecXd var_hat;
  BGParams theta;
  int jitter_events = 0;
  int var_clamps = 0;
};

PdaResult pda_estimate(const CVecd& r_bar, const SensingDictionary& dict, const PdaConfig& cfg);

struct Radio {
  double fc = 4e9;
  double fs = 1e6;
  Index N = 256;  // samples per Doppler period
};

struct Target {
  Index atom_k = 0, atom_d = 0;
  double tau_s = 0.0, range_m = 0.0, nu_hz = 0.0, velocity_mps = 0.0;
  cd gain{0.0, 0.0};
  double rho = 0.0;
};

inline constexpr double kSpeedOfLight = 299792458.0;

// monostatic: range = c tau / 2, velocity = nu c / (2 fc)
double delay_to_range(double ell, const Radio& radio);
double doppler_to_velocity(double f, const Radio& radio);

std::vector<Target> extract_targets(const PdaResult& est, const DelayDopplerGrid& grid, Index num_targets,
                                    const Radio& radio);

}  // namespace afbm
