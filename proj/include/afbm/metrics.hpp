#pragma once

#include <vector>

#include "afbm/afbm_modem.hpp"
#include "afbm/pda_sensing.hpp"

namespace afbm {

double papr_db(const CVecd& s);

struct CCDF {
  std::vector<double> thresholds_db;
  std::vector<double> exceed_prob;
};

// P(PAPR > t) for each threshold
CCDF papr_ccdf(const std::vector<double>& papr_values, const std::vector<double>& thresholds_db);
// smallest t with P(PAPR > t) <= prob
double ccdf_quantile(std::vector<double> papr_values, double prob);

// band-limited interpolation; the spectrum is cut at its weakest bin so an
// off-centre band is not split
CVecd interpolate(const CVecd& s, Index factor);

struct PSDProfile {
  std::vector<Index> bins;
  std::vector<double> power_db;
};

// per-position transmit power diag(A A^H), peak normalised
PSDProfile psd_profile(const Waveform& wf);

// averaged periodogram (DC centred, peak 0 dB) of the columns of S, zero padded to nfft
PSDProfile periodogram(const CMatd& S, Index nfft);

// mean out-of-band power (dB) for normalised frequency |f| > edge (cycles/sample, 0..0.5)
double oob_floor_db(const PSDProfile& psd, double edge);

struct AmbiguityCuts {
  std::vector<Index> lags;
  std::vector<double> delay_cut;  // |A(lag, 0)|
  std::vector<double> dopplers;
  std::vector<double> doppler_cut;  // |A(0, f)|
};

// A(l, f) = |sum_n s[n] conj(s[n+l]) exp(-j2 pi f n / M)|, A(0,0) = 1
double ambiguity_value(const CVecd& s, Index lag, double f);
AmbiguityCuts ambiguity(const CVecd& s, Index max_lag, const std::vector<double>& dopplers);
// largest value of a delay cut outside the main lobe (walk out to the first local minimum)
double peak_sidelobe(const std::vector<Index>& lags, const std::vector<double>& cut);

// Gray-mapped QPSK: one bit per sign of each quadrature
Index qpsk_bit_errors(const CVecd& x_hat, const CVecd& x_true);
double ber(const CVecd& x_hat, const CVecd& x_true);

// random QPSK with energy Es
template <class Rng> CVecd qpsk_symbols(Index n, Rng& rng, double Es = 1.0) {
  CVecd x(n);
  const double a = std::sqrt(Es / 2.0);
  for (Index i = 0; i < n; ++i) {
    auto b = rng();
    x(i) = cd((b & 1) ? -a : a, (b & 2) ? -a : a);
  }
  return x;
}

struct TruthTarget {
  double range_m = 0.0;
  double velocity_mps = 0.0;
};

struct RmseAccumulator {
  double sum_range2 = 0.0, sum_vel2 = 0.0;
  Index pairs = 0;
  // minimal total normalised distance assignment; missing estimates are paired with the worst error
  void add(const std::vector<Target>& est, const std::vector<TruthTarget>& truth, double range_scale,
           double velocity_scale);
  double range_rmse() const;
  double velocity_rmse() const;
};

}  // namespace afbm
