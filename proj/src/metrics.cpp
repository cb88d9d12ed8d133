#include "afbm/metrics.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace afbm {

double papr_db(const CVecd& s) {
  const double mean = s.squaredNorm() / static_cast<double>(s.size());
  if (s.size() == 0 || !(mean > 0.0)) throw degenerate_error("PAPR undefined for a zero frame");
  return 10.0 * std::log10(s.cwiseAbs2().maxCoeff() / mean);
}

CCDF papr_ccdf(const std::vector<double>& papr_values, const std::vector<double>& thresholds_db) {
  CCDF c;
  c.thresholds_db = thresholds_db;
  std::vector<double> v = papr_values;
  std::sort(v.begin(), v.end());
  std::vector<double> t = thresholds_db;
  std::sort(t.begin(), t.end());
  c.thresholds_db = t;
  for (double th : t) {
    auto it = std::upper_bound(v.begin(), v.end(), th);
    c.exceed_prob.push_back(static_cast<double>(v.end() - it) / static_cast<double>(v.size()));
  }
  return c;
}

double ccdf_quantile(std::vector<double> v, double prob) {
  if (v.empty()) throw std::invalid_argument("ccdf_quantile: no samples");
  std::sort(v.begin(), v.end(), std::greater<>());
  const auto k = static_cast<std::size_t>(std::floor(prob * static_cast<double>(v.size())));
  return v[std::min(k, v.size() - 1)];
}

CVecd interpolate(const CVecd& s, Index factor) {
  if (factor < 1) throw std::invalid_argument("interpolation factor must be >= 1");
  if (factor == 1) return s;
  const Index n = s.size();
  Eigen::FFT<double> fft;
  std::vector<cd> in(s.data(), s.data() + n), X;
  fft.fwd(X, in);
  Index cut = 0;
  for (Index i = 1; i < n; ++i)
    if (std::norm(X[i]) < std::norm(X[cut])) cut = i;
  // rotate so the weakest bin comes first; the band then stays contiguous
  std::vector<cd> Y(n * factor, cd(0.0, 0.0));
  for (Index i = 0; i < n; ++i) Y[i] = X[(cut + i) % n] * static_cast<double>(factor);
  std::vector<cd> y;
  fft.inv(y, Y);
  return Eigen::Map<CVecd>(y.data(), n * factor);
}

PSDProfile psd_profile(const Waveform& wf) {
  const VecXd p = wf.tx_matrix().rowwise().squaredNorm();
  const double peak = p.maxCoeff();
  PSDProfile out;
  for (Index i = 0; i < p.size(); ++i) {
    out.bins.push_back(i);
    out.power_db.push_back(10.0 * std::log10(std::max(p(i) / peak, 1e-300)));
  }
  return out;
}

PSDProfile periodogram(const CMatd& S, Index nfft) {
  if (nfft < S.rows()) throw std::invalid_argument("periodogram: nfft shorter than the frame");
  Eigen::FFT<double> fft;
  std::vector<double> acc(nfft, 0.0);
  std::vector<cd> in(nfft), out;
  for (Index c = 0; c < S.cols(); ++c) {
    std::fill(in.begin(), in.end(), cd(0.0, 0.0));
    for (Index i = 0; i < S.rows(); ++i) in[i] = S(i, c);
    fft.fwd(out, in);
    for (Index k = 0; k < nfft; ++k) acc[k] += std::norm(out[k]);
  }
  const double peak = *std::max_element(acc.begin(), acc.end());
  PSDProfile p;
  for (Index i = 0; i < nfft; ++i) {
    const Index k = (i + nfft / 2) % nfft;  // DC in the middle
    p.bins.push_back(i - nfft / 2);
    p.power_db.push_back(10.0 * std::log10(std::max(acc[k] / peak, 1e-300)));
  }
  return p;
}

double oob_floor_db(const PSDProfile& psd, double edge) {
  const double n = static_cast<double>(psd.bins.size());
  double acc = 0.0;
  Index cnt = 0;
  for (std::size_t i = 0; i < psd.bins.size(); ++i) {
    if (std::abs(static_cast<double>(psd.bins[i]) / n) <= edge) continue;
    acc += std::pow(10.0, psd.power_db[i] / 10.0);
    ++cnt;
  }
  if (cnt == 0) throw std::invalid_argument("oob_floor_db: no out-of-band bins");
  return 10.0 * std::log10(acc / cnt);
}

double ambiguity_value(const CVecd& s, Index lag, double f) {
  const Index M = s.size();
  cd acc(0.0, 0.0);
  for (Index n = 0; n < M; ++n) {
    const Index k = n + lag;
    if (k < 0 || k >= M) continue;
    acc += s(n) * std::conj(s(k)) * cis_neg(f * static_cast<double>(n) / static_cast<double>(M));
  }
  return std::abs(acc) / s.squaredNorm();
}

AmbiguityCuts ambiguity(const CVecd& s, Index max_lag, const std::vector<double>& dopplers) {
  if (s.squaredNorm() == 0.0) throw degenerate_error("ambiguity of a zero frame");
  AmbiguityCuts a;
  for (Index l = -max_lag; l <= max_lag; ++l) {
    a.lags.push_back(l);
    a.delay_cut.push_back(ambiguity_value(s, l, 0.0));
  }
  a.dopplers = dopplers;
  for (double f : dopplers) a.doppler_cut.push_back(ambiguity_value(s, 0, f));
  return a;
}

double peak_sidelobe(const std::vector<Index>& lags, const std::vector<double>& cut) {
  const auto zero = std::find(lags.begin(), lags.end(), Index{0});
  if (zero == lags.end()) throw std::invalid_argument("peak_sidelobe: cut has no zero lag");
  const std::size_t c = static_cast<std::size_t>(zero - lags.begin());
  std::size_t hi = c, lo = c;
  while (hi + 1 < cut.size() && cut[hi + 1] < cut[hi]) ++hi;
  while (lo > 0 && cut[lo - 1] < cut[lo]) --lo;
  double side = 0.0;
  for (std::size_t i = 0; i < cut.size(); ++i)
    if (i < lo || i > hi) side = std::max(side, cut[i]);
  return side;
}

Index qpsk_bit_errors(const CVecd& x_hat, const CVecd& x_true) {
  if (x_hat.size() != x_true.size()) throw invalid_dimension("ber: length mismatch");
  Index e = 0;
  for (Index i = 0; i < x_hat.size(); ++i) {
    e += (std::signbit(x_hat(i).real()) != std::signbit(x_true(i).real()));
    e += (std::signbit(x_hat(i).imag()) != std::signbit(x_true(i).imag()));
  }
  return e;
}

double ber(const CVecd& x_hat, const CVecd& x_true) {
  return static_cast<double>(qpsk_bit_errors(x_hat, x_true)) / (2.0 * static_cast<double>(x_true.size()));
}

void RmseAccumulator::add(const std::vector<Target>& est, const std::vector<TruthTarget>& truth, double range_scale,
                          double velocity_scale) {
  const std::size_t nt = truth.size();
  std::vector<std::size_t> perm(std::max(est.size(), nt));
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  // worst-case error used for unmatched truths
  double worst_r = 0.0, worst_v = 0.0;
  for (const auto& t : truth)
    for (const auto& e : est) {
      worst_r = std::max(worst_r, std::abs(e.range_m - t.range_m));
      worst_v = std::max(worst_v, std::abs(e.velocity_mps - t.velocity_mps));
    }
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_r, best_v;
  do {
    double cost = 0.0;
    std::vector<double> er, ev;
    for (std::size_t i = 0; i < nt; ++i) {
      double dr = worst_r, dv = worst_v;
      if (perm[i] < est.size()) {
        dr = est[perm[i]].range_m - truth[i].range_m;
        dv = est[perm[i]].velocity_mps - truth[i].velocity_mps;
      }
      er.push_back(dr);
      ev.push_back(dv);
      cost += (dr / range_scale) * (dr / range_scale) + (dv / velocity_scale) * (dv / velocity_scale);
    }
    if (cost < best) {
      best = cost;
      best_r = er;
      best_v = ev;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (std::size_t i = 0; i < nt; ++i) {
    sum_range2 += best_r[i] * best_r[i];
    sum_vel2 += best_v[i] * best_v[i];
  }
  pairs += static_cast<Index>(nt);
}

double RmseAccumulator::range_rmse() const { return pairs ? std::sqrt(sum_range2 / pairs) : 0.0; }
double RmseAccumulator::velocity_rmse() const { return pairs ? std::sqrt(sum_vel2 / pairs) : 0.0; }

}  // namespace afbm
