#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <string>

#include "afbm/chirp_transforms.hpp"
#include "afbm/dd_channel.hpp"
#include "afbm/prototype_filters.hpp"

namespace afbm {

struct WaveformParams {
  Index L = 128;
  Index N = 256;
  Index P = 256;
  Index K = 8;
  FilterKind filter = FilterKind::Phydyas;
  ChirpParams chirp_L;
  ChirpParams chirp_P;
  ChirpParams chirp_N;
  double Es = 1.0;

  Index data_length() const { return K * L / 2; }
};

// Common view of a modulator used by the receivers, metrics and harness.
class Waveform {
 public:
  virtual ~Waveform() = default;
  virtual std::string name() const = 0;
  virtual Index frame_length() const = 0;
  virtual Index num_symbols() const = 0;
  virtual Index obs_length() const = 0;
  // frame_length x num_symbols, includes the power normalisation
  virtual const CMatd& tx_matrix() const = 0;
  // receiver front end applied column-wise: time samples -> detection domain
  virtual CMatd observe(const CMatd& R) const = 0;
  // chirp rate used by the channel's prefix phase
  virtual double channel_c1() const = 0;

  CVecd modulate(const CVecd& x) const;
  CVecd observe_vec(const CVecd& r) const { return observe(CMatd(r)); }
  // detection-domain channel: observe(H A)
  CMatd obs_channel(const DDChannel& ch) const { return observe(ch.apply<double>(tx_matrix())); }
};

// Xi-bar: first and last L/4 positions of each L block carry data
MatXd mapping_block(Index L);
MatXd mapping_matrix(Index L, Index K);
CVecd map_symbols(const CVecd& x, Index L, Index K);
CVecd unmap_symbols(const CVecd& a, Index L, Index K);

struct Compensation {
  VecXd c_tilde;
  VecXd b_tilde;
  double residual_offdiag = 0.0;  // Frobenius norm of the active off-diagonal part
};

Compensation compensation(const WaveformParams& p);

class AfbmModem final : public Waveform {
 public:
  explicit AfbmModem(const WaveformParams& p);

  std::string name() const override;
  Index frame_length() const override { return M_; }
  Index num_symbols() const override { return p_.data_length(); }
  Index obs_length() const override { return p_.N * p_.K; }
  const CMatd& tx_matrix() const override { return A_; }
  CMatd observe(const CMatd& R) const override;  // G^T R
  double channel_c1() const override { return p_.chirp_P.c1; }

  const WaveformParams& params() const { return p_; }
  const PrototypeFilter& filter() const { return filt_; }
  const Compensation& comp() const { return comp_; }
  const CMatd& Qp() const { return Qp_; }
  const CMatd& Cf() const { return Cf_; }
  const Eigen::SparseMatrix<double>& G() const { return G_; }
  double gain() const { return gain_; }

  CVecd demodulate(const CVecd& r) const;  // A^H r
  CMatd filtered_td_channel(const CMatd& H) const;
  CMatd filtered_td_channel(const DDChannel& ch) const { return obs_channel(ch); }
  CMatd afb_effective_channel(const CMatd& H) const;
  CMatd afb_effective_channel(const DDChannel& ch) const;

 private:
  WaveformParams p_;
  PrototypeFilter filt_;
  Compensation comp_;
  CMatd Qp_, Cf_, A_;
  Eigen::SparseMatrix<double> G_;
  Index M_ = 0;
  double gain_ = 1.0;
};

struct AfdmParams {
  Index D = 1024;
  ChirpParams chirp;
  Index out_len = 0;  // > D: band-limited interpolation to this many samples
};

class AfdmModem final : public Waveform {
 public:
  explicit AfdmModem(const AfdmParams& p);

  std::string name() const override { return "afdm"; }
  Index frame_length() const override { return A_.rows(); }
  Index num_symbols() const override { return p_.D; }
  Index obs_length() const override { return p_.D; }
  const CMatd& tx_matrix() const override { return A_; }
  CMatd observe(const CMatd& R) const override;  // A^H R, FFT based when not interpolated
  double channel_c1() const override { return p_.chirp.c1; }
  const AfdmParams& params() const { return p_; }

 private:
  AfdmParams p_;
  CMatd A_;
  CVecd pre_, post_;
};

// AFDM occupying the same band and nominal duration as the AFBM frame:
// D = K P / 2 chirp subcarriers, interpolated by N/P, c1 from the budget rule.
AfdmParams matched_afdm(const WaveformParams& p, double f_max, Index xi);

// off/on diagonal energy ratio of H^H H
struct GramReport {
  CMatd gram;
  double ratio = 0.0;
};
GramReport gram_diagonality(const CMatd& H);

}  // namespace afbm
