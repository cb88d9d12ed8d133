#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "afbm/types.hpp"

namespace afbm {

struct GabpConfig {
  int i_max = 20;
  double beta = 0.5;
  double Es = 1.0;
  double sigma2 = 1.0;
  double var_floor = 1e-12;
};

inline void check_config(const GabpConfig& c) {
  if (c.i_max < 1) throw std::invalid_argument("i_max must be >= 1");
  if (!(c.beta > 0.0 && c.beta <= 1.0)) throw std::invalid_argument("beta must be in (0, 1]");
  if (!(c.Es > 0.0) || !(c.var_floor > 0.0) || c.sigma2 < 0.0) throw std::invalid_argument("invalid GaBP config");
}

struct Denoised {
  cd mean;
  double var;
};

// QPSK posterior mean and MSE for belief ~ CN(x, belief_var)
inline Denoised qpsk_denoise(cd belief, double belief_var, double Es, double var_floor = 1e-12) {
  const double v = std::max(belief_var, var_floor);
  const double c = std::sqrt(Es / 2.0);
  cd m(c * std::tanh(2.0 * c * belief.real() / v), c * std::tanh(2.0 * c * belief.imag() / v));
  return {m, std::max(Es - std::norm(m), 0.0)};
}

// Element-wise GaBP on r = H x + w with a fully parallel schedule. Channel
// dependent arrays are kept so the detector can be reused across SNR points.
template <class T> class GabpDetector {
 public:
  using Arr = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Col = Eigen::Array<T, Eigen::Dynamic, 1>;

  explicit GabpDetector(const CMat<T>& H) : hr_(H.real().array()), hi_(H.imag().array()) {
    for (Index m = 0; m < H.cols(); ++m)
      if ((hr_.col(m).square() + hi_.col(m).square()).sum() <= T(0)) dead_.push_back(m);
  }

  Index rows() const { return hr_.rows(); }
  Index cols() const { return hr_.cols(); }
  // columns with no energy, reported as undetectable (estimate stays 0)
  const std::vector<Index>& undetectable() const { return dead_; }

  // residual_mse (optional) gets ||r - H x_i||^2 / rows per iteration
  CVec<T> detect(const CVec<T>& r, const GabpConfig& cfg, std::vector<double>* residual_mse = nullptr) const {
    check_config(cfg);
    const Index Nn = rows(), Mm = cols();
    if (r.size() != Nn) throw invalid_dimension("gabp: observation length mismatch");
    const T Es = static_cast<T>(cfg.Es), s2 = static_cast<T>(cfg.sigma2), floor_v = static_cast<T>(cfg.var_floor);
    const T beta = static_cast<T>(cfg.beta), c = std::sqrt(Es / T(2)), two_c = T(2) * c;

    Arr xr = Arr::Zero(Nn, Mm), xi = Arr::Zero(Nn, Mm), v = Arr::Constant(Nn, Mm, Es);
    const Col rr = r.real().array(), ri = r.imag().array();
    Col mur = Col::Zero(Nn), mui = Col::Zero(Nn), s = ((hr_.square() + hi_.square()) * v).rowwise().sum() + s2;
    Col nmur(Nn), nmui(Nn), ns(Nn), br(Nn), bi(Nn), xnr(Nn), xni(Nn);
    Eigen::Array<T, Eigen::Dynamic, 1> Acol(Mm), Brcol(Mm), Bicol(Mm);

    for (int it = 0; it < cfg.i_max; ++it) {
      nmur.setZero();
      nmui.setZero();
      ns.setConstant(s2);
      for (Index m = 0; m < Mm; ++m) {
        const T* hr = hr_.col(m).data();
        const T* hi = hi_.col(m).data();
        T* cxr = xr.col(m).data();
        T* cxi = xi.col(m).data();
        T* cv = v.col(m).data();
        T* pbr = br.data();
        T* pbi = bi.data();
        T A = 0, Br = 0, Bi = 0;
        // soft interference cancellation with the self term added back
#pragma omp simd reduction(+ : A, Br, Bi)
        for (Index n = 0; n < Nn; ++n) {
          const T g2 = hr[n] * hr[n] + hi[n] * hi[n];
          const T tr = rr(n) - mur(n) + (hr[n] * cxr[n] - hi[n] * cxi[n]);
          const T ti = ri(n) - mui(n) + (hr[n] * cxi[n] + hi[n] * cxr[n]);
          const T iv = T(1) / std::max(s(n) - g2 * cv[n], floor_v);
          const T b_r = (hr[n] * tr + hi[n] * ti) * iv;
          const T b_i = (hr[n] * ti - hi[n] * tr) * iv;
          pbr[n] = b_r;
          pbi[n] = b_i;
          A += g2 * iv;
          Br += b_r;
          Bi += b_i;
        }
        Acol(m) = A;
        Brcol(m) = Br;
        Bicol(m) = Bi;
        // extrinsic mean / variance = B - b, so the denoiser argument needs no division
        xnr = c * (two_c * (Br - br)).tanh();
        xni = c * (two_c * (Bi - bi)).tanh();
        const T* pxr = xnr.data();
        const T* pxi = xni.data();
#pragma omp simd
        for (Index n = 0; n < Nn; ++n) {
          const T dr = pxr[n];
          const T di = pxi[n];
          const T x_r = beta * dr + (T(1) - beta) * cxr[n];
          const T x_i = beta * di + (T(1) - beta) * cxi[n];
          const T vv = beta * std::max(Es - dr * dr - di * di, T(0)) + (T(1) - beta) * cv[n];
          cxr[n] = x_r;
          cxi[n] = x_i;
          cv[n] = vv;
          nmur(n) += hr[n] * x_r - hi[n] * x_i;
          nmui(n) += hr[n] * x_i + hi[n] * x_r;
          ns(n) += (hr[n] * hr[n] + hi[n] * hi[n]) * vv;
        }
      }
      mur.swap(nmur);
      mui.swap(nmui);
      s.swap(ns);
      if (residual_mse) residual_mse->push_back(residual(r, consensus(Acol, Brcol, Bicol, floor_v)));
    }
    return consensus(Acol, Brcol, Bicol, floor_v);
  }

 private:
  CVec<T> consensus(const Eigen::Array<T, Eigen::Dynamic, 1>& A, const Eigen::Array<T, Eigen::Dynamic, 1>& Br,
                    const Eigen::Array<T, Eigen::Dynamic, 1>& Bi, T floor_v) const {
    CVec<T> x(A.size());
    for (Index m = 0; m < A.size(); ++m) {
      T d = std::max(A(m), floor_v);
      x(m) = Cx<T>(Br(m) / d, Bi(m) / d);
    }
    for (Index m : dead_) x(m) = Cx<T>(0);
    return x;
  }

  double residual(const CVec<T>& r, const CVec<T>& x) const {
    Col er = r.real().array(), ei = r.imag().array();
    for (Index m = 0; m < cols(); ++m) {
      er -= hr_.col(m) * x(m).real() - hi_.col(m) * x(m).imag();
      ei -= hr_.col(m) * x(m).imag() + hi_.col(m) * x(m).real();
    }
    return static_cast<double>((er.square() + ei.square()).sum()) / static_cast<double>(rows());
  }

  Arr hr_, hi_;
  std::vector<Index> dead_;
};

template <class T>
CVec<T> gabp_detect(const CVec<T>& r, const CMat<T>& H, const GabpConfig& cfg, std::vector<double>* residual_mse = nullptr) {
  return GabpDetector<T>(H).detect(r, cfg, residual_mse);
}

// (H^H H + s2 I)^{-1} H^H r with the Gram factored once per channel
template <class T> class LmmseSolver {
 public:
  explicit LmmseSolver(const CMat<T>& H) : Hh_(H.adjoint()), gram_(CMat<T>::Zero(H.cols(), H.cols())) {
    gram_.template selfadjointView<Eigen::Lower>().rankUpdate(Hh_);
  }

  CVec<T> solve(const CVec<T>& r, double sigma2, bool* ridged = nullptr) const {
    if (r.size() != Hh_.cols()) throw invalid_dimension("lmmse: observation length mismatch");
    if (sigma2 < 0.0) throw std::invalid_argument("lmmse: negative noise variance");
    const Index n = gram_.rows();
    T load = static_cast<T>(sigma2);
    const T ridge = static_cast<T>(1e-12) * std::max(gram_.real().trace() / static_cast<T>(n), T(1e-30));
    if (ridged) *ridged = false;
    if (load < ridge) {
      load = ridge;
      if (ridged) *ridged = true;
    }
    CMat<T> S = gram_;
    S.diagonal().array() += Cx<T>(load);
    Eigen::LLT<CMat<T>> llt(S);
    return llt.solve(Hh_ * r);
  }

 private:
  CMat<T> Hh_, gram_;
};

template <class T> CVec<T> lmmse(const CVec<T>& r, const CMat<T>& H, double sigma2) { return LmmseSolver<T>(H).solve(r, sigma2); }
// filtered time domain and affine filter bank domain use the same estimator on different models
template <class T> CVec<T> lmmse_ftd(const CVec<T>& r_bar, const CMat<T>& H_bar, double sigma2) { return lmmse(r_bar, H_bar, sigma2); }
template <class T> CVec<T> lmmse_afb(const CVec<T>& y, const CMat<T>& H_eff, double sigma2) { return lmmse(y, H_eff, sigma2); }

}  // namespace afbm
