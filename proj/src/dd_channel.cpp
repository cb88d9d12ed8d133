#include "afbm/dd_channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace afbm {

BudgetReport validate_budget(const ChannelBudget& b) {
  BudgetReport rep;
  rep.lhs = 2.0 * (b.f_max + b.xi) * (b.ell_max + 1) + b.ell_max;
  rep.rhs = static_cast<double>(b.P_daft);
  rep.ok = rep.lhs <= rep.rhs;
  rep.c1 = (2.0 * (std::ceil(b.f_max) + b.xi) + 1.0) / (2.0 * b.P_daft);
  return rep;
}

Eigen::PermutationMatrix<Eigen::Dynamic> shift_matrix(Index M, Index ell) {
  if (ell < 0 || ell >= M) throw invalid_dimension("delay must satisfy 0 <= ell < M");
  Eigen::PermutationMatrix<Eigen::Dynamic> P(M);
  // Eigen convention: (P x)[indices[i]] = x[i]
  for (Index i = 0; i < M; ++i) P.indices()(i) = static_cast<int>((i + ell) % M);
  return P;
}

CVecd roots_vector(Index M, double f, double period) {
  CVecd z(M);
  for (Index m = 0; m < M; ++m) z(m) = cis_neg(f * static_cast<double>(m) / period);
  return z;
}

CVecd phase_vector(Index ell, Index M, double c1) {
  if (ell < 0 || ell >= M) throw invalid_dimension("delay must satisfy 0 <= ell < M");
  CVecd phi = CVecd::Ones(M);
  const double Md = static_cast<double>(M);
  for (Index n = 0; n < ell; ++n) {
    double m = static_cast<double>(ell - n);
    // c1 (M^2 - 2 M m), reduced per term to keep precision
    double a = c1 * Md * Md, b = 2.0 * c1 * Md * m;
    phi(n) = cis_neg(a - std::floor(a) - (b - std::floor(b)));
  }
  return phi;
}

DDChannel::DDChannel(std::vector<PathParams> paths, Index M, double c1, double doppler_period)
    : paths_(std::move(paths)), M_(M), c1_(c1), period_(doppler_period) {
  if (M_ < 1) throw invalid_dimension("channel size must be >= 1");
  if (period_ <= 0.0) period_ = static_cast<double>(M_);
  diag_.reserve(paths_.size());
  for (const auto& p : paths_) {
    if (p.ell < 0 || p.ell >= M_) throw invalid_dimension("path delay out of range");
    if (!std::isfinite(p.h.real()) || !std::isfinite(p.h.imag()) || !std::isfinite(p.f))
      throw std::invalid_argument("path parameters must be finite");
    CVecd d = phase_vector(p.ell, M_, c1_).cwiseProduct(roots_vector(M_, p.f, period_)) * p.h;
    diag_.push_back(std::move(d));
  }
}

CMatd DDChannel::matrix() const {
  CMatd H = CMatd::Zero(M_, M_);
  for (std::size_t r = 0; r < paths_.size(); ++r)
    for (Index n = 0; n < M_; ++n) H(n, (n - paths_[r].ell + M_) % M_) += diag_[r](n);
  return H;
}

DDChannel build_channel(const std::vector<PathParams>& paths, Index M, double c1, double doppler_period) {
  return DDChannel(paths, M, c1, doppler_period);
}

std::vector<PathParams> random_paths(Index R, const ChannelBudget& b, std::mt19937_64& rng) {
  if (R < 0 || R > b.ell_max + 1) throw std::invalid_argument("R exceeds the number of distinct delays");
  std::vector<Index> delays(b.ell_max + 1);
  std::iota(delays.begin(), delays.end(), Index{0});
  // partial Fisher-Yates with explicit draws so the sequence is library independent
  for (Index i = 0; i < R; ++i) {
    std::uniform_int_distribution<Index> pick(i, b.ell_max);
    std::swap(delays[i], delays[pick(rng)]);
  }
  std::uniform_real_distribution<double> uf(-b.f_max, b.f_max);
  std::vector<PathParams> out;
  for (Index i = 0; i < R; ++i) {
    PathParams p;
    p.ell = delays[i];
    p.f = uf(rng);
    p.h = complex_normal(rng, 1.0 / static_cast<double>(R));
    out.push_back(p);
  }
  return out;
}

cd complex_normal(std::mt19937_64& rng, double var) {
  std::normal_distribution<double> nd(0.0, std::sqrt(var / 2.0));
  double re = nd(rng);
  double im = nd(rng);
  return {re, im};
}

CVecd complex_normal_vector(Index n, std::mt19937_64& rng, double var) {
  CVecd v(n);
  std::normal_distribution<double> nd(0.0, std::sqrt(var / 2.0));
  for (Index i = 0; i < n; ++i) {
    double re = nd(rng);
    double im = nd(rng);
    v(i) = cd(re, im);
  }
  return v;
}

CVecd add_noise(const CVecd& s, double sigma2, std::mt19937_64& rng) {
  if (sigma2 < 0.0) throw std::invalid_argument("noise variance must be >= 0");
  if (sigma2 == 0.0) return s;
  return s + complex_normal_vector(s.size(), rng, sigma2);
}

}  // namespace afbm
