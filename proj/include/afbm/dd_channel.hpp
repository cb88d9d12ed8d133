#pragma once

#include <random>
#include <vector>

#include "afbm/types.hpp"

namespace afbm {

struct PathParams {
  cd h{1.0, 0.0};
  Index ell = 0;
  double f = 0.0;  // digital Doppler, cycles per Doppler period
};

struct ChannelBudget {
  Index ell_max = 16;
  double f_max = 2.0;
  Index xi = 1;
  Index P_daft = 256;
};

struct BudgetReport {
  bool ok = false;
  double lhs = 0.0;  // 2(f_max + xi)(ell_max + 1) + ell_max
  double rhs = 0.0;  // P_daft
  double c1 = 0.0;   // recommended pre-chirp
};

BudgetReport validate_budget(const ChannelBudget& b);

// Pi^ell as a permutation: (Pi^ell x)[n] = x[(n - ell) mod M]
Eigen::PermutationMatrix<Eigen::Dynamic> shift_matrix(Index M, Index ell);
// diag(exp(-j 2 pi f m / period)); f = 1, period = M gives Z
CVecd roots_vector(Index M, double f, double period);
// chirp-periodic prefix phase on the first ell samples
CVecd phase_vector(Index ell, Index M, double c1);

class DDChannel {
 public:
  DDChannel() = default;
  DDChannel(std::vector<PathParams> paths, Index M, double c1, double doppler_period);

  const std::vector<PathParams>& paths() const { return paths_; }
  Index M() const { return M_; }
  double c1() const { return c1_; }
  double doppler_period() const { return period_; }

  // dense M x M realisation
  CMatd matrix() const;

  // H X without forming H
  template <class T, class Derived>
  CMat<T> apply(const Eigen::MatrixBase<Derived>& X) const {
    if (X.rows() != M_) throw invalid_dimension("channel apply: row count must equal M");
    CMat<T> Y = CMat<T>::Zero(M_, X.cols());
    for (std::size_t r = 0; r < paths_.size(); ++r) {
      const Index l = paths_[r].ell;
      const CVec<T> d = diag_[r].template cast<Cx<T>>();
      Y.bottomRows(M_ - l) += d.tail(M_ - l).asDiagonal() * X.topRows(M_ - l);
      if (l > 0) Y.topRows(l) += d.head(l).asDiagonal() * X.bottomRows(l);
    }
    return Y;
  }

 private:
  std::vector<PathParams> paths_;
  std::vector<CVecd> diag_;  // h Phi Z^f per path
  Index M_ = 0;
  double c1_ = 0.0;
  double period_ = 0.0;
};

// doppler_period <= 0 means M (Z as printed)
DDChannel build_channel(const std::vector<PathParams>& paths, Index M, double c1, double doppler_period = 0.0);

// R distinct delays on [0, ell_max], Doppler uniform on [-f_max, f_max], gains CN(0, 1/R)
std::vector<PathParams> random_paths(Index R, const ChannelBudget& b, std::mt19937_64& rng);

cd complex_normal(std::mt19937_64& rng, double var);
CVecd complex_normal_vector(Index n, std::mt19937_64& rng, double var);
CVecd add_noise(const CVecd& s, double sigma2, std::mt19937_64& rng);

}  // namespace afbm
