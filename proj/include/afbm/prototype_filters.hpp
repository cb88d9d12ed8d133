#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "afbm/types.hpp"

namespace afbm {

enum class FilterKind { Phydyas, Hermite, Rectangular };

struct PrototypeFilter {
  FilterKind kind = FilterKind::Rectangular;
  Index N = 0;
  double O = 1.0;
  VecXd g;  // length O*N, energy N

  Index length() const { return g.size(); }
};

PrototypeFilter phydyas_filter(Index N);
PrototypeFilter hermite_filter(Index N);
PrototypeFilter rectangular_filter(Index N);
PrototypeFilter make_filter(FilterKind kind, Index N);

// diagonals of G_p, p = 0..2O-1, each of length N/2
std::vector<VecXd> filter_blocks(const PrototypeFilter& f);

// ON x N stack. Row r carries g[r] in column (r - ON/2) mod N, i.e. the
// filter is centred on the IDFT origin of its symbol.
MatXd single_symbol_matrix(const PrototypeFilter& f);

// M x NK with M = ON + (K-1)N/2; symbol k at row offset kN/2, column block k
Eigen::SparseMatrix<double> frame_filter_matrix(const PrototypeFilter& f, Index K);

inline Index frame_length(const PrototypeFilter& f, Index K) { return f.length() + (K - 1) * f.N / 2; }

}  // namespace afbm
