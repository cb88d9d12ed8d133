#include "doctest.h"

#include "afbm/prototype_filters.hpp"

using namespace afbm;

TEST_CASE("filter lengths and overlap factors") {
  for (Index N : {4, 8, 32, 256}) {
    CHECK(phydyas_filter(N).length() == 4 * N);
    CHECK(phydyas_filter(N).O == 4.0);
    CHECK(hermite_filter(N).length() == 3 * N / 2);
    CHECK(hermite_filter(N).O == 1.5);
    CHECK(rectangular_filter(N).length() == N);
  }
  CHECK_THROWS_AS(phydyas_filter(7), invalid_dimension);
  CHECK_THROWS_AS(hermite_filter(2), invalid_dimension);
  CHECK(make_filter(FilterKind::Hermite, 16).kind == FilterKind::Hermite);
}

TEST_CASE("filters carry energy N and are symmetric") {
  for (FilterKind k : {FilterKind::Phydyas, FilterKind::Hermite, FilterKind::Rectangular})
    for (Index N : {8, 64, 256}) {
      const PrototypeFilter f = make_filter(k, N);
      CHECK(f.g.squaredNorm() == doctest::Approx(static_cast<double>(N)).epsilon(1e-12));
      CHECK((f.g - f.g.reverse()).cwiseAbs().maxCoeff() < 1e-12 * f.g.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("pulse shapes peak in the middle and decay to the ends") {
  for (FilterKind k : {FilterKind::Phydyas, FilterKind::Hermite}) {
    const PrototypeFilter f = make_filter(k, 64);
    Index imax;
    f.g.maxCoeff(&imax);
    CHECK(std::abs(2 * imax + 1 - f.length()) <= 1);
    CHECK(std::abs(f.g(0)) < 0.05 * f.g.maxCoeff());
  }
}

TEST_CASE("filter blocks tile the pulse") {
  const PrototypeFilter f = phydyas_filter(16);
  const auto blocks = filter_blocks(f);
  CHECK(blocks.size() == 8);
  for (std::size_t p = 0; p < blocks.size(); ++p) {
    CHECK(blocks[p].size() == 8);
    CHECK((blocks[p] - f.g.segment(8 * p, 8)).norm() == 0.0);
  }
  CHECK(filter_blocks(hermite_filter(16)).size() == 3);
}

TEST_CASE("single symbol matrix: one nonzero per row, centred") {
  const PrototypeFilter f = hermite_filter(16);
  const MatXd Gt = single_symbol_matrix(f);
  CHECK(Gt.rows() == 24);
  CHECK(Gt.cols() == 16);
  for (Index r = 0; r < Gt.rows(); ++r) {
    CHECK((Gt.row(r).array() != 0.0).count() == 1);
    CHECK(Gt(r, ((r - 12) % 16 + 16) % 16) == f.g(r));
  }
  CHECK(Gt.squaredNorm() == doctest::Approx(16.0));
}

TEST_CASE("rectangular filter gives an identity frame for one symbol") {
  const PrototypeFilter f = rectangular_filter(8);
  const MatXd G(frame_filter_matrix(f, 1));
  MatXd GtG = G.transpose() * G;
  CHECK(GtG.isApprox(MatXd::Identity(8, 8)));
}

TEST_CASE("frame filter matrix geometry") {
  for (FilterKind k : {FilterKind::Phydyas, FilterKind::Hermite, FilterKind::Rectangular}) {
    const PrototypeFilter f = make_filter(k, 16);
    for (Index K : {1, 2, 5}) {
      const auto G = frame_filter_matrix(f, K);
      CHECK(G.rows() == frame_length(f, K));
      CHECK(G.rows() == f.length() + (K - 1) * 8);
      CHECK(G.cols() == 16 * K);
      CHECK(G.nonZeros() == K * f.length());
      const MatXd D(G);
      // symbol k occupies rows [k N/2, k N/2 + ON)
      for (Index kk = 0; kk < K; ++kk) {
        const MatXd blk = D.middleCols(kk * 16, 16);
        CHECK(blk.topRows(kk * 8).isZero(0));
        CHECK(blk.middleRows(kk * 8, f.length()) == single_symbol_matrix(f));
      }
    }
  }
  CHECK_THROWS_AS(frame_filter_matrix(rectangular_filter(8), 0), invalid_dimension);
}
