#include "afbm/prototype_filters.hpp"

#include <array>
#include <cmath>

namespace afbm {

namespace {

void normalise_energy(VecXd& g, Index N) { g *= std::sqrt(static_cast<double>(N) / g.squaredNorm()); }

void check_even(Index N) {
  if (N < 4 || N % 2 != 0) throw invalid_dimension("filter length N must be even and >= 4");
}

// frequency-sampling coefficients for overlap 4
constexpr std::array<double, 3> kPhydyasH = {0.971960, 0.70710678118654752, 0.235147};

// truncated Hermite pulse: even-order coefficients a0, a4, ..., a20
constexpr std::array<double, 6> kHermiteA = {1.412692577, -3.0145e-3, -8.8041e-6, -2.2611e-9, -4.4570e-15, 1.8633e-16};

// physicists' Hermite polynomial by recurrence
double hermite_poly(int n, double x) {
  if (n == 0) return 1.0;
  double hm = 1.0, h = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    double hn = 2.0 * x * h - 2.0 * k * hm;
    hm = h;
    h = hn;
  }
  return h;
}

}  // namespace

PrototypeFilter phydyas_filter(Index N) {
  check_even(N);
  PrototypeFilter f{FilterKind::Phydyas, N, 4.0, VecXd(4 * N)};
  const double len = 4.0 * N;
  for (Index m = 0; m < 4 * N; ++m) {
    // half-sample offset keeps g exactly symmetric
    double t = m + 0.5, acc = 1.0;
    for (int k = 1; k <= 3; ++k) acc += 2.0 * ((k % 2) ? -1.0 : 1.0) * kPhydyasH[k - 1] * std::cos(2.0 * kPi * k * t / len);
    f.g(m) = acc;
  }
  normalise_energy(f.g, N);
  return f;
}

PrototypeFilter hermite_filter(Index N) {
  check_even(N);
  if ((3 * N) % 2 != 0) throw invalid_dimension("1.5N must be an integer");
  const Index ON = 3 * N / 2;
  PrototypeFilter f{FilterKind::Hermite, N, 1.5, VecXd(ON)};
  for (Index m = 0; m < ON; ++m) {
    double t = (m - (ON - 1) / 2.0) / static_cast<double>(N);
    double x = 2.0 * std::sqrt(kPi) * t, acc = 0.0;
    for (int i = 0; i < 6; ++i) acc += kHermiteA[i] * hermite_poly(4 * i, x);
    f.g(m) = std::exp(-2.0 * kPi * t * t) * acc;
  }
  normalise_energy(f.g, N);
  return f;
}

PrototypeFilter rectangular_filter(Index N) {
  check_even(N);
  return PrototypeFilter{FilterKind::Rectangular, N, 1.0, VecXd::Ones(N)};
}

PrototypeFilter make_filter(FilterKind kind, Index N) {
  switch (kind) {
    case FilterKind::Phydyas: return phydyas_filter(N);
    case FilterKind::Hermite: return hermite_filter(N);
    case FilterKind::Rectangular: return rectangular_filter(N);
  }
  throw std::invalid_argument("unknown filter kind");
}

std::vector<VecXd> filter_blocks(const PrototypeFilter& f) {
  const Index h = f.N / 2, nb = f.length() / h;
  std::vector<VecXd> out;
  out.reserve(nb);
  for (Index p = 0; p < nb; ++p) out.push_back(f.g.segment(p * h, h));
  return out;
}

MatXd single_symbol_matrix(const PrototypeFilter& f) {
  const Index ON = f.length(), N = f.N, c = ON / 2;
  MatXd Gt = MatXd::Zero(ON, N);
  for (Index r = 0; r < ON; ++r) Gt(r, (((r - c) % N) + N) % N) = f.g(r);
  return Gt;
}

Eigen::SparseMatrix<double> frame_filter_matrix(const PrototypeFilter& f, Index K) {
  if (K < 1) throw invalid_dimension("K must be >= 1");
  const Index ON = f.length(), N = f.N, c = ON / 2;
  Eigen::SparseMatrix<double> G(frame_length(f, K), N * K);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(K * ON);
  for (Index k = 0; k < K; ++k)
    for (Index r = 0; r < ON; ++r) trip.emplace_back(k * N / 2 + r, k * N + (((r - c) % N) + N) % N, f.g(r));
  G.setFromTriplets(trip.begin(), trip.end());
  return G;
}

}  // namespace afbm
