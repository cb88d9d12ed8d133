#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace afbm {

using Index = Eigen::Index;

template <class T> using Cx = std::complex<T>;
template <class T> using CMat = Eigen::Matrix<Cx<T>, Eigen::Dynamic, Eigen::Dynamic>;
template <class T> using CVec = Eigen::Matrix<Cx<T>, Eigen::Dynamic, 1>;
template <class T> using RMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T> using RVec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using cd = Cx<double>;
using CMatd = CMat<double>;
using CVecd = CVec<double>;
using MatXd = Eigen::MatrixXd;
using VecXd = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

struct invalid_dimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct degenerate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// exp(-j 2 pi phase), phase reduced mod 1 first so large arguments keep precision
template <class T = double> inline Cx<T> cis_neg(double phase) {
  double p = phase - std::floor(phase);
  return Cx<T>(static_cast<T>(std::cos(2.0 * kPi * p)), static_cast<T>(-std::sin(2.0 * kPi * p)));
}

}  // namespace afbm
