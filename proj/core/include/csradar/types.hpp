#pragma once

#include <complex>
#include <Eigen/Dense>

namespace csradar {

using cx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kAlgebraTol = 1e-10;

}  // namespace csradar
