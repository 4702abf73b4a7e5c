#pragma once

#include <complex>

#include <Eigen/Dense>

namespace cfisac {

using cd = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
using VecR = Eigen::VectorXd;
using MatR = Eigen::MatrixXd;

}  // namespace cfisac
