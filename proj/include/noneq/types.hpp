#pragma once

#include <complex>

#include <Eigen/Dense>

namespace noneq {

using cdouble = std::complex<double>;

using Matrix2c = Eigen::Matrix2cd;
using Matrix3c = Eigen::Matrix3cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector3c = Eigen::Vector3cd;
using Vector3d = Eigen::Vector3d;

/// Two-qubit density matrix in the decoupled basis {|gg>, |eg>, |ge>, |ee>}.
using DensityMatrix = Eigen::Matrix4cd;

}  // namespace noneq
