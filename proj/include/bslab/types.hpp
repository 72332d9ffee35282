#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace bslab {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using SparseReal = Eigen::SparseMatrix<double>;
using SparseComplex = Eigen::SparseMatrix<Complex>;

inline constexpr int kMaxDim = 3;

}  // namespace bslab
