#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace chronoslyap {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using Complex = std::complex<double>;

/// ‖P − Pᵀ‖_F, the asymmetry measure used throughout.
template <typename Derived>
typename Derived::RealScalar asymmetry(const Eigen::MatrixBase<Derived>& P) {
    return (P - P.transpose()).norm();
}

template <typename Derived>
typename Derived::PlainObject symmetrized(const Eigen::MatrixBase<Derived>& P) {
    return (P + P.transpose()) / typename Derived::Scalar(2);
}

}  // namespace chronoslyap
