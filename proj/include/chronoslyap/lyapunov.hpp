#pragma once

// Algebraic Lyapunov equations on a fixed graininess:
//   AᵀP + PA + μAᵀPA = −M
// with μ = 0 the continuous equation and μ = 1 the discrete one. Everything
// here is templated on the real scalar type and accepts Eigen expressions.

#include "chronoslyap/error.hpp"
#include "chronoslyap/hilger.hpp"
#include "chronoslyap/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <limits>

namespace chronoslyap {

/// Largest dimension accepted by the Kronecker oracles (n² × n² dense LU).
inline constexpr Eigen::Index kOracleMaxDim = 12;

namespace detail {

template <typename DA, typename DM>
void check_square_pair(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DM>& M) {
    if (A.rows() != A.cols() || A.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "A must be square");
    if (M.rows() != A.rows() || M.cols() != A.cols())
        throw Error(ErrorCode::DimensionMismatch, "A and M must have the same dimension");
    if (!A.allFinite() || !M.allFinite()) throw Error(ErrorCode::InvalidParameter, "entries must be finite");
}

template <typename DM>
void check_symmetric_input(const Eigen::MatrixBase<DM>& M) {
    using Real = typename DM::RealScalar;
    if (asymmetry(M) > Real(1e-12) * std::max(Real(1), M.norm()))
        throw Error(ErrorCode::NonSymmetricInput, "M must be symmetric");
}

template <typename Scalar>
MatrixX<Scalar> finish_symmetric(const MatrixX<Scalar>& P) {
    if (!P.allFinite()) throw Error(ErrorCode::SeriesNotConverged, "solution has non-finite entries");
    if (asymmetry(P) > Scalar(1e-9) * P.norm())
        throw Error(ErrorCode::SymmetryLost, "solution drifted from symmetry before projection");
    return symmetrized(P);
}

template <typename Scalar>
MatrixX<Scalar> unvec(const VectorX<Scalar>& v, Eigen::Index n) {
    return Eigen::Map<const MatrixX<Scalar>>(v.data(), n, n);
}

}  // namespace detail

/// AᵀP + PA + μAᵀPA + M.
template <typename DA, typename DP, typename DM>
typename DA::PlainObject tsale_residual(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DP>& P,
                                        const Eigen::MatrixBase<DM>& M, typename DA::Scalar mu) {
    return A.transpose() * P + P * A + mu * (A.transpose() * P * A) + M;
}

/// BᵀPB − P + Q, the Stein form of the same equation with B = I + μA, Q = μM.
template <typename DB, typename DP, typename DQ>
typename DB::PlainObject stein_residual(const Eigen::MatrixBase<DB>& B, const Eigen::MatrixBase<DP>& P,
                                        const Eigen::MatrixBase<DQ>& Q) {
    return B.transpose() * P * B - P + Q;
}

template <typename DP>
typename DP::RealScalar min_symmetric_eigenvalue(const Eigen::MatrixBase<DP>& P) {
    using Real = typename DP::RealScalar;
    Eigen::SelfAdjointEigenSolver<MatrixX<Real>> es(symmetrized(P), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenSolverFailure, "symmetric eigensolver failed");
    return es.eigenvalues().minCoeff();
}

/// True when every eigenvalue of A lies strictly inside the Hilger disk of μ.
template <typename DA>
bool spectrum_in_hilger(const Eigen::MatrixBase<DA>& A, typename DA::RealScalar mu) {
    using Real = typename DA::RealScalar;
    Eigen::EigenSolver<MatrixX<Real>> es(A.eval(), false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenSolverFailure, "eigenvalue solver failed");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (!hilger_contains(es.eigenvalues()(i), mu)) return false;
    return true;
}

/// Continuous Lyapunov equation AᵀP + PA = −M by complex Schur
/// (Bartels–Stewart): A = UTU*, T*Y + YT = −U*MU column by column, P = UYU*.
template <typename DA, typename DM>
MatrixX<typename DA::Scalar> solve_cale_schur(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DM>& M) {
    using Real = typename DA::Scalar;
    using Cx = std::complex<Real>;
    const auto n = A.rows();
    Eigen::ComplexSchur<MatrixX<Real>> schur(A.eval());
    if (schur.info() != Eigen::Success) throw Error(ErrorCode::EigenSolverFailure, "Schur decomposition failed");
    const MatrixX<Cx>& U = schur.matrixU();
    const MatrixX<Cx>& T = schur.matrixT();
    const MatrixX<Cx> C = -(U.adjoint() * M.template cast<Cx>() * U);
    const MatrixX<Cx> Tl = T.adjoint();
    MatrixX<Cx> Y(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        VectorX<Cx> rhs = C.col(j);
        for (Eigen::Index k = 0; k < j; ++k) rhs -= T(k, j) * Y.col(k);
        MatrixX<Cx> L = Tl;
        L.diagonal().array() += T(j, j);
        for (Eigen::Index k = 0; k < n; ++k)
            if (std::abs(L(k, k)) == Real(0))
                throw Error(ErrorCode::UnstableSpectrum, "A and −Aᵀ share an eigenvalue");
        Y.col(j) = L.template triangularView<Eigen::Lower>().solve(rhs);
    }
    return (U * Y * U.adjoint()).real();
}

struct TsaleOptions {
    double horizon_tol = 1e-10;
    int max_doublings = 64;
};

template <typename Scalar>
struct TsaleSolution {
    MatrixX<Scalar> P;
    Scalar tail_bound = 0;  // bound on ‖omitted series tail‖_F (0 for μ = 0)
    int doublings = 0;      // series holds 2^doublings terms
};

/// Solve AᵀP + PA + μAᵀPA = −M for a fixed graininess μ ≥ 0.
///
/// μ > 0 sums P = μ Σ_j (Bᵀ)ʲ M Bʲ, B = I + μA, by squaring (Smith): after k
/// doublings the omitted tail is (B_kᵀ) P B_k with B_k = B^(2^k), bounded by
/// q/(1 − q)·‖P_k‖ for q = ‖B_k‖²_F; summation stops once that ratio is below
/// horizon_tol. μ = 0 uses the Schur solver.
template <typename DA, typename DM>
TsaleSolution<typename DA::Scalar> solve_tsale(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DM>& M,
                                               typename DA::Scalar mu, const TsaleOptions& opts = {}) {
    using Real = typename DA::Scalar;
    detail::check_square_pair(A, M);
    detail::check_symmetric_input(M);
    if (!(mu >= Real(0)) || !std::isfinite(static_cast<double>(mu)))
        throw Error(ErrorCode::InvalidParameter, "graininess must be finite and non-negative");
    if (!spectrum_in_hilger(A, mu))
        throw Error(ErrorCode::UnstableSpectrum, "an eigenvalue of A lies outside the Hilger disk");

    TsaleSolution<Real> out;
    const auto n = A.rows();
    if (mu == Real(0)) {
        out.P = detail::finish_symmetric<Real>(solve_cale_schur(A, M));
        return out;
    }

    MatrixX<Real> B = MatrixX<Real>::Identity(n, n) + mu * A;
    MatrixX<Real> P = mu * M;
    const Real tol = Real(opts.horizon_tol);
    for (int k = 0;; ++k) {
        const Real q = B.squaredNorm();
        if (q < Real(1) && q / (Real(1) - q) <= tol) {
            out.tail_bound = q / (Real(1) - q) * P.norm();
            out.doublings = k;
            break;
        }
        if (k == opts.max_doublings || !B.allFinite())
            throw Error(ErrorCode::SeriesNotConverged, "series did not reach its tail tolerance");
        P += B.transpose() * P * B;
        B = (B * B).eval();
    }
    out.P = detail::finish_symmetric<Real>(P);
    return out;
}

template <typename DA, typename DM>
MatrixX<typename DA::Scalar> solve_tsale_pointwise(const Eigen::MatrixBase<DA>& A,
                                                   const Eigen::MatrixBase<DM>& M, typename DA::Scalar mu,
                                                   double horizon_tol = 1e-10) {
    return solve_tsale(A, M, mu, TsaleOptions{horizon_tol, 64}).P;
}

/// Kronecker oracle for AᵀP + PA = −M:
/// (I ⊗ Aᵀ + Aᵀ ⊗ I) vec P = −vec M, dense full-pivot LU.
template <typename DA, typename DM>
MatrixX<typename DA::Scalar> solve_cale_oracle(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DM>& M) {
    using Real = typename DA::Scalar;
    detail::check_square_pair(A, M);
    const auto n = A.rows();
    if (n > kOracleMaxDim) throw Error(ErrorCode::OracleTooLarge, "Kronecker oracle is limited to n ≤ 12");
    const MatrixX<Real> I = MatrixX<Real>::Identity(n, n);
    const MatrixX<Real> At = A.transpose();
    const MatrixX<Real> K = Eigen::kroneckerProduct(I, At) + Eigen::kroneckerProduct(At, I);
    Eigen::FullPivLU<MatrixX<Real>> lu(K);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularKroneckerSystem, "Kronecker system is singular");
    const MatrixX<Real> negM = -M;
    const VectorX<Real> v = lu.solve(Eigen::Map<const VectorX<Real>>(negM.data(), n * n));
    return symmetrized(detail::unvec<Real>(v, n));
}

/// Kronecker oracle for the Stein equation BᵀPB − P = −Q:
/// (I − Bᵀ ⊗ Bᵀ) vec P = vec Q. Requires spectral radius of B below one.
template <typename DB, typename DQ>
MatrixX<typename DB::Scalar> solve_stein_oracle(const Eigen::MatrixBase<DB>& B, const Eigen::MatrixBase<DQ>& Q) {
    using Real = typename DB::Scalar;
    detail::check_square_pair(B, Q);
    const auto n = B.rows();
    if (n > kOracleMaxDim) throw Error(ErrorCode::OracleTooLarge, "Kronecker oracle is limited to n ≤ 12");
    Eigen::EigenSolver<MatrixX<Real>> es(B.eval(), false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenSolverFailure, "eigenvalue solver failed");
    if (es.eigenvalues().cwiseAbs().maxCoeff() >= Real(1))
        throw Error(ErrorCode::SpectralRadiusNotLessThanOne, "spectral radius of the recursive matrix is not below 1");
    const MatrixX<Real> Bt = B.transpose();
    const MatrixX<Real> K = MatrixX<Real>::Identity(n * n, n * n) - Eigen::kroneckerProduct(Bt, Bt);
    Eigen::FullPivLU<MatrixX<Real>> lu(K);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularKroneckerSystem, "Kronecker system is singular");
    const MatrixX<Real> Qe = Q;
    const VectorX<Real> v = lu.solve(Eigen::Map<const VectorX<Real>>(Qe.data(), n * n));
    return symmetrized(detail::unvec<Real>(v, n));
}

/// Discrete Lyapunov equation in recursive form A_Rᵀ P A_R − P = −M, A_R = A + I.
template <typename DA, typename DM>
MatrixX<typename DA::Scalar> solve_dale_oracle(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DM>& M) {
    using Real = typename DA::Scalar;
    detail::check_square_pair(A, M);
    detail::check_symmetric_input(M);
    const MatrixX<Real> AR = A + MatrixX<Real>::Identity(A.rows(), A.cols());
    return solve_stein_oracle(AR, M);
}

/// Kronecker oracle for any μ ≥ 0: continuous oracle at μ = 0, otherwise the
/// Stein oracle with B = I + μA and Q = μM.
template <typename DA, typename DM>
MatrixX<typename DA::Scalar> solve_tsale_oracle(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DM>& M,
                                                typename DA::Scalar mu) {
    using Real = typename DA::Scalar;
    if (mu == Real(0)) return solve_cale_oracle(A, M);
    const MatrixX<Real> B = MatrixX<Real>::Identity(A.rows(), A.cols()) + mu * A;
    const MatrixX<Real> Q = mu * M;
    return solve_stein_oracle(B, Q);
}

}  // namespace chronoslyap
