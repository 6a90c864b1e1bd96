#pragma once

#include <cmath>
#include <complex>

namespace chronoslyap {

/// Signed distance-like margin of λ inside the Hilger disk
/// |λ + 1/μ| < 1/μ (open left half-plane for μ = 0).
///
/// Written as −(2Re λ + μ|λ|²)/(1 + |1 + μλ|), which is positive exactly when
/// |1 + μλ| < 1 and stays finite and continuous as μ → 0 (where it is −Re λ).
template <typename Real>
Real hilger_margin(const std::complex<Real>& lambda, Real mu) {
    const Real s = Real(2) * lambda.real() + mu * std::norm(lambda);
    return -s / (Real(1) + std::abs(Real(1) + mu * lambda));
}

template <typename Real>
bool hilger_contains(const std::complex<Real>& lambda, Real mu) {
    return hilger_margin(lambda, mu) > Real(0);
}

}  // namespace chronoslyap
