#pragma once

#include "chronoslyap/error.hpp"
#include "chronoslyap/timescale.hpp"
#include "chronoslyap/types.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace testsupport {

using chronoslyap::Complex;
using chronoslyap::Matrix;

/// Code of the chronoslyap::Error thrown by f, or nullopt if nothing was thrown.
template <class F>
std::optional<chronoslyap::ErrorCode> code_of(F&& f) {
    try {
        f();
    } catch (const chronoslyap::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = nd(rng);
    return m;
}

/// Symmetric positive definite with eigenvalues in roughly [0.5, n + 1].
inline Matrix random_spd(Eigen::Index n, std::mt19937_64& rng) {
    const Matrix B = random_matrix(n, n, rng);
    return B * B.transpose() / static_cast<double>(n) + 0.5 * Matrix::Identity(n, n);
}

inline Matrix random_symmetric(Eigen::Index n, std::mt19937_64& rng) {
    const Matrix B = random_matrix(n, n, rng);
    return (B + B.transpose()) / 2.0;
}

/// Real matrix V D V⁻¹ whose eigenvalues are the given list (complex entries
/// must appear once; their conjugates are added).
inline Matrix matrix_with_eigenvalues(const std::vector<Complex>& lambdas, std::mt19937_64& rng) {
    Eigen::Index n = 0;
    for (const auto& l : lambdas) n += l.imag() == 0.0 ? 1 : 2;
    Matrix D = Matrix::Zero(n, n);
    Eigen::Index k = 0;
    for (const auto& l : lambdas) {
        if (l.imag() == 0.0) {
            D(k, k) = l.real();
            ++k;
        } else {
            D(k, k) = D(k + 1, k + 1) = l.real();
            D(k, k + 1) = l.imag();
            D(k + 1, k) = -l.imag();
            k += 2;
        }
    }
    const Matrix V = Matrix::Identity(n, n) + 0.3 * random_matrix(n, n, rng);
    return V * D * V.inverse();
}

/// Random n×n matrix with spectrum inside the Hilger disk of μ: for μ > 0,
/// λ = (z − 1)/μ with z_min ≤ |z| ≤ z_max; for μ = 0, Re λ ∈ [−re_max, −re_min].
inline Matrix random_hilger_stable(Eigen::Index n, double mu, std::mt19937_64& rng, double z_min = 0.05,
                                   double z_max = 0.95, double re_min = 0.2, double re_max = 3.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Complex> lambdas;
    Eigen::Index left = n;
    while (left > 0) {
        const bool pair = left >= 2 && u(rng) < 0.5;
        if (mu > 0.0) {
            const double r = z_min + (z_max - z_min) * u(rng);
            const double th = pair ? std::numbers::pi * (0.05 + 0.9 * u(rng)) : (u(rng) < 0.5 ? 0.0 : std::numbers::pi);
            const Complex z = std::polar(r, th);
            Complex l = (z - 1.0) / mu;
            if (!pair) l = Complex(l.real(), 0.0);
            lambdas.push_back(l);
        } else {
            const double re = -(re_min + (re_max - re_min) * u(rng));
            lambdas.emplace_back(re, pair ? 0.2 + 2.0 * u(rng) : 0.0);
        }
        left -= pair ? 2 : 1;
    }
    return matrix_with_eigenvalues(lambdas, rng);
}

}  // namespace testsupport
