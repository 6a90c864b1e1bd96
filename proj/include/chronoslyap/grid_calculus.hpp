#pragma once

// Value-generic Δ-derivative and Δ-integral rules for quantities tabulated on
// a Grid. T is double or any Eigen dense type; the matrix-valued Lyapunov
// solvers and the scalar calculus share these rules.

#include "chronoslyap/error.hpp"
#include "chronoslyap/timescale.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace chronoslyap {

/// Weights for ∫_lo^hi of the quadratic interpolating (x0, x1, x2).
inline std::array<double, 3> quadratic_integral_weights(double x0, double x1, double x2, double lo,
                                                        double hi) {
    const double u0 = x0 - x1, u2 = x2 - x1, a = lo - x1, b = hi - x1;
    const double m1 = b - a, m2 = (b * b - a * a) / 2.0, m3 = (b * b * b - a * a * a) / 3.0;
    // ∫ (u - p)(u - q) du
    auto moment = [&](double p, double q) { return m3 - (p + q) * m2 + p * q * m1; };
    return {moment(0.0, u2) / (u0 * u0 - u0 * u2), moment(u0, u2) / (u0 * u2),
            moment(u0, 0.0) / (u2 * u2 - u2 * u0)};
}

/// Weights w such that Σ w_j f(x_j) is the derivative at x_m of the
/// polynomial interpolating all (x_j, f(x_j)).
inline std::vector<double> lagrange_derivative_weights(const std::vector<double>& x, std::size_t m) {
    const std::size_t n = x.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == m) {
            for (std::size_t k = 0; k < n; ++k)
                if (k != m) w[m] += 1.0 / (x[m] - x[k]);
            continue;
        }
        double c = 1.0 / (x[j] - x[m]);
        for (std::size_t k = 0; k < n; ++k)
            if (k != j && k != m) c *= (x[m] - x[k]) / (x[j] - x[k]);
        w[j] = c;
    }
    return w;
}

/// Δ-derivative at grid index i of values tabulated on grid indices
/// [offset, offset + values.size()).
///
/// Right-scattered points use the exact quotient (f(σ(t)) − f(t))/μ(t).
/// Points inside a continuous segment differentiate the interpolant through
/// up to five grid neighbours in the same segment, centred where possible
/// (fourth order with five nodes).
template <typename T>
T delta_derivative_at(const Grid& grid, std::size_t i, const std::vector<T>& values,
                      std::size_t offset = 0) {
    const std::size_t end = offset + values.size();
    if (i < offset || i >= end) throw Error(ErrorCode::GridMismatch, "index outside tabulated range");
    if (i + 1 == grid.size())
        throw Error(ErrorCode::WindowExhausted, "no forward jump at the end of the window");
    auto v = [&](std::size_t k) -> const T& { return values[k - offset]; };
    const auto& p = grid[i];
    if (p.mu > 0.0) {
        if (i + 1 >= end) throw Error(ErrorCode::WindowExhausted, "σ(t) lies beyond tabulated values");
        return T((v(i + 1) - v(i)) / p.mu);
    }

    auto in_segment = [&](std::size_t k) {
        return k >= offset && k < end && grid[k].segment == p.segment;
    };
    constexpr std::size_t kNodes = 5;
    std::size_t lo = i, hi = i;
    while (hi - lo + 1 < kNodes) {
        const bool can_left = lo > 0 && in_segment(lo - 1);
        const bool can_right = in_segment(hi + 1);
        if (!can_left && !can_right) break;
        if (can_right && (!can_left || hi - i <= i - lo))
            ++hi;
        else
            --lo;
    }
    if (hi == lo) throw Error(ErrorCode::WindowExhausted, "no neighbours available for a derivative estimate");
    std::vector<double> x;
    for (std::size_t k = lo; k <= hi; ++k) x.push_back(grid[k].t);
    const auto w = lagrange_derivative_weights(x, i - lo);
    T acc = T(v(i) * w[i - lo]);
    for (std::size_t k = lo; k <= hi; ++k)
        if (k != i) acc += w[k - lo] * v(k);
    return acc;
}

/// Composite Simpson over grid nodes lo..hi (indices, same segment); the
/// trailing odd interval is integrated with the quadratic through the last
/// three nodes.
template <typename T>
T simpson_nodes(const Grid& grid, std::size_t lo, std::size_t hi, const std::vector<T>& values,
                std::size_t offset = 0) {
    auto v = [&](std::size_t k) -> const T& { return values[k - offset]; };
    T acc = T(v(lo) * 0.0);
    if (hi <= lo) return acc;
    if (hi - lo == 1) return T((v(lo) + v(hi)) * (0.5 * (grid[hi].t - grid[lo].t)));
    std::size_t k = lo;
    for (; k + 2 <= hi; k += 2) {
        const auto w = quadratic_integral_weights(grid[k].t, grid[k + 1].t, grid[k + 2].t, grid[k].t,
                                                  grid[k + 2].t);
        acc += w[0] * v(k) + w[1] * v(k + 1) + w[2] * v(k + 2);
    }
    if (k < hi) {
        const auto w = quadratic_integral_weights(grid[k - 1].t, grid[k].t, grid[k + 1].t, grid[k].t,
                                                  grid[k + 1].t);
        acc += w[0] * v(k - 1) + w[1] * v(k) + w[2] * v(k + 1);
    }
    return acc;
}

/// ∫_{t_lo}^{t_hi} f Δt for f tabulated on the grid, both bounds grid points:
/// μ(t)·f(t) over right-scattered t ∈ [t_lo, t_hi) plus Simpson over the
/// continuous parts.
template <typename T>
T delta_integral_nodes(const Grid& grid, std::size_t lo, std::size_t hi, const std::vector<T>& values,
                       std::size_t offset = 0) {
    auto v = [&](std::size_t k) -> const T& { return values[k - offset]; };
    T acc = T(v(lo) * 0.0);
    std::size_t run_start = lo;
    for (std::size_t k = lo; k < hi; ++k) {
        if (grid[k].mu > 0.0) {
            acc += simpson_nodes(grid, run_start, k, values, offset);
            acc += grid[k].mu * v(k);
            run_start = k + 1;
        }
    }
    acc += simpson_nodes(grid, run_start, hi, values, offset);
    return acc;
}

}  // namespace chronoslyap
