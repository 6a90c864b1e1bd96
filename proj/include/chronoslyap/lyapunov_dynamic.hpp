#pragma once

#include "chronoslyap/lyapunov.hpp"
#include "chronoslyap/matrix_schedule.hpp"
#include "chronoslyap/timescale.hpp"
#include "chronoslyap/transition.hpp"
#include "chronoslyap/types.hpp"

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

namespace chronoslyap {

enum class Equation { tsale, tsdle, tsdle_stationary, cdle, ddle };

std::string_view to_string(Equation eq);

/// Per-grid-point symmetric solutions P(t) with what was measured about them.
/// times[k] is grid point grid_offset + k.
struct GramianSolution {
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    Equation equation = Equation::tsdle;
    std::size_t grid_offset = 0;
    std::vector<double> times;
    std::vector<double> mu;
    std::vector<Matrix> P;
    std::vector<double> residual;        // Frobenius residual, NaN where no forward jump exists
    std::vector<double> min_eigenvalue;
    Matrix P0;
    /// P at the grid point after the last reported one, when known; lets P^Δ
    /// be formed at a final right-scattered point.
    Matrix P_next;

    double horizon = nan;           // window end used to truncate improper integrals
    double tail_bound = 0.0;        // estimated ‖omitted tail‖ at t0
    double certified_until = nan;   // last time whose truncation bound meets tail_tol
    double cross_check = nan;       // max relative gap to an independent computation

    std::size_t size() const noexcept { return times.size(); }
    double max_residual() const;
    double min_min_eigenvalue() const;
};

struct DynamicOptions {
    double integrator_tol = 1e-12;
    double tail_tol = 1e-8;
    double spot_check_tol = 1e-6;
};

/// P^Δ tabulated on the solution's grid points (zero matrix at t_end).
std::vector<Matrix> delta_derivative_series(const Grid& grid, const GramianSolution& sol);

/// ‖AᵀP + PA + μAᵀPA + (I + μAᵀ)P^Δ(I + μA) + M‖_F at every point with a
/// forward jump; NaN at t_end.
std::vector<double> tsdle_residuals(const Grid& grid, const SystemMatrix& A, const CostMatrix& M,
                                    const GramianSolution& sol);

/// Solution of the dynamic equation from P(t0) = P0 in closed form:
/// P(t) = Φ(t,t0)^{-T} [P0 − ∫_{t0}^{t} Φ(s,t0)ᵀ M(s) Φ(s,t0) Δs] Φ(t,t0)^{-1},
/// reported at every grid point from t0 on. A must be regressive.
///
/// The closed form is applied one grid interval at a time,
/// P(t_{i+1}) = S^{-T} [P(t_i) − L] S^{-1} with S = Φ(t_{i+1},t_i) and L the
/// interval's share of the integral; on scattered stretches this is the
/// discrete recursion itself.
GramianSolution solve_tsdle(const SystemMatrix& A, const CostMatrix& M, const Matrix& P0, const Grid& grid,
                            double t0, const DynamicOptions& opts = {});

struct StationaryIC {
    Matrix P0;
    double tail_bound = 0.0;
    double rate = 0.0;  // fitted geometric decay per block of the integrand mass
    double horizon = 0.0;
};

/// ∫_{t0}^{T_end} Φ(s,t0)ᵀ M(s) Φ(s,t0) Δs with an empirical tail bound.
///
/// The window is cut into ten equal time blocks; the masses of the trailing
/// blocks are fitted to a geometric sequence whose extrapolated remainder
/// must fall below tail_tol·‖P0‖. Throws NoDecayDetected when the fitted
/// ratio is not below one and WindowTooShort when the remainder is too big.
/// Regressivity is not required.
StationaryIC stationary_initial_condition(const SystemMatrix& A, const CostMatrix& M, const Grid& grid,
                                          double t0, const DynamicOptions& opts = {});

/// P(t) = ∫_t^{T_end} Φ(s,t)ᵀ M(s) Φ(s,t) Δs at every grid point of [t0, T_end).
///
/// Evaluated by the backward recursion P(t) = Φ(t',t)ᵀ P(t') Φ(t',t) +
/// ∫_t^{t'} …, which needs no inverse and so also covers non-regressive A.
/// The per-point truncation bound ‖Φ(T_end,t)‖²·max‖P‖ fixes
/// certified_until. Three points are recomputed by independent forward
/// integrals (SpotCheckFailed beyond spot_check_tol relative), and with
/// M ≻ 0 every P(t) must be positive definite.
GramianSolution solve_tsdle_stationary(const SystemMatrix& A, const CostMatrix& M, const Grid& grid,
                                       double t0, const DynamicOptions& opts = {});

/// Dynamic equation on [t0, t_end] ⊂ ℝ.
GramianSolution solve_cdle(const SystemMatrix& A, const CostMatrix& M, const Matrix& P0, double t0,
                           double t_end, double dense_step, const DynamicOptions& opts = {});

/// Dynamic equation on ℤ ∩ [t0, t_end], cross-checked against ddle_recursion.
GramianSolution solve_ddle(const SystemMatrix& A, const CostMatrix& M, const Matrix& P0, long t0, long t_end,
                           const DynamicOptions& opts = {});

/// P(t) = EᵀP0E − (EᵀXE − X), E = e^{−A(t−t0)}, AᵀX + XA = −M, for constant
/// A and M: the integral solution on ℝ evaluated without quadrature.
Matrix cdle_closed_form(const Matrix& A, const Matrix& M, const Matrix& P0, double t0, double t);

/// P(t+1) = A_R(t)^{-T} (P(t) − M(t)) A_R(t)^{-1}, returned for t0..t_end.
std::vector<Matrix> ddle_recursion(const SystemMatrix& A, const CostMatrix& M, const Matrix& P0, long t0,
                                   long t_end);

/// Pointwise algebraic solutions over the grid (t_end dropped when it is a
/// left-scattered maximum), with A and M frozen at each point. Points are
/// solved in parallel.
GramianSolution solve_tsale_on_grid(const SystemMatrix& A, const CostMatrix& M, const Grid& grid,
                                    const TsaleOptions& opts = {});

}  // namespace chronoslyap
