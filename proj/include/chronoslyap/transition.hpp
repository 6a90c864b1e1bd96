#pragma once

#include "chronoslyap/matrix_schedule.hpp"
#include "chronoslyap/timescale.hpp"
#include "chronoslyap/tscalc.hpp"
#include "chronoslyap/types.hpp"

#include <cstddef>
#include <vector>

namespace chronoslyap {

/// Regressivity of A on the window: I + μ(t)A(t) must be invertible at every
/// right-scattered grid point. Near-singularity is judged by
/// |det(I + μA)| ≤ tol·‖I + μA‖∞ⁿ. Matrix verdicts are regressive or
/// not_regressive only.
RegressivityClass check_matrix_regressive(const SystemMatrix& A, const Grid& grid,
                                          double tol = kTolRegressive);

/// Fixed-step classical RK4 for X' = A(t)X across continuous stretches.
///
/// Substeps are capped by the grid's dense_step, one eighth of the segment
/// length, and the step at which the RK4 remainder per unit time,
/// ‖hA‖⁴‖A‖/120, reaches integrator_tol. A is sampled once per substep at its
/// midpoint and substeps are split at the schedule's breakpoints, so
/// piecewise-constant A is integrated without straddling a jump.
class DenseStepper {
public:
    DenseStepper(const SystemMatrix& A, const Grid& grid, double integrator_tol);

    /// Φ(t_i + h, t_i) with 0 ≤ h ≤ t_{i+1} − t_i; for a right-scattered
    /// t_i only h = μ(t_i) is meaningful and yields I + μA(t_i).
    Matrix step(std::size_t i, double h) const;

private:
    Matrix rk4_span(double t, double h, double max_substep) const;

    const SystemMatrix* A_;
    const Grid* grid_;
    double integrator_tol_;
};

struct TransitionOptions {
    bool require_regressive = true;
    double integrator_tol = 1e-12;
    double tol_reg = kTolRegressive;
};

struct TransitionInverse {
    Matrix inverse;
    double condition = 1.0;  // 1 / rcond estimate
    bool ill_conditioned = false;  // condition > 1e12
};

/// Φ_A(t, t0) cached at every grid point t ≥ t0 by a single forward sweep:
/// exact updates (I + μA)Φ across gaps, RK4 inside segments.
class TransitionMatrix {
public:
    static TransitionMatrix sweep(SystemMatrix A, Grid grid, double t0,
                                  TransitionOptions options = {});

    double base() const noexcept { return grid_[base_index_].t; }
    std::size_t base_index() const noexcept { return base_index_; }
    const Grid& grid() const noexcept { return grid_; }
    const SystemMatrix& system() const noexcept { return A_; }
    double integrator_tol() const noexcept { return options_.integrator_tol; }
    const RegressivityClass& regressivity() const noexcept { return regressivity_; }

    /// Cached values, index k ↔ grid index base_index() + k.
    const std::vector<Matrix>& cache() const noexcept { return cache_; }
    const Matrix& at_index(std::size_t i) const;
    const Matrix& at(double t) const { return at_index(grid_.index_of(t)); }

    /// Φ(t, t0) for any window time t ≥ t0 (off-grid times are reached by a
    /// partial RK4 step from the preceding grid point).
    Matrix evaluate(double t) const;

    /// Φ(t, t0)⁻¹ by LU; only defined when A is regressive on [t0, t].
    TransitionInverse inverse(double t) const;
    TransitionInverse inverse_at_index(std::size_t i) const;

    DenseStepper stepper() const { return DenseStepper(A_, grid_, options_.integrator_tol); }

private:
    TransitionMatrix(SystemMatrix A, Grid grid, TransitionOptions options)
        : A_(std::move(A)), grid_(std::move(grid)), options_(options) {}

    SystemMatrix A_;
    Grid grid_;
    TransitionOptions options_;
    std::size_t base_index_ = 0;
    RegressivityClass regressivity_;
    std::vector<Matrix> cache_;
};

/// Φ_A(t, t0) for any window times; t0 must be a grid point when t ≥ t0 and
/// t must be a grid point when t < t0 (computed as Φ_A(t0, t)⁻¹).
Matrix transition(const SystemMatrix& A, const Grid& grid, double t0, double t,
                  TransitionOptions options = {});

}  // namespace chronoslyap
