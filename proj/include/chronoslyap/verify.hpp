#pragma once

#include "chronoslyap/lyapunov_dynamic.hpp"
#include "chronoslyap/matrix_schedule.hpp"
#include "chronoslyap/timescale.hpp"
#include "chronoslyap/transition.hpp"
#include "chronoslyap/tscalc.hpp"
#include "chronoslyap/types.hpp"

#include <vector>

namespace chronoslyap {

/// x(t) = Φ_A(t, t0)x0 at every grid point from t0 on; states[k] belongs to
/// grid point grid_offset + k.
struct Trajectory {
    std::size_t grid_offset = 0;
    std::vector<double> times;
    std::vector<Vector> states;
    Vector x0;
    /// Forward stepping went through a point where I + μA is singular.
    bool non_regressive = false;

    std::size_t size() const noexcept { return times.size(); }
};

Trajectory simulate(const TransitionMatrix& phi, const Vector& x0);

/// Forward simulation; non-regressive A is allowed (the state may collapse).
Trajectory simulate(const SystemMatrix& A, const Grid& grid, const Vector& x0, double t0,
                    double integrator_tol = 1e-12);

/// Minimum eigenvalue > tol·‖P‖. NonSymmetric when ‖P − Pᵀ‖ > 1e-10·max(1, ‖P‖).
bool is_positive_definite(const Matrix& P, double tol = 1e-10);

struct LyapunovTrace {
    std::vector<double> times;
    std::vector<double> V;
    std::vector<double> V_delta;            // quotient / finite difference of V
    std::vector<double> V_delta_quadratic;  // xᵀ[AᵀP + PA + μAᵀPA + (I + μAᵀ)P^Δ(I + μA)]x
    double max_disagreement = 0.0;  // relative, over points with |V^Δ| > 1e-12
    bool V_positive = false;
    bool V_delta_nonpositive = false;
    bool V_delta_negative = false;
};

/// V(t) = x(t)ᵀP(t)x(t) along a trajectory, its Δ-derivative computed two
/// ways, and the sign verdicts of a Lyapunov function. Sign tests are
/// relative to V: V^Δ < −1e-9·V counts as negative, V^Δ ≤ 1e-9·V as
/// nonpositive. V_positive means V > 0 wherever x ≠ 0 and V = 0 where x = 0.
/// Entries with no forward jump are NaN and excluded from the verdicts.
LyapunovTrace lyapunov_trace(const Grid& grid, const SystemMatrix& A, const GramianSolution& P,
                             const Trajectory& traj);

struct DecayCheck {
    bool holds = false;
    double gamma_fit = 0.0;
    double worst_ratio = 0.0;  // max over the window of ‖x(t)‖ / (e_{−λ}(t,t0)‖x0‖)
};

/// ‖x(t)‖ ≤ γ_fit·e_{−λ}(t, t0)·‖x0‖ on the whole window, where γ_fit is the
/// largest ratio over the first 10% of points. −λ must be positively
/// regressive (NotRegressive otherwise).
DecayCheck empirical_decay(const Grid& grid, const Trajectory& traj, double lambda_test);

}  // namespace chronoslyap
