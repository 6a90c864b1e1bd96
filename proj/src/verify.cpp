#include "chronoslyap/verify.hpp"

#include "chronoslyap/error.hpp"
#include "chronoslyap/grid_calculus.hpp"

#include <algorithm>
#include <cmath>

namespace chronoslyap {

Trajectory simulate(const TransitionMatrix& phi, const Vector& x0) {
    if (x0.size() != phi.system().dim())
        throw Error(ErrorCode::DimensionMismatch, "x0 must match the dimension of A");
    if (!x0.allFinite()) throw Error(ErrorCode::InvalidParameter, "x0 entries must be finite");
    Trajectory out;
    out.grid_offset = phi.base_index();
    out.x0 = x0;
    out.non_regressive = !phi.regressivity().regressive();
    const auto& g = phi.grid();
    for (std::size_t i = phi.base_index(); i < g.size(); ++i) {
        out.times.push_back(g[i].t);
        out.states.push_back(i == phi.base_index() ? x0 : Vector(phi.at_index(i) * x0));
    }
    return out;
}

Trajectory simulate(const SystemMatrix& A, const Grid& grid, const Vector& x0, double t0, double integrator_tol) {
    TransitionOptions opts;
    opts.require_regressive = false;
    opts.integrator_tol = integrator_tol;
    return simulate(TransitionMatrix::sweep(A, grid, t0, opts), x0);
}

bool is_positive_definite(const Matrix& P, double tol) {
    if (P.rows() != P.cols()) throw Error(ErrorCode::DimensionMismatch, "P must be square");
    const double norm = P.norm();
    if (asymmetry(P) > 1e-10 * std::max(1.0, norm)) throw Error(ErrorCode::NonSymmetric, "P is not symmetric");
    if (P.size() == 0) return false;
    return min_symmetric_eigenvalue(P) > tol * norm;
}

LyapunovTrace lyapunov_trace(const Grid& grid, const SystemMatrix& A, const GramianSolution& P,
                             const Trajectory& traj) {
    if (traj.grid_offset != P.grid_offset || traj.times.size() < P.size())
        throw Error(ErrorCode::GridMismatch, "solution and trajectory start at different grid points");
    for (std::size_t k = 0; k < P.size(); ++k)
        if (std::abs(traj.times[k] - P.times[k]) > kTolMember)
            throw Error(ErrorCode::GridMismatch, "solution and trajectory grids differ");
    if (P.size() > 0 && traj.states.front().size() != P.P.front().rows())
        throw Error(ErrorCode::DimensionMismatch, "state and solution dimensions differ");

    const double nan = GramianSolution::nan;
    const std::size_t m = P.size();
    LyapunovTrace out;
    out.times.assign(P.times.begin(), P.times.end());
    std::vector<double> V;
    for (std::size_t k = 0; k < m; ++k) {
        const Vector& x = traj.states[k];
        V.push_back(x.dot(P.P[k] * x));
    }
    out.V = V;
    const bool has_next = P.P_next.size() > 0 && traj.states.size() > m;
    if (has_next) V.push_back(traj.states[m].dot(P.P_next * traj.states[m]));

    const auto Pd = delta_derivative_series(grid, P);
    const auto n = A.dim();
    const Matrix I = Matrix::Identity(n, n);
    out.V_positive = out.V_delta_nonpositive = out.V_delta_negative = true;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = P.grid_offset + k;
        const Vector& x = traj.states[k];
        const bool zero_state = x.isZero(0.0);
        if (zero_state ? out.V[k] != 0.0 : !(out.V[k] > 0.0)) out.V_positive = false;

        const bool defined = i + 1 < grid.size() && (grid[i].mu == 0.0 || k + 1 < V.size());
        if (!defined) {
            out.V_delta.push_back(nan);
            out.V_delta_quadratic.push_back(nan);
            continue;
        }
        const double vd = delta_derivative_at(grid, i, V, P.grid_offset);
        const double t = grid[i].t, mu = grid[i].mu;
        const Matrix& At = A.at(t);
        const Matrix B = I + mu * At;
        const Matrix Q = At.transpose() * P.P[k] + P.P[k] * At + mu * At.transpose() * P.P[k] * At +
                         B.transpose() * Pd[k] * B;
        const double vq = x.dot(Q * x);
        out.V_delta.push_back(vd);
        out.V_delta_quadratic.push_back(vq);
        if (std::abs(vd) > 1e-12)
            out.max_disagreement = std::max(out.max_disagreement, std::abs(vd - vq) / std::abs(vd));
        if (!(vd < -1e-9 * out.V[k])) out.V_delta_negative = false;
        if (!(vd <= 1e-9 * out.V[k])) out.V_delta_nonpositive = false;
    }
    return out;
}

DecayCheck empirical_decay(const Grid& grid, const Trajectory& traj, double lambda_test) {
    const std::size_t base = traj.grid_offset;
    for (std::size_t i = base; i + 1 < grid.size(); ++i) {
        const auto& g = grid[i];
        if (g.mu > 0.0 && !(1.0 - g.mu * lambda_test > kTolRegressive))
            throw Error(ErrorCode::NotRegressive, "−λ is not positively regressive at t = " + std::to_string(g.t));
    }
    DecayCheck out;
    const double x0 = traj.x0.norm();
    if (x0 == 0.0) {
        out.holds = true;
        return out;
    }
    // e_{−λ}(t, t0) along the grid: exact factors at gaps, e^{−λh} inside segments
    std::vector<double> ratio;
    double e = 1.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        if (k > 0) {
            const auto& g = grid[base + k - 1];
            const double h = grid[base + k].t - g.t;
            e *= g.mu > 0.0 ? 1.0 - g.mu * lambda_test : std::exp(-lambda_test * h);
        }
        ratio.push_back(traj.states[k].norm() / (e * x0));
    }
    const std::size_t head = std::max<std::size_t>(1, ratio.size() / 10);
    out.gamma_fit = *std::max_element(ratio.begin(), ratio.begin() + static_cast<long>(head));
    out.worst_ratio = *std::max_element(ratio.begin(), ratio.end());
    out.holds = out.worst_ratio <= out.gamma_fit * (1.0 + 1e-9);
    return out;
}

}  // namespace chronoslyap
