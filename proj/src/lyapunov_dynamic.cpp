#include "chronoslyap/lyapunov_dynamic.hpp"

#include "chronoslyap/error.hpp"
#include "chronoslyap/grid_calculus.hpp"
#include "chronoslyap/parallel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace chronoslyap {

std::string_view to_string(Equation eq) {
    switch (eq) {
        case Equation::tsale: return "TSALE";
        case Equation::tsdle: return "TSDLE";
        case Equation::tsdle_stationary: return "TSDLE-stationary";
        case Equation::cdle: return "CDLE";
        case Equation::ddle: return "DDLE";
    }
    return "unknown";
}

double GramianSolution::max_residual() const {
    double r = 0.0;
    for (double v : residual)
        if (std::isfinite(v)) r = std::max(r, v);
    return r;
}

double GramianSolution::min_min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : min_eigenvalue) m = std::min(m, v);
    return m;
}

namespace {

struct IntervalPiece {
    Matrix S;  // Φ(t_{i+1}, t_i)
    Matrix L;  // ∫_{t_i}^{t_{i+1}} Φ(s,t_i)ᵀ M(s) Φ(s,t_i) Δs
};

void append_cuts(const std::vector<double>& bp, double lo, double hi, std::vector<double>& cuts) {
    auto it = std::upper_bound(bp.begin(), bp.end(), lo + kTolMember);
    for (; it != bp.end() && *it < hi - kTolMember; ++it) cuts.push_back(*it);
}

// One grid interval: exact μM at a scattered point, Simpson on each piece of a
// continuous interval between breakpoints of A and M.
IntervalPiece interval_piece(const SystemMatrix& A, const CostMatrix& M, const Grid& grid,
                             const DenseStepper& stepper, std::size_t i) {
    const auto& g = grid[i];
    const double h = grid[i + 1].t - g.t;
    IntervalPiece out;
    out.S = stepper.step(i, h);
    if (g.mu > 0.0) {
        out.L = g.mu * M.at(g.t);
        return out;
    }
    std::vector<double> cuts{g.t};
    append_cuts(A.schedule().breakpoints(), g.t, g.t + h, cuts);
    append_cuts(M.schedule().breakpoints(), g.t, g.t + h, cuts);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(g.t + h);

    const auto n = A.dim();
    out.L = Matrix::Zero(n, n);
    Matrix Sa = Matrix::Identity(n, n);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k], b = cuts[k + 1];
        if (b - a <= kTolMember) continue;
        const double m = 0.5 * (a + b);
        const Matrix Sm = stepper.step(i, m - g.t);
        const Matrix Sb = k + 2 == cuts.size() ? out.S : stepper.step(i, b - g.t);
        out.L += (b - a) / 6.0 *
                 (Sa.transpose() * M.at(a) * Sa + 4.0 * Sm.transpose() * M.at(m) * Sm +
                  Sb.transpose() * M.left_limit(b) * Sb);
        Sa = Sb;
    }
    return out;
}

void check_dims(const SystemMatrix& A, const CostMatrix& M) {
    if (A.dim() != M.dim()) throw Error(ErrorCode::DimensionMismatch, "A and M must have the same dimension");
}

void check_grid_point(const Grid& grid, double t0) {
    if (!grid.window().contains(t0)) throw Error(ErrorCode::NotInTimeScale, "t0 is not in the time scale");
    if (!grid.has_point(t0)) throw Error(ErrorCode::InvalidParameter, "t0 must be a grid point");
}

Matrix checked_symmetric(const Matrix& P) {
    if (!P.allFinite()) throw Error(ErrorCode::SingularTransition, "solution has non-finite entries");
    if (asymmetry(P) > 1e-9 * P.norm()) throw Error(ErrorCode::SymmetryLost, "solution lost symmetry");
    return symmetrized(P);
}

std::vector<double> residuals_of(const Grid& grid, const SystemMatrix& A, const CostMatrix& M,
                                 std::size_t offset, const std::vector<Matrix>& P) {
    const auto n = A.dim();
    const Matrix I = Matrix::Identity(n, n);
    std::vector<double> out(P.size(), GramianSolution::nan);
    for (std::size_t k = 0; k < P.size(); ++k) {
        const std::size_t i = offset + k;
        if (i + 1 >= grid.size()) continue;
        const auto& g = grid[i];
        if (g.mu > 0.0 && k + 1 >= P.size()) continue;
        const Matrix Pd = delta_derivative_at(grid, i, P, offset);
        const Matrix& At = A.at(g.t);
        const Matrix B = I + g.mu * At;
        const Matrix r = tsale_residual(At, P[k], M.at(g.t), g.mu) + B.transpose() * Pd * B;
        out[k] = r.norm();
    }
    return out;
}

void fill_eigenvalues(GramianSolution& sol) {
    sol.min_eigenvalue.resize(sol.P.size());
    for (std::size_t k = 0; k < sol.P.size(); ++k) sol.min_eigenvalue[k] = min_symmetric_eigenvalue(sol.P[k]);
}

void fill_times(GramianSolution& sol, const Grid& grid, std::size_t first, std::size_t last) {
    sol.grid_offset = first;
    for (std::size_t i = first; i < last; ++i) {
        sol.times.push_back(grid[i].t);
        sol.mu.push_back(grid[i].mu);
    }
}

// ∫_{t_first}^{T_end} Φ(s,t_first)ᵀ M Φ(s,t_first) Δs by forward accumulation;
// partial sums are recorded at the requested grid indices (ascending).
Matrix forward_gramian(const SystemMatrix& A, const CostMatrix& M, const Grid& grid, double t_first,
                       double integrator_tol, const std::vector<std::size_t>& marks,
                       std::vector<Matrix>* partial) {
    TransitionOptions topt;
    topt.require_regressive = false;
    topt.integrator_tol = integrator_tol;
    const auto phi = TransitionMatrix::sweep(A, grid, t_first, topt);
    const auto stepper = phi.stepper();
    const auto& g = phi.grid();
    const auto n = A.dim();
    Matrix acc = Matrix::Zero(n, n);
    auto mark = marks.begin();
    for (std::size_t i = phi.base_index();; ++i) {
        while (partial && mark != marks.end() && *mark == i) {
            partial->push_back(acc);
            ++mark;
        }
        if (i + 1 >= g.size()) break;
        const auto piece = interval_piece(phi.system(), M, g, stepper, i);
        const Matrix& F = phi.at_index(i);
        acc += F.transpose() * piece.L * F;
    }
    return symmetrized(acc);
}

}  // namespace

std::vector<Matrix> delta_derivative_series(const Grid& grid, const GramianSolution& sol) {
    std::vector<Matrix> values = sol.P;
    if (sol.P_next.size() > 0) values.push_back(sol.P_next);
    std::vector<Matrix> out;
    out.reserve(sol.P.size());
    for (std::size_t k = 0; k < sol.P.size(); ++k) {
        const std::size_t i = sol.grid_offset + k;
        if (i + 1 >= grid.size())
            out.push_back(Matrix::Zero(sol.P[k].rows(), sol.P[k].cols()));
        else
            out.push_back(delta_derivative_at(grid, i, values, sol.grid_offset));
    }
    return out;
}

std::vector<double> tsdle_residuals(const Grid& grid, const SystemMatrix& A, const CostMatrix& M,
                                    const GramianSolution& sol) {
    std::vector<Matrix> values = sol.P;
    if (sol.P_next.size() > 0) values.push_back(sol.P_next);
    auto r = residuals_of(grid, A, M, sol.grid_offset, values);
    r.resize(sol.P.size());
    return r;
}

GramianSolution solve_tsdle(const SystemMatrix& A, const CostMatrix& M, const Matrix& P0, const Grid& grid,
                            double t0, const DynamicOptions& opts) {
    check_dims(A, M);
    if (P0.rows() != A.dim() || P0.cols() != A.dim())
        throw Error(ErrorCode::DimensionMismatch, "P0 must match the dimension of A");
    if (!P0.allFinite()) throw Error(ErrorCode::InvalidParameter, "P0 entries must be finite");
    if (asymmetry(P0) > 1e-12 * std::max(1.0, P0.norm()))
        throw Error(ErrorCode::NonSymmetricInput, "P0 must be symmetric");
    check_grid_point(grid, t0);

    TransitionOptions topt;
    topt.integrator_tol = opts.integrator_tol;
    const auto phi = TransitionMatrix::sweep(A, grid, t0, topt);
    const auto stepper = phi.stepper();
    const auto& g = phi.grid();

    GramianSolution sol;
    sol.equation = Equation::tsdle;
    sol.P0 = symmetrized(P0);
    fill_times(sol, g, phi.base_index(), g.size());

    sol.P.push_back(sol.P0);
    for (std::size_t i = phi.base_index() + 1; i < g.size(); ++i) {
        const auto piece = interval_piece(phi.system(), M, g, stepper, i - 1);
        Eigen::PartialPivLU<Matrix> lu(piece.S.transpose());
        if (!(lu.rcond() > std::numeric_limits<double>::epsilon()))
            throw Error(ErrorCode::SingularTransition, "transition matrix is singular");
        const Matrix X = lu.solve(sol.P.back() - piece.L);     // S^{-T}(P − L)
        const Matrix P = lu.solve(X.transpose()).transpose();  // X S^{-1}
        sol.P.push_back(checked_symmetric(P));
    }
    sol.residual = residuals_of(g, A, M, sol.grid_offset, sol.P);
    fill_eigenvalues(sol);
    return sol;
}

StationaryIC stationary_initial_condition(const SystemMatrix& A, const CostMatrix& M, const Grid& grid,
                                          double t0, const DynamicOptions& opts) {
    check_dims(A, M);
    check_grid_point(grid, t0);
    if (!(opts.tail_tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "tail_tol must be positive");
    constexpr int kBlocks = 10;
    const double t_end = grid.window().t_end();
    std::vector<std::size_t> marks;
    for (int j = 0; j <= kBlocks; ++j) {
        const double edge = j == kBlocks ? t_end : t0 + (t_end - t0) * j / kBlocks;
        const auto idx = grid.floor_index(edge);
        if (marks.empty() || idx > marks.back()) marks.push_back(idx);
    }
    if (marks.size() < 5)
        throw Error(ErrorCode::WindowTooShort, "window holds too few points to judge decay");

    std::vector<Matrix> partial;
    StationaryIC out;
    out.P0 = forward_gramian(A, M, grid, t0, opts.integrator_tol, marks, &partial);
    out.horizon = t_end;

    std::vector<double> d;
    for (std::size_t j = 0; j + 1 < partial.size(); ++j) d.push_back((partial[j + 1] - partial[j]).norm());
    if (d.back() == 0.0) {
        out.tail_bound = 0.0;
        return out;
    }
    // log-linear fit over the trailing positive block masses
    std::vector<std::pair<double, double>> pts;
    for (std::size_t j = d.size(); j-- > 0 && pts.size() < 6;) {
        if (!(d[j] > 0.0)) break;
        pts.emplace_back(static_cast<double>(j), std::log(d[j]));
    }
    if (pts.size() < 3) throw Error(ErrorCode::NoDecayDetected, "too few nonzero block masses to fit a decay rate");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double np = static_cast<double>(pts.size());
    const double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
    out.rate = std::exp(slope);
    if (!(out.rate < 1.0))
        throw Error(ErrorCode::NoDecayDetected, "integrand mass does not decay along the window");
    const double last = std::max(d[d.size() - 1], d[d.size() - 2]);
    out.tail_bound = last * out.rate / (1.0 - out.rate);
    if (out.tail_bound > opts.tail_tol * out.P0.norm())
        throw Error(ErrorCode::WindowTooShort, "estimated tail exceeds tail_tol at the window end");
    return out;
}

GramianSolution solve_tsdle_stationary(const SystemMatrix& A, const CostMatrix& M, const Grid& grid,
                                       double t0, const DynamicOptions& opts) {
    const auto ic = stationary_initial_condition(A, M, grid, t0, opts);
    const auto base = grid.index_of(t0);
    const auto N = grid.size();
    const auto n = A.dim();
    const DenseStepper stepper(A, grid, opts.integrator_tol);

    std::vector<Matrix> Q(N - base);
    std::vector<double> gnorm2(N - base, 1.0);
    Q.back() = Matrix::Zero(n, n);
    Matrix G = Matrix::Identity(n, n);  // Φ(T_end, t_i)
    for (std::size_t i = N - 1; i-- > base;) {
        const auto piece = interval_piece(A, M, grid, stepper, i);
        const Matrix& next = Q[i + 1 - base];
        Q[i - base] = checked_symmetric(piece.S.transpose() * next * piece.S + piece.L);
        G = G * piece.S;
        gnorm2[i - base] = G.squaredNorm();
    }

    GramianSolution sol;
    sol.equation = Equation::tsdle_stationary;
    fill_times(sol, grid, base, N - 1);
    sol.residual = residuals_of(grid, A, M, base, Q);
    sol.residual.pop_back();
    sol.P_next = Q.back();
    sol.P.assign(Q.begin(), Q.end() - 1);
    sol.P0 = sol.P.front();
    sol.horizon = grid.window().t_end();
    sol.tail_bound = ic.tail_bound;
    if (sol.P.empty()) throw Error(ErrorCode::WindowTooShort, "window has no point before its end");

    double pmax = 0.0;
    for (const auto& P : sol.P) pmax = std::max(pmax, P.norm());
    sol.certified_until = sol.times.front();
    for (std::size_t k = 0; k < sol.P.size(); ++k) {
        if (gnorm2[k] * pmax > opts.tail_tol * sol.P[k].norm()) break;
        sol.certified_until = sol.times[k];
    }

    // independent forward integrals at three points
    const std::size_t m = sol.P.size();
    const std::size_t spots[3] = {0, m / 3, (2 * m) / 3};
    double worst = 0.0;
    for (std::size_t k : spots) {
        const Matrix F = k == 0 ? ic.P0
                                : forward_gramian(A, M, grid, sol.times[k], opts.integrator_tol, {}, nullptr);
        const double gap = (F - sol.P[k]).norm() / std::max(F.norm(), std::numeric_limits<double>::min());
        worst = std::max(worst, gap);
        if (gap > opts.spot_check_tol)
            throw Error(ErrorCode::SpotCheckFailed, "backward recursion and forward integral disagree at t = " +
                                                        std::to_string(sol.times[k]));
    }
    sol.cross_check = worst;

    fill_eigenvalues(sol);
    if (M.positive_definite()) {
        for (std::size_t k = 0; k < sol.P.size(); ++k)
            if (!(sol.min_eigenvalue[k] > 0.0))
                throw Error(ErrorCode::PositiveDefinitenessLost,
                            "P(t) is not positive definite at t = " + std::to_string(sol.times[k]));
    }
    return sol;
}

Matrix cdle_closed_form(const Matrix& A, const Matrix& M, const Matrix& P0, double t0, double t) {
    const Matrix X = solve_cale_oracle(A, M);
    const Matrix E = (-A * (t - t0)).exp();
    return symmetrized(Matrix(E.transpose() * P0 * E - (E.transpose() * X * E - X)));
}

std::vector<Matrix> ddle_recursion(const SystemMatrix& A, const CostMatrix& M, const Matrix& P0, long t0,
                                   long t_end) {
    check_dims(A, M);
    if (t_end < t0) throw Error(ErrorCode::ReversedBounds, "t_end precedes t0");
    std::vector<Matrix> out{P0};
    for (long t = t0; t < t_end; ++t) {
        const auto td = static_cast<double>(t);
        Eigen::PartialPivLU<Matrix> lu(A.recursive(td).transpose());
        if (!(lu.rcond() > std::numeric_limits<double>::epsilon()))
            throw Error(ErrorCode::NotRegressive, "A_R is singular at t = " + std::to_string(t));
        const Matrix X = lu.solve(out.back() - M.at(td));
        out.push_back(symmetrized(Matrix(lu.solve(X.transpose()).transpose())));
    }
    return out;
}

GramianSolution solve_cdle(const SystemMatrix& A, const CostMatrix& M, const Matrix& P0, double t0,
                           double t_end, double dense_step, const DynamicOptions& opts) {
    const Grid grid(make_canonical(CanonicalKind::reals, {}, t0, t_end), dense_step);
    auto sol = solve_tsdle(A, M, P0, grid, t0, opts);
    sol.equation = Equation::cdle;
    return sol;
}

GramianSolution solve_ddle(const SystemMatrix& A, const CostMatrix& M, const Matrix& P0, long t0, long t_end,
                           const DynamicOptions& opts) {
    const Grid grid(make_canonical(CanonicalKind::integers, {}, static_cast<double>(t0), static_cast<double>(t_end)),
                    1.0);
    auto sol = solve_tsdle(A, M, P0, grid, static_cast<double>(t0), opts);
    sol.equation = Equation::ddle;
    const auto rec = ddle_recursion(A, M, P0, t0, t_end);
    double worst = 0.0;
    for (std::size_t k = 0; k < rec.size(); ++k)
        worst = std::max(worst, (sol.P[k] - rec[k]).norm() / std::max(1.0, rec[k].norm()));
    sol.cross_check = worst;
    return sol;
}

GramianSolution solve_tsale_on_grid(const SystemMatrix& A, const CostMatrix& M, const Grid& grid,
                                    const TsaleOptions& opts) {
    check_dims(A, M);
    std::size_t count = grid.size();
    if (count > 1 && grid[count - 1].cls.left_scattered) --count;

    GramianSolution sol;
    sol.equation = Equation::tsale;
    fill_times(sol, grid, 0, count);
    sol.P.resize(count);
    sol.residual.resize(count);
    std::vector<double> tails(count, 0.0);
    parallel_for(count, [&](std::size_t i) {
        const double t = grid[i].t, mu = grid[i].mu;
        const auto res = solve_tsale(A.at(t), M.at(t), mu, opts);
        sol.P[i] = res.P;
        tails[i] = res.tail_bound;
        sol.residual[i] = tsale_residual(A.at(t), res.P, M.at(t), mu).norm();
    });
    sol.tail_bound = *std::max_element(tails.begin(), tails.end());
    sol.P0 = sol.P.front();
    fill_eigenvalues(sol);
    return sol;
}

}  // namespace chronoslyap
