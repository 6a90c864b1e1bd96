#include "chronoslyap/transition.hpp"

#include "chronoslyap/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace chronoslyap {

namespace {

RegressivityClass regressivity_from(const SystemMatrix& A, const Grid& grid, std::size_t first,
                                    double tol) {
    RegressivityClass out;
    out.verdict = Regressivity::regressive;
    const auto n = A.dim();
    for (std::size_t i = first; i + 1 < grid.size(); ++i) {
        const auto& g = grid[i];
        if (g.mu == 0.0) continue;
        const Matrix B = Matrix::Identity(n, n) + g.mu * A.at(g.t);
        const double det = std::abs(B.partialPivLu().determinant());
        const double scale = B.cwiseAbs().rowwise().sum().maxCoeff();
        if (det <= tol * std::pow(scale, static_cast<double>(n))) {
            out.verdict = Regressivity::not_regressive;
            out.witnesses.push_back({g.t, det});
        }
    }
    return out;
}

// I + X + X²/2 + X³/6 + X⁴/24, i.e. one classical RK4 step of X' = AX with X = hA.
Matrix rk4_factor(const Matrix& hA) {
    const auto n = hA.rows();
    Matrix term = hA;
    Matrix out = Matrix::Identity(n, n) + term;
    for (int k = 2; k <= 4; ++k) {
        term = (term * hA) / static_cast<double>(k);
        out += term;
    }
    return out;
}

}  // namespace

RegressivityClass check_matrix_regressive(const SystemMatrix& A, const Grid& grid, double tol) {
    return regressivity_from(A, grid, 0, tol);
}

DenseStepper::DenseStepper(const SystemMatrix& A, const Grid& grid, double integrator_tol)
    : A_(&A), grid_(&grid), integrator_tol_(integrator_tol) {
    if (!(integrator_tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "integrator_tol must be positive");
}

Matrix DenseStepper::step(std::size_t i, double h) const {
    const auto& g = (*grid_)[i];
    const auto n = A_->dim();
    if (h <= 0.0) return Matrix::Identity(n, n);
    if (g.mu > 0.0) return Matrix::Identity(n, n) + g.mu * A_->at(g.t);
    const auto& seg = grid_->window().segments()[g.segment];
    return rk4_span(g.t, h, std::min(grid_->dense_step(), seg.length() / 8.0));
}

Matrix DenseStepper::rk4_span(double t, double h, double max_substep) const {
    const auto n = A_->dim();
    Matrix phi = Matrix::Identity(n, n);
    const auto& bp = A_->schedule().breakpoints();
    const double end = t + h;
    auto it = std::upper_bound(bp.begin(), bp.end(), t + kTolMember);
    double a = t;
    while (a < end) {
        double b = end;
        if (it != bp.end() && *it < end - kTolMember) b = *it++;
        const double len = b - a;
        const Matrix& Ak = A_->at(a + 0.5 * len);
        double cap = max_substep;
        const double norm = Ak.cwiseAbs().rowwise().sum().maxCoeff();
        if (norm > 0.0) cap = std::min(cap, std::pow(120.0 * integrator_tol_ / norm, 0.25) / norm);
        const auto m = static_cast<long>(std::max(1.0, std::ceil(len / cap - 1e-9)));
        const Matrix factor = rk4_factor((len / static_cast<double>(m)) * Ak);
        for (long k = 0; k < m; ++k) phi = factor * phi;
        a = b;
    }
    return phi;
}

TransitionMatrix TransitionMatrix::sweep(SystemMatrix A, Grid grid, double t0, TransitionOptions options) {
    if (!grid.window().contains(t0)) throw Error(ErrorCode::NotInTimeScale, "t0 is not in the time scale");
    if (!grid.has_point(t0)) throw Error(ErrorCode::InvalidParameter, "t0 must be a grid point");
    TransitionMatrix out(std::move(A), std::move(grid), options);
    out.base_index_ = out.grid_.index_of(t0);
    out.regressivity_ = regressivity_from(out.A_, out.grid_, out.base_index_, options.tol_reg);
    if (options.require_regressive && !out.regressivity_.regressive())
        throw Error(ErrorCode::NotRegressive, "I + μA is singular at t = " +
                                                  std::to_string(out.regressivity_.witnesses.front().t));

    const auto stepper = out.stepper();
    const auto& g = out.grid_;
    const auto n = out.A_.dim();
    out.cache_.reserve(g.size() - out.base_index_);
    out.cache_.push_back(Matrix::Identity(n, n));
    for (std::size_t i = out.base_index_; i + 1 < g.size(); ++i)
        out.cache_.push_back(stepper.step(i, g[i + 1].t - g[i].t) * out.cache_.back());
    return out;
}

const Matrix& TransitionMatrix::at_index(std::size_t i) const {
    if (i < base_index_ || i >= grid_.size())
        throw Error(ErrorCode::InvalidParameter, "transition requested before its base time");
    return cache_[i - base_index_];
}

Matrix TransitionMatrix::evaluate(double t) const {
    if (!grid_.window().contains(t)) throw Error(ErrorCode::NotInTimeScale, "t is not in the time scale");
    if (t < base() - kTolMember) throw Error(ErrorCode::InvalidParameter, "t precedes the base time");
    const auto i = grid_.floor_index(t);
    if (std::abs(t - grid_[i].t) <= kTolMember) return at_index(i);
    return stepper().step(i, t - grid_[i].t) * at_index(i);
}

TransitionInverse TransitionMatrix::inverse_at_index(std::size_t i) const {
    const Matrix& phi = at_index(i);
    Eigen::PartialPivLU<Matrix> lu(phi);
    const double rcond = lu.rcond();
    if (!(rcond > std::numeric_limits<double>::epsilon()))
        throw Error(ErrorCode::SingularTransition, "transition matrix is singular at t = " +
                                                       std::to_string(grid_[i].t));
    TransitionInverse out;
    out.inverse = lu.inverse();
    out.condition = 1.0 / rcond;
    out.ill_conditioned = out.condition > 1e12;
    return out;
}

TransitionInverse TransitionMatrix::inverse(double t) const {
    return inverse_at_index(grid_.index_of(t));
}

Matrix transition(const SystemMatrix& A, const Grid& grid, double t0, double t, TransitionOptions options) {
    if (t >= t0 - kTolMember) return TransitionMatrix::sweep(A, grid, t0, options).evaluate(t);
    options.require_regressive = true;
    const Matrix forward = TransitionMatrix::sweep(A, grid, t, options).evaluate(t0);
    Eigen::PartialPivLU<Matrix> lu(forward);
    if (!(lu.rcond() > std::numeric_limits<double>::epsilon()))
        throw Error(ErrorCode::SingularTransition, "transition matrix is singular");
    return lu.inverse();
}

}  // namespace chronoslyap
