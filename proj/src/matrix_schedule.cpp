#include "chronoslyap/matrix_schedule.hpp"

#include "chronoslyap/error.hpp"
#include "chronoslyap/timescale.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace chronoslyap {

MatrixSchedule::MatrixSchedule(Form form, std::vector<std::pair<double, Matrix>> pieces) : form_(form) {
    if (pieces.empty()) throw Error(ErrorCode::InvalidParameter, "matrix schedule needs at least one piece");
    const auto n = pieces.front().second.rows();
    if (n == 0) throw Error(ErrorCode::InvalidParameter, "matrix must be nonempty");
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const auto& [t, m] = pieces[k];
        if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix must be square");
        if (m.rows() != n) throw Error(ErrorCode::DimensionMismatch, "schedule pieces differ in dimension");
        if (!m.allFinite()) throw Error(ErrorCode::InvalidParameter, "matrix entries must be finite");
        if (!std::isfinite(t)) throw Error(ErrorCode::InvalidParameter, "breakpoints must be finite");
        if (k > 0 && !(t > pieces[k - 1].first))
            throw Error(ErrorCode::InvalidParameter, "breakpoints must be strictly increasing");
    }
    breakpoints_.reserve(pieces.size());
    values_.reserve(pieces.size());
    for (auto& [t, m] : pieces) {
        breakpoints_.push_back(t);
        values_.push_back(std::move(m));
    }
}

MatrixSchedule MatrixSchedule::constant(Matrix value) {
    std::vector<std::pair<double, Matrix>> pieces;
    pieces.emplace_back(0.0, std::move(value));
    return MatrixSchedule(Form::constant, std::move(pieces));
}

MatrixSchedule MatrixSchedule::schedule(std::vector<std::pair<double, Matrix>> pieces) {
    return MatrixSchedule(Form::schedule, std::move(pieces));
}

MatrixSchedule MatrixSchedule::tabulated(std::vector<std::pair<double, Matrix>> samples) {
    return MatrixSchedule(Form::tabulated, std::move(samples));
}

const Matrix& MatrixSchedule::at(double t) const {
    if (values_.size() == 1) return values_.front();
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t + kTolMember);
    if (it == breakpoints_.begin()) return values_.front();
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

const Matrix& MatrixSchedule::left_limit(double t) const {
    if (values_.size() == 1) return values_.front();
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t - kTolMember);
    if (it == breakpoints_.begin()) return values_.front();
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

CostMatrix::CostMatrix(MatrixSchedule schedule) : schedule_(std::move(schedule)) {
    for (const auto& m : schedule_.values()) {
        if (asymmetry(m) > 1e-12 * std::max(1.0, m.norm()))
            throw Error(ErrorCode::NonSymmetricInput, "cost matrix must be symmetric");
    }
}

bool CostMatrix::positive_definite() const {
    for (const auto& m : schedule_.values()) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) return false;
    }
    return true;
}

}  // namespace chronoslyap
