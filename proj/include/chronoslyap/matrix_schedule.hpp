#pragma once

#include "chronoslyap/types.hpp"

#include <utility>
#include <vector>

namespace chronoslyap {

/// Square matrix-valued function of time held piecewise constant: the value at
/// t is the sample with the largest breakpoint ≤ t (the first sample before
/// the first breakpoint).
class MatrixSchedule {
public:
    enum class Form { constant, schedule, tabulated };

    static MatrixSchedule constant(Matrix value);
    static MatrixSchedule schedule(std::vector<std::pair<double, Matrix>> pieces);
    static MatrixSchedule tabulated(std::vector<std::pair<double, Matrix>> samples);

    Form form() const noexcept { return form_; }
    Eigen::Index dim() const noexcept { return values_.front().rows(); }
    bool is_constant() const noexcept { return values_.size() == 1; }

    const Matrix& at(double t) const;
    /// Value on the open interval just before t.
    const Matrix& left_limit(double t) const;

    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<Matrix>& values() const noexcept { return values_; }

private:
    MatrixSchedule(Form form, std::vector<std::pair<double, Matrix>> pieces);

    Form form_;
    std::vector<double> breakpoints_;
    std::vector<Matrix> values_;
};

/// A(t) of x^Δ = A(t)x.
class SystemMatrix {
public:
    explicit SystemMatrix(MatrixSchedule schedule) : schedule_(std::move(schedule)) {}
    explicit SystemMatrix(Matrix constant) : schedule_(MatrixSchedule::constant(std::move(constant))) {}

    Eigen::Index dim() const noexcept { return schedule_.dim(); }
    bool is_constant() const noexcept { return schedule_.is_constant(); }
    const Matrix& at(double t) const { return schedule_.at(t); }
    const Matrix& left_limit(double t) const { return schedule_.left_limit(t); }
    /// A_R(t) = A(t) + I.
    Matrix recursive(double t) const { return at(t) + Matrix::Identity(dim(), dim()); }
    const MatrixSchedule& schedule() const noexcept { return schedule_; }

private:
    MatrixSchedule schedule_;
};

/// Symmetric forcing term M(t) of the Lyapunov equations (symmetric to 1e-12).
class CostMatrix {
public:
    explicit CostMatrix(MatrixSchedule schedule);
    explicit CostMatrix(Matrix constant) : CostMatrix(MatrixSchedule::constant(std::move(constant))) {}

    Eigen::Index dim() const noexcept { return schedule_.dim(); }
    bool is_constant() const noexcept { return schedule_.is_constant(); }
    const Matrix& at(double t) const { return schedule_.at(t); }
    const Matrix& left_limit(double t) const { return schedule_.left_limit(t); }
    const MatrixSchedule& schedule() const noexcept { return schedule_; }

    /// True when every piece is positive definite, i.e. usable as a
    /// stability certificate.
    bool positive_definite() const;

private:
    MatrixSchedule schedule_;
};

}  // namespace chronoslyap
