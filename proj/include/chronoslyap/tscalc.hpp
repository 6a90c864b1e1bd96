#pragma once

#include "chronoslyap/timescale.hpp"

#include <functional>
#include <vector>

namespace chronoslyap {

inline constexpr double kTolRegressive = 1e-10;

/// Real-valued function on a time scale: either a rule evaluable anywhere or
/// values tabulated on the grid points (linearly interpolated in between).
class ScalarSignal {
public:
    using Rule = std::function<double(double)>;

    static ScalarSignal rule(Rule f);
    static ScalarSignal constant(double c);
    static ScalarSignal tabulated(const Grid& grid, std::vector<double> values);

    double operator()(double t) const;
    bool is_tabulated() const noexcept { return !rule_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    Rule rule_;
    std::vector<double> times_;
    std::vector<double> values_;
};

enum class Regressivity { not_regressive, regressive, positively_regressive };

struct RegressivityWitness {
    double t = 0.0;
    double value = 0.0;  // 1 + μ(t)p(t), or |det(I + μ(t)A(t))| for matrices
};

struct RegressivityClass {
    Regressivity verdict = Regressivity::positively_regressive;
    std::vector<RegressivityWitness> witnesses;

    bool regressive() const noexcept { return verdict != Regressivity::not_regressive; }
};

/// Hilger derivative f^Δ(t).
///
/// Right-scattered t: exact quotient. Right-dense t: central difference with
/// step dense_step/4, switching to one-sided second-order formulas near the
/// ends of the containing segment. Tabulated signals use grid neighbours.
double delta_derivative(const Grid& grid, const ScalarSignal& f, double t);

/// ∫_a^b f Δt: Σ μ(t)f(t) over right-scattered t ∈ [a, b) plus adaptive
/// Simpson (absolute tolerance 1e-10 per segment) over the continuous parts.
double delta_integral(const Grid& grid, const ScalarSignal& f, double a, double b);

/// Ordinary integral of f over the continuous parts of [a, b] only.
double dense_integral(const Grid& grid, const ScalarSignal& f, double a, double b);

RegressivityClass regressivity(const Grid& grid, const ScalarSignal& p,
                               double tol = kTolRegressive);

/// Generalized exponential e_p(t, t0).
///
/// Forward evaluation is a plain product and tolerates 1 + μp = 0 (the value
/// then collapses to zero). Backward evaluation (t < t0) inverts the forward
/// value and requires p regressive on [t, t0).
double exp_ts(const Grid& grid, const ScalarSignal& p, double t, double t0);

}  // namespace chronoslyap
