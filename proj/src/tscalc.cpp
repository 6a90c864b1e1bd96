#include "chronoslyap/tscalc.hpp"

#include "chronoslyap/error.hpp"
#include "chronoslyap/grid_calculus.hpp"

#include <algorithm>
#include <cmath>

namespace chronoslyap {

ScalarSignal ScalarSignal::rule(Rule f) {
    if (!f) throw Error(ErrorCode::InvalidParameter, "empty signal rule");
    ScalarSignal s;
    s.rule_ = std::move(f);
    return s;
}

ScalarSignal ScalarSignal::constant(double c) {
    return rule([c](double) { return c; });
}

ScalarSignal ScalarSignal::tabulated(const Grid& grid, std::vector<double> values) {
    if (values.size() != grid.size())
        throw Error(ErrorCode::GridMismatch, "tabulated signal must have one value per grid point");
    ScalarSignal s;
    s.times_ = grid.times();
    s.values_ = std::move(values);
    return s;
}

double ScalarSignal::operator()(double t) const {
    if (rule_) return rule_(t);
    auto it = std::lower_bound(times_.begin(), times_.end(), t - kTolMember);
    if (it == times_.end()) throw Error(ErrorCode::NotInTimeScale, "signal evaluated past its table");
    const auto k = static_cast<std::size_t>(it - times_.begin());
    if (std::abs(*it - t) <= kTolMember || k == 0) return values_[k];
    const double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
    return (1.0 - w) * values_[k - 1] + w * values_[k];
}

namespace {

double simpson_step(const ScalarSignal& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double adaptive_simpson(const ScalarSignal& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

void check_bounds(const Grid& grid, double a, double b) {
    const auto& w = grid.window();
    if (!w.contains(a) || !w.contains(b))
        throw Error(ErrorCode::NotInTimeScale, "integration bounds must lie in the time scale");
    if (a > b) throw Error(ErrorCode::ReversedBounds, "lower bound exceeds upper bound");
}

}  // namespace

double delta_derivative(const Grid& grid, const ScalarSignal& f, double t) {
    const auto& w = grid.window();
    const auto seg_idx = w.segment_index(t);
    if (t >= w.t_end() - kTolMember)
        throw Error(ErrorCode::WindowExhausted, "no forward jump at the end of the window");
    if (f.is_tabulated()) return delta_derivative_at(grid, grid.index_of(t), f.values());

    const double mu = w.mu(t);
    if (mu > 0.0) return (f(w.sigma(t)) - f(t)) / mu;

    const auto& seg = w.segments()[seg_idx];
    const double h0 = grid.dense_step() / 4.0;
    const double dl = t - seg.a, dr = seg.b - t;
    if (dl >= h0 && dr >= h0) return (f(t + h0) - f(t - h0)) / (2.0 * h0);
    if (dr >= dl) {
        const double h = std::min(h0, dr / 2.0);
        return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
    }
    const double h = std::min(h0, dl / 2.0);
    return (3.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h)) / (2.0 * h);
}

double dense_integral(const Grid& grid, const ScalarSignal& f, double a, double b) {
    check_bounds(grid, a, b);
    double acc = 0.0;
    if (f.is_tabulated()) {
        const auto lo = grid.index_of(a), hi = grid.index_of(b);
        std::size_t run = lo;
        for (std::size_t k = lo; k < hi; ++k) {
            if (grid[k].mu > 0.0) {
                acc += simpson_nodes(grid, run, k, f.values());
                run = k + 1;
            }
        }
        return acc + simpson_nodes(grid, run, hi, f.values());
    }
    for (const auto& s : grid.window().segments()) {
        const double lo = std::max(s.a, a), hi = std::min(s.b, b);
        if (hi > lo) acc += adaptive_simpson(f, lo, hi, 1e-10);
    }
    return acc;
}

double delta_integral(const Grid& grid, const ScalarSignal& f, double a, double b) {
    check_bounds(grid, a, b);
    if (f.is_tabulated())
        return delta_integral_nodes(grid, grid.index_of(a), grid.index_of(b), f.values());
    double acc = dense_integral(grid, f, a, b);
    for (const auto& p : grid.points()) {
        if (p.t < a - kTolMember) continue;
        if (p.t >= b - kTolMember) break;
        if (p.mu > 0.0) acc += p.mu * f(p.t);
    }
    return acc;
}

RegressivityClass regressivity(const Grid& grid, const ScalarSignal& p, double tol) {
    RegressivityClass out;
    bool zero = false, negative = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& g = grid[i];
        if (g.mu == 0.0) continue;
        const double value = 1.0 + g.mu * (p.is_tabulated() ? p.values()[i] : p(g.t));
        if (std::abs(value) <= tol) {
            zero = true;
            out.witnesses.push_back({g.t, value});
        } else if (value < -tol) {
            negative = true;
            out.witnesses.push_back({g.t, value});
        }
    }
    out.verdict = zero       ? Regressivity::not_regressive
                  : negative ? Regressivity::regressive
                             : Regressivity::positively_regressive;
    return out;
}

double exp_ts(const Grid& grid, const ScalarSignal& p, double t, double t0) {
    check_bounds(grid, std::min(t, t0), std::max(t, t0));
    if (t < t0) {
        for (const auto& g : grid.points()) {
            if (g.t < t - kTolMember) continue;
            if (g.t >= t0 - kTolMember) break;
            if (g.mu > 0.0 && std::abs(1.0 + g.mu * p(g.t)) <= kTolRegressive)
                throw Error(ErrorCode::NotRegressive, "1 + μp vanishes on [t, t0)");
        }
        return 1.0 / exp_ts(grid, p, t0, t);
    }
    double product = 1.0;
    for (const auto& g : grid.points()) {
        if (g.t < t0 - kTolMember) continue;
        if (g.t >= t - kTolMember) break;
        if (g.mu > 0.0) product *= 1.0 + g.mu * p(g.t);
    }
    return product * std::exp(dense_integral(grid, p, t0, t));
}

}  // namespace chronoslyap
