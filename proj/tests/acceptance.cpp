#include "chronoslyap/lyapunov.hpp"
#include "chronoslyap/lyapunov_dynamic.hpp"
#include "chronoslyap/stability.hpp"
#include "chronoslyap/tscalc.hpp"
#include "chronoslyap/verify.hpp"

#include "support.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace chronoslyap;
using testsupport::rel_diff;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

Grid grid_of(CanonicalKind kind, double t0, double t_end, double step, CanonicalParams p = {}) {
    return Grid(make_canonical(kind, p, t0, t_end), step);
}

Matrix diag(std::initializer_list<double> d) {
    Matrix D = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    Eigen::Index k = 0;
    for (double v : d) D(k, k) = v, ++k;
    return D;
}

Matrix scalar(double a) { return Matrix::Constant(1, 1, a); }

double max_drift(const GramianSolution& sol, double until = INFINITY) {
    double worst = 0;
    for (std::size_t k = 0; k < sol.size() && sol.times[k] <= until; ++k)
        worst = std::max(worst, (sol.P[k] - sol.P0).norm());
    return worst;
}

// ∫₀ᵗ e^{Aᵀs} M e^{As} ds from the Van Loan block exponential.
Matrix gramian_van_loan(const Matrix& A, const Matrix& M, double t) {
    const auto n = A.rows();
    Matrix C = Matrix::Zero(2 * n, 2 * n);
    C.topLeftCorner(n, n) = -A.transpose();
    C.topRightCorner(n, n) = M;
    C.bottomRightCorner(n, n) = A;
    const Matrix E = (C * t).exp();
    return E.bottomRightCorner(n, n).transpose() * E.topRightCorner(n, n);
}

Outcome tsale_oracle_equivalence() {
    std::mt19937_64 rng(2024);
    const std::vector<double> mus = {0.0, 0.1, 0.5, 1.0, 2.0};
    double worst_gap = 0, worst_res = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 1 + trial % 6;
        const double mu = mus[(trial / 6) % mus.size()];
        const Matrix A = testsupport::random_hilger_stable(n, mu, rng);
        const Matrix M = testsupport::random_spd(n, rng);
        const Matrix P = solve_tsale_pointwise(A, M, mu);
        const Matrix oracle = mu == 0.0 ? solve_cale_oracle(A, M) : solve_tsale_oracle(A, M, mu);
        worst_gap = std::max(worst_gap, rel_diff(P, oracle));
        const Matrix res = A.transpose() * P + P * A + mu * A.transpose() * P * A + M;
        worst_res = std::max(worst_res, res.norm() / M.norm());
    }
    return {worst_gap <= 1e-8 && worst_res <= 1e-8,
            fmt("200 systems, max oracle gap %.2e, max relative residual %.2e (limit 1e-8)", worst_gap, worst_res)};
}

Outcome scalar_closed_forms() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const double mu = trial % 5 == 0 ? 0.0 : 2.0 * u(rng);
        const double m = 0.1 + 5 * u(rng);
        // 1 + μa spans (−0.95, 0.95) for μ > 0.
        const double a = mu == 0.0 ? -(0.05 + 3 * u(rng)) : (-0.95 + 1.9 * u(rng) - 1.0) / mu;
        const double expected = -m / (2 * a + mu * a * a);
        const double got = solve_tsale_pointwise(scalar(a), scalar(m), mu, 1e-16)(0, 0);
        worst = std::max(worst, std::abs(got - expected) / std::abs(expected));
    }
    return {worst <= 1e-12, fmt("50 triples, max relative error %.2e (limit 1e-12)", worst)};
}

Outcome tsdle_residual() {
    const auto g = grid_of(CanonicalKind::pulse, 0, 10, 0.01);
    const SystemMatrix A(diag({-1, -2}));
    const CostMatrix M(Matrix(Matrix::Identity(2, 2)));
    const auto sol = solve_tsdle_stationary(A, M, g, 0);
    const auto res = tsdle_residuals(g, A, M, sol);
    double worst = 0;
    for (double r : res)
        if (!std::isnan(r)) worst = std::max(worst, r);
    const double limit = 1e-5 * M.at(0).norm();
    const double min_eig = sol.min_min_eigenvalue();
    return {worst <= limit && min_eig > 0,
            fmt("max residual %.2e (limit %.2e), min eigenvalue %.3e", worst, limit, min_eig)};
}

Outcome reductions() {
    std::mt19937_64 rng(404);
    double worst_r = 0, worst_z = 0;
    const auto r = grid_of(CanonicalKind::reals, 0, 2, 0.01);
    const auto z = grid_of(CanonicalKind::integers, 0, 8, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 1 + trial % 4;
        const Matrix M = testsupport::random_spd(n, rng);
        const Matrix P0 = testsupport::random_spd(n, rng);

        const Matrix Ac = testsupport::random_hilger_stable(n, 0.0, rng, 0.05, 0.95, 0.2, 1.5);
        const auto sr = solve_tsdle(SystemMatrix(Ac), CostMatrix(M), P0, r, 0);
        for (std::size_t k = 0; k < sr.size(); ++k) {
            const double t = sr.times[k];
            const Matrix Einv = (-Ac * t).exp();
            const Matrix ref = Einv.transpose() * (P0 - gramian_van_loan(Ac, M, t)) * Einv;
            worst_r = std::max(worst_r, rel_diff(sr.P[k], ref));
        }

        const Matrix Ad = testsupport::random_hilger_stable(n, 1.0, rng, 0.3, 0.95);
        const auto sz = solve_tsdle(SystemMatrix(Ad), CostMatrix(M), P0, z, 0);
        const Matrix Rinv = Matrix(Ad + Matrix::Identity(n, n)).inverse();
        Matrix P = P0;
        for (std::size_t k = 0; k < sz.size(); ++k) {
            worst_z = std::max(worst_z, rel_diff(sz.P[k], P));
            P = Rinv.transpose() * (P - M) * Rinv;
        }
    }
    return {worst_r <= 1e-8 && worst_z <= 1e-12,
            fmt("reals max gap %.2e (limit 1e-8), integers max gap %.2e (limit 1e-12)", worst_r, worst_z)};
}

Outcome stationarity_dichotomy() {
    std::mt19937_64 rng(55);
    CanonicalParams hp;
    hp.h = 0.5;
    struct Case {
        Grid grid;
        double mu;
    };
    const std::vector<Case> cases = {{grid_of(CanonicalKind::reals, 0, 3, 0.005), 0.0},
                                     {grid_of(CanonicalKind::integers, 0, 6, 1), 1.0},
                                     {grid_of(CanonicalKind::h_uniform, 0, 3, 1, hp), 0.5}};
    double worst_const = 0;
    for (const auto& c : cases) {
        for (int trial = 0; trial < 10; ++trial) {
            const Eigen::Index n = 1 + trial % 3;
            const Matrix A = testsupport::random_hilger_stable(n, c.mu, rng, 0.6, 0.95, 0.2, 1.0);
            const Matrix M = testsupport::random_spd(n, rng);
            const Matrix P0 = solve_tsale_pointwise(A, M, c.mu);
            const auto sol = solve_tsdle(SystemMatrix(A), CostMatrix(M), P0, c.grid, 0);
            worst_const = std::max(worst_const, max_drift(sol) / P0.norm());
        }
    }
    const auto pulse = grid_of(CanonicalKind::pulse, 0, 10, 0.01);
    const Matrix P0 = solve_tsale_pointwise(scalar(-0.5), scalar(1), pulse[0].mu);
    const auto seeded = solve_tsdle(SystemMatrix(scalar(-0.5)), CostMatrix(scalar(1)), P0, pulse, 0);
    const double drift = max_drift(seeded) / P0.norm();
    return {worst_const <= 1e-8 && drift > 1e-3,
            fmt("constant graininess max drift %.2e (limit 1e-8), pulse drift %.3e (must exceed 1e-3)", worst_const,
                drift)};
}

Outcome perturbed_ic() {
    const auto g = grid_of(CanonicalKind::reals, 0, 3, 0.01);
    const auto sol = solve_tsdle(SystemMatrix(scalar(-1)), CostMatrix(scalar(1)), scalar(0.6), g, 0);
    double worst = 0;
    for (double t : {1.0, 2.0, 3.0}) {
        const double expected = 0.5 + 0.1 * std::exp(2 * t);
        worst = std::max(worst, std::abs(sol.P[g.index_of(t)](0, 0) - expected) / expected);
    }
    return {worst <= 1e-6, fmt("max relative error at t = 1, 2, 3: %.2e (limit 1e-6)", worst)};
}

Outcome calculus_tables() {
    auto x = [](double t) { return std::sin(t) + t * t * t; };
    auto dx = [](double t) { return std::cos(t) + 3 * t * t; };
    const auto sig = ScalarSignal::rule(x);
    double scattered = 0, dense = 0, integral_s = 0, integral_d = 0, expo = 0;
    auto rel = [](double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); };

    // Derivative rows.
    const auto z = grid_of(CanonicalKind::integers, -3, 6, 1);
    for (std::size_t i = 0; i + 1 < z.size(); ++i)
        scattered = std::max(scattered, rel(delta_derivative(z, sig, z[i].t), x(z[i].t + 1) - x(z[i].t)));
    CanonicalParams hp;
    hp.h = 0.3;
    const auto hz = grid_of(CanonicalKind::h_uniform, 0, 3, 1, hp);
    for (std::size_t i = 0; i + 1 < hz.size(); ++i) {
        const double t = hz[i].t, s = hz[i + 1].t;
        scattered = std::max(scattered, rel(delta_derivative(hz, sig, t), (x(s) - x(t)) / (s - t)));
    }
    CanonicalParams qp;
    qp.q = 1.5;
    const auto qz = grid_of(CanonicalKind::quantum, 1, 12, 1, qp);
    for (std::size_t i = 0; i + 1 < qz.size(); ++i) {
        const double t = qz[i].t;
        scattered = std::max(scattered, rel(delta_derivative(qz, sig, t), (x(1.5 * t) - x(t)) / (0.5 * t)));
    }
    const auto r = grid_of(CanonicalKind::reals, 0, 3, 0.002);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) dense = std::max(dense, rel(delta_derivative(r, sig, r[i].t), dx(r[i].t)));
    CanonicalParams pp;
    pp.a = 1.5;
    pp.b = 0.5;
    const auto pg = grid_of(CanonicalKind::pulse, 0, 5.5, 0.002, pp);
    for (std::size_t i = 0; i + 1 < pg.size(); ++i) {
        const double t = pg[i].t;
        const double d = delta_derivative(pg, sig, t);
        if (pg[i].mu > 0)
            scattered = std::max(scattered, rel(d, (x(t + 0.5) - x(t)) / 0.5));
        else
            dense = std::max(dense, rel(d, dx(t)));
    }

    // Integral rows.
    auto f = [](double t) { return std::cos(t) + t; };
    const auto fs = ScalarSignal::rule(f);
    double sum = 0;
    for (int t = -3; t <= 5; ++t) sum += f(t);
    integral_s = std::max(integral_s, rel(delta_integral(z, fs, -3, 6), sum));
    sum = 0;
    for (std::size_t i = 0; i + 1 < hz.size(); ++i) sum += f(hz[i].t) * 0.3;
    integral_s = std::max(integral_s, rel(delta_integral(hz, fs, 0, hz[hz.size() - 1].t), sum));
    sum = 0;
    for (std::size_t i = 0; i + 1 < qz.size(); ++i) sum += f(qz[i].t) * 0.5 * qz[i].t;
    integral_s = std::max(integral_s, rel(delta_integral(qz, fs, 1, qz[qz.size() - 1].t), sum));
    integral_d = rel(delta_integral(r, fs, 0.5, 2.5), std::sin(2.5) - std::sin(0.5) + 3.0);

    // Exponentials.
    CanonicalParams h4;
    h4.h = 0.25;
    const auto e_r = grid_of(CanonicalKind::reals, 0, 4, 0.01);
    const auto e_z = grid_of(CanonicalKind::integers, 0, 12, 1);
    const auto e_h = grid_of(CanonicalKind::h_uniform, 0, 4, 1, h4);
    for (double p : {-0.7, 0.3, -1.5}) {
        const auto ps = ScalarSignal::constant(p);
        for (double t : {0.5, 1.0, 2.5, 4.0}) expo = std::max(expo, rel(exp_ts(e_r, ps, t, 0), std::exp(p * t)));
        for (int t = 0; t <= 12; ++t) expo = std::max(expo, rel(exp_ts(e_z, ps, t, 0), std::pow(1 + p, t)));
        for (std::size_t i = 0; i < e_h.size(); ++i) {
            const double t = e_h[i].t;
            expo = std::max(expo, rel(exp_ts(e_h, ps, t, 0), std::pow(1 + 0.25 * p, std::round(t / 0.25))));
        }
    }
    const bool pass = scattered <= 1e-13 && integral_s <= 1e-13 && dense <= 1e-6 && integral_d <= 1e-6 && expo <= 1e-10;
    return {pass, fmt("scattered rows %.1e (limit 1e-13), dense rows %.1e (limit 1e-6), exponentials %.1e (limit 1e-10)",
                      std::max(scattered, integral_s), std::max(dense, integral_d), expo)};
}

Outcome gamma_functional_check() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2, 2);
    double worst = 0;
    CanonicalParams hp;
    hp.h = 0.25;
    const auto r = make_canonical(CanonicalKind::reals, {}, 0, 7);
    const auto h = make_canonical(CanonicalKind::h_uniform, hp, 0, 10);
    for (int k = 0; k < 100; ++k) {
        const Complex l(u(rng), u(rng));
        worst = std::max(worst, std::abs(gamma_functional(l, r, 0).value - l.real()));
        worst = std::max(worst, std::abs(gamma_functional(l, h, 0).value - std::log(std::abs(1.0 + 0.25 * l)) / 0.25));
    }
    const auto p = make_canonical(CanonicalKind::pulse, {}, 0, 20001);
    double pulse_gap = 0;
    for (const Complex l : {Complex(-0.5, 0), Complex(-0.2, 0.6)}) {
        const double expected = (l.real() + std::log(std::abs(1.0 + l))) / 2;
        pulse_gap = std::max(pulse_gap, std::abs(gamma_functional(l, p, 0).value - expected));
    }
    return {worst <= 1e-12 && pulse_gap <= 1e-4,
            fmt("reals and hZ max gap %.2e (limit 1e-12), pulse period-average gap %.2e (limit 1e-4)", worst,
                pulse_gap)};
}

Outcome lyapunov_verification() {
    std::mt19937_64 rng(99);
    CanonicalParams hp, qp, pp;
    hp.h = 0.5;
    qp.q = 1.02;
    struct Case {
        const char* name;
        Grid grid;
        double mu_max;
    };
    const auto quantum = grid_of(CanonicalKind::quantum, 1, 40, 1, qp);
    const std::vector<Case> cases = {
        {"reals", grid_of(CanonicalKind::reals, 0, 25, 0.005), 0.0},
        {"integers", grid_of(CanonicalKind::integers, 0, 60, 1), 1.0},
        {"h_uniform", grid_of(CanonicalKind::h_uniform, 0, 30, 1, hp), 0.5},
        {"quantum", quantum, stability_region(quantum).mu_max},
        {"pulse", grid_of(CanonicalKind::pulse, 0, 60, 0.005, pp), 1.0},
    };
    int systems = 0, failures = 0;
    double worst = 0;
    for (const auto& c : cases) {
        for (int trial = 0; trial < 20; ++trial, ++systems) {
            const Eigen::Index n = 1 + trial % 3;
            const Matrix A = testsupport::random_hilger_stable(n, c.mu_max, rng, 0.2, 0.8, 0.5, 2.0);
            const Matrix M = testsupport::random_spd(n, rng);
            const SystemMatrix sys(A);
            const double t0 = c.grid[0].t;
            GramianSolution P;
            try {
                P = solve_tsdle_stationary(sys, CostMatrix(M), c.grid, t0);
            } catch (const Error& e) {
                throw Error(e.code(), std::string(c.name) + ": " + e.what());
            }
            for (int k = 0; k < 5; ++k) {
                Vector x0 = testsupport::random_matrix(n, 1, rng);
                const auto tr = lyapunov_trace(c.grid, sys, P, simulate(sys, c.grid, x0, t0));
                if (!tr.V_positive || !tr.V_delta_negative) ++failures;
                worst = std::max(worst, tr.max_disagreement);
            }
        }
    }
    return {failures == 0 && worst <= 1e-5,
            fmt("%.0f systems x 5 trajectories, %.0f sign failures, max V-delta disagreement %.2e (limit 1e-5)",
                systems, failures, worst)};
}

Outcome hilger_geometry() {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi), unit(0, 1);
    long mismatches = 0, boundary_off = 0;
    for (double mu : {0.1, 1.0, 2.0}) {
        const double R = 1 / mu;
        for (const auto& l : hilger_boundary(mu, 3334))
            if (std::abs(hilger_margin(l, mu)) > kTolRegion || std::abs(std::abs(l + R) - R) > 1e-12 * R) ++boundary_off;
        for (int k = 0; k < 6666; ++k) {
            const double rho = k % 2 == 0 ? (1 - 1e-6) * R * std::sqrt(unit(rng)) : R * (1 + 1e-6 + 2 * unit(rng));
            const Complex l = Complex(-R, 0) + std::polar(rho, angle(rng));
            const bool inside = std::abs(1.0 + mu * l) < 1.0;
            if (inside != (k % 2 == 0) || hilger_contains(l, mu) != inside) ++mismatches;
        }
    }

    std::vector<double> pts{0};
    std::uniform_real_distribution<double> gap(0.05, 1.5);
    for (int k = 0; k < 60; ++k) pts.push_back(pts.back() + gap(rng));
    const auto region = stability_region(Grid(make_points(pts), 0.1));
    std::uniform_real_distribution<double> u(-2.5, 0.5);
    long inside_min = 0, inclusion_failures = 0;
    for (int k = 0; k < 10000; ++k) {
        const Complex l(u(rng), u(rng));
        if (hilger_margin(l, region.mu_max) <= kTolRegion) continue;
        ++inside_min;
        for (const auto& d : region.per_point) {
            const bool in = d.half_plane() ? l.real() < 0 : std::abs(l - d.center) < d.radius;
            if (!in) ++inclusion_failures;
        }
    }
    return {mismatches == 0 && boundary_off == 0 && inclusion_failures == 0 && inside_min > 0,
            fmt("%.0f misclassified of 30000, %.0f boundary samples off the edge, %.0f inclusion failures", mismatches,
                boundary_off, inclusion_failures)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"algebraic solver matches Kronecker and Stein oracles", tsale_oracle_equivalence},
        {"scalar closed forms", scalar_closed_forms},
        {"dynamic equation residual on the pulse scale", tsdle_residual},
        {"reductions to the continuous and discrete equations", reductions},
        {"stationarity only under constant graininess", stationarity_dichotomy},
        {"perturbed initial condition grows unboundedly", perturbed_ic},
        {"derivative, integral and exponential tables", calculus_tables},
        {"gamma functional", gamma_functional_check},
        {"Lyapunov verification along trajectories", lyapunov_verification},
        {"Hilger disk geometry", hilger_geometry},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
