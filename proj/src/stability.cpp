#include "chronoslyap/stability.hpp"

#include "chronoslyap/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace chronoslyap {

namespace {

// ∫_{t0}^{T} g Δt for the γ integrand, exact on a segment representation.
double gamma_integral(Complex lambda, const TimeScaleWindow& w, double t0, double T) {
    const auto& segs = w.segments();
    double acc = 0.0;
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const auto& s = segs[k];
        const double lo = std::max(s.a, t0), hi = std::min(s.b, T);
        if (hi > lo) acc += lambda.real() * (hi - lo);
        if (k + 1 == segs.size()) continue;
        if (s.b < t0 - kTolMember || s.b >= T - kTolMember) continue;
        const double mu = segs[k + 1].a - s.b;
        const double factor = std::abs(1.0 + mu * lambda);
        if (factor <= kTolRegressive)
            throw Error(ErrorCode::ZeroRegressivityPoint, "1 + μλ vanishes at t = " + std::to_string(s.b));
        acc += std::log(factor);
    }
    return acc;
}

// Largest point of the window not exceeding t.
double snap_down(const TimeScaleWindow& w, double t) {
    double out = w.t0();
    for (const auto& s : w.segments()) {
        if (s.a > t + kTolMember) break;
        out = std::min(s.b, t);
    }
    return out;
}

}  // namespace

StabilityRegion stability_region(const Grid& grid) {
    StabilityRegion out;
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const auto& g = grid[i];
        out.mu_max = std::max(out.mu_max, g.mu);
        out.per_point.push_back(
            {g.t, g.mu, g.mu > 0.0 ? -1.0 / g.mu : -inf, g.mu > 0.0 ? 1.0 / g.mu : inf});
    }
    return out;
}

std::vector<Complex> spectrum(const Matrix& A) {
    if (A.rows() != A.cols()) throw Error(ErrorCode::DimensionMismatch, "A must be square");
    Eigen::EigenSolver<Matrix> es(A, false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenSolverFailure, "eigenvalue solver failed");
    std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

std::string_view to_string(HminVerdict v) {
    switch (v) {
        case HminVerdict::all_in: return "all-in";
        case HminVerdict::partial: return "partial";
        case HminVerdict::none: return "none";
    }
    return "unknown";
}

std::string_view to_string(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::indicated_by_gamma: return "indicated-by-gamma";
        case StabilityVerdict::indicated_by_degenerate_regressivity: return "indicated-by-degenerate-regressivity";
        case StabilityVerdict::indicated_by_hmin: return "indicated-by-hmin";
        case StabilityVerdict::not_indicated: return "not-indicated";
    }
    return "unknown";
}

HminResult hmin_verdict(const Matrix& A, const TimeScaleWindow& w) {
    HminResult out;
    out.mu_max = w.mu_max();
    out.spectrum = spectrum(A);
    std::size_t inside = 0;
    for (const auto& lambda : out.spectrum) {
        out.margins.push_back(hilger_margin(lambda, out.mu_max));
        if (out.margins.back() > kTolRegion) ++inside;
    }
    out.verdict = inside == out.spectrum.size() ? HminVerdict::all_in
                  : inside == 0                 ? HminVerdict::none
                                                : HminVerdict::partial;
    return out;
}

GammaEstimate gamma_functional(Complex lambda, const TimeScaleWindow& w, double t0) {
    if (!w.contains(t0)) throw Error(ErrorCode::NotInTimeScale, "t0 is not in the time scale");
    const double T = w.t_end();
    if (!(T > t0)) throw Error(ErrorCode::InvalidParameter, "window must extend beyond t0");
    GammaEstimate out;
    out.value = gamma_integral(lambda, w, t0, T) / (T - t0);
    auto& d = out.diagnostic;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 5; k <= 10; ++k) {
        const double f = k / 10.0;
        const double Tf = k == 10 ? T : snap_down(w, t0 + f * (T - t0));
        if (!(Tf > t0)) continue;
        const double avg = gamma_integral(lambda, w, t0, Tf) / (Tf - t0);
        d.fractions.push_back(f);
        d.horizons.push_back(Tf);
        d.averages.push_back(avg);
        lo = std::min(lo, avg);
        hi = std::max(hi, avg);
    }
    d.spread = hi - lo;
    d.converged = d.spread == 0.0 || d.spread < 1e-3 * std::abs(out.value);
    return out;
}

std::vector<SrHit> s_r_detect(Complex lambda, const TimeScaleWindow& w, double tol) {
    std::vector<SrHit> out;
    const auto& segs = w.segments();
    for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
        const double mu = segs[k + 1].a - segs[k].b;
        const double v = std::abs(1.0 + mu * lambda);
        if (v <= tol) out.push_back({segs[k].b, v});
    }
    return out;
}

StabilityReport stability_report(const Matrix& A, const TimeScaleWindow& w, double t0) {
    StabilityReport out;
    out.t0 = t0;
    const auto h = hmin_verdict(A, w);
    out.mu_max = h.mu_max;
    out.hmin = h.verdict;
    const auto& segs = w.segments();
    bool all_gamma = true, all_covered = true, any_hits = false;
    for (std::size_t k = 0; k < h.spectrum.size(); ++k) {
        EigenEntry e;
        e.lambda = h.spectrum[k];
        e.hmin_margin = h.margins[k];
        e.in_hmin = e.hmin_margin > kTolRegion;
        e.s_r_hits = s_r_detect(e.lambda, w);
        for (std::size_t j = 0; j + 1 < segs.size(); ++j) {
            const double v = std::abs(1.0 + (segs[j + 1].a - segs[j].b) * e.lambda);
            if (j == 0) e.min_abs_factor = e.max_abs_factor = v;
            e.min_abs_factor = std::min(e.min_abs_factor, v);
            e.max_abs_factor = std::max(e.max_abs_factor, v);
        }
        try {
            const auto g = gamma_functional(e.lambda, w, t0);
            e.gamma_hat = g.value;
            e.gamma_converged = g.diagnostic.converged;
            e.gamma_diagnostic = g.diagnostic;
        } catch (const Error& err) {
            if (err.code() != ErrorCode::ZeroRegressivityPoint) throw;
            e.gamma_hat = -std::numeric_limits<double>::infinity();
        }
        const bool gamma_ok = e.gamma_converged && e.gamma_hat < 0.0;
        all_gamma = all_gamma && gamma_ok;
        all_covered = all_covered && (gamma_ok || !e.s_r_hits.empty());
        any_hits = any_hits || !e.s_r_hits.empty();
        out.eigen.push_back(std::move(e));
    }
    if (all_gamma)
        out.verdict = StabilityVerdict::indicated_by_gamma;
    else if (all_covered && any_hits)
        out.verdict = StabilityVerdict::indicated_by_degenerate_regressivity;
    else if (out.hmin == HminVerdict::all_in)
        out.verdict = StabilityVerdict::indicated_by_hmin;
    else
        out.verdict = StabilityVerdict::not_indicated;
    return out;
}

std::vector<Complex> hilger_boundary(double mu, int count, double extent) {
    if (count < 1 || !(mu >= 0.0)) throw Error(ErrorCode::InvalidParameter, "need μ ≥ 0 and a positive count");
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        if (mu == 0.0) {
            const double y = count == 1 ? 0.0 : -extent + 2.0 * extent * k / (count - 1);
            out.emplace_back(0.0, y);
        } else {
            const double th = 2.0 * std::numbers::pi * k / count;
            out.push_back(Complex(-1.0 / mu, 0.0) + std::polar(1.0 / mu, th));
        }
    }
    return out;
}

}  // namespace chronoslyap
