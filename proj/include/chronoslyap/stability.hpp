#pragma once

#include "chronoslyap/hilger.hpp"
#include "chronoslyap/timescale.hpp"
#include "chronoslyap/tscalc.hpp"
#include "chronoslyap/types.hpp"

#include <string_view>
#include <vector>

namespace chronoslyap {

/// Margin required for a verdict of membership in the conservative region.
inline constexpr double kTolRegion = 1e-9;

struct HilgerDisk {
    double t = 0.0;
    double mu = 0.0;
    /// Center −1/μ and radius 1/μ; both infinite for μ = 0 (half-plane).
    double center = 0.0;
    double radius = 0.0;
    bool half_plane() const noexcept { return mu == 0.0; }
};

struct StabilityRegion {
    double mu_max = 0.0;
    std::vector<HilgerDisk> per_point;
};

/// Disk parameters at every grid point that has a forward jump.
StabilityRegion stability_region(const Grid& grid);

/// Eigenvalues of a square matrix (EigenSolverFailure on failure).
std::vector<Complex> spectrum(const Matrix& A);

enum class HminVerdict { all_in, partial, none };
std::string_view to_string(HminVerdict v);

struct HminResult {
    double mu_max = 0.0;
    HminVerdict verdict = HminVerdict::none;
    std::vector<Complex> spectrum;
    std::vector<double> margins;  // hilger_margin(λ, mu_max)
};

/// Tests spec(A) against the Hilger disk of the largest graininess. all_in is
/// a sufficient condition for exponential stability, never a necessary one.
HminResult hmin_verdict(const Matrix& A, const TimeScaleWindow& w);

struct GammaDiagnostic {
    std::vector<double> fractions;
    std::vector<double> horizons;
    std::vector<double> averages;
    double spread = 0.0;
    bool converged = false;
};

struct GammaEstimate {
    double value = 0.0;
    GammaDiagnostic diagnostic;
};

/// Windowed average (1/(T − t0)) ∫_{t0}^{T} g Δt with g = Re λ on continuous
/// parts and log|1 + μλ|/μ at scattered points, evaluated exactly from the
/// segments at T = t_end. The diagnostic repeats the average at the trailing
/// window fractions 0.5, 0.6, …, 1.0 (each horizon snapped down to the time
/// scale) and calls it converged when their spread is below 1e-3·|value|.
/// Throws ZeroRegressivityPoint if 1 + μλ vanishes at a scattered point.
GammaEstimate gamma_functional(Complex lambda, const TimeScaleWindow& w, double t0);

struct SrHit {
    double t = 0.0;
    double value = 0.0;  // |1 + μ(t)λ|
};

/// Right-scattered points where |1 + μ(t)λ| ≤ tol. A finite window can only
/// evidence membership of λ in the degenerate set, which needs infinitely
/// many such points.
std::vector<SrHit> s_r_detect(Complex lambda, const TimeScaleWindow& w, double tol = kTolRegressive);

enum class StabilityVerdict {
    indicated_by_gamma,
    indicated_by_degenerate_regressivity,
    indicated_by_hmin,
    not_indicated,
};
std::string_view to_string(StabilityVerdict v);

struct EigenEntry {
    Complex lambda;
    double hmin_margin = 0.0;
    bool in_hmin = false;
    double gamma_hat = 0.0;  // −∞ when a zero-regressivity point exists
    bool gamma_converged = false;
    GammaDiagnostic gamma_diagnostic;
    std::vector<SrHit> s_r_hits;
    double min_abs_factor = 1.0;  // min and max of |1 + μλ| over scattered points
    double max_abs_factor = 1.0;
};

struct StabilityReport {
    double t0 = 0.0;
    double mu_max = 0.0;
    HminVerdict hmin = HminVerdict::none;
    std::vector<EigenEntry> eigen;
    StabilityVerdict verdict = StabilityVerdict::not_indicated;
    bool stable_indicated() const noexcept { return verdict != StabilityVerdict::not_indicated; }
};

/// Aggregated spectral analysis of a constant A on a window.
///
/// Stability is indicated by γ̂ < 0 with a converged diagnostic for every
/// eigenvalue; failing that, by eigenvalues that are either such or hit
/// 1 + μλ = 0 on the window; failing that, by all eigenvalues in H_min.
StabilityReport stability_report(const Matrix& A, const TimeScaleWindow& w, double t0);

/// count points on the boundary of the Hilger disk of μ (for μ = 0, the
/// imaginary axis over [−extent, extent]).
std::vector<Complex> hilger_boundary(double mu, int count, double extent = 10.0);

}  // namespace chronoslyap
