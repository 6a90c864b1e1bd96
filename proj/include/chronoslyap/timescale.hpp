#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace chronoslyap {

/// Absolute tolerance for deciding whether a real number belongs to a window.
inline constexpr double kTolMember = 1e-12;

/// Closed interval [a, b]; a == b is an isolated point.
struct Segment {
    double a = 0.0;
    double b = 0.0;

    bool degenerate() const noexcept { return a == b; }
    double length() const noexcept { return b - a; }
    bool operator==(const Segment&) const = default;
};

/// Set-valued classification of a time-scale point with respect to the jump
/// operators.
struct PointClass {
    bool right_scattered = false;
    bool left_scattered = false;

    bool right_dense() const noexcept { return !right_scattered; }
    bool left_dense() const noexcept { return !left_scattered; }
    bool isolated() const noexcept { return left_scattered && right_scattered; }
    bool dense() const noexcept { return !left_scattered && !right_scattered; }
    bool operator==(const PointClass&) const = default;
};

/// Finite representation of a time scale intersected with [t0, t_end]: an
/// ordered union of disjoint closed intervals.
///
/// σ(t_end) = t_end and ρ(t0) = t0 by convention; nothing outside the window
/// is ever extrapolated.
class TimeScaleWindow {
public:
    explicit TimeScaleWindow(std::vector<Segment> segments);

    const std::vector<Segment>& segments() const noexcept { return segments_; }
    double t0() const noexcept { return segments_.front().a; }
    double t_end() const noexcept { return segments_.back().b; }

    bool contains(double t) const noexcept;

    /// Index of the segment holding t; throws NotInTimeScale.
    std::size_t segment_index(double t) const;

    double sigma(double t) const;
    double rho(double t) const;
    double mu(double t) const;
    PointClass classify(double t) const;

    /// Largest graininess over the window.
    double mu_max() const noexcept;

    bool operator==(const TimeScaleWindow&) const = default;

private:
    std::vector<Segment> segments_;
};

enum class CanonicalKind { reals, integers, h_uniform, quantum, pulse };

std::string_view to_string(CanonicalKind kind);

/// Parameters of the canonical scales. Only the fields relevant to a kind are
/// read: h for h_uniform, q and min_spacing for quantum, a/b for pulse.
struct CanonicalParams {
    double h = 1.0;
    double q = 2.0;
    double min_spacing = 1e-9;
    double a = 1.0;
    double b = 1.0;
    bool operator==(const CanonicalParams&) const = default;
};

/// Canonical scale ∩ [t0, t_end].
///
/// For the quantum scale the accumulation point 0 is kept (as an isolated
/// point) when t0 ≤ 0; powers q^k closer together than min_spacing are dropped.
TimeScaleWindow make_canonical(CanonicalKind kind, const CanonicalParams& params, double t0,
                               double t_end);

/// Explicit point list, e.g. a user-supplied sample of a probability
/// distribution. Points are sorted and deduplicated.
TimeScaleWindow make_points(std::vector<double> points);

struct GridPoint {
    double t = 0.0;
    double mu = 0.0;
    PointClass cls;
    std::size_t segment = 0;
};

/// Discretization of a window: every segment endpoint plus interior points of
/// non-degenerate segments spaced at most dense_step apart.
class Grid {
public:
    Grid(TimeScaleWindow window, double dense_step);

    const TimeScaleWindow& window() const noexcept { return window_; }
    double dense_step() const noexcept { return dense_step_; }

    std::size_t size() const noexcept { return points_.size(); }
    const GridPoint& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<GridPoint>& points() const noexcept { return points_; }
    std::vector<double> times() const;

    /// Index of the grid point at t (within kTolMember); throws NotInTimeScale.
    std::size_t index_of(double t) const;
    bool has_point(double t) const noexcept;

    /// Index of the last grid point with time ≤ t.
    std::size_t floor_index(double t) const;

    /// True when [t_i, t_{i+1}] lies inside a continuous segment (as opposed
    /// to a jump across a gap).
    bool dense_interval(std::size_t i) const noexcept {
        return i + 1 < points_.size() && points_[i].mu == 0.0;
    }

private:
    TimeScaleWindow window_;
    double dense_step_;
    std::vector<GridPoint> points_;
};

Grid build_grid(const TimeScaleWindow& window, double dense_step);

}  // namespace chronoslyap
