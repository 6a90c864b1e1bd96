#include "chronoslyap/timescale.hpp"

#include "chronoslyap/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace chronoslyap {

namespace {

std::string fmt_time(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", t);
    return buf;
}

}  // namespace

TimeScaleWindow::TimeScaleWindow(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw Error(ErrorCode::EmptyWindow, "time scale has no segments");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (!std::isfinite(s.a) || !std::isfinite(s.b))
            throw Error(ErrorCode::InvalidParameter, "segment endpoints must be finite");
        if (s.a > s.b)
            throw Error(ErrorCode::InvalidParameter,
                        "segment [" + fmt_time(s.a) + ", " + fmt_time(s.b) + "] is reversed");
        if (i > 0 && !(segments_[i - 1].b + kTolMember < s.a))
            throw Error(ErrorCode::InvalidParameter, "segments must be disjoint and ordered");
    }
}

bool TimeScaleWindow::contains(double t) const noexcept {
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t - kTolMember,
                               [](const Segment& s, double v) { return s.b < v; });
    return it != segments_.end() && it->a - kTolMember <= t;
}

std::size_t TimeScaleWindow::segment_index(double t) const {
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t - kTolMember,
                               [](const Segment& s, double v) { return s.b < v; });
    if (it == segments_.end() || it->a - kTolMember > t)
        throw Error(ErrorCode::NotInTimeScale, fmt_time(t) + " is not in the time scale");
    return static_cast<std::size_t>(it - segments_.begin());
}

double TimeScaleWindow::sigma(double t) const {
    const auto i = segment_index(t);
    const auto& s = segments_[i];
    if (t < s.b - kTolMember) return std::max(t, s.a);
    return i + 1 < segments_.size() ? segments_[i + 1].a : s.b;
}

double TimeScaleWindow::rho(double t) const {
    const auto i = segment_index(t);
    const auto& s = segments_[i];
    if (t > s.a + kTolMember) return std::min(t, s.b);
    return i > 0 ? segments_[i - 1].b : s.a;
}

double TimeScaleWindow::mu(double t) const {
    const auto i = segment_index(t);
    const auto& s = segments_[i];
    if (t < s.b - kTolMember || i + 1 == segments_.size()) return 0.0;
    return segments_[i + 1].a - s.b;
}

PointClass TimeScaleWindow::classify(double t) const {
    const auto i = segment_index(t);
    const auto& s = segments_[i];
    PointClass c;
    c.right_scattered = t >= s.b - kTolMember && i + 1 < segments_.size();
    c.left_scattered = t <= s.a + kTolMember && i > 0;
    return c;
}

double TimeScaleWindow::mu_max() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < segments_.size(); ++i)
        m = std::max(m, segments_[i + 1].a - segments_[i].b);
    return m;
}

std::string_view to_string(CanonicalKind kind) {
    switch (kind) {
        case CanonicalKind::reals: return "reals";
        case CanonicalKind::integers: return "integers";
        case CanonicalKind::h_uniform: return "h_uniform";
        case CanonicalKind::quantum: return "quantum";
        case CanonicalKind::pulse: return "pulse";
    }
    return "unknown";
}

namespace {

std::vector<Segment> uniform_points(double h, double t0, double t_end) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidParameter, "h must be > 0");
    const auto k_lo = static_cast<long long>(std::ceil(t0 / h - 1e-9));
    const auto k_hi = static_cast<long long>(std::floor(t_end / h + 1e-9));
    std::vector<Segment> out;
    for (long long k = k_lo; k <= k_hi; ++k) {
        const double t = static_cast<double>(k) * h;
        out.push_back({t, t});
    }
    return out;
}

std::vector<Segment> quantum_points(double q, double min_spacing, double t0, double t_end) {
    if (!(q > 1.0) || !std::isfinite(q)) throw Error(ErrorCode::InvalidParameter, "q must be > 1");
    if (!(min_spacing > 0.0)) throw Error(ErrorCode::InvalidParameter, "min_spacing must be > 0");
    std::vector<Segment> out;
    if (t0 <= 0.0 && t_end >= 0.0) out.push_back({0.0, 0.0});
    if (t_end <= 0.0) return out;

    const double lq = std::log(q);
    auto power = [q](long long k) { return std::pow(q, static_cast<double>(k)); };

    auto k_hi = static_cast<long long>(std::floor(std::log(t_end) / lq));
    while (power(k_hi + 1) <= t_end + kTolMember) ++k_hi;
    while (power(k_hi) > t_end + kTolMember) --k_hi;

    auto k_lo = static_cast<long long>(std::ceil(std::log(min_spacing / (q - 1.0)) / lq));
    while ((q - 1.0) * power(k_lo) < min_spacing) ++k_lo;
    if (t0 > 0.0) {
        auto k0 = static_cast<long long>(std::ceil(std::log(t0) / lq));
        while (power(k0 - 1) >= t0 - kTolMember) --k0;
        while (power(k0) < t0 - kTolMember) ++k0;
        k_lo = std::max(k_lo, k0);
    }
    for (long long k = k_lo; k <= k_hi; ++k) out.push_back({power(k), power(k)});
    return out;
}

std::vector<Segment> pulse_segments(double a, double b, double t0, double t_end) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw Error(ErrorCode::InvalidParameter, "pulse parameters a, b must be > 0");
    const double period = a + b;
    const auto k_lo = static_cast<long long>(std::floor((t0 - a) / period));
    const auto k_hi = static_cast<long long>(std::ceil(t_end / period));
    std::vector<Segment> out;
    for (long long k = k_lo; k <= k_hi; ++k) {
        const double start = static_cast<double>(k) * period;
        const double end = start + a;
        const double lo = std::max(start, t0);
        const double hi = std::min(end, t_end);
        if (hi < lo - kTolMember) continue;
        out.push_back({lo, std::max(lo, hi)});
    }
    return out;
}

}  // namespace

TimeScaleWindow make_canonical(CanonicalKind kind, const CanonicalParams& params, double t0,
                               double t_end) {
    if (!std::isfinite(t0) || !std::isfinite(t_end))
        throw Error(ErrorCode::InvalidParameter, "window bounds must be finite");
    if (t0 > t_end) throw Error(ErrorCode::EmptyWindow, "window start exceeds window end");

    std::vector<Segment> segments;
    switch (kind) {
        case CanonicalKind::reals: segments.push_back({t0, t_end}); break;
        case CanonicalKind::integers: segments = uniform_points(1.0, t0, t_end); break;
        case CanonicalKind::h_uniform: segments = uniform_points(params.h, t0, t_end); break;
        case CanonicalKind::quantum:
            segments = quantum_points(params.q, params.min_spacing, t0, t_end);
            break;
        case CanonicalKind::pulse: segments = pulse_segments(params.a, params.b, t0, t_end); break;
    }
    if (segments.empty())
        throw Error(ErrorCode::EmptyWindow, std::string(to_string(kind)) + " scale has no points in [" +
                                                fmt_time(t0) + ", " + fmt_time(t_end) + "]");
    return TimeScaleWindow(std::move(segments));
}

TimeScaleWindow make_points(std::vector<double> points) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end(),
                             [](double x, double y) { return y - x <= kTolMember; }),
                 points.end());
    std::vector<Segment> segments;
    segments.reserve(points.size());
    for (double p : points) segments.push_back({p, p});
    return TimeScaleWindow(std::move(segments));
}

Grid::Grid(TimeScaleWindow window, double dense_step)
    : window_(std::move(window)), dense_step_(dense_step) {
    if (!(dense_step > 0.0) || !std::isfinite(dense_step))
        throw Error(ErrorCode::InvalidParameter, "dense_step must be a positive finite number");

    const auto& segs = window_.segments();
    for (std::size_t si = 0; si < segs.size(); ++si) {
        const auto& s = segs[si];
        const bool last_segment = si + 1 == segs.size();
        const double gap = last_segment ? 0.0 : segs[si + 1].a - s.b;
        const bool has_left_gap = si > 0;

        if (s.degenerate()) {
            points_.push_back({s.a, gap, {!last_segment, has_left_gap}, si});
            continue;
        }
        const auto steps =
            static_cast<std::size_t>(std::max(1.0, std::ceil(s.length() / dense_step - 1e-9)));
        for (std::size_t k = 0; k < steps; ++k) {
            const double t = s.a + static_cast<double>(k) * dense_step;
            points_.push_back({t, 0.0, {false, k == 0 && has_left_gap}, si});
        }
        points_.push_back({s.b, gap, {!last_segment, false}, si});
    }
}

std::vector<double> Grid::times() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.t);
    return out;
}

std::size_t Grid::floor_index(double t) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), t + kTolMember,
                               [](double v, const GridPoint& p) { return v < p.t; });
    if (it == points_.begin())
        throw Error(ErrorCode::NotInTimeScale, fmt_time(t) + " precedes the window");
    return static_cast<std::size_t>(it - points_.begin()) - 1;
}

bool Grid::has_point(double t) const noexcept {
    auto it = std::lower_bound(points_.begin(), points_.end(), t - kTolMember,
                               [](const GridPoint& p, double v) { return p.t < v; });
    return it != points_.end() && it->t <= t + kTolMember;
}

std::size_t Grid::index_of(double t) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), t - kTolMember,
                               [](const GridPoint& p, double v) { return p.t < v; });
    if (it == points_.end() || it->t > t + kTolMember)
        throw Error(ErrorCode::NotInTimeScale, fmt_time(t) + " is not a grid point");
    return static_cast<std::size_t>(it - points_.begin());
}

Grid build_grid(const TimeScaleWindow& window, double dense_step) { return Grid(window, dense_step); }

}  // namespace chronoslyap
