#pragma once

#include "chronoslyap/matrix_schedule.hpp"
#include "chronoslyap/timescale.hpp"
#include "chronoslyap/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace chronoslyap {

using json = nlohmann::json;

/// Parsed time-scale file. Canonical kinds carry params and a window;
/// "explicit" carries segments (or isolated points).
struct TimeScaleSpec {
    std::string kind;
    CanonicalParams params;
    double t0 = 0.0;
    double t_end = 0.0;
    std::vector<Segment> segments;

    bool operator==(const TimeScaleSpec&) const = default;
};

TimeScaleSpec parse_time_scale(const json& j);
json to_json(const TimeScaleSpec& spec);
TimeScaleWindow build_window(const TimeScaleSpec& spec);

/// Row-major nested array → matrix; ParseError unless rectangular and numeric.
Matrix parse_matrix(const json& rows);
json matrix_to_json(const Matrix& m);

/// {"constant": rows} | {"schedule": [[t, rows], …]} | {"tabulated": [[t, rows], …]}
MatrixSchedule parse_schedule(const json& j);

/// System file {"n": …, "A": schedule}; cost file {"n": …, "M": schedule}.
SystemMatrix parse_system(const json& j);
CostMatrix parse_cost(const json& j);

json read_json_file(const std::filesystem::path& path);

/// Two-column CSV (t, value) with an optional header line.
std::vector<std::pair<double, double>> read_scalar_csv(const std::filesystem::path& path);

/// Round-trip decimal form: printf "%.17g".
std::string format_double(double v);

/// Whole-file write through a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace chronoslyap
