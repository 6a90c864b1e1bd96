#include "chronoslyap/io.hpp"

#include "chronoslyap/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chronoslyap {

namespace {

double number(const json& j, const char* what) {
    if (!j.is_number()) throw Error(ErrorCode::ParseError, std::string(what) + " must be a number");
    return j.get<double>();
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw Error(ErrorCode::ParseError, std::string("missing field \"") + key + "\"");
    return j.at(key);
}

CanonicalKind canonical_kind(const std::string& kind) {
    if (kind == "reals") return CanonicalKind::reals;
    if (kind == "integers") return CanonicalKind::integers;
    if (kind == "h_uniform") return CanonicalKind::h_uniform;
    if (kind == "quantum") return CanonicalKind::quantum;
    if (kind == "pulse") return CanonicalKind::pulse;
    throw Error(ErrorCode::ParseError, "unknown time-scale kind \"" + kind + "\"");
}

}  // namespace

TimeScaleSpec parse_time_scale(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "time-scale spec must be an object");
    const auto& kind = field(j, "kind");
    if (!kind.is_string()) throw Error(ErrorCode::ParseError, "\"kind\" must be a string");
    TimeScaleSpec spec;
    spec.kind = kind.get<std::string>();
    if (spec.kind == "explicit") {
        if (j.contains("segments")) {
            const auto& segs = j.at("segments");
            if (!segs.is_array()) throw Error(ErrorCode::ParseError, "\"segments\" must be an array");
            for (const auto& s : segs) {
                if (!s.is_array() || s.size() != 2) throw Error(ErrorCode::ParseError, "segment must be [a, b]");
                spec.segments.push_back({number(s[0], "segment start"), number(s[1], "segment end")});
            }
        } else {
            const auto& pts = field(j, "points");
            if (!pts.is_array()) throw Error(ErrorCode::ParseError, "\"points\" must be an array");
            std::vector<double> p;
            for (const auto& v : pts) p.push_back(number(v, "point"));
            std::sort(p.begin(), p.end());
            p.erase(std::unique(p.begin(), p.end()), p.end());
            for (double v : p) spec.segments.push_back({v, v});
        }
        if (spec.segments.empty()) throw Error(ErrorCode::EmptyWindow, "explicit time scale has no points");
        spec.t0 = spec.segments.front().a;
        spec.t_end = spec.segments.back().b;
        return spec;
    }
    const auto ck = canonical_kind(spec.kind);
    const auto& window = field(j, "window");
    if (!window.is_array() || window.size() != 2) throw Error(ErrorCode::ParseError, "\"window\" must be [t0, t_end]");
    spec.t0 = number(window[0], "window start");
    spec.t_end = number(window[1], "window end");
    auto opt = [&](const char* key, double& dst) {
        if (j.contains(key)) dst = number(j.at(key), key);
    };
    switch (ck) {
        case CanonicalKind::h_uniform: opt("h", spec.params.h); break;
        case CanonicalKind::quantum:
            opt("q", spec.params.q);
            opt("min_spacing", spec.params.min_spacing);
            break;
        case CanonicalKind::pulse:
            opt("a", spec.params.a);
            opt("b", spec.params.b);
            break;
        default: break;
    }
    return spec;
}

json to_json(const TimeScaleSpec& spec) {
    json j;
    j["kind"] = spec.kind;
    if (spec.kind == "explicit") {
        json segs = json::array();
        for (const auto& s : spec.segments) segs.push_back({s.a, s.b});
        j["segments"] = segs;
        return j;
    }
    switch (canonical_kind(spec.kind)) {
        case CanonicalKind::h_uniform: j["h"] = spec.params.h; break;
        case CanonicalKind::quantum:
            j["q"] = spec.params.q;
            j["min_spacing"] = spec.params.min_spacing;
            break;
        case CanonicalKind::pulse:
            j["a"] = spec.params.a;
            j["b"] = spec.params.b;
            break;
        default: break;
    }
    j["window"] = {spec.t0, spec.t_end};
    return j;
}

TimeScaleWindow build_window(const TimeScaleSpec& spec) {
    if (spec.kind == "explicit") return TimeScaleWindow(spec.segments);
    return make_canonical(canonical_kind(spec.kind), spec.params, spec.t0, spec.t_end);
}

Matrix parse_matrix(const json& rows) {
    if (rows.is_number()) return Matrix::Constant(1, 1, rows.get<double>());
    if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::ParseError, "matrix must be a nonempty array of rows");
    // rows may be bare numbers for a single column
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows[0].is_array() ? rows[0].size() : 1);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array()) {
            if (c != 1) throw Error(ErrorCode::ParseError, "matrix rows must be arrays");
            m(i, 0) = number(row, "matrix entry");
            continue;
        }
        if (static_cast<Eigen::Index>(row.size()) != c) throw Error(ErrorCode::ParseError, "matrix rows differ in length");
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = number(row[static_cast<std::size_t>(k)], "matrix entry");
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

MatrixSchedule parse_schedule(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "matrix schedule must be an object");
    if (j.contains("constant")) return MatrixSchedule::constant(parse_matrix(j.at("constant")));
    const bool tab = j.contains("tabulated");
    if (!tab && !j.contains("schedule"))
        throw Error(ErrorCode::ParseError, "matrix must be given as constant, schedule or tabulated");
    const auto& list = j.at(tab ? "tabulated" : "schedule");
    if (!list.is_array() || list.empty()) throw Error(ErrorCode::ParseError, "schedule must be a nonempty array");
    std::vector<std::pair<double, Matrix>> pieces;
    for (const auto& p : list) {
        if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::ParseError, "schedule entries must be [t, rows]");
        pieces.emplace_back(number(p[0], "breakpoint"), parse_matrix(p[1]));
    }
    return tab ? MatrixSchedule::tabulated(std::move(pieces)) : MatrixSchedule::schedule(std::move(pieces));
}

namespace {

MatrixSchedule parse_sized(const json& j, const char* key) {
    auto schedule = parse_schedule(field(j, key));
    if (j.contains("n")) {
        const auto& n = j.at("n");
        if (!n.is_number_integer()) throw Error(ErrorCode::ParseError, "\"n\" must be an integer");
        if (n.get<long>() != schedule.dim())
            throw Error(ErrorCode::DimensionMismatch, std::string("\"n\" disagrees with the size of ") + key);
    }
    return schedule;
}

}  // namespace

SystemMatrix parse_system(const json& j) { return SystemMatrix(parse_sized(j, "A")); }

CostMatrix parse_cost(const json& j) { return CostMatrix(parse_sized(j, "M")); }

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

std::vector<std::pair<double, double>> read_scalar_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    std::vector<std::pair<double, double>> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        bool ok = comma != std::string::npos;
        double t = 0, v = 0;
        if (ok) {
            try {
                std::size_t used = 0;
                t = std::stod(line.substr(0, comma), &used);
                v = std::stod(line.substr(comma + 1), &used);
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (!ok) {
            if (first) {
                first = false;
                continue;
            }
            throw Error(ErrorCode::ParseError, path.string() + ": malformed line \"" + line + "\"");
        }
        first = false;
        out.emplace_back(t, v);
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::InvalidParameter, "cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw Error(ErrorCode::InvalidParameter, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace chronoslyap
