#include "cli.hpp"

#include "chronoslyap/error.hpp"
#include "chronoslyap/io.hpp"
#include "chronoslyap/lyapunov_dynamic.hpp"
#include "chronoslyap/stability.hpp"
#include "chronoslyap/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

namespace chronoslyap::cli {

namespace fs = std::filesystem;

namespace {

struct JobSpec {
    std::string command;
    std::vector<std::string> ts;
    std::string system;
    std::string cost;
    std::string ic = "zero";
    std::string x0;
    std::string out = ".";
    double dense_step = 0.01;
    double tail_tol = 1e-8;
    double horizon_tol = 1e-10;
    double integrator_tol = 1e-12;
    double t0 = std::numeric_limits<double>::quiet_NaN();
    double lambda_test = std::numeric_limits<double>::quiet_NaN();
};

constexpr double kReductionTol = 1e-8;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) line += ',';
        line += format_double(values[k]);
    }
    return line + '\n';
}

std::string matrix_header(const char* name, Eigen::Index n) {
    std::string h;
    for (Eigen::Index i = 1; i <= n; ++i)
        for (Eigen::Index k = 1; k <= n; ++k) h += "," + std::string(name) + "_" + std::to_string(i) + "_" + std::to_string(k);
    return h;
}

void append_row_major(std::vector<double>& row, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

struct Inputs {
    TimeScaleSpec spec;
    std::optional<TimeScaleWindow> window;
    std::optional<Grid> grid;
    std::optional<SystemMatrix> A;
    std::optional<CostMatrix> M;
    double t0 = 0.0;
};

Inputs load(const JobSpec& job, const std::string& ts, bool need_cost) {
    Inputs in;
    in.spec = parse_time_scale(read_json_file(ts));
    in.window.emplace(build_window(in.spec));
    if (!(job.dense_step > 0.0)) throw Error(ErrorCode::InvalidParameter, "--dense-step must be positive");
    in.grid.emplace(*in.window, job.dense_step);
    in.A.emplace(parse_system(read_json_file(job.system)));
    if (need_cost) {
        in.M.emplace(parse_cost(read_json_file(job.cost)));
        if (in.M->dim() != in.A->dim())
            throw Error(ErrorCode::DimensionMismatch, "system and cost dimensions differ");
    }
    in.t0 = std::isnan(job.t0) ? in.window->t0() : job.t0;
    if (!in.grid->has_point(in.t0)) throw Error(ErrorCode::NotInTimeScale, "--t0 must be a grid point");
    return in;
}

Matrix initial_matrix(const std::string& ic, Eigen::Index n) {
    if (ic == "zero") return Matrix::Zero(n, n);
    if (ic.rfind("file:", 0) == 0) {
        const auto j = read_json_file(ic.substr(5));
        Matrix P0 = parse_matrix(j.is_object() ? j.at("P0") : j);
        if (P0.rows() != n || P0.cols() != n) throw Error(ErrorCode::DimensionMismatch, "P0 has the wrong size");
        return P0;
    }
    throw Error(ErrorCode::InvalidParameter, "--ic must be zero, stationary or file:<path>");
}

DynamicOptions dynamic_options(const JobSpec& job) {
    DynamicOptions o;
    o.integrator_tol = job.integrator_tol;
    o.tail_tol = job.tail_tol;
    return o;
}

void write_solution(const fs::path& dir, const GramianSolution& sol, const JobSpec& job) {
    const auto n = sol.P.empty() ? 0 : sol.P.front().rows();
    std::string csv = "t" + matrix_header("P", n) + ",residual_norm,min_eigenvalue\n";
    for (std::size_t k = 0; k < sol.size(); ++k) {
        std::vector<double> row{sol.times[k]};
        append_row_major(row, sol.P[k]);
        row.push_back(sol.residual[k]);
        row.push_back(sol.min_eigenvalue[k]);
        csv += csv_row(row);
    }
    write_file_atomic(dir / "P.csv", csv);

    json s;
    s["equation"] = std::string(to_string(sol.equation));
    s["n"] = n;
    s["points"] = sol.size();
    s["dense_step"] = job.dense_step;
    s["P0"] = matrix_to_json(sol.P0);
    s["horizon"] = number_or_null(sol.horizon);
    s["tail_bound"] = number_or_null(sol.tail_bound);
    s["certified_until"] = number_or_null(sol.certified_until);
    s["cross_check"] = number_or_null(sol.cross_check);
    s["max_residual"] = number_or_null(sol.max_residual());
    s["min_eigenvalue"] = number_or_null(sol.min_min_eigenvalue());
    write_json(dir / "summary.json", s);
}

GramianSolution dynamic_solution(const JobSpec& job, const Inputs& in) {
    if (job.ic == "stationary") return solve_tsdle_stationary(*in.A, *in.M, *in.grid, in.t0, dynamic_options(job));
    return solve_tsdle(*in.A, *in.M, initial_matrix(job.ic, in.A->dim()), *in.grid, in.t0, dynamic_options(job));
}

Vector parse_x0(const std::string& text, Eigen::Index n) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "--x0 must be a comma-separated list of numbers");
        }
    }
    if (static_cast<Eigen::Index>(v.size()) != n)
        throw Error(ErrorCode::DimensionMismatch, "--x0 must have one entry per state");
    return Eigen::Map<Vector>(v.data(), n);
}

int cmd_solve_tsale(const JobSpec& job, const fs::path& dir) {
    const auto in = load(job, job.ts.front(), true);
    TsaleOptions o;
    o.horizon_tol = job.horizon_tol;
    const auto sol = solve_tsale_on_grid(*in.A, *in.M, *in.grid, o);
    write_solution(dir, sol, job);
    std::cout << "TSALE solved at " << sol.size() << " points, max residual " << sol.max_residual() << "\n";
    return kExitOk;
}

int cmd_solve_tsdle(const JobSpec& job, const fs::path& dir) {
    const auto in = load(job, job.ts.front(), true);
    const auto sol = dynamic_solution(job, in);
    write_solution(dir, sol, job);
    std::cout << to_string(sol.equation) << " solved at " << sol.size() << " points, max residual "
              << sol.max_residual() << "\n";
    return kExitOk;
}

int cmd_stationary(const JobSpec& job, const fs::path& dir) {
    const auto in = load(job, job.ts.front(), true);
    const auto ic = stationary_initial_condition(*in.A, *in.M, *in.grid, in.t0, dynamic_options(job));
    std::vector<double> row;
    append_row_major(row, ic.P0);
    write_file_atomic(dir / "P0.csv", matrix_header("P", ic.P0.rows()).substr(1) + "\n" + csv_row(row));
    json s;
    s["P0"] = matrix_to_json(ic.P0);
    s["t0"] = in.t0;
    s["horizon"] = ic.horizon;
    s["tail_bound"] = ic.tail_bound;
    s["decay_rate"] = ic.rate;
    s["tail_tol"] = job.tail_tol;
    write_json(dir / "summary.json", s);
    std::cout << "stationary initial condition, tail bound " << ic.tail_bound << "\n";
    return kExitOk;
}

int cmd_stability(const JobSpec& job, const fs::path& dir) {
    const auto in = load(job, job.ts.front(), false);
    if (!in.A->is_constant()) throw Error(ErrorCode::InvalidParameter, "stability analysis needs a constant A");
    const auto rep = stability_report(in.A->at(in.t0), *in.window, in.t0);

    std::string csv = "re,im,in_hmin,hmin_margin,gamma_hat,converged,s_r_hits,min_abs_factor,max_abs_factor\n";
    json eig = json::array();
    for (const auto& e : rep.eigen) {
        csv += csv_row({e.lambda.real(), e.lambda.imag(), e.in_hmin ? 1.0 : 0.0, e.hmin_margin, e.gamma_hat,
                        e.gamma_converged ? 1.0 : 0.0, static_cast<double>(e.s_r_hits.size()), e.min_abs_factor,
                        e.max_abs_factor});
        json hits = json::array();
        for (const auto& h : e.s_r_hits) hits.push_back(h.t);
        eig.push_back({{"re", e.lambda.real()},
                       {"im", e.lambda.imag()},
                       {"in_hmin", e.in_hmin},
                       {"hmin_margin", e.hmin_margin},
                       {"gamma_hat", number_or_null(e.gamma_hat)},
                       {"gamma_converged", e.gamma_converged},
                       {"gamma_spread", e.gamma_diagnostic.spread},
                       {"gamma_window_averages", e.gamma_diagnostic.averages},
                       {"s_r_hits", hits},
                       {"min_abs_factor", e.min_abs_factor},
                       {"max_abs_factor", e.max_abs_factor}});
    }
    write_file_atomic(dir / "eigenvalues.csv", csv);

    std::string boundary = "mu,re,im\n";
    for (double mu : {0.0, rep.mu_max}) {
        for (const auto& z : hilger_boundary(mu, 256)) boundary += csv_row({mu, z.real(), z.imag()});
        if (rep.mu_max == 0.0) break;
    }
    write_file_atomic(dir / "hilger_boundary.csv", boundary);

    json r;
    r["t0"] = rep.t0;
    r["t_end"] = in.window->t_end();
    r["mu_max"] = rep.mu_max;
    r["hmin_verdict"] = std::string(to_string(rep.hmin));
    r["hmin_note"] = "all-in is sufficient, not necessary, for exponential stability";
    r["verdict"] = std::string(to_string(rep.verdict));
    r["stable_indicated"] = rep.stable_indicated();
    r["s_r_note"] = "degenerate-regressivity hits on a finite window are evidence, not proof";
    r["eigenvalues"] = eig;
    write_json(dir / "report.json", r);
    std::cout << "stability: " << to_string(rep.verdict) << "\n";
    return kExitOk;
}

int cmd_simulate(const JobSpec& job, const fs::path& dir) {
    const auto in = load(job, job.ts.front(), false);
    const auto x0 = parse_x0(job.x0, in.A->dim());
    const auto traj = simulate(*in.A, *in.grid, x0, in.t0, job.integrator_tol);
    if (traj.non_regressive) std::cerr << "warning: A is not regressive on the window; forward steps may collapse the state\n";
    std::string csv = "t";
    for (Eigen::Index i = 1; i <= x0.size(); ++i) csv += ",x_" + std::to_string(i);
    csv += '\n';
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        std::vector<double> row{traj.times[k]};
        for (Eigen::Index i = 0; i < x0.size(); ++i) row.push_back(traj.states[k](i));
        csv += csv_row(row);
    }
    write_file_atomic(dir / "trajectory.csv", csv);
    json s;
    s["points"] = traj.times.size();
    s["non_regressive"] = traj.non_regressive;
    if (!std::isnan(job.lambda_test)) {
        const auto d = empirical_decay(*in.grid, traj, job.lambda_test);
        s["decay"] = {{"lambda_test", job.lambda_test}, {"holds", d.holds}, {"gamma_fit", d.gamma_fit},
                      {"worst_ratio", d.worst_ratio}};
    }
    write_json(dir / "summary.json", s);
    std::cout << "simulated " << traj.times.size() << " points\n";
    return kExitOk;
}

int cmd_verify(const JobSpec& job, const fs::path& dir) {
    const auto in = load(job, job.ts.front(), true);
    const auto x0 = parse_x0(job.x0, in.A->dim());
    const auto sol = dynamic_solution(job, in);
    const auto traj = simulate(*in.A, *in.grid, x0, in.t0, job.integrator_tol);
    const auto tr = lyapunov_trace(*in.grid, *in.A, sol, traj);
    std::string csv = "t";
    for (Eigen::Index i = 1; i <= x0.size(); ++i) csv += ",x_" + std::to_string(i);
    csv += ",V,V_delta,V_delta_quadratic\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        std::vector<double> row{tr.times[k]};
        for (Eigen::Index i = 0; i < x0.size(); ++i) row.push_back(traj.states[k](i));
        row.push_back(tr.V[k]);
        row.push_back(tr.V_delta[k]);
        row.push_back(tr.V_delta_quadratic[k]);
        csv += csv_row(row);
    }
    write_file_atomic(dir / "trajectory.csv", csv);
    json s;
    s["equation"] = std::string(to_string(sol.equation));
    s["points"] = tr.times.size();
    s["V_positive"] = tr.V_positive;
    s["V_delta_nonpositive"] = tr.V_delta_nonpositive;
    s["V_delta_negative"] = tr.V_delta_negative;
    s["lyapunov_stable"] = tr.V_positive && tr.V_delta_nonpositive;
    s["asymptotically_stable"] = tr.V_positive && tr.V_delta_negative;
    s["max_disagreement"] = tr.max_disagreement;
    s["P_positive_definite"] = sol.min_min_eigenvalue() > 0.0;
    if (!std::isnan(job.lambda_test)) {
        const auto d = empirical_decay(*in.grid, traj, job.lambda_test);
        s["decay"] = {{"lambda_test", job.lambda_test}, {"holds", d.holds}, {"gamma_fit", d.gamma_fit},
                      {"worst_ratio", d.worst_ratio}};
    }
    write_json(dir / "summary.json", s);
    std::cout << "V > 0: " << tr.V_positive << ", V^Δ < 0: " << tr.V_delta_negative << "\n";
    return kExitOk;
}

int cmd_reduce_check(const JobSpec& job, const fs::path& dir) {
    json checks = json::array();
    double worst = 0.0;
    for (const auto& ts : job.ts) {
        const auto in = load(job, ts, true);
        if (!in.A->is_constant() || !in.M->is_constant())
            throw Error(ErrorCode::InvalidParameter, "reduce-check needs constant A and M");
        if (in.spec.kind != "reals" && in.spec.kind != "integers")
            throw Error(ErrorCode::InvalidParameter, "reduce-check accepts reals and integers windows only");
        const Matrix P0 = initial_matrix(job.ic, in.A->dim());
        const auto opts = dynamic_options(job);
        double gap = 0.0;
        std::size_t points = 0;
        if (in.spec.kind == "reals") {
            const auto sol = solve_cdle(*in.A, *in.M, P0, in.t0, in.window->t_end(), job.dense_step, opts);
            const Matrix& A = in.A->at(in.t0);
            const Matrix& M = in.M->at(in.t0);
            for (std::size_t k = 0; k < sol.size(); ++k) {
                const Matrix ref = cdle_closed_form(A, M, P0, in.t0, sol.times[k]);
                gap = std::max(gap, (sol.P[k] - ref).norm() / std::max(1.0, ref.norm()));
            }
            points = sol.size();
        } else {
            const auto t0 = std::lround(in.t0), t_end = std::lround(in.window->t_end());
            const auto sol = solve_ddle(*in.A, *in.M, P0, t0, t_end, opts);
            const auto ref = ddle_recursion(*in.A, *in.M, P0, t0, t_end);
            for (std::size_t k = 0; k < ref.size(); ++k)
                gap = std::max(gap, (sol.P[k] - ref[k]).norm() / std::max(1.0, ref[k].norm()));
            points = sol.size();
        }
        worst = std::max(worst, gap);
        checks.push_back({{"ts", ts}, {"kind", in.spec.kind}, {"points", points}, {"discrepancy", gap}});
    }
    json r;
    r["checks"] = checks;
    r["max_discrepancy"] = worst;
    r["tolerance"] = kReductionTol;
    r["pass"] = worst <= kReductionTol;
    write_json(dir / "reduce_check.json", r);
    std::cout << "reduce-check max discrepancy " << worst << "\n";
    if (worst > kReductionTol)
        throw Error(ErrorCode::ReductionMismatch, "unified and specialized solutions disagree by " + format_double(worst));
    return kExitOk;
}

void write_error(const fs::path& dir, std::string_view name, const std::string& message, int code) {
    try {
        fs::create_directories(dir);
        write_json(dir / "error.json", {{"error", std::string(name)}, {"message", message}, {"exit_code", code}});
    } catch (const std::exception&) {
    }
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Lyapunov equations and stability analysis on time scales", "chronoslyap"};
    app.require_subcommand(1);
    JobSpec job;

    auto common = [&](CLI::App* sub, bool cost, bool ic) {
        sub->add_option("--ts", job.ts, "time-scale spec (JSON)")->required()->expected(1);
        sub->add_option("--system", job.system, "system spec (JSON)")->required();
        if (cost) sub->add_option("--cost", job.cost, "cost spec (JSON)")->required();
        if (ic) sub->add_option("--ic", job.ic, "initial condition: zero | stationary | file:<path>");
        sub->add_option("--dense-step", job.dense_step, "grid spacing inside continuous segments");
        sub->add_option("--integrator-tol", job.integrator_tol, "RK4 error tolerance per unit time");
        sub->add_option("--t0", job.t0, "initial time (default: window start)");
        sub->add_option("--out", job.out, "output directory");
    };
    auto* tsale = app.add_subcommand("solve-tsale", "pointwise algebraic equation over the grid");
    common(tsale, true, false);
    tsale->add_option("--horizon-tol", job.horizon_tol, "relative tail tolerance of the series");
    auto* tsdle = app.add_subcommand("solve-tsdle", "dynamic equation from an initial condition");
    common(tsdle, true, true);
    tsdle->add_option("--tail-tol", job.tail_tol, "relative tail tolerance of improper integrals");
    auto* stat = app.add_subcommand("stationary", "stationary initial condition");
    common(stat, true, false);
    stat->add_option("--tail-tol", job.tail_tol, "relative tail tolerance of improper integrals");
    auto* stab = app.add_subcommand("stability", "spectral stability report for constant A");
    common(stab, false, false);
    auto* sim = app.add_subcommand("simulate", "trajectory of the linear system");
    common(sim, false, false);
    sim->add_option("--x0", job.x0, "initial state, comma separated")->required();
    sim->add_option("--lambda-test", job.lambda_test, "decay rate to test empirically");
    auto* ver = app.add_subcommand("verify", "Lyapunov-function check along a trajectory");
    common(ver, true, true);
    ver->add_option("--x0", job.x0, "initial state, comma separated")->required();
    ver->add_option("--tail-tol", job.tail_tol, "relative tail tolerance of improper integrals");
    ver->add_option("--lambda-test", job.lambda_test, "decay rate to test empirically");
    auto* red = app.add_subcommand("reduce-check", "unified solver against continuous/discrete closed forms");
    red->add_option("--ts", job.ts, "reals or integers time-scale spec (repeatable)")->required();
    red->add_option("--system", job.system, "system spec (JSON)")->required();
    red->add_option("--cost", job.cost, "cost spec (JSON)")->required();
    red->add_option("--ic", job.ic, "initial condition: zero | file:<path>");
    red->add_option("--dense-step", job.dense_step, "grid spacing inside continuous segments");
    red->add_option("--integrator-tol", job.integrator_tol, "RK4 error tolerance per unit time");
    red->add_option("--out", job.out, "output directory");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        write_error(job.out, error_name(ErrorCode::ParseError), e.what(), kExitValidation);
        return kExitValidation;
    }
    if (ver->parsed() && job.ic == "zero") job.ic = "stationary";
    job.command = app.get_subcommands().front()->get_name();

    const fs::path dir(job.out);
    try {
        fs::create_directories(dir);
        if (job.command == "solve-tsale") return cmd_solve_tsale(job, dir);
        if (job.command == "solve-tsdle") return cmd_solve_tsdle(job, dir);
        if (job.command == "stationary") return cmd_stationary(job, dir);
        if (job.command == "stability") return cmd_stability(job, dir);
        if (job.command == "simulate") return cmd_simulate(job, dir);
        if (job.command == "verify") return cmd_verify(job, dir);
        return cmd_reduce_check(job, dir);
    } catch (const Error& e) {
        const int code = is_validation_error(e.code()) ? kExitValidation : kExitNumerical;
        std::cerr << "error: " << e.what() << "\n";
        write_error(dir, e.name(), e.what(), code);
        return code;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error(dir, error_name(ErrorCode::ParseError), e.what(), kExitValidation);
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error(dir, "InternalError", e.what(), kExitNumerical);
        return kExitNumerical;
    }
}

}  // namespace chronoslyap::cli
