#include "cdg/study.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace cdg {

namespace benchmark {

double exact_solution(Vec2 p) {
    return std::exp(0.1 * std::sin(5.1 * p.x - 6.2 * p.y) + 0.3 * std::cos(4.3 * p.x + 3.4 * p.y));
}

Vec2 exact_gradient(Vec2 p) {
    const double u = exact_solution(p);
    const double a = 5.1 * p.x - 6.2 * p.y;
    const double b = 4.3 * p.x + 3.4 * p.y;
    return {u * (0.51 * std::cos(a) - 1.29 * std::sin(b)),
            u * (-0.62 * std::cos(a) - 1.02 * std::sin(b))};
}

double source(Vec2 p) {
    const Vec2 g = exact_gradient(p);
    return -p.y * g.x + p.x * g.y + 0.1 * exact_solution(p);
}

VelocityField rotating_velocity() {
    return {[](Vec2 p) { return Vec2{-p.y, p.x}; }, [](Vec2) { return 0.0; }};
}

ReactionField reaction() {
    return {[](Vec2) { return 0.1; }, 0.1};
}

Vec2 curving_map(Vec2 p) {
    const double t = 1.5 * (p.x * p.x - 1.0) * (p.y * p.y - 1.0);
    const double c = std::cos(t), s = std::sin(t);
    return {p.x * c - p.y * s, p.y * c + p.x * s};
}

}  // namespace benchmark

namespace {

using nlohmann::json;

void read_int(const json& j, const char* key, int& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer())
        throw std::runtime_error(std::string("config field '") + key + "' must be an integer");
    dst = j[key].get<int>();
}

void read_double(const json& j, const char* key, double& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number())
        throw std::runtime_error(std::string("config field '") + key + "' must be a number");
    dst = j[key].get<double>();
}

void read_string(const json& j, const char* key, std::string& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_string())
        throw std::runtime_error(std::string("config field '") + key + "' must be a string");
    dst = j[key].get<std::string>();
}

}  // namespace

StudyConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::runtime_error(std::string("config parse error: ") + err.what());
    }
    if (!j.is_object()) throw std::runtime_error("config must be a JSON object");

    static const char* known[] = {
        "problem", "degree", "geometry_degree", "nx", "ny", "refinements", "stab", "theta0",
        "face_points", "volume_points", "solver_tol", "restart", "max_solver_iterations",
        "n_polar", "n_azimuthal", "scatter_tol", "max_source_iterations", "out", "precision"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw std::runtime_error("unknown config key: '" + it.key() + "'");
    }

    StudyConfig cfg;
    std::string problem = "advection", stab = "upwind";
    read_string(j, "problem", problem);
    if (problem == "advection")
        cfg.problem = ProblemKind::advection;
    else if (problem == "transport")
        cfg.problem = ProblemKind::transport;
    else
        throw std::runtime_error("config field 'problem' must be 'advection' or 'transport'");
    read_int(j, "degree", cfg.degree);
    read_int(j, "geometry_degree", cfg.geometry_degree);
    read_int(j, "nx", cfg.nx);
    read_int(j, "ny", cfg.ny);
    read_int(j, "refinements", cfg.refinements);
    read_string(j, "stab", stab);
    if (stab == "upwind")
        cfg.stabilization.kind = StabilizationKind::upwind;
    else if (stab == "scaled")
        cfg.stabilization.kind = StabilizationKind::scaled;
    else if (stab == "mean")
        cfg.stabilization.kind = StabilizationKind::mean_value;
    else
        throw std::runtime_error("config field 'stab' must be 'upwind', 'scaled' or 'mean'");
    read_double(j, "theta0", cfg.stabilization.theta0);
    read_int(j, "face_points", cfg.face_points);
    read_int(j, "volume_points", cfg.volume_points);
    read_double(j, "solver_tol", cfg.solver_tol);
    read_int(j, "restart", cfg.restart);
    read_int(j, "max_solver_iterations", cfg.max_solver_iterations);
    read_int(j, "n_polar", cfg.n_polar);
    read_int(j, "n_azimuthal", cfg.n_azimuthal);
    read_double(j, "scatter_tol", cfg.scatter_tol);
    read_int(j, "max_source_iterations", cfg.max_source_iterations);
    read_string(j, "out", cfg.out_path);
    read_int(j, "precision", cfg.precision);

    if (cfg.refinements < 1) throw std::runtime_error("config field 'refinements' must be >= 1");
    if (cfg.degree < 0) throw std::runtime_error("config field 'degree' must be >= 0");
    if (cfg.stabilization.kind != StabilizationKind::mean_value && cfg.stabilization.theta0 <= 0.0)
        throw std::runtime_error("config field 'theta0' must be positive");
    return cfg;
}

StudyConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

namespace {

json mesh_level_summary(const Mesh& mesh, int reentrant) {
    json j;
    j["elements"] = mesh.n_elements();
    j["faces"] = mesh.n_faces();
    j["h_max"] = mesh.h_max();
    j["reentrant"] = reentrant;
    return j;
}

StudyResult run_advection(const StudyConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    const VelocityField beta = benchmark::rotating_velocity();
    const ReactionField react = benchmark::reaction();
    const DgSpace space(cfg.degree);
    const int q = cfg.resolved_geometry_degree();
    const int nf = cfg.resolved_face_points();
    const int nv = cfg.resolved_volume_points();

    Mesh mesh = build_cartesian_mesh(cfg.nx, cfg.ny, {-1.0, -1.0, 1.0, 1.0}, q);
    apply_curving_map(mesh, benchmark::curving_map, tensor_rule(gauss_legendre(nv)));

    StudyResult result;
    json summary;
    summary["problem"] = "advection";
    summary["degree"] = cfg.degree;
    summary["geometry_degree"] = q;
    summary["face_points"] = nf;
    summary["volume_points"] = nv;
    summary["stab_theta0"] = cfg.stabilization.theta0;
    summary["levels"] = json::array();

    for (int level = 0; level < cfg.refinements; ++level) {
        if (level > 0) mesh = refine_uniform(mesh);
        if (min_reaction_coercivity(mesh, beta, react, nv) < react.c0 - 1e-12)
            throw std::runtime_error("advection study: reaction coercivity bound violated");

        const auto classes = detect_reentrant_faces(mesh, beta, 16);
        const int reentrant = count_reentrant(classes);
        DgOperator op;
        AssemblyOptions asmopt;
        asmopt.volume_points = nv;
        asmopt.face_points = nf;
        op = assemble_operator(mesh, space, beta, react, cfg.stabilization,
                               benchmark::source, benchmark::exact_solution, asmopt);
        BlockJacobi precond(op.matrix, op.block_size);
        GmresResult sol = gmres_restarted(
            op.matrix,
            [&](std::span<const double> x, std::span<double> y) { precond.apply(x, y); }, op.rhs,
            cfg.solver_tol, cfg.restart, cfg.max_solver_iterations);
        if (!sol.converged) {
            result.solver_ok = false;
            summary["failed_level"] = level;
            summary["residual"] = sol.residual;
            break;
        }

        const FaceQuadratureError qerr =
            reentrant_quadrature_error(mesh, space, beta, cfg.stabilization, nf);
        const double l2 = l2_error(mesh, space, sol.x, benchmark::exact_solution,
                                   error_rule_points(space, mesh));
        const DgNormParts dg = dg_norm_error(mesh, space, sol.x, benchmark::exact_solution, nf,
                                             upwind_face_coefficient(beta, cfg.stabilization));

        ConvergenceRecord rec;
        rec.level = level;
        rec.h = mesh.h_max();
        rec.dofs = space.ndof(mesh);
        rec.reentrant = reentrant;
        rec.q_metric = qerr.total;
        rec.l2 = l2;
        rec.dg = dg.total;
        result.table.rows.push_back(rec);

        json lvl = mesh_level_summary(mesh, reentrant);
        lvl["solver_iterations"] = sol.iterations;
        lvl["solver_residual"] = sol.residual;
        lvl["q_per_reentrant_face"] = reentrant > 0 ? qerr.total / reentrant : 0.0;
        summary["levels"].push_back(lvl);
    }

    result.csv = result.table.to_csv(cfg.precision, /*integer_reentrant=*/true);
    summary["wall_seconds"] =
        std::chrono::duration<double>(clock::now() - t0).count();
    result.summary_json = summary.dump(2);
    return result;
}

StudyResult run_transport(const StudyConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    const AngularQuadrature quad = build_angular_quadrature(cfg.n_polar, cfg.n_azimuthal);
    const TransportProblem problem = manufactured_transport(quad);
    const DgSpace space(cfg.degree);
    const int q = cfg.resolved_geometry_degree();
    const int nf = cfg.resolved_face_points();
    const int nv = cfg.resolved_volume_points();

    TransportOptions opts;
    opts.stabilization = cfg.stabilization;
    opts.volume_points = nv;
    opts.face_points = nf;
    opts.solver_tol = cfg.solver_tol;
    opts.restart = cfg.restart;
    opts.max_solver_iterations = cfg.max_solver_iterations;
    opts.scatter_tol = cfg.scatter_tol;
    opts.max_source_iterations = cfg.max_source_iterations;

    Mesh mesh = build_cartesian_mesh(cfg.nx, cfg.ny, {-1.0, -1.0, 1.0, 1.0}, q);
    apply_curving_map(mesh, benchmark::curving_map, tensor_rule(gauss_legendre(nv)));

    StudyResult result;
    json summary;
    summary["problem"] = "transport";
    summary["degree"] = cfg.degree;
    summary["geometry_degree"] = q;
    summary["directions"] = quad.size();
    summary["levels"] = json::array();

    const FaceCoefficient avg_b0 = direction_averaged_coefficient(quad, cfg.stabilization);

    for (int level = 0; level < cfg.refinements; ++level) {
        if (level > 0) mesh = refine_uniform(mesh);

        // per-direction reentrant counts and quadrature-error averages
        json dir_counts = json::array();
        double reentrant_mean = 0.0, q_mean = 0.0;
        for (int j = 0; j < quad.size(); ++j) {
            const Vec2 d{quad.directions[j][0], quad.directions[j][1]};
            VelocityField beta{[d](Vec2) { return d; }, [](Vec2) { return 0.0; }};
            const auto classes = detect_reentrant_faces(mesh, beta, 16);
            const int count = count_reentrant(classes);
            dir_counts.push_back(count);
            reentrant_mean += count;
            q_mean += reentrant_quadrature_error(mesh, space, beta, cfg.stabilization, nf).total;
        }
        reentrant_mean /= quad.size();
        q_mean /= quad.size();

        SourceIterationResult sol;
        try {
            sol = source_iteration(mesh, space, problem, quad, opts);
        } catch (const std::exception& err) {
            result.solver_ok = false;
            summary["failed_level"] = level;
            summary["error"] = err.what();
            break;
        }
        if (!sol.converged) {
            result.solver_ok = false;
            summary["failed_level"] = level;
            break;
        }

        const double l2 = l2_error(mesh, space, sol.phi, problem.scalar_flux_exact,
                                   error_rule_points(space, mesh));
        const DgNormParts dg =
            dg_norm_error(mesh, space, sol.phi, problem.scalar_flux_exact, nf, avg_b0);

        ConvergenceRecord rec;
        rec.level = level;
        rec.h = mesh.h_max();
        rec.dofs = space.ndof(mesh);
        rec.reentrant = reentrant_mean;
        rec.q_metric = q_mean;
        rec.l2 = l2;
        rec.dg = dg.total;
        result.table.rows.push_back(rec);

        json lvl = mesh_level_summary(mesh, -1);
        lvl.erase("reentrant");
        lvl["reentrant_per_direction"] = dir_counts;
        lvl["reentrant_mean"] = reentrant_mean;
        lvl["source_iterations"] = sol.iterations;
        lvl["solver_iterations_total"] = sol.total_solver_iterations;
        summary["levels"].push_back(lvl);
    }

    result.csv = result.table.to_csv(cfg.precision, /*integer_reentrant=*/false);
    summary["wall_seconds"] =
        std::chrono::duration<double>(clock::now() - t0).count();
    result.summary_json = summary.dump(2);
    return result;
}

}  // namespace

StudyResult run_convergence_study(const StudyConfig& config) {
    return config.problem == ProblemKind::advection ? run_advection(config)
                                                    : run_transport(config);
}

}  // namespace cdg
