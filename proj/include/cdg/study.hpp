#pragma once

#include <string>

#include "cdg/diagnostics.hpp"
#include "cdg/transport.hpp"

namespace cdg {

// Benchmark advection-reaction problem on [-1,1]^2: rotating velocity
// (-y, x), constant reaction 0.1, and a smooth oscillatory solution.
// The domain is curved by a rotation whose angle vanishes on the
// boundary, so the square is meshed exactly while interior faces curve.
namespace benchmark {

double exact_solution(Vec2 p);
Vec2 exact_gradient(Vec2 p);
double source(Vec2 p);
VelocityField rotating_velocity();
ReactionField reaction();
Vec2 curving_map(Vec2 p);

// Transport benchmark coefficients live in manufactured_transport().

}  // namespace benchmark

enum class ProblemKind { advection, transport };

struct StudyConfig {
    ProblemKind problem = ProblemKind::advection;
    int degree = 3;
    int geometry_degree = 0;  // 0 = automatic (2; see README)
    int nx = 4, ny = 4;
    int refinements = 4;  // number of table rows (meshes)
    Stabilization stabilization;
    int face_points = 0;    // 0 = degree + geometry degree + 1
    int volume_points = 0;  // 0 = same default
    double solver_tol = 1e-11;
    int restart = 60;
    int max_solver_iterations = 5000;
    // transport only
    int n_polar = 4;
    int n_azimuthal = 12;
    double scatter_tol = 1e-10;
    int max_source_iterations = 200;

    std::string out_path = "study.csv";
    int precision = 6;  // significant digits in CSV output

    int resolved_geometry_degree() const { return geometry_degree > 0 ? geometry_degree : 2; }
    int resolved_face_points() const {
        return face_points > 0 ? face_points : degree + resolved_geometry_degree() + 1;
    }
    int resolved_volume_points() const {
        return volume_points > 0 ? volume_points : degree + resolved_geometry_degree() + 1;
    }
};

// Strict JSON config parsing: unknown keys and type mismatches are
// errors naming the offending field.
StudyConfig parse_config(const std::string& json_text);
StudyConfig parse_config_file(const std::string& path);

struct StudyResult {
    ConvergenceTable table;
    std::string csv;
    std::string summary_json;
    bool solver_ok = true;
};

StudyResult run_convergence_study(const StudyConfig& config);

}  // namespace cdg
