// Command-line driver for the convergence studies.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cdg/study.hpp"

namespace {

struct Flags {
    std::string config_path;
    int degree = -1;
    int refinements = -1;
    std::string stab;
    double theta0 = -1.0;
    int face_points = -1;
    std::string out;
    int precision = -1;
};

void add_common_flags(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--degree", flags.degree, "polynomial degree p");
    cmd->add_option("--refinements", flags.refinements, "number of mesh levels in the table");
    cmd->add_option("--stab", flags.stab, "stabilization kind")
        ->check(CLI::IsMember({"upwind", "scaled", "mean"}));
    cmd->add_option("--theta0", flags.theta0, "jump-penalty scale for --stab scaled");
    cmd->add_option("--face-points", flags.face_points, "face quadrature points");
    cmd->add_option("--out", flags.out, "CSV output path");
    cmd->add_option("--precision", flags.precision, "significant digits in CSV floats");
}

int run(cdg::ProblemKind kind, const Flags& flags) {
    cdg::StudyConfig cfg;
    try {
        if (!flags.config_path.empty()) cfg = cdg::parse_config_file(flags.config_path);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    cfg.problem = kind;
    if (flags.degree >= 0) cfg.degree = flags.degree;
    if (flags.refinements >= 0) cfg.refinements = flags.refinements;
    if (!flags.stab.empty()) {
        if (flags.stab == "upwind") cfg.stabilization.kind = cdg::StabilizationKind::upwind;
        if (flags.stab == "scaled") cfg.stabilization.kind = cdg::StabilizationKind::scaled;
        if (flags.stab == "mean") cfg.stabilization.kind = cdg::StabilizationKind::mean_value;
    }
    if (flags.theta0 > 0.0) cfg.stabilization.theta0 = flags.theta0;
    if (flags.face_points > 0) cfg.face_points = flags.face_points;
    if (!flags.out.empty()) cfg.out_path = flags.out;
    if (flags.precision > 0) cfg.precision = flags.precision;

    cdg::StudyResult result;
    try {
        result = cdg::run_convergence_study(cfg);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }

    std::ofstream csv(cfg.out_path);
    if (!csv) {
        std::cerr << "error: cannot write " << cfg.out_path << "\n";
        return 2;
    }
    csv << result.csv;
    const std::string summary_path = cfg.out_path + ".summary.json";
    std::ofstream summary(summary_path);
    summary << result.summary_json << "\n";

    std::cout << result.csv;
    std::cout << "wrote " << cfg.out_path << " and " << summary_path << "\n";
    if (!result.solver_ok) {
        std::cerr << "error: solver failed; see " << summary_path << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DG convergence studies for advection-reaction and discrete-ordinates transport"};
    app.require_subcommand(1);

    Flags advection_flags, transport_flags;
    CLI::App* advection = app.add_subcommand("advection", "curved-mesh advection-reaction study");
    add_common_flags(advection, advection_flags);
    CLI::App* transport = app.add_subcommand("transport", "discrete-ordinates transport study");
    add_common_flags(transport, transport_flags);

    CLI11_PARSE(app, argc, argv);

    if (advection->parsed()) return run(cdg::ProblemKind::advection, advection_flags);
    return run(cdg::ProblemKind::transport, transport_flags);
}
