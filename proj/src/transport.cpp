#include "cdg/transport.hpp"

#include <cmath>
#include <stdexcept>

namespace cdg {

AngularQuadrature build_angular_quadrature(int n_polar, int n_azimuthal) {
    if (n_polar < 2) throw std::invalid_argument("build_angular_quadrature: need n_polar >= 2");
    if (n_azimuthal < 4) throw std::invalid_argument("build_angular_quadrature: need n_azimuthal >= 4");
    const QuadratureRule1D polar = gauss_legendre(n_polar);
    AngularQuadrature quad;
    quad.directions.reserve(n_polar * n_azimuthal);
    quad.weights.reserve(n_polar * n_azimuthal);
    const double wphi = 2.0 * M_PI / n_azimuthal;
    for (int i = 0; i < n_polar; ++i) {
        const double mu = polar.points[i];
        const double sin_theta = std::sqrt(1.0 - mu * mu);
        for (int k = 0; k < n_azimuthal; ++k) {
            const double phi = wphi * (k + 0.5);
            quad.directions.push_back({sin_theta * std::cos(phi), sin_theta * std::sin(phi), mu});
            quad.weights.push_back(polar.weights[i] * wphi);
        }
    }
    return quad;
}

TransportProblem manufactured_transport(const AngularQuadrature& quad) {
    auto g = [](Vec2 p) {
        return 0.5 * (p.x * p.x + p.y * p.y + 1.0) + std::cos(1.5 * (p.x + p.y));
    };
    auto grad_g = [](Vec2 p) {
        const double s = 1.5 * std::sin(1.5 * (p.x + p.y));
        return Vec2{p.x - s, p.y - s};
    };
    TransportProblem prob;
    prob.sigma_t = [](Vec2 p) { return p.x * p.x + p.y * p.y + 1.0; };
    prob.sigma_s = [](Vec2) { return 0.8; };
    prob.scalar_flux_exact = [g](Vec2 p) { return 4.0 * M_PI / 3.0 * g(p); };
    const int n = quad.size();
    prob.source.reserve(n);
    prob.inflow.reserve(n);
    prob.psi_exact.reserve(n);
    for (int j = 0; j < n; ++j) {
        const auto d = quad.directions[j];
        const double amp = d[0] * d[0] + d[1];
        auto psi = [amp, g](Vec2 p) { return amp * g(p); };
        prob.psi_exact.push_back(psi);
        prob.inflow.push_back(psi);
        const auto sigma_t = prob.sigma_t;
        const auto phi = prob.scalar_flux_exact;
        prob.source.push_back([amp, d, g, grad_g, sigma_t, phi](Vec2 p) {
            const Vec2 gg = grad_g(p);
            const double advect = amp * (d[0] * gg.x + d[1] * gg.y);
            return advect + sigma_t(p) * amp * g(p) - 0.8 / (4.0 * M_PI) * phi(p);
        });
    }
    return prob;
}

DirectionalSolveResult directional_solve(const Mesh& mesh, const DgSpace& space,
                                         std::array<double, 3> direction,
                                         const ScalarField& sigma_t, const ScalarField& rhs,
                                         const ScalarField& inflow,
                                         const TransportOptions& options) {
    const Vec2 d{direction[0], direction[1]};
    VelocityField beta{[d](Vec2) { return d; }, [](Vec2) { return 0.0; }};
    ReactionField reaction{sigma_t, 0.0};
    AssemblyOptions asmopt;
    asmopt.volume_points = options.volume_points;
    asmopt.face_points = options.face_points;
    DgOperator op = assemble_operator(mesh, space, beta, reaction, options.stabilization, rhs,
                                      inflow, asmopt);
    BlockJacobi precond(op.matrix, op.block_size);
    GmresResult sol = gmres_restarted(
        op.matrix, [&](std::span<const double> x, std::span<double> y) { precond.apply(x, y); },
        op.rhs, options.solver_tol, options.restart, options.max_solver_iterations);
    if (!sol.converged)
        throw std::runtime_error("directional_solve: solver failed, residual " +
                                 std::to_string(sol.residual));
    return {std::move(sol.x), sol.iterations, sol.residual};
}

SourceIterationResult source_iteration(const Mesh& mesh, const DgSpace& space,
                                       const TransportProblem& problem,
                                       const AngularQuadrature& quad,
                                       const TransportOptions& options) {
    const int ndir = quad.size();
    const int n = space.ndof(mesh);
    const int p = space.degree();
    const int q = mesh.geometry_degree();
    const int nv = options.volume_points > 0 ? options.volume_points : p + q + 1;

    // fixed per-direction operators (advection + sigma_t) and source parts
    std::vector<CsrMatrix> matrices(ndir);
    std::vector<BlockJacobi> preconds(ndir);
    std::vector<std::vector<double>> fixed_rhs(ndir);
    for (int j = 0; j < ndir; ++j) {
        const Vec2 d{quad.directions[j][0], quad.directions[j][1]};
        VelocityField beta{[d](Vec2) { return d; }, [](Vec2) { return 0.0; }};
        ReactionField reaction{problem.sigma_t, 0.0};
        AssemblyOptions asmopt;
        asmopt.volume_points = options.volume_points;
        asmopt.face_points = options.face_points;
        DgOperator op = assemble_operator(mesh, space, beta, reaction, options.stabilization,
                                          problem.source[j], problem.inflow[j], asmopt);
        matrices[j] = std::move(op.matrix);
        preconds[j] = BlockJacobi(matrices[j], op.block_size);
        fixed_rhs[j] = std::move(op.rhs);
    }

    // block-diagonal scattering operator S[i,j] = int (sigma_s/4pi) phi_j phi_i
    CsrMatrix scatter;
    {
        const QuadratureRule2D rule = tensor_rule(gauss_legendre(nv));
        const BasisTable btab = space.basis.tabulate(rule.points, false);
        const BasisTable gtab = tabulate_geometry(mesh.geometry_degree(), rule.points);
        const int nd = space.ndof_elem();
        BlockMatrix acc(mesh.n_elements(), nd);
        for (int e = 0; e < mesh.n_elements(); ++e) {
            const Element& el = mesh.elements[e];
            std::span<double> blk = acc.block_at(e, e);
            for (int k = 0; k < rule.size(); ++k) {
                Vec2 pos{0, 0}, dxi{0, 0}, deta{0, 0};
                for (int a = 0; a < gtab.ndof; ++a) {
                    pos += gtab.val(k, a) * el.nodes[a];
                    dxi += gtab.dxi(k, a) * el.nodes[a];
                    deta += gtab.deta(k, a) * el.nodes[a];
                }
                const double det = Mat2{dxi.x, deta.x, dxi.y, deta.y}.det();
                const double w =
                    rule.weights[k] * det * problem.sigma_s(pos) / (4.0 * M_PI);
                for (int i = 0; i < nd; ++i)
                    for (int j = 0; j < nd; ++j)
                        blk[i * nd + j] += w * btab.val(k, i) * btab.val(k, j);
            }
        }
        scatter = acc.to_csr();
    }

    SourceIterationResult res;
    res.psi.assign(ndir, std::vector<double>(n, 0.0));
    res.phi.assign(n, 0.0);
    std::vector<double> phi_prev(n, 0.0), scat(n, 0.0), rhs_j(n);

    const int nf = options.face_points > 0 ? options.face_points : p + q + 1;
    for (int iter = 1; iter <= options.max_source_iterations; ++iter) {
        scat = scatter.multiply(res.phi);
        phi_prev = res.phi;
        std::fill(res.phi.begin(), res.phi.end(), 0.0);
        for (int j = 0; j < ndir; ++j) {
            for (int i = 0; i < n; ++i) rhs_j[i] = fixed_rhs[j][i] + scat[i];
            GmresResult sol = gmres_restarted(
                matrices[j],
                [&](std::span<const double> x, std::span<double> y) { preconds[j].apply(x, y); },
                rhs_j, options.solver_tol, options.restart, options.max_solver_iterations,
                res.psi[j]);
            if (!sol.converged)
                throw std::runtime_error("source_iteration: direction " + std::to_string(j) +
                                         " solver failed at pass " + std::to_string(iter));
            res.total_solver_iterations += sol.iterations;
            res.psi[j] = std::move(sol.x);
            for (int i = 0; i < n; ++i) res.phi[i] += quad.weights[j] * res.psi[j][i];
        }
        res.iterations = iter;
        std::vector<double> diff(n);
        for (int i = 0; i < n; ++i) diff[i] = res.phi[i] - phi_prev[i];
        const double dn = l2_norm(mesh, space, diff, nf);
        const double pn = l2_norm(mesh, space, res.phi, nf);
        res.increment_norms.push_back(dn);
        if (dn <= options.scatter_tol * pn) {
            res.converged = true;
            break;
        }
    }
    return res;
}

FaceCoefficient direction_averaged_coefficient(const AngularQuadrature& quad,
                                               const Stabilization& spec) {
    return [quad, spec](Vec2, Vec2 n) {
        double acc = 0.0;
        for (int j = 0; j < quad.size(); ++j) {
            const double bn = quad.directions[j][0] * n.x + quad.directions[j][1] * n.y;
            acc += quad.weights[j] * stabilization_b0(spec, bn);
        }
        return acc / (4.0 * M_PI);
    };
}

}  // namespace cdg
