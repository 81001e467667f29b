#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cdg/study.hpp"
#include "cdg/transport.hpp"

using namespace cdg;

namespace {

constexpr double kFourPi = 4.0 * M_PI;

Mesh curved_mesh(int n, int q = 2) {
    Mesh mesh = build_cartesian_mesh(n, n, {-1, -1, 1, 1}, q);
    apply_curving_map(mesh, benchmark::curving_map, tensor_rule(gauss_legendre(6)));
    return mesh;
}

}  // namespace

TEST_CASE("angular quadrature moments") {
    const AngularQuadrature quad = build_angular_quadrature(4, 12);
    CHECK(quad.size() == 48);
    double w = 0.0;
    for (double v : quad.weights) {
        CHECK(v > 0.0);
        w += v;
    }
    CHECK(w == doctest::Approx(kFourPi).epsilon(1e-12));

    for (int a = 0; a < 3; ++a) {
        double m1 = 0.0;
        for (int j = 0; j < quad.size(); ++j) m1 += quad.weights[j] * quad.directions[j][a];
        CHECK(std::abs(m1) < 1e-12);
    }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double m2 = 0.0;
            for (int j = 0; j < quad.size(); ++j)
                m2 += quad.weights[j] * quad.directions[j][a] * quad.directions[j][b];
            CHECK(m2 == doctest::Approx(a == b ? kFourPi / 3.0 : 0.0).epsilon(1e-12));
        }

    // the moment behind the manufactured scalar flux
    double m = 0.0;
    for (int j = 0; j < quad.size(); ++j)
        m += quad.weights[j] *
             (quad.directions[j][0] * quad.directions[j][0] + quad.directions[j][1]);
    CHECK(m == doctest::Approx(kFourPi / 3.0).epsilon(1e-12));

    for (const auto& d : quad.directions)
        CHECK(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS(build_angular_quadrature(1, 12));
    CHECK_THROWS(build_angular_quadrature(4, 3));
}

TEST_CASE("manufactured transport problem consistency") {
    const AngularQuadrature quad = build_angular_quadrature(4, 12);
    const TransportProblem prob = manufactured_transport(quad);

    // grad g against finite differences through psi_0 / A_0
    auto g = [](Vec2 p) { return 0.5 * (p.x * p.x + p.y * p.y + 1.0) + std::cos(1.5 * (p.x + p.y)); };
    auto grad_g = [](Vec2 p) {
        const double s = 1.5 * std::sin(1.5 * (p.x + p.y));
        return Vec2{p.x - s, p.y - s};
    };
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double h = 1e-6;
    for (int t = 0; t < 10; ++t) {
        const Vec2 p{dist(rng), dist(rng)};
        const Vec2 fd{(g({p.x + h, p.y}) - g({p.x - h, p.y})) / (2 * h),
                      (g({p.x, p.y + h}) - g({p.x, p.y - h})) / (2 * h)};
        const Vec2 an = grad_g(p);
        CHECK(an.x == doctest::Approx(fd.x).epsilon(1e-7));
        CHECK(an.y == doctest::Approx(fd.y).epsilon(1e-7));
    }

    // weighted amplitude sum gives the scalar flux factor
    double amp = 0.0;
    for (int j = 0; j < quad.size(); ++j)
        amp += quad.weights[j] *
               (quad.directions[j][0] * quad.directions[j][0] + quad.directions[j][1]);
    CHECK(amp == doctest::Approx(kFourPi / 3.0).epsilon(1e-12));

    // residual of the transport equation at random points
    for (int t = 0; t < 10; ++t) {
        const Vec2 p{dist(rng), dist(rng)};
        for (int j : {0, 7, 23, 47}) {
            const auto d = quad.directions[j];
            const double A = d[0] * d[0] + d[1];
            const Vec2 gg = grad_g(p);
            const double residual = A * (d[0] * gg.x + d[1] * gg.y) + prob.sigma_t(p) * A * g(p) -
                                    prob.sigma_s(p) / kFourPi * prob.scalar_flux_exact(p) -
                                    prob.source[j](p);
            CHECK(std::abs(residual) < 1e-12);
        }
    }
}

TEST_CASE("directional solve reproduces constants") {
    const Mesh mesh = build_cartesian_mesh(3, 3, {-1, -1, 1, 1}, 1);
    const DgSpace space(1);
    TransportOptions opts;
    opts.solver_tol = 1e-12;
    const double psi_bar = 2.5;
    const auto r = directional_solve(mesh, space, {0.6, -0.3, std::sqrt(1 - 0.36 - 0.09)},
                                     [](Vec2) { return 2.0; },
                                     [psi_bar](Vec2) { return 2.0 * psi_bar; },
                                     [psi_bar](Vec2) { return psi_bar; }, opts);
    for (double c : r.psi) CHECK(c == doctest::Approx(psi_bar).epsilon(1e-10));
}

TEST_CASE("polar direction degenerates to a reaction solve") {
    const Mesh mesh = build_cartesian_mesh(2, 2, {-1, -1, 1, 1}, 1);
    const DgSpace space(1);
    TransportOptions opts;
    opts.solver_tol = 1e-13;
    // q = sigma * (x + 2y) with sigma = 3: psi = x + 2y exactly (in V_h)
    const auto r = directional_solve(mesh, space, {0.0, 0.0, 1.0}, [](Vec2) { return 3.0; },
                                     [](Vec2 p) { return 3.0 * (p.x + 2.0 * p.y); },
                                     [](Vec2) { return 0.0; }, opts);
    const auto exact = [](Vec2 p) { return p.x + 2.0 * p.y; };
    CHECK(l2_error(mesh, space, r.psi, exact, 4) < 1e-10);
}

TEST_CASE("single-direction manufactured convergence") {
    // sigma_s = 0: solve one direction of the manufactured problem
    const AngularQuadrature quad = build_angular_quadrature(2, 4);
    const int j = 1;
    const auto d = quad.directions[j];
    const double A = d[0] * d[0] + d[1];
    auto g = [](Vec2 p) { return 0.5 * (p.x * p.x + p.y * p.y + 1.0) + std::cos(1.5 * (p.x + p.y)); };
    auto grad_g = [](Vec2 p) {
        const double s = 1.5 * std::sin(1.5 * (p.x + p.y));
        return Vec2{p.x - s, p.y - s};
    };
    auto sigma_t = [](Vec2 p) { return p.x * p.x + p.y * p.y + 1.0; };
    auto psi = [A, g](Vec2 p) { return A * g(p); };
    auto q_j = [A, d, g, grad_g, sigma_t](Vec2 p) {
        const Vec2 gg = grad_g(p);
        return A * (d[0] * gg.x + d[1] * gg.y) + sigma_t(p) * A * g(p);
    };

    const int p = 2;
    const DgSpace space(p);
    TransportOptions opts;
    std::vector<double> errors;
    Mesh mesh = curved_mesh(4);
    for (int level = 0; level < 3; ++level) {
        if (level > 0) mesh = refine_uniform(mesh);
        const auto r = directional_solve(mesh, space, d, sigma_t, q_j, psi, opts);
        errors.push_back(l2_error(mesh, space, r.psi, psi, error_rule_points(space, mesh)));
    }
    const auto rates = convergence_rates(errors);
    CHECK(*rates.back() >= p + 0.8);
}

TEST_CASE("source iteration without scattering converges immediately") {
    const AngularQuadrature quad = build_angular_quadrature(2, 4);
    TransportProblem prob = manufactured_transport(quad);
    prob.sigma_s = [](Vec2) { return 0.0; };
    // keep sources consistent: q_j for sigma_s = 0
    for (int j = 0; j < quad.size(); ++j) {
        const auto d = quad.directions[j];
        const double A = d[0] * d[0] + d[1];
        prob.source[j] = [A, d](Vec2 p) {
            const double s = 1.5 * std::sin(1.5 * (p.x + p.y));
            const Vec2 gg{p.x - s, p.y - s};
            const double g = 0.5 * (p.x * p.x + p.y * p.y + 1.0) + std::cos(1.5 * (p.x + p.y));
            return A * (d[0] * gg.x + d[1] * gg.y) + (p.x * p.x + p.y * p.y + 1.0) * A * g;
        };
    }
    const Mesh mesh = curved_mesh(4);
    const DgSpace space(1);
    TransportOptions opts;
    const auto r = source_iteration(mesh, space, prob, quad, opts);
    CHECK(r.converged);
    CHECK(r.iterations <= 2);
    REQUIRE(r.increment_norms.size() >= 2);
    CHECK(r.increment_norms.back() < 1e-13 * r.increment_norms.front());
}

TEST_CASE("source iteration contracts at the scattering ratio") {
    const AngularQuadrature quad = build_angular_quadrature(2, 4);
    const TransportProblem prob = manufactured_transport(quad);
    const Mesh mesh = curved_mesh(4);
    const DgSpace space(1);
    TransportOptions opts;
    const auto r = source_iteration(mesh, space, prob, quad, opts);
    REQUIRE(r.converged);
    // measured decay of increments, excluding the first transients and
    // the solver-noise floor near convergence
    const auto& inc = r.increment_norms;
    REQUIRE(inc.size() >= 8);
    double worst = 0.0;
    int measured = 0;
    for (size_t k = 3; k < inc.size(); ++k) {
        if (inc[k - 1] < 1e3 * inc.back()) break;
        worst = std::max(worst, inc[k] / inc[k - 1]);
        ++measured;
    }
    REQUIRE(measured >= 5);
    CHECK(worst <= 0.85);
}

TEST_CASE("direction order does not change the scalar flux") {
    AngularQuadrature quad = build_angular_quadrature(2, 4);
    const TransportProblem prob = manufactured_transport(quad);
    const Mesh mesh = curved_mesh(4);
    const DgSpace space(1);
    TransportOptions opts;
    const auto r1 = source_iteration(mesh, space, prob, quad, opts);

    // reversed direction order
    AngularQuadrature rev = quad;
    std::reverse(rev.directions.begin(), rev.directions.end());
    std::reverse(rev.weights.begin(), rev.weights.end());
    TransportProblem prob_rev = manufactured_transport(rev);
    const auto r2 = source_iteration(mesh, space, prob_rev, rev, opts);

    REQUIRE(r1.phi.size() == r2.phi.size());
    double diff = 0.0, scale = 0.0;
    for (size_t i = 0; i < r1.phi.size(); ++i) {
        diff = std::max(diff, std::abs(r1.phi[i] - r2.phi[i]));
        scale = std::max(scale, std::abs(r1.phi[i]));
    }
    CHECK(diff <= 1e-13 * scale);
}

TEST_CASE("direction-averaged face coefficient is positive and bounded") {
    const AngularQuadrature quad = build_angular_quadrature(4, 12);
    const auto b0 = direction_averaged_coefficient(quad, {StabilizationKind::upwind, 0.5});
    const double v = b0({0.2, -0.3}, {1.0, 0.0});
    CHECK(v > 0.0);
    CHECK(v < 0.5);  // bounded by max |O.n| / 2
    // rotational symmetry of the product set
    CHECK(b0({0, 0}, {0.0, 1.0}) == doctest::Approx(b0({0, 0}, {0.0, -1.0})).epsilon(1e-13));
}
