#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "cdg/basis.hpp"
#include "cdg/quadrature.hpp"

using namespace cdg;

namespace {

double integrate_1d(const QuadratureRule1D& r, const std::function<double(double)>& f) {
    double acc = 0.0;
    for (int k = 0; k < r.size(); ++k) acc += r.weights[k] * f(r.points[k]);
    return acc;
}

double integrate_2d(const QuadratureRule2D& r, const std::function<double(Vec2)>& f) {
    double acc = 0.0;
    for (int k = 0; k < r.size(); ++k) acc += r.weights[k] * f(r.points[k]);
    return acc;
}

}  // namespace

TEST_CASE("gauss_legendre basic rules") {
    const auto r1 = gauss_legendre(1);
    CHECK(r1.points == std::vector<double>{0.0});
    CHECK(r1.weights == std::vector<double>{2.0});

    const auto r2 = gauss_legendre(2);
    CHECK(r2.points[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(r2.points[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r2.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
    // oracle: exact moments up to degree 3
    for (int k = 0; k <= 3; ++k) {
        const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
        CHECK(integrate_1d(r2, [k](double x) { return std::pow(x, k); }) ==
              doctest::Approx(exact).epsilon(1e-14));
    }

    CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("gauss_legendre n=5 monomial exactness") {
    const auto r = gauss_legendre(5);
    CHECK(std::abs(integrate_1d(r, [](double x) { return std::pow(x, 9); })) < 1e-15);
    CHECK(integrate_1d(r, [](double x) { return std::pow(x, 8); }) ==
          doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("quadrature weights sum to the reference measure") {
    for (int n = 1; n <= 12; ++n) {
        const auto r = gauss_legendre(n);
        double sum = 0.0;
        for (double w : r.weights) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));

        const auto t = tensor_rule(r);
        double sum2 = 0.0;
        for (double w : t.weights) {
            CHECK(w > 0.0);
            sum2 += w;
        }
        CHECK(sum2 == doctest::Approx(4.0).epsilon(1e-14));
    }
}

TEST_CASE("tensor rule") {
    const auto t1 = tensor_rule(gauss_legendre(1));
    REQUIRE(t1.size() == 1);
    CHECK(t1.points[0].x == 0.0);
    CHECK(t1.points[0].y == 0.0);
    CHECK(t1.weights[0] == doctest::Approx(4.0));

    const auto t2 = tensor_rule(gauss_legendre(2));
    REQUIRE(t2.size() == 4);
    for (double w : t2.weights) CHECK(w == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(integrate_2d(t2, [](Vec2 p) { return p.x * p.x * p.y * p.y; }) ==
          doctest::Approx(4.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("basis p=0 is the constant") {
    const TensorBasis basis(0);
    REQUIRE(basis.dim() == 1);
    double v;
    basis.eval({0.3, -0.7}, std::span(&v, 1));
    CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    double dx, dy;
    basis.eval_grad({0.3, -0.7}, std::span(&dx, 1), std::span(&dy, 1));
    CHECK(dx == 0.0);
    CHECK(dy == 0.0);
}

TEST_CASE("nodal Lagrange property") {
    const TensorBasis basis(1);
    const auto& nodes = basis.nodes_1d();
    std::vector<double> v(basis.dim());
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            basis.eval({nodes[i], nodes[j]}, v);
            for (int b = 0; b < 4; ++b)
                CHECK(v[b] == doctest::Approx(b == j * 2 + i ? 1.0 : 0.0).epsilon(1e-14));
        }
}

TEST_CASE("basis gradient matches finite differences") {
    const TensorBasis basis(3);
    const int nd = basis.dim();
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> dist(-0.9, 0.9);
    std::vector<double> gp(nd), ge(nd), vp(nd), vm(nd);
    const double h = 1e-6;
    for (int trial = 0; trial < 5; ++trial) {
        const Vec2 p{dist(rng), dist(rng)};
        basis.eval_grad(p, gp, ge);
        basis.eval({p.x + h, p.y}, vp);
        basis.eval({p.x - h, p.y}, vm);
        for (int i = 0; i < nd; ++i)
            CHECK(gp[i] == doctest::Approx((vp[i] - vm[i]) / (2 * h)).epsilon(1e-8));
        basis.eval({p.x, p.y + h}, vp);
        basis.eval({p.x, p.y - h}, vm);
        for (int i = 0; i < nd; ++i)
            CHECK(ge[i] == doctest::Approx((vp[i] - vm[i]) / (2 * h)).epsilon(1e-8));
    }
}

TEST_CASE("partition of unity") {
    for (int p : {1, 2, 3, 4}) {
        const TensorBasis basis(p);
        std::vector<double> v(basis.dim());
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (int trial = 0; trial < 10; ++trial) {
            basis.eval({dist(rng), dist(rng)}, v);
            double sum = 0.0;
            for (double x : v) sum += x;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("reference mass matrix is SPD and matches 1D tensor products") {
    const int p = 3;
    const TensorBasis basis(p);
    const int n1 = p + 1, nd = basis.dim();
    const auto rule = tensor_rule(gauss_legendre(p + 1));  // exact for degree 2p
    const BasisTable tab = basis.tabulate(rule.points, false);
    std::vector<double> mass(nd * nd, 0.0);
    for (int k = 0; k < rule.size(); ++k)
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j)
                mass[i * nd + j] += rule.weights[k] * tab.val(k, i) * tab.val(k, j);

    // 1D factors with the same rule
    const auto r1 = gauss_legendre(p + 1);
    std::vector<double> mass1(n1 * n1, 0.0), vals(n1);
    for (int k = 0; k < r1.size(); ++k) {
        basis.basis_1d().eval(r1.points[k], vals);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n1; ++j) mass1[i * n1 + j] += r1.weights[k] * vals[i] * vals[j];
    }
    for (int j2 = 0; j2 < n1; ++j2)
        for (int i2 = 0; i2 < n1; ++i2)
            for (int j1 = 0; j1 < n1; ++j1)
                for (int i1 = 0; i1 < n1; ++i1) {
                    const int a = j2 * n1 + j1, b = i2 * n1 + i1;
                    CHECK(mass[a * nd + b] ==
                          doctest::Approx(mass1[j1 * n1 + i1] * mass1[j2 * n1 + i2])
                              .epsilon(1e-13));
                }

    // symmetry and positive definiteness via random quadratic forms
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j)
            CHECK(mass[i * nd + j] == doctest::Approx(mass[j * nd + i]).epsilon(1e-14));
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(nd);
        for (double& v : x) v = dist(rng);
        double quad = 0.0;
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j) quad += x[i] * mass[i * nd + j] * x[j];
        CHECK(quad > 0.0);
    }
}

TEST_CASE("Lagrange interpolation reproduces degree-p polynomials") {
    const int p = 3;
    const TensorBasis basis(p);
    auto poly = [](Vec2 v) {
        return 1.0 + 0.5 * v.x - v.y + 0.25 * v.x * v.x * v.y - 0.125 * std::pow(v.x * v.y, 2) +
               0.3 * std::pow(v.x, 3) * std::pow(v.y, 3);
    };
    // interpolate at the basis nodes
    const auto& nodes = basis.nodes_1d();
    std::vector<double> coeffs(basis.dim());
    for (int j = 0; j <= p; ++j)
        for (int i = 0; i <= p; ++i) coeffs[j * (p + 1) + i] = poly({nodes[i], nodes[j]});

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(basis.dim());
    for (int trial = 0; trial < 20; ++trial) {
        const Vec2 pt{dist(rng), dist(rng)};
        basis.eval(pt, v);
        double interp = 0.0;
        for (size_t i = 0; i < coeffs.size(); ++i) interp += coeffs[i] * v[i];
        CHECK(interp == doctest::Approx(poly(pt)).epsilon(1e-12));
    }
}
