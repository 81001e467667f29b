#include "cdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace cdg {

namespace {

// Legendre polynomial P_n and its derivative at x.
void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) { p = 1.0; dp = 0.0; return; }
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule1D gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: point count must be >= 1");
    QuadratureRule1D rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    rule.exactness = 2 * n - 1;
    if (n == 1) {
        rule.points[0] = 0.0;
        rule.weights[0] = 2.0;
        return rule;
    }
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p, dp;
        for (int it = 0; it < 100; ++it) {
            legendre(n, x, p, dp);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre(n, x, p, dp);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // roots come out in decreasing order; store ascending and mirrored
        rule.points[n - 1 - i] = x;
        rule.points[i] = -x;
        rule.weights[n - 1 - i] = w;
        rule.weights[i] = w;
    }
    if (n % 2 == 1) rule.points[n / 2] = 0.0;
    return rule;
}

QuadratureRule2D tensor_rule(const QuadratureRule1D& r) {
    QuadratureRule2D out;
    const int n = r.size();
    out.points.reserve(n * n);
    out.weights.reserve(n * n);
    out.exactness = r.exactness;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            out.points.push_back({r.points[i], r.points[j]});
            out.weights.push_back(r.weights[i] * r.weights[j]);
        }
    return out;
}

std::vector<double> gauss_lobatto_points(int n) {
    if (n < 1) throw std::invalid_argument("gauss_lobatto_points: need n >= 1");
    if (n == 1) return {0.0};
    if (n == 2) return {-1.0, 1.0};
    const int p = n - 1;  // interior points are roots of P'_p
    std::vector<double> pts(n);
    pts.front() = -1.0;
    pts.back() = 1.0;
    for (int i = 1; i < p; ++i) {
        // good initial guess for the i-th root of P'_p (descending in cos)
        double x = std::cos(M_PI * i / p);
        for (int it = 0; it < 100; ++it) {
            double pv, dpv;
            legendre(p, x, pv, dpv);
            // P''_p from the Legendre ODE: (1-x^2) P'' = 2x P' - p(p+1) P
            double ddpv = (2.0 * x * dpv - p * (p + 1.0) * pv) / (1.0 - x * x);
            double dx = dpv / ddpv;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        pts[p - i] = x;
    }
    // symmetrize
    for (int i = 0; i < n / 2; ++i) {
        double s = 0.5 * (pts[i] - pts[n - 1 - i]);
        pts[i] = s;
        pts[n - 1 - i] = -s;
    }
    if (n % 2 == 1) pts[n / 2] = 0.0;
    return pts;
}

std::vector<double> uniform_points(int n) {
    if (n < 1) throw std::invalid_argument("uniform_points: need n >= 1");
    if (n == 1) return {0.0};
    std::vector<double> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = -1.0 + 2.0 * i / (n - 1);
    return pts;
}

Lagrange1D::Lagrange1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {}

void Lagrange1D::eval(double x, std::span<double> values) const {
    const int n = size();
    for (int j = 0; j < n; ++j) {
        double v = 1.0;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            v *= (x - nodes_[k]) / (nodes_[j] - nodes_[k]);
        }
        values[j] = v;
    }
}

void Lagrange1D::eval_deriv(double x, std::span<double> derivs) const {
    const int n = size();
    for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        for (int m = 0; m < n; ++m) {
            if (m == j) continue;
            double prod = 1.0 / (nodes_[j] - nodes_[m]);
            for (int k = 0; k < n; ++k) {
                if (k == j || k == m) continue;
                prod *= (x - nodes_[k]) / (nodes_[j] - nodes_[k]);
            }
            sum += prod;
        }
        derivs[j] = sum;
    }
}

}  // namespace cdg
