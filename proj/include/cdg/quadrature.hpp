#pragma once

#include <span>
#include <vector>

#include "cdg/geometry.hpp"

namespace cdg {

// Quadrature on the reference interval [-1,1].
struct QuadratureRule1D {
    std::vector<double> points;
    std::vector<double> weights;
    int exactness = 0;  // integrates polynomials up to this degree exactly

    int size() const { return static_cast<int>(points.size()); }
};

// Tensor-product quadrature on the reference square [-1,1]^2.
struct QuadratureRule2D {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int exactness = 0;  // per axis

    int size() const { return static_cast<int>(points.size()); }
};

// n-point Gauss-Legendre rule; exact for degree 2n-1. Nodes by Newton
// iteration on P_n to 1e-15, symmetrized about the origin.
QuadratureRule1D gauss_legendre(int n);

QuadratureRule2D tensor_rule(const QuadratureRule1D& rule1d);

// n Gauss-Lobatto points (includes the endpoints for n >= 2; {0} for n = 1).
std::vector<double> gauss_lobatto_points(int n);

// n equally spaced points covering [-1,1].
std::vector<double> uniform_points(int n);

// Lagrange basis on an arbitrary 1D node set. Direct O(n^2) evaluation,
// plenty for the small degrees used here.
class Lagrange1D {
public:
    Lagrange1D() = default;
    explicit Lagrange1D(std::vector<double> nodes);

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }

    void eval(double x, std::span<double> values) const;
    void eval_deriv(double x, std::span<double> derivs) const;

private:
    std::vector<double> nodes_;
};

}  // namespace cdg
