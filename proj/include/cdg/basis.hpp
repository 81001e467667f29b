#pragma once

#include <span>
#include <vector>

#include "cdg/geometry.hpp"
#include "cdg/quadrature.hpp"

namespace cdg {

// Evaluation tables of a 2D tensor basis at a fixed point set.
// Layout: entry(k, i) at index k*ndof + i.
struct BasisTable {
    int npts = 0;
    int ndof = 0;
    std::vector<double> value;
    std::vector<double> grad_xi;
    std::vector<double> grad_eta;

    double val(int k, int i) const { return value[k * ndof + i]; }
    double dxi(int k, int i) const { return grad_xi[k * ndof + i]; }
    double deta(int k, int i) const { return grad_eta[k * ndof + i]; }
};

// Nodal tensor-product Lagrange basis of degree p on the Gauss-Lobatto
// lattice of the reference square. Local dof (i,j) sits at index
// j*(p+1)+i and interpolates at (node_i, node_j).
class TensorBasis {
public:
    explicit TensorBasis(int degree);

    int degree() const { return degree_; }
    int dim() const { return (degree_ + 1) * (degree_ + 1); }
    const std::vector<double>& nodes_1d() const { return basis1d_.nodes(); }
    const Lagrange1D& basis_1d() const { return basis1d_; }

    void eval(Vec2 ref, std::span<double> values) const;
    void eval_grad(Vec2 ref, std::span<double> dxi, std::span<double> deta) const;

    BasisTable tabulate(std::span<const Vec2> pts, bool with_gradients = true) const;

private:
    int degree_;
    Lagrange1D basis1d_;
};

// Geometry interpolation tables: degree-q tensor Lagrange basis on the
// uniform lattice, matching Element node storage.
BasisTable tabulate_geometry(int q, std::span<const Vec2> pts);

}  // namespace cdg
