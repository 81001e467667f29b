#include "cdg/basis.hpp"

namespace cdg {

TensorBasis::TensorBasis(int degree)
    : degree_(degree), basis1d_(gauss_lobatto_points(degree + 1)) {}

void TensorBasis::eval(Vec2 ref, std::span<double> values) const {
    const int n1 = degree_ + 1;
    std::vector<double> li(n1), lj(n1);
    basis1d_.eval(ref.x, li);
    basis1d_.eval(ref.y, lj);
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i) values[j * n1 + i] = li[i] * lj[j];
}

void TensorBasis::eval_grad(Vec2 ref, std::span<double> dxi, std::span<double> deta) const {
    const int n1 = degree_ + 1;
    std::vector<double> li(n1), lj(n1), di(n1), dj(n1);
    basis1d_.eval(ref.x, li);
    basis1d_.eval(ref.y, lj);
    basis1d_.eval_deriv(ref.x, di);
    basis1d_.eval_deriv(ref.y, dj);
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i) {
            dxi[j * n1 + i] = di[i] * lj[j];
            deta[j * n1 + i] = li[i] * dj[j];
        }
}

BasisTable TensorBasis::tabulate(std::span<const Vec2> pts, bool with_gradients) const {
    BasisTable t;
    t.npts = static_cast<int>(pts.size());
    t.ndof = dim();
    t.value.resize(t.npts * t.ndof);
    if (with_gradients) {
        t.grad_xi.resize(t.npts * t.ndof);
        t.grad_eta.resize(t.npts * t.ndof);
    }
    for (int k = 0; k < t.npts; ++k) {
        eval(pts[k], std::span(t.value).subspan(k * t.ndof, t.ndof));
        if (with_gradients)
            eval_grad(pts[k], std::span(t.grad_xi).subspan(k * t.ndof, t.ndof),
                      std::span(t.grad_eta).subspan(k * t.ndof, t.ndof));
    }
    return t;
}

BasisTable tabulate_geometry(int q, std::span<const Vec2> pts) {
    const Lagrange1D basis(uniform_points(q + 1));
    const int n1 = q + 1;
    BasisTable t;
    t.npts = static_cast<int>(pts.size());
    t.ndof = n1 * n1;
    t.value.resize(t.npts * t.ndof);
    t.grad_xi.resize(t.npts * t.ndof);
    t.grad_eta.resize(t.npts * t.ndof);
    std::vector<double> li(n1), lj(n1), di(n1), dj(n1);
    for (int k = 0; k < t.npts; ++k) {
        basis.eval(pts[k].x, li);
        basis.eval(pts[k].y, lj);
        basis.eval_deriv(pts[k].x, di);
        basis.eval_deriv(pts[k].y, dj);
        for (int j = 0; j < n1; ++j)
            for (int i = 0; i < n1; ++i) {
                const int a = j * n1 + i;
                t.value[k * t.ndof + a] = li[i] * lj[j];
                t.grad_xi[k * t.ndof + a] = di[i] * lj[j];
                t.grad_eta[k * t.ndof + a] = li[i] * dj[j];
            }
    }
    return t;
}

}  // namespace cdg
