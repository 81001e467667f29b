#include "cdg/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cdg {

void DenseMatrix::lu_factor() {
    if (rows_ != cols_) throw std::logic_error("lu_factor: matrix not square");
    const int n = rows_;
    pivots_.resize(n);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs((*this)(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs((*this)(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0) throw std::runtime_error("lu_factor: singular matrix");
        pivots_[k] = piv;
        if (piv != k)
            for (int j = 0; j < n; ++j) std::swap((*this)(k, j), (*this)(piv, j));
        const double diag = (*this)(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double m = (*this)(i, k) / diag;
            (*this)(i, k) = m;
            for (int j = k + 1; j < n; ++j) (*this)(i, j) -= m * (*this)(k, j);
        }
    }
    factored_ = true;
}

void DenseMatrix::lu_solve(std::span<double> b) const {
    if (!factored_) throw std::logic_error("lu_solve: factor first");
    const int n = rows_;
    for (int k = 0; k < n; ++k) {
        if (pivots_[k] != k) std::swap(b[k], b[pivots_[k]]);
        for (int i = k + 1; i < n; ++i) b[i] -= (*this)(i, k) * b[k];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= (*this)(i, j) * b[j];
        b[i] = s / (*this)(i, i);
    }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("spmv: dimension mismatch");
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[col_idx[k]];
        y[i] = s;
    }
    return y;
}

double CsrMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

std::string CsrMatrix::to_triplets() const {
    std::string out;
    char line[80];
    for (int i = 0; i < n; ++i)
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            std::snprintf(line, sizeof line, "%d %d %.17g\n", i, col_idx[k], values[k]);
            out += line;
        }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

BlockJacobi::BlockJacobi(const CsrMatrix& A, int block_size) : block_(block_size) {
    if (A.n % block_size != 0) throw std::invalid_argument("BlockJacobi: dimension not a multiple of block size");
    const int nb = A.n / block_size;
    blocks_.reserve(nb);
    for (int b = 0; b < nb; ++b) {
        DenseMatrix blk(block_, block_);
        const int base = b * block_;
        for (int i = 0; i < block_; ++i) {
            const int row = base + i;
            for (int k = A.row_ptr[row]; k < A.row_ptr[row + 1]; ++k) {
                const int c = A.col_idx[k] - base;
                if (c >= 0 && c < block_) blk(i, c) = A.values[k];
            }
        }
        blk.lu_factor();
        blocks_.push_back(std::move(blk));
    }
}

void BlockJacobi::apply(std::span<const double> x, std::span<double> y) const {
    std::vector<double> tmp(block_);
    for (size_t b = 0; b < blocks_.size(); ++b) {
        const int base = static_cast<int>(b) * block_;
        for (int i = 0; i < block_; ++i) tmp[i] = x[base + i];
        blocks_[b].lu_solve(tmp);
        for (int i = 0; i < block_; ++i) y[base + i] = tmp[i];
    }
}

GmresResult gmres_restarted(const CsrMatrix& A, const Preconditioner& M,
                            std::span<const double> b, double tol, int restart, int maxiter,
                            std::span<const double> x0) {
    const int n = A.n;
    GmresResult res;
    res.x.assign(b.begin(), b.end());
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.x.assign(n, 0.0);
        res.converged = true;
        return res;
    }
    std::vector<double> x(n, 0.0);
    if (!x0.empty()) x.assign(x0.begin(), x0.end());

    auto precond = [&](std::span<const double> in, std::span<double> out) {
        if (M)
            M(in, out);
        else
            std::copy(in.begin(), in.end(), out.begin());
    };

    const int m = restart;
    std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
    std::vector<double> H((m + 1) * m, 0.0);
    std::vector<double> cs(m), sn(m), g(m + 1);
    std::vector<double> z(n), w(n);
    auto Hat = [&](int i, int j) -> double& { return H[i * m + j]; };

    int total_iters = 0;
    double rel = 1.0;
    while (total_iters < maxiter) {
        // residual of the current iterate
        std::vector<double> r = A.multiply(x);
        for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
        double beta = norm2(r);
        rel = beta / bnorm;
        if (rel <= tol) {
            res.converged = true;
            break;
        }
        for (int i = 0; i < n; ++i) V[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int k = 0;
        bool happy = false;
        for (; k < m && total_iters < maxiter;) {
            precond(V[k], z);
            w = A.multiply(z);
            const double wnorm = norm2(w);
            // modified Gram-Schmidt
            for (int i = 0; i <= k; ++i) {
                const double h = dot(w, V[i]);
                Hat(i, k) = h;
                for (int j = 0; j < n; ++j) w[j] -= h * V[i][j];
            }
            const double hk1 = norm2(w);
            Hat(k + 1, k) = hk1;
            // subdiagonal negligible: the Krylov space is invariant
            happy = hk1 <= 1e-14 * wnorm;
            if (!happy)
                for (int j = 0; j < n; ++j) V[k + 1][j] = w[j] / hk1;
            // apply accumulated Givens rotations to the new column
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * Hat(i, k) + sn[i] * Hat(i + 1, k);
                Hat(i + 1, k) = -sn[i] * Hat(i, k) + cs[i] * Hat(i + 1, k);
                Hat(i, k) = t;
            }
            const double denom = std::hypot(Hat(k, k), Hat(k + 1, k));
            if (denom == 0.0) {
                res.breakdown = true;
                break;
            }
            cs[k] = Hat(k, k) / denom;
            sn[k] = Hat(k + 1, k) / denom;
            Hat(k, k) = denom;
            Hat(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            ++k;
            ++total_iters;
            if (happy || std::abs(g[k]) / bnorm <= tol) break;
        }
        if (k == 0) {
            // no progress possible (true breakdown)
            res.breakdown = true;
            break;
        }
        // solve the k x k triangular system H y = g
        std::vector<double> y(k);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k; ++j) s -= Hat(i, j) * y[j];
            y[i] = s / Hat(i, i);
        }
        // x += M^{-1} (V y)
        std::fill(w.begin(), w.end(), 0.0);
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < n; ++i) w[i] += y[j] * V[j][i];
        precond(w, z);
        for (int i = 0; i < n; ++i) x[i] += z[i];
        if (happy) {
            std::vector<double> r2 = A.multiply(x);
            for (int i = 0; i < n; ++i) r2[i] = b[i] - r2[i];
            rel = norm2(r2) / bnorm;
            res.converged = rel <= tol;
            res.breakdown = !res.converged;
            break;
        }
    }
    // final residual (recomputed so the reported value is the true one)
    std::vector<double> r = A.multiply(x);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    rel = norm2(r) / bnorm;
    if (rel <= tol) res.converged = true;
    res.x = std::move(x);
    res.iterations = total_iters;
    res.residual = rel;
    return res;
}

}  // namespace cdg
