#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cdg {

// Small dense matrix with LU solve; used for element-local systems.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return data_[i * cols_ + j]; }
    double operator()(int i, int j) const { return data_[i * cols_ + j]; }
    std::span<const double> data() const { return data_; }

    // In-place LU with partial pivoting; throws on singular pivot.
    void lu_factor();
    void lu_solve(std::span<double> b) const;  // b overwritten with the solution

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
    std::vector<int> pivots_;
    bool factored_ = false;
};

// Compressed sparse row matrix.
struct CsrMatrix {
    int n = 0;
    std::vector<int> row_ptr;
    std::vector<int> col_idx;
    std::vector<double> values;

    std::vector<double> multiply(std::span<const double> x) const;
    double max_abs() const;
    // One "row col value" line per stored entry.
    std::string to_triplets() const;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// Inverted diagonal element blocks of a CSR matrix with uniform block
// size; apply() performs the block-diagonal solve.
class BlockJacobi {
public:
    BlockJacobi() = default;
    BlockJacobi(const CsrMatrix& A, int block_size);
    void apply(std::span<const double> x, std::span<double> y) const;
    int block_size() const { return block_; }

private:
    int block_ = 0;
    std::vector<DenseMatrix> blocks_;
};

struct GmresResult {
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0;  // relative to ||b||
    bool converged = false;
    bool breakdown = false;
};

using Preconditioner = std::function<void(std::span<const double>, std::span<double>)>;

// Restarted GMRES with right preconditioning, so the internal residual
// is the true residual of the original system. An empty preconditioner
// means identity. x0 may be empty (zero initial guess).
GmresResult gmres_restarted(const CsrMatrix& A, const Preconditioner& M,
                            std::span<const double> b, double tol, int restart, int maxiter,
                            std::span<const double> x0 = {});

}  // namespace cdg
