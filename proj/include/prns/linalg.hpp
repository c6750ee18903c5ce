#pragma once

#include <algorithm>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace prns {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse row matrix with sorted column indices per row.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx, std::vector<double> values);

    /// Duplicate entries are summed. Throws InvalidArgument for out-of-range indices.
    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
    /// Pattern with all values zero.
    static SparseMatrix from_pattern(int rows, int cols, std::vector<std::vector<int>> pattern);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int nnz() const { return static_cast<int>(values_.size()); }
    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Position of (i, j) in the value array, or -1 when not stored.
    int find(int i, int j) const;
    double coeff(int i, int j) const;
    /// Adds to a stored entry; throws InvalidArgument if (i, j) is not in the pattern.
    void add(int i, int j, double v);
    void set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
    SparseMatrix transpose() const;
    Eigen::MatrixXd to_dense() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

/// Sparse LU factorisation (UMFPACK). The symbolic analysis is reused while
/// the sparsity pattern stays the same.
class LuSolver {
public:
    LuSolver();
    ~LuSolver();
    LuSolver(const LuSolver&) = delete;
    LuSolver& operator=(const LuSolver&) = delete;

    /// Throws SingularMatrixError (with a pivot index) for singular input.
    void factor(const SparseMatrix& a);
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot factor-and-solve.
Eigen::VectorXd lu_solve(const SparseMatrix& a, const Eigen::VectorXd& b);

enum class Preconditioner { identity, jacobi, ilu0 };

struct GmresOptions {
    double tol = 1e-10;  // relative residual; must be positive
    int max_iter = 1000;
    int restart = 50;
    Preconditioner preconditioner = Preconditioner::identity;
};

struct GmresResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Right-preconditioned restarted GMRES. Throws ConvergenceError carrying the
/// achieved relative residual when max_iter is exhausted.
GmresResult gmres(const SparseMatrix& a, const Eigen::VectorXd& b, const GmresOptions& options,
                  const Eigen::VectorXd* x0 = nullptr);

}  // namespace prns
