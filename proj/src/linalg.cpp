#include "prns/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <amd.h>
#include <umfpack.h>

#include "prns/error.hpp"

namespace prns {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
    if (rows_ < 0 || cols_ < 0 || static_cast<int>(row_ptr_.size()) != rows_ + 1 ||
        col_idx_.size() != values_.size() || row_ptr_.back() != static_cast<int>(values_.size()))
        throw InvalidArgument("inconsistent CSR arrays");
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
    for (const auto& t : triplets)
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw InvalidArgument("triplet index out of range");
    std::sort(triplets.begin(), triplets.end(),
              [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    std::vector<int> ptr(static_cast<std::size_t>(rows) + 1, 0), idx;
    std::vector<double> val;
    idx.reserve(triplets.size());
    val.reserve(triplets.size());
    for (std::size_t i = 0; i < triplets.size();) {
        const int r = triplets[i].row, c = triplets[i].col;
        double s = 0.0;
        for (; i < triplets.size() && triplets[i].row == r && triplets[i].col == c; ++i) s += triplets[i].value;
        idx.push_back(c);
        val.push_back(s);
        ++ptr[static_cast<std::size_t>(r) + 1];
    }
    for (int r = 0; r < rows; ++r) ptr[r + 1] += ptr[r];
    return SparseMatrix(rows, cols, std::move(ptr), std::move(idx), std::move(val));
}

SparseMatrix SparseMatrix::from_pattern(int rows, int cols, std::vector<std::vector<int>> pattern) {
    if (static_cast<int>(pattern.size()) != rows) throw InvalidArgument("pattern row count mismatch");
    std::vector<int> ptr(static_cast<std::size_t>(rows) + 1, 0), idx;
    for (int r = 0; r < rows; ++r) {
        auto& p = pattern[r];
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        if (!p.empty() && (p.front() < 0 || p.back() >= cols)) throw InvalidArgument("pattern index out of range");
        idx.insert(idx.end(), p.begin(), p.end());
        ptr[r + 1] = static_cast<int>(idx.size());
        std::vector<int>().swap(p);
    }
    std::vector<double> val(idx.size(), 0.0);
    return SparseMatrix(rows, cols, std::move(ptr), std::move(idx), std::move(val));
}

int SparseMatrix::find(int i, int j) const {
    if (i < 0 || i >= rows_) return -1;
    const auto b = col_idx_.begin() + row_ptr_[i];
    const auto e = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(b, e, j);
    return (it != e && *it == j) ? static_cast<int>(it - col_idx_.begin()) : -1;
}

double SparseMatrix::coeff(int i, int j) const {
    const int p = find(i, j);
    return p < 0 ? 0.0 : values_[p];
}

void SparseMatrix::add(int i, int j, double v) {
    const int p = find(i, j);
    if (p < 0) throw InvalidArgument("entry (" + std::to_string(i) + "," + std::to_string(j) + ") not in pattern");
    values_[p] += v;
}

Eigen::VectorXd SparseMatrix::operator*(const Eigen::VectorXd& x) const {
    if (x.size() != cols_) throw InvalidArgument("matrix-vector size mismatch");
    Eigen::VectorXd y(rows_);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * x[col_idx_[p]];
        y[i] = s;
    }
    return y;
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<int> ptr(static_cast<std::size_t>(cols_) + 1, 0);
    for (int c : col_idx_) ++ptr[static_cast<std::size_t>(c) + 1];
    for (int c = 0; c < cols_; ++c) ptr[c + 1] += ptr[c];
    std::vector<int> next(ptr.begin(), ptr.end() - 1), idx(col_idx_.size());
    std::vector<double> val(values_.size());
    for (int i = 0; i < rows_; ++i)
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            const int q = next[col_idx_[p]]++;
            idx[q] = i;
            val[q] = values_[p];
        }
    return SparseMatrix(cols_, rows_, std::move(ptr), std::move(idx), std::move(val));
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) d(i, col_idx_[p]) += values_[p];
    return d;
}

// ---------------------------------------------------------------------------
// LU (UMFPACK). A CSR matrix is the CSC form of its transpose, so we factor
// A^T and solve with UMFPACK_At.

namespace {

// Symmetric ordering for matrices with zero diagonal entries (saddle points):
// AMD on the rows with a nonzero diagonal, then each remaining row right after
// its last ordered neighbour so that its pivot has been filled in by then.
// Rows whose neighbours all have zero diagonal go last.
std::vector<int> saddle_point_ordering(const std::vector<int>& ptr, const std::vector<int>& idx, int n,
                                       const std::vector<char>& zero) {
    std::vector<int> local(static_cast<std::size_t>(n), -1), global;
    for (int i = 0; i < n; ++i)
        if (!zero[i]) {
            local[i] = static_cast<int>(global.size());
            global.push_back(i);
        }
    const int m = static_cast<int>(global.size());
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
    for (int i = 0; i < n; ++i) {
        if (local[i] < 0) continue;
        for (int p = ptr[i]; p < ptr[i + 1]; ++p) {
            const int j = idx[p];
            if (j == i || local[j] < 0) continue;
            adj[local[i]].push_back(local[j]);
            adj[local[j]].push_back(local[i]);
        }
    }
    std::vector<int> ap{0}, ai;
    ai.reserve(1);  // AMD rejects a null index array
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        ai.insert(ai.end(), a.begin(), a.end());
        ap.push_back(static_cast<int>(ai.size()));
    }
    std::vector<int> perm(static_cast<std::size_t>(m));
    double control[AMD_CONTROL], info[AMD_INFO];
    amd_defaults(control);
    if (m > 0 && amd_order(m, ap.data(), ai.data(), perm.data(), control, info) < AMD_OK)
        throw Error("AMD ordering failed");

    std::vector<int> rank(static_cast<std::size_t>(n), -1);
    for (int r = 0; r < m; ++r) rank[global[perm[r]]] = r;
    std::vector<std::pair<int, int>> deferred;  // (last neighbour rank, row)
    for (int i = 0; i < n; ++i) {
        if (!zero[i]) continue;
        int last = -1;
        for (int p = ptr[i]; p < ptr[i + 1]; ++p) last = std::max(last, rank[idx[p]]);
        deferred.emplace_back(last < 0 ? m : last, i);
    }
    std::stable_sort(deferred.begin(), deferred.end());
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    std::size_t z = 0;
    for (int r = 0; r < m; ++r) {
        order.push_back(global[perm[r]]);
        while (z < deferred.size() && deferred[z].first == r) order.push_back(deferred[z++].second);
    }
    while (z < deferred.size()) order.push_back(deferred[z++].second);
    return order;
}

}  // namespace

struct LuSolver::Impl {
    void* symbolic = nullptr;
    void* numeric = nullptr;
    int n = 0;
    std::vector<int> ptr, idx;
    std::vector<double> val;
    bool saddle = false;

    void defaults(double* control) const {
        umfpack_di_defaults(control);
        if (saddle) {
            control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
            control[UMFPACK_ORDERING] = UMFPACK_ORDERING_GIVEN;
        }
    }

    ~Impl() { release(true); }
    void release(bool all) {
        if (numeric) umfpack_di_free_numeric(&numeric);
        if (all && symbolic) umfpack_di_free_symbolic(&symbolic);
    }
};

LuSolver::LuSolver() : impl_(std::make_unique<Impl>()) {}
LuSolver::~LuSolver() = default;

void LuSolver::factor(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw InvalidArgument("LU requires a square matrix");
    Impl& s = *impl_;
    const bool same_pattern = s.symbolic && s.n == a.rows() && s.ptr == a.row_ptr() && s.idx == a.col_idx();
    s.release(!same_pattern);
    s.n = a.rows();
    if (!same_pattern) {
        s.ptr = a.row_ptr();
        s.idx = a.col_idx();
    }
    s.val = a.values();
    if (s.n == 0) return;

    double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
    if (!same_pattern) {
        // The diagonal of A^T is that of A, so the row-based scan applies to both.
        std::vector<char> zero(static_cast<std::size_t>(s.n), 1);
        for (int i = 0; i < s.n; ++i)
            for (int p = s.ptr[i]; p < s.ptr[i + 1]; ++p)
                if (s.idx[p] == i && s.val[p] != 0.0) zero[i] = 0;
        s.saddle = std::find(zero.begin(), zero.end(), 1) != zero.end();
        s.defaults(control);
        int st;
        if (s.saddle) {
            const std::vector<int> order = saddle_point_ordering(s.ptr, s.idx, s.n, zero);
            st = umfpack_di_qsymbolic(s.n, s.n, s.ptr.data(), s.idx.data(), s.val.data(), order.data(), &s.symbolic,
                                      control, info);
        } else {
            st = umfpack_di_symbolic(s.n, s.n, s.ptr.data(), s.idx.data(), s.val.data(), &s.symbolic, control, info);
        }
        if (st != UMFPACK_OK) throw Error("UMFPACK symbolic analysis failed (status " + std::to_string(st) + ")");
    }
    s.defaults(control);
    const int st = umfpack_di_numeric(s.ptr.data(), s.idx.data(), s.val.data(), s.symbolic, &s.numeric, control, info);
    if (st == UMFPACK_WARNING_singular_matrix) {
        std::vector<double> diag(static_cast<std::size_t>(s.n));
        std::vector<int> q(static_cast<std::size_t>(s.n));
        int pivot = -1;
        if (umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, q.data(),
                                   diag.data(), nullptr, nullptr, s.numeric) == UMFPACK_OK) {
            for (int i = 0; i < s.n; ++i)
                if (diag[i] == 0.0 || !std::isfinite(diag[i])) {
                    pivot = q[i];
                    break;
                }
        }
        s.release(false);
        throw SingularMatrixError("matrix is singular", pivot);
    }
    if (st != UMFPACK_OK) {
        s.release(false);
        throw Error("UMFPACK numeric factorisation failed (status " + std::to_string(st) + ")");
    }
}

Eigen::VectorXd LuSolver::solve(const Eigen::VectorXd& b) const {
    const Impl& s = *impl_;
    if (b.size() != s.n) throw InvalidArgument("right-hand side size mismatch");
    Eigen::VectorXd x(s.n);
    if (s.n == 0) return x;
    if (!s.numeric) throw Error("LU solve before a successful factorisation");
    double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
    s.defaults(control);
    const int st = umfpack_di_solve(UMFPACK_At, s.ptr.data(), s.idx.data(), s.val.data(), x.data(), b.data(),
                                    s.numeric, control, info);
    if (st != UMFPACK_OK) throw Error("UMFPACK solve failed (status " + std::to_string(st) + ")");
    return x;
}

Eigen::VectorXd lu_solve(const SparseMatrix& a, const Eigen::VectorXd& b) {
    if (b.size() != a.rows()) throw InvalidArgument("right-hand side size mismatch");
    LuSolver lu;
    lu.factor(a);
    return lu.solve(b);
}

// ---------------------------------------------------------------------------
// GMRES

namespace {

class Precond {
public:
    Precond(const SparseMatrix& a, Preconditioner kind) : a_(a), kind_(kind) {
        const int n = a.rows();
        if (kind == Preconditioner::jacobi) {
            inv_diag_.resize(n);
            for (int i = 0; i < n; ++i) {
                const double d = a.coeff(i, i);
                inv_diag_[i] = d != 0.0 ? 1.0 / d : 1.0;
            }
        } else if (kind == Preconditioner::ilu0) {
            lu_ = a.values();
            diag_pos_.resize(n);
            const auto& ptr = a.row_ptr();
            const auto& col = a.col_idx();
            for (int i = 0; i < n; ++i) {
                diag_pos_[i] = a.find(i, i);
                if (diag_pos_[i] < 0) throw SingularMatrixError("ILU(0) needs a stored diagonal", i);
            }
            for (int i = 1; i < n; ++i) {
                for (int p = ptr[i]; p < ptr[i + 1] && col[p] < i; ++p) {
                    const int k = col[p];
                    const double piv = lu_[diag_pos_[k]];
                    if (piv == 0.0) throw SingularMatrixError("zero pivot in ILU(0)", k);
                    lu_[p] /= piv;
                    const double lik = lu_[p];
                    int q = p + 1;
                    for (int r = diag_pos_[k] + 1; r < ptr[k + 1]; ++r) {
                        while (q < ptr[i + 1] && col[q] < col[r]) ++q;
                        if (q < ptr[i + 1] && col[q] == col[r]) lu_[q] -= lik * lu_[r];
                    }
                }
            }
            for (int i = 0; i < n; ++i)
                if (lu_[diag_pos_[i]] == 0.0) throw SingularMatrixError("zero pivot in ILU(0)", i);
        }
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
        switch (kind_) {
            case Preconditioner::identity:
                return v;
            case Preconditioner::jacobi:
                return v.cwiseProduct(inv_diag_);
            case Preconditioner::ilu0: {
                const int n = a_.rows();
                const auto& ptr = a_.row_ptr();
                const auto& col = a_.col_idx();
                Eigen::VectorXd y = v;
                for (int i = 0; i < n; ++i)
                    for (int p = ptr[i]; p < diag_pos_[i]; ++p) y[i] -= lu_[p] * y[col[p]];
                for (int i = n - 1; i >= 0; --i) {
                    for (int p = diag_pos_[i] + 1; p < ptr[i + 1]; ++p) y[i] -= lu_[p] * y[col[p]];
                    y[i] /= lu_[diag_pos_[i]];
                }
                return y;
            }
        }
        return v;
    }

private:
    const SparseMatrix& a_;
    Preconditioner kind_;
    Eigen::VectorXd inv_diag_;
    std::vector<double> lu_;
    std::vector<int> diag_pos_;
};

}  // namespace

GmresResult gmres(const SparseMatrix& a, const Eigen::VectorXd& b, const GmresOptions& opt, const Eigen::VectorXd* x0) {
    if (!(opt.tol > 0.0)) throw InvalidArgument("GMRES tolerance must be positive");
    if (opt.restart < 1 || opt.max_iter < 1) throw InvalidArgument("GMRES restart and max_iter must be positive");
    if (a.rows() != a.cols() || b.size() != a.rows()) throw InvalidArgument("GMRES size mismatch");
    const int n = a.rows();
    GmresResult res;
    res.x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.x.setZero();
        return res;
    }
    const Precond M(a, opt.preconditioner);
    const int m = std::min(opt.restart, n);
    Eigen::MatrixXd V(n, m + 1), H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs(m), sn(m), g(m + 1);

    Eigen::VectorXd r = b - a * res.x;
    double rel = r.norm() / bnorm;
    while (res.iterations < opt.max_iter && rel > opt.tol) {
        const double beta = r.norm();
        V.col(0) = r / beta;
        g.setZero();
        g[0] = beta;
        H.setZero();
        int j = 0;
        for (; j < m && res.iterations < opt.max_iter; ++j) {
            ++res.iterations;
            Eigen::VectorXd w = a * M.apply(V.col(j));
            for (int i = 0; i <= j; ++i) {
                H(i, j) = V.col(i).dot(w);
                w -= H(i, j) * V.col(i);
            }
            H(j + 1, j) = w.norm();
            if (H(j + 1, j) > 0.0) V.col(j + 1) = w / H(j + 1, j);
            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
                H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
                H(i, j) = t;
            }
            const double d = std::hypot(H(j, j), H(j + 1, j));
            cs[j] = d > 0.0 ? H(j, j) / d : 1.0;
            sn[j] = d > 0.0 ? H(j + 1, j) / d : 0.0;
            H(j, j) = d;
            H(j + 1, j) = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            if (std::abs(g[j + 1]) / bnorm <= opt.tol || d == 0.0) {
                ++j;
                break;
            }
        }
        const Eigen::VectorXd y =
            H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
        res.x += M.apply(V.leftCols(j) * y);
        r = b - a * res.x;
        rel = r.norm() / bnorm;
    }
    res.relative_residual = rel;
    if (rel > opt.tol) throw ConvergenceError("GMRES did not converge", rel);
    return res;
}

}  // namespace prns
