#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>

#include "prns/assembly.hpp"
#include "prns/error.hpp"
#include "prns/linalg.hpp"
#include "prns/solver.hpp"

using namespace prns;

namespace {

SparseMatrix random_sparse(int n, double density, double diag_boost, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0), pick(0.0, 1.0);
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, diag_boost + val(gen)});
        for (int j = 0; j < n; ++j)
            if (i != j && pick(gen) < density) t.push_back({i, j, val(gen)});
    }
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

/// Plain conjugate gradients, used as an independent oracle.
Eigen::VectorXd cg(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size()), r = b, p = r;
    double rr = r.squaredNorm();
    for (int it = 0; it < 10 * b.size() && std::sqrt(rr) > 1e-14 * b.norm(); ++it) {
        const Eigen::VectorXd ap = a * p;
        const double alpha = rr / p.dot(ap);
        x += alpha * p;
        r -= alpha * ap;
        const double rr2 = r.squaredNorm();
        p = r + (rr2 / rr) * p;
        rr = rr2;
    }
    return x;
}

}  // namespace

TEST(Linalg, DuplicateTripletsAreSummed) {
    const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, -1.0}});
    EXPECT_EQ(a.nnz(), 2);
    EXPECT_EQ(a.coeff(0, 0), 3.0);
    EXPECT_EQ(a.coeff(1, 0), -1.0);
    EXPECT_EQ(a.coeff(1, 1), 0.0);
    EXPECT_EQ(a.find(0, 1), -1);
}

TEST(Linalg, EmptyTriplets) {
    const SparseMatrix a = SparseMatrix::from_triplets(3, 4, {});
    EXPECT_EQ(a.nnz(), 0);
    EXPECT_EQ(a.row_ptr(), (std::vector<int>{0, 0, 0, 0}));
    EXPECT_TRUE(a.to_dense().isZero());
}

TEST(Linalg, TripletIndexValidation) {
    EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), InvalidArgument);
    SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}});
    EXPECT_THROW(a.add(1, 1, 1.0), InvalidArgument);
}

TEST(Linalg, RandomDenseOracle) {
    std::mt19937 gen(3);
    std::uniform_int_distribution<int> idx(0, 99);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<Triplet> t;
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(100, 100);
    for (int n = 0; n < 2000; ++n) {
        const Triplet e{idx(gen), idx(gen), val(gen)};
        dense(e.row, e.col) += e.value;
        t.push_back(e);
    }
    const SparseMatrix a = SparseMatrix::from_triplets(100, 100, t);
    EXPECT_LT((a.to_dense() - dense).norm(), 1e-13);
    for (int r = 0; r < a.rows(); ++r)
        for (int p = a.row_ptr()[r] + 1; p < a.row_ptr()[r + 1]; ++p) EXPECT_LT(a.col_idx()[p - 1], a.col_idx()[p]);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(100, -1.0, 2.0);
    EXPECT_LT((a * x - dense * x).norm(), 1e-12);
    EXPECT_LT((a.transpose().to_dense() - dense.transpose()).norm(), 1e-13);
}

TEST(Linalg, IdentitySolve) {
    std::vector<Triplet> t;
    for (int i = 0; i < 5; ++i) t.push_back({i, i, 1.0});
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0);
    EXPECT_EQ(lu_solve(SparseMatrix::from_triplets(5, 5, t), b), b);
}

TEST(Linalg, SaddleNeedsPivoting) {
    const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
    const Eigen::VectorXd x = lu_solve(a, Eigen::Vector2d(1.0, 2.0));
    EXPECT_NEAR(x[0], 2.0, 1e-15);
    EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(Linalg, SpdMatchesConjugateGradient) {
    const SparseMatrix r = random_sparse(200, 0.02, 0.0, 17);
    const Eigen::MatrixXd rd = r.to_dense();
    Eigen::MatrixXd spd = rd.transpose() * rd + 200.0 * Eigen::MatrixXd::Identity(200, 200) * 0.05;
    std::vector<Triplet> t;
    for (int i = 0; i < 200; ++i)
        for (int j = 0; j < 200; ++j)
            if (spd(i, j) != 0.0) t.push_back({i, j, spd(i, j)});
    const SparseMatrix a = SparseMatrix::from_triplets(200, 200, t);
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(200, -3.0, 1.0);
    EXPECT_LT((lu_solve(a, b) - cg(spd, b)).norm() / cg(spd, b).norm(), 1e-8);
}

TEST(Linalg, RandomRecovery) {
    for (unsigned s = 0; s < 20; ++s) {
        const SparseMatrix a = random_sparse(150, 0.03, 4.0, 1000 + s);
        const Eigen::VectorXd x0 = Eigen::VectorXd::LinSpaced(150, -1.0, 1.0) + Eigen::VectorXd::Constant(150, 0.1 * s);
        const Eigen::VectorXd x = lu_solve(a, a * x0);
        EXPECT_LT((x - x0).norm() / x0.norm(), 1e-9);
        // Determinism.
        EXPECT_EQ(x, lu_solve(a, a * x0));
    }
}

TEST(Linalg, ResidualBound) {
    const SparseMatrix a = random_sparse(300, 0.01, 0.5, 77);
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(300);
    const Eigen::VectorXd x = lu_solve(a, b);
    double amax = 0.0;
    for (double v : a.values()) amax = std::max(amax, std::abs(v));
    EXPECT_LE((a * x - b).norm(), 1e-9 * (amax * x.norm() + b.norm()));
}

TEST(Linalg, FactorReuse) {
    SparseMatrix a = random_sparse(80, 0.05, 3.0, 5);
    LuSolver lu;
    lu.factor(a);
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(80);
    const Eigen::VectorXd x1 = lu.solve(b);
    for (double& v : a.values()) v *= 2.0;
    lu.factor(a);
    EXPECT_LT((lu.solve(b) - 0.5 * x1).norm(), 1e-12);
}

TEST(Linalg, SingularMatrix) {
    const SparseMatrix a = SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 0, 1.0}, {2, 1, 1.0}});
    EXPECT_THROW(lu_solve(a, Eigen::Vector3d(1, 2, 3)), SingularMatrixError);
    try {
        lu_solve(SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}}), Eigen::Vector2d(1, 1));
        FAIL();
    } catch (const SingularMatrixError& e) {
        EXPECT_GE(e.pivot(), 0);
    }
}

TEST(Linalg, GmresDiagonalJacobi) {
    std::vector<Triplet> t;
    for (int i = 0; i < 50; ++i) t.push_back({i, i, 1.0 + i});
    GmresOptions o;
    o.preconditioner = Preconditioner::jacobi;
    const GmresResult r = gmres(SparseMatrix::from_triplets(50, 50, t), Eigen::VectorXd::Ones(50), o);
    EXPECT_LE(r.iterations, 2);
    EXPECT_NEAR(r.x[9], 0.1, 1e-12);
}

TEST(Linalg, GmresRejectsZeroTolerance) {
    GmresOptions o;
    o.tol = 0.0;
    EXPECT_THROW(gmres(SparseMatrix::from_triplets(1, 1, {{0, 0, 1.0}}), Eigen::VectorXd::Ones(1), o), InvalidArgument);
}

TEST(Linalg, GmresReportsStagnation) {
    const SparseMatrix a = random_sparse(100, 0.05, 0.0, 9);
    GmresOptions o;
    o.max_iter = 3;
    o.restart = 3;
    try {
        gmres(a, Eigen::VectorXd::Ones(100), o);
        FAIL();
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.achieved(), o.tol);
    }
}

TEST(Linalg, GmresMatchesLuOnStokes) {
    DomainSpec s;
    s.nx = s.ny = 3;
    const Mesh m = generate_structured(s);
    SolverConfig cfg;
    ProblemData data;
    data.force = [](const Vec2& x) { return Vec2(x.y(), -x.x() * x.x()); };
    const VectorFunction zero = [](const Vec2&) { return Vec2(0, 0); };
    for (const auto& tag : m.tags()) data.dirichlet.push_back({tag, zero});
    const FormContext ctx(m, 2, cfg, data);
    ASSERT_GT(ctx.system_size(), 100);
    ASSERT_LT(ctx.system_size(), 1000);
    const SystemAssembler sa(ctx);
    const LinearSystem sys = sa.correction_system(Eigen::VectorXd::Zero(sa.size()), false, boundary_values(ctx));
    const Eigen::VectorXd direct = lu_solve(sys.matrix, sys.rhs);
    GmresOptions o;
    o.tol = 1e-13;
    o.restart = sa.size();
    o.max_iter = 4 * sa.size();
    const GmresResult r = gmres(sys.matrix, sys.rhs, o);
    EXPECT_LT((r.x - direct).norm() / direct.norm(), 1e-8);
}
