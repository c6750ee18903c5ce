#include "prns/quadrature.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include <Eigen/Eigenvalues>

#include "prns/error.hpp"

namespace prns {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

TriangleRule build_triangle_rule(int degree) {
    // Collapsed (Duffy) product rule: eta ~ Gauss-Jacobi(1,0), xi = t (1 - eta)
    // with t ~ Gauss-Legendre. All weights are positive.
    const int n = std::max(1, (degree + 2) / 2);
    std::vector<double> xs, ws, xj, wj;
    gauss_jacobi(n, 0.0, 0.0, xs, ws);
    gauss_jacobi(n, 1.0, 0.0, xj, wj);
    TriangleRule rule;
    rule.exactness = degree;
    for (int j = 0; j < n; ++j) {
        const double eta = 0.5 * (1.0 + xj[j]);
        const double weta = 0.25 * wj[j];
        for (int i = 0; i < n; ++i) {
            const double t = 0.5 * (1.0 + xs[i]);
            rule.points.emplace_back(t * (1.0 - eta), eta);
            rule.weights.push_back(0.5 * ws[i] * weta);
        }
    }
    for (int a = 0; a <= degree; ++a) {
        for (int b = 0; a + b <= degree; ++b) {
            double s = 0.0;
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                s += rule.weights[q] * std::pow(rule.points[q].x(), a) * std::pow(rule.points[q].y(), b);
            }
            const double exact = reference_monomial_integral(a, b);
            if (std::abs(s - exact) > 1e-12 * exact) {
                throw Error("triangle rule of degree " + std::to_string(degree) + " fails exactness check");
            }
        }
    }
    return rule;
}

EdgeRule build_edge_rule(int degree) {
    const int n = std::max(1, (degree + 2) / 2);
    std::vector<double> xs, ws;
    gauss_jacobi(n, 0.0, 0.0, xs, ws);
    EdgeRule rule;
    rule.exactness = degree;
    for (int i = 0; i < n; ++i) {
        rule.points.push_back(0.5 * (1.0 + xs[i]));
        rule.weights.push_back(0.5 * ws[i]);
    }
    for (int a = 0; a <= degree; ++a) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.points[i], a);
        const double exact = 1.0 / (a + 1);
        if (std::abs(s - exact) > 1e-12 * exact) {
            throw Error("edge rule of degree " + std::to_string(degree) + " fails exactness check");
        }
    }
    return rule;
}

}  // namespace

double reference_monomial_integral(int a, int b) {
    return factorial(a) * factorial(b) / factorial(a + b + 2);
}

void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes, std::vector<double>& weights) {
    // Golub-Welsch on the monic Jacobi recurrence.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double d = 2.0 * k + ab;
        J(k, k) = (k == 0 && ab == 0.0) ? (beta - alpha) / (ab + 2.0)
                                         : (beta * beta - alpha * alpha) / (d * (d + 2.0));
        if (k + 1 < n) {
            const double m = k + 1.0;
            const double dm = 2.0 * m + ab;
            const double b = 4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (dm * dm * (dm + 1.0) * (dm - 1.0));
            J(k, k + 1) = J(k + 1, k) = std::sqrt(b);
        }
    }
    const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                       std::tgamma(ab + 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = eig.eigenvalues()(i);
        const double v0 = eig.eigenvectors()(0, i);
        weights[i] = mu0 * v0 * v0;
    }
}

const TriangleRule& triangle_rule(int degree) {
    if (degree < 0 || degree > kMaxTriangleDegree) {
        throw InvalidArgument("triangle quadrature degree " + std::to_string(degree) +
                              " unsupported (maximum " + std::to_string(kMaxTriangleDegree) + ")");
    }
    static std::array<std::unique_ptr<TriangleRule>, kMaxTriangleDegree + 1> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto& slot = cache[static_cast<std::size_t>(degree)];
    if (!slot) slot = std::make_unique<TriangleRule>(build_triangle_rule(degree));
    return *slot;
}

const EdgeRule& edge_rule(int degree) {
    if (degree < 0 || degree > kMaxEdgeDegree) {
        throw InvalidArgument("edge quadrature degree " + std::to_string(degree) + " unsupported (maximum " +
                              std::to_string(kMaxEdgeDegree) + ")");
    }
    static std::array<std::unique_ptr<EdgeRule>, kMaxEdgeDegree + 1> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto& slot = cache[static_cast<std::size_t>(degree)];
    if (!slot) slot = std::make_unique<EdgeRule>(build_edge_rule(degree));
    return *slot;
}

TriangleMap TriangleMap::of(const Mesh& mesh, int t) {
    const auto& tri = mesh.triangle(t);
    return of(mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2]));
}

TriangleMap TriangleMap::of(const Vec2& a, const Vec2& b, const Vec2& c) {
    TriangleMap m;
    m.origin = a;
    m.jacobian.col(0) = b - a;
    m.jacobian.col(1) = c - a;
    m.det = m.jacobian.determinant();
    const double scale = m.jacobian.cwiseAbs().maxCoeff();
    if (!(std::abs(m.det) > 1e-14 * scale * scale)) {
        throw GeometryError("degenerate triangle (zero area)");
    }
    m.inverse_transpose = m.jacobian.inverse().transpose();
    return m;
}

MappedRule map_to_physical(const TriangleRule& rule, const TriangleMap& map) {
    MappedRule out;
    out.rule = &rule;
    out.map = map;
    out.reference_points = rule.points;
    out.points.reserve(rule.points.size());
    out.weights.reserve(rule.points.size());
    const double jac = std::abs(map.det);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        out.points.push_back(map.to_physical(rule.points[q]));
        out.weights.push_back(rule.weights[q] * jac);
    }
    return out;
}

MappedEdgeRule map_to_physical(const EdgeRule& rule, const Vec2& a, const Vec2& b) {
    MappedEdgeRule out;
    out.length = (b - a).norm();
    if (!(out.length > 0.0)) throw GeometryError("degenerate edge (zero length)");
    out.tangent = (b - a) / out.length;
    out.parameters = rule.points;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        out.points.push_back(a + rule.points[q] * (b - a));
        out.weights.push_back(rule.weights[q] * out.length);
    }
    return out;
}

}  // namespace prns
