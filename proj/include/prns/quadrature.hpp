#pragma once

#include <vector>

#include <Eigen/Core>

#include "prns/mesh.hpp"

namespace prns {

/// Rule on the reference triangle {(0,0),(1,0),(0,1)}; weights sum to 1/2.
struct TriangleRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int exactness = 0;
};

/// Rule on [0,1]; weights sum to 1.
struct EdgeRule {
    std::vector<double> points;
    std::vector<double> weights;
    int exactness = 0;
};

inline constexpr int kMaxTriangleDegree = 20;
inline constexpr int kMaxEdgeDegree = 40;

/// Positive-weight rule exact for polynomials of total degree <= `degree`.
/// Rules are built once, checked against the closed-form monomial integrals
/// and cached; the returned reference stays valid for the program lifetime.
const TriangleRule& triangle_rule(int degree);

/// Gauss-Legendre rule on [0,1] exact up to `degree`.
const EdgeRule& edge_rule(int degree);

/// Closed form of the reference-triangle integral of xi^a eta^b.
double reference_monomial_integral(int a, int b);

/// Gauss-Jacobi nodes/weights for the weight (1-x)^alpha (1+x)^beta on [-1,1].
void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes, std::vector<double>& weights);

/// Affine map x = origin + J * xi from the reference triangle.
struct TriangleMap {
    Vec2 origin;
    Eigen::Matrix2d jacobian;
    Eigen::Matrix2d inverse_transpose;
    double det = 0.0;

    static TriangleMap of(const Mesh& mesh, int t);
    static TriangleMap of(const Vec2& a, const Vec2& b, const Vec2& c);

    Vec2 to_physical(const Vec2& xi) const { return origin + jacobian * xi; }
    Vec2 to_reference(const Vec2& x) const { return inverse_transpose.transpose() * (x - origin); }
};

struct MappedRule {
    const TriangleRule* rule = nullptr;
    TriangleMap map;
    std::vector<Vec2> points;
    std::vector<Vec2> reference_points;
    std::vector<double> weights;  // scaled by |det J|
};

struct MappedEdgeRule {
    std::vector<Vec2> points;
    std::vector<double> parameters;  // position along a -> b in [0,1]
    std::vector<double> weights;     // scaled by the edge length
    double length = 0.0;
    Vec2 tangent;  // unit, from a to b
};

/// Throws GeometryError for zero-area triangles.
MappedRule map_to_physical(const TriangleRule& rule, const TriangleMap& map);
/// Throws GeometryError for zero-length edges.
MappedEdgeRule map_to_physical(const EdgeRule& rule, const Vec2& a, const Vec2& b);

}  // namespace prns
