#pragma once

#include <functional>

#include <Eigen/Core>

#include "prns/spaces.hpp"

namespace prns {

using GradientFunction = std::function<Eigen::Matrix2d(const Vec2&)>;

/// Closed-form solution of -nu Lap u + (rot u) x u + grad P = f, div u = 0,
/// with P the Bernoulli pressure. Row i of grad_u is the gradient of u_i.
struct AnalyticSolution {
    double nu = 1.0;
    VectorFunction u;
    GradientFunction grad_u;
    VectorFunction laplacian_u;
    ScalarFunction p;
    VectorFunction force;
};

/// Strong-form residual -nu Lap u + (rot u) x u + grad P - f, with the
/// derivatives of P taken by central differences of step h.
Vec2 strong_residual(const AnalyticSolution& s, const Vec2& x, double h = 1e-5);

/// lambda = Re/2 - sqrt(Re^2/4 + 4 pi^2), Re = 1/(2 nu).
double kovasznay_lambda(double nu);
/// Kovasznay flow on (-0.5,1.5) x (0,2) with P = -500 exp(2 lambda x) + |u|^2/2.
AnalyticSolution kovasznay(double nu);
/// u = 0, P = 2 x^2 (1-x) y (1-y), f = grad P.
AnalyticSolution noflow(double nu);
/// u = (-y, x), P = lambda x^6 + x^2 + y^2, nu = 1, f = (6 lambda x^5, 0).
AnalyticSolution irrotational(double lambda);
/// Solenoidal field u = curl(-cos(pi y)/pi + sin(pi x) sin(pi y)/(2 pi)) with
/// P = sin(pi x) cos(pi y) + x, for mixed-boundary tests on the unit square.
AnalyticSolution manufactured(double nu);

/// (p_kin I - nu grad u) n for the given solution and outward normal.
Vec2 outflow_traction(const AnalyticSolution& s, const Vec2& x, const Vec2& n);

}  // namespace prns
