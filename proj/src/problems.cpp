#include "prns/problems.hpp"

#include <cmath>
#include <numbers>

namespace prns {

namespace {

constexpr double pi = std::numbers::pi;

Vec2 rot_cross(double omega, const Vec2& v) { return {-omega * v.y(), omega * v.x()}; }

}  // namespace

Vec2 strong_residual(const AnalyticSolution& s, const Vec2& x, double h) {
    const Vec2 ex(h, 0.0), ey(0.0, h);
    const Vec2 grad_p((s.p(x + ex) - s.p(x - ex)) / (2 * h), (s.p(x + ey) - s.p(x - ey)) / (2 * h));
    const Eigen::Matrix2d g = s.grad_u(x);
    const double omega = g(1, 0) - g(0, 1);
    return -s.nu * s.laplacian_u(x) + rot_cross(omega, s.u(x)) + grad_p - s.force(x);
}

double kovasznay_lambda(double nu) {
    const double re = 1.0 / (2.0 * nu);
    return re / 2.0 - std::sqrt(re * re / 4.0 + 4.0 * pi * pi);
}

AnalyticSolution kovasznay(double nu) {
    const double lam = kovasznay_lambda(nu);
    AnalyticSolution s;
    s.nu = nu;
    s.u = [lam](const Vec2& x) {
        const double e = std::exp(lam * x.x());
        return Vec2(1.0 - e * std::cos(2 * pi * x.y()), lam / (2 * pi) * e * std::sin(2 * pi * x.y()));
    };
    s.grad_u = [lam](const Vec2& x) {
        const double e = std::exp(lam * x.x());
        const double c = std::cos(2 * pi * x.y()), sn = std::sin(2 * pi * x.y());
        Eigen::Matrix2d g;
        g << -lam * e * c, 2 * pi * e * sn, lam * lam / (2 * pi) * e * sn, lam * e * c;
        return g;
    };
    s.laplacian_u = [lam](const Vec2& x) {
        const double e = std::exp(lam * x.x());
        const double c = std::cos(2 * pi * x.y()), sn = std::sin(2 * pi * x.y());
        const double f = lam * lam - 4 * pi * pi;
        return Vec2(-f * e * c, lam / (2 * pi) * f * e * sn);
    };
    const auto u = s.u;
    s.p = [lam, u](const Vec2& x) { return -500.0 * std::exp(2 * lam * x.x()) + 0.5 * u(x).squaredNorm(); };
    // f = -nu Lap u + (u . grad) u + grad p_kin with p_kin = -500 exp(2 lambda x).
    const auto grad = s.grad_u;
    const auto lap = s.laplacian_u;
    s.force = [lam, nu, u, grad, lap](const Vec2& x) {
        const Vec2 conv = grad(x) * u(x);
        const Vec2 grad_p(-1000.0 * lam * std::exp(2 * lam * x.x()), 0.0);
        return Vec2(-nu * lap(x) + conv + grad_p);
    };
    return s;
}

AnalyticSolution noflow(double nu) {
    AnalyticSolution s;
    s.nu = nu;
    s.u = [](const Vec2&) { return Vec2(0.0, 0.0); };
    s.grad_u = [](const Vec2&) { return Eigen::Matrix2d::Zero().eval(); };
    s.laplacian_u = s.u;
    s.p = [](const Vec2& x) { return 2 * x.x() * x.x() * (1 - x.x()) * x.y() * (1 - x.y()); };
    s.force = [](const Vec2& x) {
        const double a = x.x(), b = x.y();
        return Vec2((4 * a - 6 * a * a) * b * (1 - b), 2 * a * a * (1 - a) * (1 - 2 * b));
    };
    return s;
}

AnalyticSolution irrotational(double lambda) {
    AnalyticSolution s;
    s.nu = 1.0;
    s.u = [](const Vec2& x) { return Vec2(-x.y(), x.x()); };
    s.grad_u = [](const Vec2&) {
        Eigen::Matrix2d g;
        g << 0.0, -1.0, 1.0, 0.0;
        return g;
    };
    s.laplacian_u = [](const Vec2&) { return Vec2(0.0, 0.0); };
    s.p = [lambda](const Vec2& x) { return lambda * std::pow(x.x(), 6) + x.x() * x.x() + x.y() * x.y(); };
    s.force = [lambda](const Vec2& x) { return Vec2(6 * lambda * std::pow(x.x(), 5), 0.0); };
    return s;
}

AnalyticSolution manufactured(double nu) {
    AnalyticSolution s;
    s.nu = nu;
    s.u = [](const Vec2& x) {
        const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
        const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
        return Vec2(sy + 0.5 * sx * cy, -0.5 * cx * sy);
    };
    s.grad_u = [](const Vec2& x) {
        const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
        const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
        Eigen::Matrix2d g;
        g << 0.5 * pi * cx * cy, pi * cy - 0.5 * pi * sx * sy, 0.5 * pi * sx * sy, -0.5 * pi * cx * cy;
        return g;
    };
    s.laplacian_u = [](const Vec2& x) {
        const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
        const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
        return Vec2(-pi * pi * sy - pi * pi * sx * cy, pi * pi * cx * sy);
    };
    s.p = [](const Vec2& x) { return std::sin(pi * x.x()) * std::cos(pi * x.y()) + x.x(); };
    const auto u = s.u;
    s.force = [nu, u](const Vec2& x) {
        const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
        const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
        const Vec2 lap(-pi * pi * sy - pi * pi * sx * cy, pi * pi * cx * sy);
        const double omega = pi * sx * sy - pi * cy;
        const Vec2 grad_p(pi * cx * cy + 1.0, -pi * sx * sy);
        return Vec2(-nu * lap + rot_cross(omega, u(x)) + grad_p);
    };
    return s;
}

Vec2 outflow_traction(const AnalyticSolution& s, const Vec2& x, const Vec2& n) {
    const double p_kin = s.p(x) - 0.5 * s.u(x).squaredNorm();
    return p_kin * n - s.nu * s.grad_u(x) * n;
}

}  // namespace prns
