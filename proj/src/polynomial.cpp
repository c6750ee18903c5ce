#include "prns/polynomial.hpp"

#include <algorithm>
#include <array>

namespace prns {

Poly2::Poly2(int degree) : degree_(std::max(0, degree)), c_(static_cast<std::size_t>(poly_dim(degree_)), 0.0) {}

Poly2 Poly2::constant(double c) {
    Poly2 p(0);
    p.c_[0] = c;
    return p;
}

Poly2 Poly2::monomial(int a, int b, double c) {
    Poly2 p(a + b);
    p.set_coeff(a, b, c);
    return p;
}

Poly2 Poly2::affine(double c0, double cx, double cy) {
    Poly2 p(1);
    p.set_coeff(0, 0, c0);
    p.set_coeff(1, 0, cx);
    p.set_coeff(0, 1, cy);
    return p;
}

double Poly2::coeff(int a, int b) const {
    if (a < 0 || b < 0 || a + b > degree_) return 0.0;
    return c_[static_cast<std::size_t>(index(a, b))];
}

void Poly2::set_coeff(int a, int b, double v) { c_[static_cast<std::size_t>(index(a, b))] = v; }

double Poly2::operator()(const Vec2& p) const {
    // Horner in y for each power of x.
    double s = 0.0;
    double xa = 1.0;
    for (int a = 0; a <= degree_; ++a) {
        double inner = 0.0;
        for (int b = degree_ - a; b >= 0; --b) inner = inner * p.y() + coeff(a, b);
        s += xa * inner;
        xa *= p.x();
    }
    return s;
}

Vec2 Poly2::gradient(const Vec2& p) const { return {dx()(p), dy()(p)}; }

Poly2 Poly2::dx() const {
    Poly2 r(degree_ - 1);
    for (int a = 1; a <= degree_; ++a)
        for (int b = 0; a + b <= degree_; ++b) r.set_coeff(a - 1, b, a * coeff(a, b));
    return r;
}

Poly2 Poly2::dy() const {
    Poly2 r(degree_ - 1);
    for (int a = 0; a <= degree_; ++a)
        for (int b = 1; a + b <= degree_; ++b) r.set_coeff(a, b - 1, b * coeff(a, b));
    return r;
}

Poly2 Poly2::operator+(const Poly2& o) const {
    Poly2 r(std::max(degree_, o.degree_));
    for (int a = 0; a <= r.degree_; ++a)
        for (int b = 0; a + b <= r.degree_; ++b) r.set_coeff(a, b, coeff(a, b) + o.coeff(a, b));
    return r;
}

Poly2 Poly2::operator-(const Poly2& o) const { return *this + o * -1.0; }

Poly2 Poly2::operator*(const Poly2& o) const {
    Poly2 r(degree_ + o.degree_);
    for (int a = 0; a <= degree_; ++a)
        for (int b = 0; a + b <= degree_; ++b) {
            const double c = coeff(a, b);
            if (c == 0.0) continue;
            for (int e = 0; e <= o.degree_; ++e)
                for (int f = 0; e + f <= o.degree_; ++f)
                    r.c_[static_cast<std::size_t>(index(a + e, b + f))] += c * o.coeff(e, f);
        }
    return r;
}

Poly2 Poly2::operator*(double s) const {
    Poly2 r = *this;
    for (auto& c : r.c_) c *= s;
    return r;
}

std::vector<std::array<int, 2>> monomial_exponents(int m) {
    std::vector<std::array<int, 2>> out;
    for (int d = 0; d <= m; ++d)
        for (int b = 0; b <= d; ++b) out.push_back({d - b, b});
    return out;
}

void eval_monomials(int m, const Vec2& p, Eigen::Ref<Eigen::VectorXd> values, Eigen::Ref<Eigen::VectorXd> dx,
                    Eigen::Ref<Eigen::VectorXd> dy) {
    std::array<double, 32> xp{}, yp{};
    xp[0] = yp[0] = 1.0;
    for (int i = 1; i <= m; ++i) {
        xp[i] = xp[i - 1] * p.x();
        yp[i] = yp[i - 1] * p.y();
    }
    int k = 0;
    for (int d = 0; d <= m; ++d)
        for (int b = 0; b <= d; ++b, ++k) {
            const int a = d - b;
            values[k] = xp[a] * yp[b];
            dx[k] = a > 0 ? a * xp[a - 1] * yp[b] : 0.0;
            dy[k] = b > 0 ? b * xp[a] * yp[b - 1] : 0.0;
        }
}

void shifted_legendre(int n, double s, Eigen::Ref<Eigen::VectorXd> out) {
    const double x = 2.0 * s - 1.0;
    out[0] = 1.0;
    if (n >= 1) out[1] = x;
    for (int j = 2; j <= n; ++j) out[j] = ((2.0 * j - 1.0) * x * out[j - 1] - (j - 1.0) * out[j - 2]) / j;
}

}  // namespace prns
