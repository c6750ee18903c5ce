#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace prns {

using Vec2 = Eigen::Vector2d;

/// Dense bivariate polynomial sum_{a+b<=degree} c_ab x^a y^b.
class Poly2 {
public:
    explicit Poly2(int degree = 0);

    static Poly2 constant(double c);
    static Poly2 monomial(int a, int b, double c = 1.0);
    /// c0 + cx x + cy y
    static Poly2 affine(double c0, double cx, double cy);

    int degree() const { return degree_; }
    double coeff(int a, int b) const;
    void set_coeff(int a, int b, double v);

    double operator()(const Vec2& p) const;
    Vec2 gradient(const Vec2& p) const;
    Poly2 dx() const;
    Poly2 dy() const;

    Poly2 operator+(const Poly2& o) const;
    Poly2 operator-(const Poly2& o) const;
    Poly2 operator*(const Poly2& o) const;
    Poly2 operator*(double s) const;

private:
    static int index(int a, int b) { const int d = a + b; return d * (d + 1) / 2 + b; }

    int degree_;
    std::vector<double> c_;
};

/// Number of monomials of total degree <= m.
constexpr int poly_dim(int m) { return m < 0 ? 0 : (m + 1) * (m + 2) / 2; }

/// Exponents (a, b) of the monomials of total degree <= m, ordered by total
/// degree then by increasing b.
std::vector<std::array<int, 2>> monomial_exponents(int m);

/// Values and first derivatives of the monomials of degree <= m at p.
void eval_monomials(int m, const Vec2& p, Eigen::Ref<Eigen::VectorXd> values,
                    Eigen::Ref<Eigen::VectorXd> dx, Eigen::Ref<Eigen::VectorXd> dy);

/// Shifted Legendre polynomials on [0,1], P_0..P_n at s.
void shifted_legendre(int n, double s, Eigen::Ref<Eigen::VectorXd> out);

}  // namespace prns
