#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "prns/spaces.hpp"

namespace prns {

/// Divergence-preserving reconstruction of the bubble-enriched velocity space
/// into BDM_k. For each element T the operator is stored as a matrix acting on
/// the local velocity coefficients [x-component locals, y-component locals]
/// and producing coefficients in the vector monomial basis of [P_k(T)]^2,
/// written in the scaled coordinates (x - centroid) / diam(T).
///
/// Degrees of freedom of R(v): normal moments against P_k on every edge (using
/// the globally oriented edge normal, so traces are continuous) and k^2 - 1
/// interior moments, see InteriorMoments.
///
/// Holds a reference to the velocity space.
class Reconstruction {
public:
    /// Interior test spaces of dimension k^2 - 1. Both contain grad P_{k-1},
    /// which is what makes R(V_h) divergence free.
    enum class InteriorMoments {
        /// First-kind Nedelec space [P_{k-2}]^2 + x^perp P~_{k-2}, so v - R(v) is
        /// orthogonal to [P_{k-2}]^2 elementwise.
        nedelec,
        /// grad P_{k-1} + curl(b_T P_{k-2}). For k >= 3 this misses part of
        /// [P_{k-2}]^2 and the consistency error loses one order.
        gradient_curl,
    };

    explicit Reconstruction(const FunctionSpace& velocity, InteriorMoments moments = InteriorMoments::nedelec);

    InteriorMoments interior_moments() const { return moments_; }

    const FunctionSpace& space() const { return *space_; }
    int degree() const { return k_; }
    /// dim [P_k]^2
    int target_dim() const { return 2 * poly_dim(k_); }
    const Eigen::MatrixXd& local_operator(int t) const { return ops_[t]; }

    struct Values {
        Eigen::MatrixXd x;    // nq x (2 nloc): x-component of R(phi_i)
        Eigen::MatrixXd y;
        Eigen::MatrixXd div;  // divergence of R(phi_i)
    };
    Values evaluate(int t, std::span<const Vec2> points) const;

    /// R(u) at a physical point of element t.
    Vec2 apply(const DiscreteField& u, int t, const Vec2& x) const;
    double apply_divergence(const DiscreteField& u, int t, const Vec2& x) const;

private:
    void build_element(int t);
    Eigen::VectorXd local_coefficients(const DiscreteField& u, int t) const;

    const FunctionSpace* space_;
    int k_;
    InteriorMoments moments_;
    std::vector<Vec2> centers_;
    std::vector<double> scales_;
    std::vector<Eigen::MatrixXd> ops_;
};

}  // namespace prns
