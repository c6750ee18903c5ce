#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "prns/mesh.hpp"
#include "prns/polynomial.hpp"
#include "prns/quadrature.hpp"

namespace prns {

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// Scalar basis on the reference triangle: nodal P_m functions, optionally
/// followed by interior bubbles lambda0 lambda1 lambda2 * xi^i eta^(m-2-i).
///
/// Local order: the three vertices, then the m-1 nodes of each local edge
/// (edge i runs from vertex (i+1)%3 to (i+2)%3), then the interior lattice
/// nodes, then the bubbles.
class ReferenceElement {
public:
    struct Table {
        Eigen::MatrixXd values;  // nq x nb
        Eigen::MatrixXd dxi;
        Eigen::MatrixXd deta;
    };

    static const ReferenceElement& lagrange(int m);
    static const ReferenceElement& lagrange_bubble(int k);

    int degree() const { return degree_; }
    int max_degree() const { return max_degree_; }
    int num_functions() const { return static_cast<int>(coeffs_.cols()); }
    int num_nodal() const { return static_cast<int>(nodes_.size()); }
    int num_bubbles() const { return num_functions() - num_nodal(); }
    int num_interior() const { return num_functions() - 3 - 3 * (degree_ - 1); }
    const std::vector<Vec2>& nodes() const { return nodes_; }

    void eval(const Vec2& xi, Eigen::Ref<Eigen::VectorXd> values, Eigen::Ref<Eigen::VectorXd> dxi,
              Eigen::Ref<Eigen::VectorXd> deta) const;
    /// Cached per rule; the reference stays valid while the element lives.
    const Table& tabulate(const TriangleRule& rule) const;

private:
    ReferenceElement(int m, bool bubbles);

    int degree_;
    int max_degree_;
    std::vector<Vec2> nodes_;
    Eigen::MatrixXd coeffs_;  // monomials(max_degree) x functions
    mutable std::map<const TriangleRule*, std::unique_ptr<Table>> tables_;
};

/// Physical-coordinate basis values for one element.
struct ElementBasis {
    Eigen::MatrixXd values;  // nq x nloc
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dy;
};

enum class SpaceKind { lagrange, lagrange_bubble, discontinuous };

/// Scalar or vector finite element space on a mesh. Vector spaces number all
/// x-component dofs first, then all y-component dofs. Holds a reference to the
/// mesh, which must outlive the space.
class FunctionSpace {
public:
    /// Continuous P_m, m >= 1.
    static FunctionSpace lagrange(const Mesh& mesh, int m, int components = 1);
    /// Continuous P_k enriched by k-1 interior bubbles per element, k >= 2.
    static FunctionSpace velocity(const Mesh& mesh, int k);
    /// Discontinuous P_m with an L2-orthonormalised monomial basis per element.
    static FunctionSpace discontinuous(const Mesh& mesh, int m);

    const Mesh& mesh() const { return *mesh_; }
    SpaceKind kind() const { return kind_; }
    int degree() const { return degree_; }
    int components() const { return components_; }
    int scalar_dim() const { return scalar_dim_; }
    int dim() const { return components_ * scalar_dim_; }
    int local_size() const { return local_size_; }
    /// Global scalar dofs of element t in local order.
    std::span<const int> element_dofs(int t) const {
        return {dofs_.data() + static_cast<std::size_t>(t) * local_size_, static_cast<std::size_t>(local_size_)};
    }
    /// Reference element; null for discontinuous spaces.
    const ReferenceElement* reference() const { return ref_; }

    ElementBasis tabulate(int t, const MappedRule& rule) const;
    ElementBasis tabulate_at(int t, std::span<const Vec2> points) const;

    bool is_nodal(int scalar_dof) const { return nodal_[scalar_dof]; }
    const Vec2& node_point(int scalar_dof) const { return node_points_[scalar_dof]; }
    /// Nodal scalar dofs lying on edges with the given tag.
    std::vector<int> boundary_dofs(const std::string& tag) const;

private:
    FunctionSpace() = default;
    void number_continuous();
    void build_discontinuous();

    const Mesh* mesh_ = nullptr;
    SpaceKind kind_ = SpaceKind::lagrange;
    int degree_ = 1;
    int components_ = 1;
    int scalar_dim_ = 0;
    int local_size_ = 0;
    const ReferenceElement* ref_ = nullptr;
    std::vector<int> dofs_;
    std::vector<char> nodal_;
    std::vector<Vec2> node_points_;
    // Discontinuous: per element centroid, diameter and orthonormalising map.
    std::vector<Vec2> centers_;
    std::vector<double> scales_;
    std::vector<Eigen::MatrixXd> transforms_;
};

/// Coefficient vector over a space.
class DiscreteField {
public:
    explicit DiscreteField(const FunctionSpace& space);
    DiscreteField(const FunctionSpace& space, Eigen::VectorXd coefficients);

    const FunctionSpace& space() const { return *space_; }
    Eigen::VectorXd& coefficients() { return coeffs_; }
    const Eigen::VectorXd& coefficients() const { return coeffs_; }

    /// Component values at physical x inside element t (y entry unused for scalars).
    Vec2 value(int t, const Vec2& x) const;
    /// Row c holds the gradient of component c.
    Eigen::Matrix2d gradient(int t, const Vec2& x) const;

private:
    const FunctionSpace* space_;
    Eigen::VectorXd coeffs_;
};

/// Nodal interpolation for Lagrange parts; bubble coefficients from the local
/// L2 projection of the nodal residual; L2 projection for discontinuous spaces.
DiscreteField interpolate(const FunctionSpace& space, const ScalarFunction& f);
DiscreteField interpolate(const FunctionSpace& space, const VectorFunction& f);

struct DirichletData {
    std::string tag;
    VectorFunction value;
};

/// Global (vector) dof -> prescribed value.
using DirichletValues = std::map<int, double>;

/// Applies the data in order; nodes shared by several tags keep the value of
/// the last entry. Throws InvalidArgument for tags not present on the mesh.
DirichletValues set_dirichlet_values(const FunctionSpace& space, const std::vector<DirichletData>& data);

}  // namespace prns
