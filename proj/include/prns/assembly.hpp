#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "prns/linalg.hpp"
#include "prns/mesh.hpp"
#include "prns/quadrature.hpp"
#include "prns/reconstruction.hpp"
#include "prns/spaces.hpp"

namespace prns {

/// Quadrature degree per form; values < 0 select the defaults for degree k.
struct QuadratureDegrees {
    int bilinear = -1;   // default 2(k+1)
    int trilinear = -1;  // default 3(k+1)-1
    int rhs = -1;        // default 2(k+1)+4
};

struct SolverConfig {
    double nu = 1.0;
    int max_newton = 20;
    double tol = 1e-10;
    bool reconstruction = true;
    Reconstruction::InteriorMoments interior_moments = Reconstruction::InteriorMoments::nedelec;
    /// Boundary tags carrying the do-nothing condition (p_kin I - nu grad u) n = g.
    std::vector<std::string> outflow_tags;
    /// Include 1/2 <|u|^2, v.n> on the outflow boundary. Off only for negative controls.
    bool outflow_convection = true;
    QuadratureDegrees quadrature;
    /// Newton fails once the increment has grown this many consecutive times.
    int divergence_window = 3;
};

struct ProblemData {
    VectorFunction force;  // null means zero
    std::vector<DirichletData> dirichlet;
    /// Outflow traction g, with (p_kin I - nu grad u) n = g; null means zero.
    VectorFunction outflow_traction;
};

/// Spaces, reconstruction, quadrature and problem data shared by all forms.
/// Not copyable or movable: the reconstruction refers to the velocity space.
class FormContext {
public:
    FormContext(const Mesh& mesh, int k, SolverConfig config, ProblemData data);
    FormContext(const FormContext&) = delete;
    FormContext& operator=(const FormContext&) = delete;

    const Mesh& mesh() const { return *mesh_; }
    int degree() const { return k_; }
    const SolverConfig& config() const { return config_; }
    const ProblemData& data() const { return data_; }
    double nu() const { return config_.nu; }
    void set_nu(double nu);

    const FunctionSpace& velocity() const { return velocity_; }
    const FunctionSpace& pressure() const { return pressure_; }
    /// Null for the classical method.
    const Reconstruction* reconstruction() const { return recon_.get(); }

    int num_velocity() const { return velocity_.dim(); }
    int num_pressure() const { return pressure_.dim(); }
    bool has_multiplier() const { return config_.outflow_tags.empty(); }
    int system_size() const { return num_velocity() + num_pressure() + (has_multiplier() ? 1 : 0); }

    const TriangleRule& bilinear_rule() const { return triangle_rule(deg_bilinear_); }
    const TriangleRule& trilinear_rule() const { return triangle_rule(deg_trilinear_); }
    const TriangleRule& rhs_rule() const { return triangle_rule(deg_rhs_); }

    /// Outflow edges with their adjacent triangle, local index and outward normal.
    struct BoundaryEdge {
        int edge;
        int triangle;
        Vec2 normal;
    };
    const std::vector<BoundaryEdge>& outflow_edges() const { return outflow_edges_; }

    /// Test-function data on element t: velocity basis, reconstructed (or
    /// plain, for the classical method) vector values, global vector dofs.
    struct ElementValues {
        MappedRule rule;
        ElementBasis basis;      // scalar velocity basis, nq x nloc
        Eigen::MatrixXd tx, ty;  // nq x 2 nloc
        std::vector<int> dofs;   // 2 nloc global vector dofs
    };
    ElementValues element_values(int t, const TriangleRule& rule) const;
    std::vector<int> vector_dofs(int t) const;

private:
    const Mesh* mesh_;
    int k_;
    SolverConfig config_;
    ProblemData data_;
    FunctionSpace velocity_;
    FunctionSpace pressure_;
    std::unique_ptr<Reconstruction> recon_;
    int deg_bilinear_;
    int deg_trilinear_;
    int deg_rhs_;
    std::vector<BoundaryEdge> outflow_edges_;
};

/// Builds the bubble-enriched velocity space, k in {2,3,4}.
FunctionSpace build_velocity_space(const Mesh& mesh, int k);
/// Builds the discontinuous P_{k-1} pressure space, k in {2,3,4}.
FunctionSpace build_pressure_space(const Mesh& mesh, int k);

// Individual blocks. Velocity vectors are in the velocity space numbering.

/// (grad u, grad v), unscaled by nu.
SparseMatrix assemble_viscous(const FormContext& ctx);
/// B[q][v] = -(q, div v).
SparseMatrix assemble_div(const FormContext& ctx);
/// Velocity mass matrix (both components).
SparseMatrix assemble_velocity_mass(const FormContext& ctx);
SparseMatrix assemble_pressure_mass(const FormContext& ctx);

struct Contribution {
    SparseMatrix matrix;  // linearisation at the given state
    Eigen::VectorXd rhs;  // value of the form at the given state, i.e. F(u;u,v_i)
};

/// Matrix b_h(u; phi_j, phi_i) + b_h(phi_j; u, phi_i) and vector b_h(u; u, phi_i).
Contribution assemble_trilinear_newton(const FormContext& ctx, const Eigen::VectorXd& u);
/// Matrix c(u, phi_j, phi_i) + c(phi_j, u, phi_i) and vector c(u, u, phi_i).
Contribution assemble_outflow_term(const FormContext& ctx, const Eigen::VectorXd& u);
/// (f, R phi_i), or (f, phi_i) for the classical method.
Eigen::VectorXd assemble_rhs(const FormContext& ctx);
/// <g, phi_i> over the outflow boundary.
Eigen::VectorXd assemble_outflow_traction(const FormContext& ctx);

/// b_h(w; z, v) for velocity coefficient vectors.
double trilinear_form(const FormContext& ctx, const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                      const Eigen::VectorXd& v);

struct LinearSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    DirichletValues constrained;
};

/// Eliminates constrained dofs symmetrically: their columns move to the right
/// hand side and their rows become identity rows. Throws InvalidArgument for
/// constraint indices outside the system.
LinearSystem finalize_system(SparseMatrix matrix, Eigen::VectorXd rhs, const DirichletValues& constrained);

/// Full saddle-point systems on a fixed sparsity pattern over
/// [velocity, pressure, optional mean multiplier].
class SystemAssembler {
public:
    explicit SystemAssembler(const FormContext& ctx);

    const FormContext& context() const { return *ctx_; }
    int size() const { return ctx_->system_size(); }

    /// Jacobian J and residual F at state x. With convection off this is the
    /// Stokes operator and F its residual.
    void linearize(const Eigen::VectorXd& x, bool convection, SparseMatrix& jacobian, Eigen::VectorXd& residual) const;

    /// J d = -F with d fixed to (g - x) on Dirichlet dofs.
    LinearSystem correction_system(const Eigen::VectorXd& x, bool convection, const DirichletValues& bc) const;

    const SparseMatrix& velocity_mass() const { return mass_u_; }
    const SparseMatrix& pressure_mass() const { return mass_p_; }

private:
    const FormContext* ctx_;
    SparseMatrix pattern_;
    std::vector<double> viscous_;  // values on pattern_
    std::vector<double> coupling_;
    Eigen::VectorXd load_;
    SparseMatrix mass_u_;
    SparseMatrix mass_p_;
};

}  // namespace prns
