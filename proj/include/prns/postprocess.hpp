#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "prns/problems.hpp"
#include "prns/spaces.hpp"

namespace prns {

struct ErrorNorms {
    double l2 = 0.0;
    double h1 = 0.0;  // seminorm
};

/// ||u - u_h||_0 and ||grad(u - u_h)||_0 of a vector field, by quadrature of
/// the given degree (default 2(k+1)+4 for the space degree k).
ErrorNorms error_norms(const DiscreteField& u, const VectorFunction& exact, const GradientFunction& grad,
                       int degree = -1);

/// ||p - p_h||_0 / ||p||_0 for a scalar field. With `zero_mean`, both p and
/// p_h are shifted to zero mean first.
double relative_l2_error(const DiscreteField& p, const ScalarFunction& exact, bool zero_mean, int degree = -1);

/// L2 norm and mean of a discrete scalar field.
double l2_norm(const DiscreteField& p);
double mean_value(const DiscreteField& p);

/// p_h - 1/2 * (L2 projection of |u_h|^2 onto the pressure space).
DiscreteField kinematic_pressure(const DiscreteField& u, const DiscreteField& p);

/// Streamfunction in continuous P5 with zero boundary values:
/// (grad phi, grad psi) = (u_h, curl psi), curl psi = (d psi/dy, -d psi/dx).
/// The returned field refers to `space`, which must be lagrange(mesh, 5).
DiscreteField streamfunction(const DiscreteField& u, const FunctionSpace& space);

struct VortexInfo {
    Vec2 center;
    double value = 0.0;
};

/// Minimum of a scalar field: sampled on an n x n grid over the bounding box,
/// then refined by one Newton step on a least-squares quadratic fit to the
/// 3 x 3 neighbourhood. Throws Error when the sampled minimum lies on the boundary.
VortexInfo vortex_center(const DiscreteField& phi, int samples = 256);

/// n equispaced samples (parameter in [0,1], field value) along a -> b.
/// Throws GeometryError for points outside the mesh.
std::vector<std::pair<double, Vec2>> sample_line(const DiscreteField& f, const Vec2& a, const Vec2& b, int n);

struct NamedField {
    std::string name;
    const DiscreteField* field;
};

/// Legacy ASCII VTK unstructured grid. Each triangle is split into
/// subdivisions^2 sub-triangles; fields are sampled at the sub-vertices.
void export_vtk(const Mesh& mesh, const std::vector<NamedField>& fields, const std::filesystem::path& path,
                int subdivisions);

struct ErrorRow {
    double h = 0.0;
    double e_l2 = 0.0;
    double e_h1 = 0.0;
    double e_p = 0.0;
    std::optional<double> rate_l2;
    std::optional<double> rate_h1;
    std::optional<double> rate_p;
};

/// Errors below this are treated as machine zero and get no rate.
inline constexpr double kMachineZero = 1e-13;

/// Fills the rate columns from consecutive rows: log2(e_{i-1} / e_i) scaled by
/// log(h_{i-1} / h_i) / log 2 for non-halving steps.
void compute_rates(std::vector<ErrorRow>& rows);

/// CSV with header h,eL2,rateL2,eH1,rateH1,ePrel,rateP; missing rates as "--".
std::string rate_table_csv(const std::vector<ErrorRow>& rows);
/// Aligned plain-text rendering of the same table.
std::string rate_table_text(const std::vector<ErrorRow>& rows);

}  // namespace prns
