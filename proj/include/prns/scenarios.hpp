#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prns/assembly.hpp"
#include "prns/postprocess.hpp"
#include "prns/problems.hpp"
#include "prns/solver.hpp"

namespace prns {

enum class Method { reconstructed, classical };

Method parse_method(const std::string& name);
std::string to_string(Method m);

/// Called once per level with the solved context and report (e.g. for export).
using LevelHook = std::function<void(const FormContext&, const SolveReport&)>;

struct ConvergenceResult {
    std::vector<ErrorRow> rows;
    std::vector<int> newton_iterations;
    /// False as soon as one level failed; rows stop at that level.
    bool converged = true;
    std::string failure;
};

/// Solves `solution` on nested structured meshes of the rectangle, starting
/// with base_cells cells per side and doubling `levels - 1` times. The
/// pressure error is mean-corrected when the boundary is fully Dirichlet.
struct ConvergenceSetup {
    AnalyticSolution solution;
    std::array<double, 2> x_range{0.0, 1.0};
    std::array<double, 2> y_range{0.0, 1.0};
    int base_cells = 8;
    int levels = 3;
    int k = 2;
    Method method = Method::reconstructed;
    /// Tags treated as outflow boundary; all other tags are Dirichlet.
    std::vector<std::string> outflow_tags;
    bool outflow_convection = true;
    LevelHook hook;
};
ConvergenceResult run_convergence(const ConvergenceSetup& setup);

/// h = 1/8 per unit length on (-0.5,1.5) x (0,2), i.e. 16 cells per side at level 0.
ConvergenceResult run_kovasznay(int k, int levels, double nu, Method method, LevelHook hook = {});
ConvergenceResult run_noflow(int k, int levels, double nu, Method method, LevelHook hook = {});
ConvergenceResult run_irrotational(int k, int levels, double lambda, Method method, LevelHook hook = {});
/// Manufactured solution on the unit square. With `mixed`, the right edge is an
/// outflow boundary carrying the exact traction.
ConvergenceResult run_mms(int k, int levels, bool mixed, bool outflow_convection, Method method,
                          double nu = 0.1, LevelHook hook = {});

struct CavityStep {
    double re = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string failure;
    std::optional<VortexInfo> vortex;
    /// u1 along x = 0.5 and u2 along y = 0.5, as (coordinate, value).
    std::vector<std::pair<double, double>> u1_vertical;
    std::vector<std::pair<double, double>> u2_horizontal;
};

struct CavityOptions {
    int k = 3;
    int M = 40;
    double gamma = 2.5;
    std::vector<double> reynolds{100.0, 400.0, 1000.0};
    Method method = Method::reconstructed;
    /// Body force; null means f = 0.
    VectorFunction force;
    bool diagnostics = true;  // streamfunction, vortex and profiles per step
    int profile_samples = 101;
    std::function<void(const FormContext&, const SolveReport&, double re)> hook;
};
std::vector<CavityStep> run_cavity(const CavityOptions& options);

struct CylinderStep {
    double re = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string failure;
    double outlet_mean_pressure = 0.0;
};

struct CylinderOptions {
    std::filesystem::path mesh;
    int k = 2;
    std::vector<double> reynolds{5.0, 10.0, 20.0, 40.0};
    Method method = Method::reconstructed;
    std::function<void(const FormContext&, const SolveReport&, double re)> hook;
};
std::vector<CylinderStep> run_cylinder(const CylinderOptions& options);

}  // namespace prns
