#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "prns/assembly.hpp"

namespace prns {

/// Increasing Reynolds numbers and the problem's Re -> nu map.
struct ContinuationSchedule {
    std::vector<double> reynolds;
    std::function<double(double)> nu_of_re;

    /// Throws InvalidArgument unless non-empty, positive and strictly increasing.
    void validate() const;

    /// 100, 400, 1000, 1800, 2500, 3200, 5000, then steps of 2500 up to max_re.
    static ContinuationSchedule cavity(double max_re);
    /// 5, 10, 20, 40, 70, 100, then steps of 25 up to max_re (at most 200).
    static ContinuationSchedule cylinder(double max_re = 200.0);
};

struct SolveReport {
    /// [velocity, pressure, optional multiplier]
    Eigen::VectorXd state;
    int iterations = 0;
    /// L2 norm of each Newton increment (velocity and pressure combined).
    std::vector<double> increments;
    /// Relative residual of each linear solve.
    std::vector<double> linear_residuals;
    bool converged = false;
    std::string failure;

    DiscreteField velocity(const FormContext& ctx) const;
    DiscreteField pressure(const FormContext& ctx) const;
};

/// Dirichlet values on the system numbering.
DirichletValues boundary_values(const FormContext& ctx);

/// nu a(u,v) + d(v,p) + d(u,q) = (f, R v) with the context's boundary data.
SolveReport solve_stokes(const FormContext& ctx);

/// Newton iteration from `initial` (a full state vector). Stops when the L2
/// increment drops below config.tol, after config.max_newton steps, on a
/// non-finite increment, or once the increment has grown for
/// config.divergence_window consecutive steps.
SolveReport newton_solve(const FormContext& ctx, const Eigen::VectorXd& initial);

/// Sequential Newton solves along the schedule, each seeded by the previous
/// state and the first one by a Stokes solve. Stops after the first failed step;
/// the returned list then ends with that step.
std::vector<std::pair<double, SolveReport>> continuation_solve(FormContext& ctx, const ContinuationSchedule& schedule);

}  // namespace prns
