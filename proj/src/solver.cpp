#include "prns/solver.hpp"

#include <cmath>
#include <string>

#include "prns/error.hpp"

namespace prns {

void ContinuationSchedule::validate() const {
    if (reynolds.empty()) throw InvalidArgument("empty continuation schedule");
    if (!nu_of_re) throw InvalidArgument("continuation schedule lacks a Re -> nu map");
    for (std::size_t i = 0; i < reynolds.size(); ++i) {
        if (!(reynolds[i] > 0.0)) throw InvalidArgument("Reynolds numbers must be positive");
        if (i > 0 && !(reynolds[i] > reynolds[i - 1]))
            throw InvalidArgument("Reynolds numbers must be strictly increasing");
    }
}

ContinuationSchedule ContinuationSchedule::cavity(double max_re) {
    ContinuationSchedule s;
    s.nu_of_re = [](double re) { return 1.0 / re; };
    for (double re : {100.0, 400.0, 1000.0, 1800.0, 2500.0, 3200.0, 5000.0})
        if (re <= max_re) s.reynolds.push_back(re);
    for (double re = 7500.0; re <= max_re; re += 2500.0) s.reynolds.push_back(re);
    return s;
}

ContinuationSchedule ContinuationSchedule::cylinder(double max_re) {
    ContinuationSchedule s;
    s.nu_of_re = [](double re) { return 1.0 / (10.0 * re); };
    for (double re : {5.0, 10.0, 20.0, 40.0, 70.0, 100.0})
        if (re <= max_re) s.reynolds.push_back(re);
    for (double re = 125.0; re <= std::min(max_re, 200.0); re += 25.0) s.reynolds.push_back(re);
    return s;
}

DiscreteField SolveReport::velocity(const FormContext& ctx) const {
    return DiscreteField(ctx.velocity(), state.head(ctx.num_velocity()));
}

DiscreteField SolveReport::pressure(const FormContext& ctx) const {
    return DiscreteField(ctx.pressure(), state.segment(ctx.num_velocity(), ctx.num_pressure()));
}

DirichletValues boundary_values(const FormContext& ctx) {
    return set_dirichlet_values(ctx.velocity(), ctx.data().dirichlet);
}

namespace {

double relative_residual(const LinearSystem& sys, const Eigen::VectorXd& x) {
    const double bn = sys.rhs.norm();
    const double r = (sys.matrix * x - sys.rhs).norm();
    return bn > 0.0 ? r / bn : r;
}

double increment_norm(const SystemAssembler& sa, const Eigen::VectorXd& d) {
    const int nv = sa.context().num_velocity();
    const int np = sa.context().num_pressure();
    const Eigen::VectorXd du = d.head(nv), dp = d.segment(nv, np);
    const double s = du.dot(sa.velocity_mass() * du) + dp.dot(sa.pressure_mass() * dp);
    return std::sqrt(std::max(0.0, s));
}

SolveReport stokes_with(const SystemAssembler& sa, const DirichletValues& bc) {
    SolveReport rep;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sa.size());
    const LinearSystem sys = sa.correction_system(zero, false, bc);
    LuSolver lu;
    lu.factor(sys.matrix);
    rep.state = lu.solve(sys.rhs);
    rep.linear_residuals.push_back(relative_residual(sys, rep.state));
    rep.iterations = 1;
    rep.converged = rep.state.allFinite();
    if (!rep.converged) rep.failure = "non-finite Stokes solution";
    return rep;
}

SolveReport newton_with(const SystemAssembler& sa, const DirichletValues& bc, const Eigen::VectorXd& initial) {
    const FormContext& ctx = sa.context();
    const SolverConfig& cfg = ctx.config();
    if (initial.size() != sa.size()) throw InvalidArgument("initial state size mismatch");
    SolveReport rep;
    rep.state = initial;
    LuSolver lu;
    int growth = 0;
    for (int n = 1; n <= cfg.max_newton; ++n) {
        const LinearSystem sys = sa.correction_system(rep.state, true, bc);
        try {
            lu.factor(sys.matrix);
        } catch (const SingularMatrixError& e) {
            throw SingularMatrixError("Newton step " + std::to_string(n) + ": " + e.what(), e.pivot());
        }
        const Eigen::VectorXd d = lu.solve(sys.rhs);
        rep.linear_residuals.push_back(relative_residual(sys, d));
        rep.state += d;
        rep.iterations = n;
        const double inc = increment_norm(sa, d);
        rep.increments.push_back(inc);
        if (!std::isfinite(inc)) {
            rep.failure = "non-finite increment at step " + std::to_string(n);
            return rep;
        }
        if (inc < cfg.tol) {
            rep.converged = true;
            return rep;
        }
        if (n > 1 && inc > rep.increments[static_cast<std::size_t>(n - 2)]) {
            if (++growth >= cfg.divergence_window) {
                rep.failure = "increment grew in " + std::to_string(growth) + " consecutive steps";
                return rep;
            }
        } else {
            growth = 0;
        }
    }
    rep.failure = "no convergence within " + std::to_string(cfg.max_newton) + " Newton steps";
    return rep;
}

}  // namespace

SolveReport solve_stokes(const FormContext& ctx) {
    const SystemAssembler sa(ctx);
    return stokes_with(sa, boundary_values(ctx));
}

SolveReport newton_solve(const FormContext& ctx, const Eigen::VectorXd& initial) {
    const SystemAssembler sa(ctx);
    return newton_with(sa, boundary_values(ctx), initial);
}

std::vector<std::pair<double, SolveReport>> continuation_solve(FormContext& ctx, const ContinuationSchedule& schedule) {
    schedule.validate();
    const SystemAssembler sa(ctx);
    const DirichletValues bc = boundary_values(ctx);
    std::vector<std::pair<double, SolveReport>> out;
    Eigen::VectorXd state;
    for (double re : schedule.reynolds) {
        ctx.set_nu(schedule.nu_of_re(re));
        if (out.empty()) state = stokes_with(sa, bc).state;
        SolveReport rep = newton_with(sa, bc, state);
        const bool ok = rep.converged;
        state = rep.state;
        out.emplace_back(re, std::move(rep));
        if (!ok) break;
    }
    return out;
}

}  // namespace prns
