#include <gtest/gtest.h>

#include <cmath>

#include "prns/assembly.hpp"
#include "prns/error.hpp"
#include "prns/postprocess.hpp"
#include "prns/problems.hpp"
#include "prns/solver.hpp"

using namespace prns;

namespace {

Mesh square(int n) {
    DomainSpec s;
    s.nx = s.ny = n;
    return generate_structured(s);
}

ProblemData with_solution(const Mesh& m, const AnalyticSolution& sol) {
    ProblemData data;
    data.force = sol.force;
    for (const auto& tag : m.tags()) data.dirichlet.push_back({tag, sol.u});
    return data;
}

}  // namespace

TEST(Solver, ZeroDataGivesZeroSolution) {
    const Mesh m = square(3);
    ProblemData none;
    const VectorFunction zero = [](const Vec2&) { return Vec2(0, 0); };
    for (const auto& tag : m.tags()) none.dirichlet.push_back({tag, zero});
    const FormContext zctx(m, 2, SolverConfig{}, none);
    const SolveReport r = solve_stokes(zctx);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.state.lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(Solver, NoFlowStokesIsPressureRobust) {
    const Mesh m = square(4);
    SolverConfig cfg;
    cfg.nu = 0.01;
    const FormContext ctx(m, 2, cfg, with_solution(m, noflow(0.01)));
    const SolveReport r = solve_stokes(ctx);
    const ErrorNorms e = error_norms(r.velocity(ctx), noflow(0.01).u, noflow(0.01).grad_u);
    EXPECT_LT(e.l2, 1e-10);
}

TEST(Solver, StokesInvariants) {
    const AnalyticSolution sol = kovasznay(0.1);
    DomainSpec s;
    s.x_range = {-0.5, 1.5};
    s.y_range = {0.0, 2.0};
    s.nx = s.ny = 4;
    const Mesh km = generate_structured(s);
    SolverConfig cfg;
    cfg.nu = 0.1;
    const FormContext ctx(km, 3, cfg, with_solution(km, sol));
    const SolveReport r = solve_stokes(ctx);
    ASSERT_TRUE(r.converged);
    EXPECT_LT(r.linear_residuals.front(), 1e-12);
    const DiscreteField p = r.pressure(ctx);
    EXPECT_LE(std::abs(mean_value(p) * km.total_area()), 1e-10 * km.total_area());
    const Eigen::VectorXd div = assemble_div(ctx) * r.state.head(ctx.num_velocity());
    EXPECT_LT(div.lpNorm<Eigen::Infinity>(), 1e-9);
    // Dirichlet values are reproduced exactly.
    for (const auto& [d, v] : boundary_values(ctx)) EXPECT_DOUBLE_EQ(r.state[d], v);
}

TEST(Solver, NewtonConvergesAndKeepsInvariants) {
    DomainSpec s;
    s.x_range = {-0.5, 1.5};
    s.y_range = {0.0, 2.0};
    s.nx = s.ny = 8;
    const Mesh m = generate_structured(s);
    SolverConfig cfg;
    cfg.nu = 0.1;
    const FormContext ctx(m, 2, cfg, with_solution(m, kovasznay(0.1)));
    const SolveReport seed = solve_stokes(ctx);
    const SolveReport r = newton_solve(ctx, seed.state);
    ASSERT_TRUE(r.converged) << r.failure;
    EXPECT_LE(r.iterations, 20);
    EXPECT_EQ(r.increments.size(), static_cast<std::size_t>(r.iterations));
    EXPECT_LT(r.increments.back(), cfg.tol);
    const Eigen::VectorXd div = assemble_div(ctx) * r.state.head(ctx.num_velocity());
    EXPECT_LT(div.lpNorm<Eigen::Infinity>(), 1e-9);
    EXPECT_LE(std::abs(mean_value(r.pressure(ctx))), 1e-10);

    // The converged state is a fixed point.
    const SolveReport again = newton_solve(ctx, r.state);
    EXPECT_TRUE(again.converged);
    EXPECT_EQ(again.iterations, 1);
}

TEST(Solver, OutflowSystemWithoutMultiplier) {
    const Mesh m = square(4);
    const AnalyticSolution sol = manufactured(0.1);
    SolverConfig cfg;
    cfg.nu = 0.1;
    cfg.outflow_tags = {"right"};
    ProblemData data;
    data.force = sol.force;
    for (const char* tag : {"left", "top", "bottom"}) data.dirichlet.push_back({tag, sol.u});
    data.outflow_traction = [&sol](const Vec2& x) { return outflow_traction(sol, x, Vec2(1, 0)); };
    const FormContext ctx(m, 2, cfg, data);
    EXPECT_FALSE(ctx.has_multiplier());
    const SolveReport r = newton_solve(ctx, solve_stokes(ctx).state);
    EXPECT_TRUE(r.converged);
}

TEST(Solver, ReconstructionIrrelevantForPolynomialSolutions) {
    // Linear Couette-type field with f = 0 and P constant: both methods give it exactly.
    const Mesh m = square(3);
    ProblemData data;
    for (const auto& tag : m.tags()) data.dirichlet.push_back({tag, [](const Vec2& x) { return Vec2(x.y(), 0.0); }});
    data.force = [](const Vec2& x) { return Vec2(0.0, -x.y()); };  // (rot u) x u = (0, -y) balanced
    for (bool recon : {true, false}) {
        SolverConfig cfg;
        cfg.reconstruction = recon;
        const FormContext ctx(m, 2, cfg, data);
        const SolveReport r = newton_solve(ctx, solve_stokes(ctx).state);
        ASSERT_TRUE(r.converged);
        const ErrorNorms e = error_norms(r.velocity(ctx), [](const Vec2& x) { return Vec2(x.y(), 0.0); },
                                         [](const Vec2&) { return Eigen::Matrix2d{{0.0, 1.0}, {0.0, 0.0}}; });
        EXPECT_LT(e.l2, 1e-11);
        EXPECT_LT(e.h1, 1e-10);
    }
}

TEST(Solver, IterationCapReported) {
    const Mesh m = square(2);
    SolverConfig cfg;
    cfg.max_newton = 2;
    const FormContext ctx(m, 2, cfg, with_solution(m, kovasznay(0.1)));
    const SolveReport r = newton_solve(ctx, Eigen::VectorXd::Zero(SystemAssembler(ctx).size()));
    EXPECT_FALSE(r.converged);
    EXPECT_FALSE(r.failure.empty());
    EXPECT_EQ(r.iterations, 2);
    EXPECT_THROW(newton_solve(ctx, Eigen::VectorXd::Zero(3)), InvalidArgument);
}

TEST(Solver, ScheduleValidation) {
    ContinuationSchedule s;
    s.nu_of_re = [](double re) { return 1.0 / re; };
    EXPECT_THROW(s.validate(), InvalidArgument);
    s.reynolds = {100, 400, 400};
    EXPECT_THROW(s.validate(), InvalidArgument);
    s.reynolds = {-1, 400};
    EXPECT_THROW(s.validate(), InvalidArgument);
    s.reynolds = {100, 400};
    EXPECT_NO_THROW(s.validate());
    s.nu_of_re = nullptr;
    EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(Solver, DefaultSchedules) {
    EXPECT_EQ(ContinuationSchedule::cavity(10000).reynolds,
              (std::vector<double>{100, 400, 1000, 1800, 2500, 3200, 5000, 7500, 10000}));
    EXPECT_EQ(ContinuationSchedule::cylinder().reynolds,
              (std::vector<double>{5, 10, 20, 40, 70, 100, 125, 150, 175, 200}));
    EXPECT_DOUBLE_EQ(ContinuationSchedule::cylinder().nu_of_re(20.0), 1.0 / 200.0);
}

TEST(Solver, SingleEntryContinuationEqualsNewton) {
    const Mesh m = square(4);
    ProblemData data;
    const VectorFunction zero = [](const Vec2&) { return Vec2(0, 0); };
    data.dirichlet = {{"left", zero}, {"right", zero}, {"bottom", zero}, {"top", [](const Vec2&) { return Vec2(1.0, 0.0); }}};
    SolverConfig cfg;
    cfg.nu = 0.01;
    FormContext ctx(m, 2, cfg, data);
    ContinuationSchedule s;
    s.reynolds = {100};
    s.nu_of_re = [](double re) { return 1.0 / re; };
    const auto reports = continuation_solve(ctx, s);
    ASSERT_EQ(reports.size(), 1u);
    const SolveReport direct = newton_solve(ctx, solve_stokes(ctx).state);
    EXPECT_EQ(reports[0].second.iterations, direct.iterations);
    EXPECT_LT((reports[0].second.state - direct.state).norm(), 1e-12);
    EXPECT_LE(direct.iterations, 10);
}
