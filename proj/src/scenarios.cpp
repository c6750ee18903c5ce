#include "prns/scenarios.hpp"

#include <cmath>

#include "prns/error.hpp"

namespace prns {

Method parse_method(const std::string& name) {
    if (name == "reconstructed") return Method::reconstructed;
    if (name == "classical") return Method::classical;
    throw InvalidArgument("unknown method '" + name + "' (expected reconstructed or classical)");
}

std::string to_string(Method m) { return m == Method::reconstructed ? "reconstructed" : "classical"; }

ConvergenceResult run_convergence(const ConvergenceSetup& setup) {
    if (setup.levels < 1) throw InvalidArgument("at least one mesh level is required");
    if (setup.base_cells < 1) throw InvalidArgument("base cell count must be positive");
    ConvergenceResult out;
    const AnalyticSolution& sol = setup.solution;
    const double width = setup.x_range[1] - setup.x_range[0];
    for (int level = 0; level < setup.levels; ++level) {
        DomainSpec spec;
        spec.x_range = setup.x_range;
        spec.y_range = setup.y_range;
        spec.nx = spec.ny = setup.base_cells << level;
        const Mesh mesh = build_mesh(spec);

        SolverConfig cfg;
        cfg.nu = sol.nu;
        cfg.reconstruction = setup.method == Method::reconstructed;
        cfg.outflow_tags = setup.outflow_tags;
        cfg.outflow_convection = setup.outflow_convection;
        ProblemData data;
        data.force = sol.force;
        for (const auto& tag : mesh.tags())
            if (std::find(setup.outflow_tags.begin(), setup.outflow_tags.end(), tag) == setup.outflow_tags.end())
                data.dirichlet.push_back({tag, sol.u});
        if (!setup.outflow_tags.empty()) {
            // Outward normals of the rectangle, by tag.
            data.outflow_traction = [&sol, &setup](const Vec2& x) {
                const double tol = 1e-12;
                Vec2 n(0.0, 0.0);
                if (std::abs(x.x() - setup.x_range[1]) < tol) n = Vec2(1, 0);
                else if (std::abs(x.x() - setup.x_range[0]) < tol) n = Vec2(-1, 0);
                else if (std::abs(x.y() - setup.y_range[1]) < tol) n = Vec2(0, 1);
                else n = Vec2(0, -1);
                return outflow_traction(sol, x, n);
            };
        }
        const FormContext ctx(mesh, setup.k, cfg, data);
        const SolveReport seed = solve_stokes(ctx);
        const SolveReport rep = newton_solve(ctx, seed.state);
        out.newton_iterations.push_back(rep.iterations);
        if (!rep.converged) {
            out.converged = false;
            out.failure = "level " + std::to_string(level) + ": " + rep.failure;
            return out;
        }
        const DiscreteField u = rep.velocity(ctx);
        const DiscreteField p = rep.pressure(ctx);
        const ErrorNorms e = error_norms(u, sol.u, sol.grad_u);
        ErrorRow row;
        row.h = width / spec.nx;
        row.e_l2 = e.l2;
        row.e_h1 = e.h1;
        row.e_p = relative_l2_error(p, sol.p, ctx.has_multiplier());
        out.rows.push_back(row);
        if (setup.hook) setup.hook(ctx, rep);
    }
    compute_rates(out.rows);
    return out;
}

ConvergenceResult run_kovasznay(int k, int levels, double nu, Method method, LevelHook hook) {
    ConvergenceSetup s;
    s.solution = kovasznay(nu);
    s.x_range = {-0.5, 1.5};
    s.y_range = {0.0, 2.0};
    s.base_cells = 16;
    s.levels = levels;
    s.k = k;
    s.method = method;
    s.hook = std::move(hook);
    return run_convergence(s);
}

ConvergenceResult run_noflow(int k, int levels, double nu, Method method, LevelHook hook) {
    ConvergenceSetup s;
    s.solution = noflow(nu);
    s.levels = levels;
    s.k = k;
    s.method = method;
    s.hook = std::move(hook);
    return run_convergence(s);
}

ConvergenceResult run_irrotational(int k, int levels, double lambda, Method method, LevelHook hook) {
    ConvergenceSetup s;
    s.solution = irrotational(lambda);
    s.levels = levels;
    s.k = k;
    s.method = method;
    s.hook = std::move(hook);
    return run_convergence(s);
}

ConvergenceResult run_mms(int k, int levels, bool mixed, bool outflow_convection, Method method, double nu,
                          LevelHook hook) {
    ConvergenceSetup s;
    s.solution = manufactured(nu);
    s.base_cells = 4;
    s.levels = levels;
    s.k = k;
    s.method = method;
    if (mixed) s.outflow_tags = {"right"};
    s.outflow_convection = outflow_convection;
    s.hook = std::move(hook);
    return run_convergence(s);
}

std::vector<CavityStep> run_cavity(const CavityOptions& o) {
    DomainSpec spec;
    spec.nx = spec.ny = o.M;
    spec.stretching = o.gamma;
    const Mesh mesh = build_mesh(spec);
    SolverConfig cfg;
    cfg.nu = 1.0 / o.reynolds.front();
    cfg.reconstruction = o.method == Method::reconstructed;
    ProblemData data;
    data.force = o.force;
    const VectorFunction zero = [](const Vec2&) { return Vec2(0.0, 0.0); };
    // Lid last, so the top corners carry the lid velocity.
    data.dirichlet = {{"left", zero}, {"right", zero}, {"bottom", zero},
                      {"top", [](const Vec2&) { return Vec2(1.0, 0.0); }}};
    FormContext ctx(mesh, o.k, cfg, data);
    ContinuationSchedule schedule;
    schedule.reynolds = o.reynolds;
    schedule.nu_of_re = [](double re) { return 1.0 / re; };
    const auto reports = continuation_solve(ctx, schedule);

    std::vector<CavityStep> out;
    const FunctionSpace p5 = FunctionSpace::lagrange(mesh, 5);
    for (const auto& [re, rep] : reports) {
        CavityStep step;
        step.re = re;
        step.iterations = rep.iterations;
        step.converged = rep.converged;
        step.failure = rep.failure;
        if (rep.converged && o.diagnostics) {
            const DiscreteField u = rep.velocity(ctx);
            const DiscreteField phi = streamfunction(u, p5);
            step.vortex = vortex_center(phi);
            for (const auto& [s, v] : sample_line(u, Vec2(0.5, 0.0), Vec2(0.5, 1.0), o.profile_samples))
                step.u1_vertical.emplace_back(s, v.x());
            for (const auto& [s, v] : sample_line(u, Vec2(0.0, 0.5), Vec2(1.0, 0.5), o.profile_samples))
                step.u2_horizontal.emplace_back(s, v.y());
        }
        if (o.hook && rep.converged) {
            ctx.set_nu(1.0 / re);
            o.hook(ctx, rep, re);
        }
        out.push_back(std::move(step));
    }
    return out;
}

namespace {

double outlet_mean_pressure(const FormContext& ctx, const DiscreteField& p) {
    const Mesh& mesh = ctx.mesh();
    double integral = 0.0, length = 0.0;
    for (const auto& be : ctx.outflow_edges()) {
        const MappedEdgeRule r =
            map_to_physical(edge_rule(2 * ctx.degree()), mesh.vertex(mesh.edge(be.edge)[0]), mesh.vertex(mesh.edge(be.edge)[1]));
        const ElementBasis b = ctx.pressure().tabulate_at(be.triangle, r.points);
        const auto dofs = ctx.pressure().element_dofs(be.triangle);
        for (std::size_t q = 0; q < r.points.size(); ++q) {
            double v = 0.0;
            for (std::size_t i = 0; i < dofs.size(); ++i)
                v += p.coefficients()[dofs[i]] * b.values(static_cast<int>(q), static_cast<int>(i));
            integral += r.weights[q] * v;
        }
        length += r.length;
    }
    return length > 0.0 ? integral / length : 0.0;
}

}  // namespace

std::vector<CylinderStep> run_cylinder(const CylinderOptions& o) {
    const Mesh mesh = import_mesh(o.mesh);
    for (const char* tag : {"inlet", "outlet", "wall"})
        if (!mesh.has_tag(tag)) throw ValidationError(std::string("cylinder mesh lacks the '") + tag + "' tag");
    SolverConfig cfg;
    cfg.reconstruction = o.method == Method::reconstructed;
    cfg.outflow_tags = {"outlet"};
    ContinuationSchedule schedule;
    schedule.reynolds = o.reynolds;
    schedule.nu_of_re = [](double re) { return 1.0 / (10.0 * re); };
    schedule.validate();
    cfg.nu = schedule.nu_of_re(o.reynolds.front());
    ProblemData data;
    // Inlet first; the no-slip wall owns the inlet corners.
    data.dirichlet = {{"inlet", [](const Vec2&) { return Vec2(1.0, 0.0); }},
                      {"wall", [](const Vec2&) { return Vec2(0.0, 0.0); }}};
    FormContext ctx(mesh, o.k, cfg, data);
    const auto reports = continuation_solve(ctx, schedule);
    std::vector<CylinderStep> out;
    for (const auto& [re, rep] : reports) {
        CylinderStep step;
        step.re = re;
        step.iterations = rep.iterations;
        step.converged = rep.converged;
        step.failure = rep.failure;
        if (rep.converged) {
            step.outlet_mean_pressure = outlet_mean_pressure(ctx, kinematic_pressure(rep.velocity(ctx), rep.pressure(ctx)));
            if (o.hook) {
                ctx.set_nu(schedule.nu_of_re(re));
                o.hook(ctx, rep, re);
            }
        }
        out.push_back(std::move(step));
    }
    return out;
}

}  // namespace prns
