// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "prns/scenarios.hpp"

using namespace prns;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what + (cond ? "" : " [x]");
        ok = ok && cond;
    }
};

std::string fmt(const char* f, double a) {
    char b[96];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

bool within(const std::optional<double>& r, double target, double tol) { return r && std::abs(*r - target) <= tol; }

std::string rates(const ErrorRow& r) {
    auto s = [](const std::optional<double>& v) { return v ? fmt("%.2f", *v) : std::string("--"); };
    return "(" + s(r.rate_l2) + ", " + s(r.rate_h1) + ", " + s(r.rate_p) + ")";
}

void report(int id, const Check& c, double secs) {
    std::printf("criterion %d: %s  (%.0f s)  %s\n", id, c.ok ? "PASS" : "FAIL", secs, c.detail.c_str());
    std::fflush(stdout);
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = d(gen);
    return v;
}

Mesh unit_square(int n, double gamma) {
    DomainSpec s;
    s.nx = s.ny = n;
    s.stretching = gamma;
    return build_mesh(s);
}

Check kovasznay_rates() {
    Check c;
    for (int k : {2, 3}) {
        const auto t0 = Clock::now();
        const ConvergenceResult r = run_kovasznay(k, 3, 0.1, Method::reconstructed);
        const double secs = seconds_since(t0);
        if (!r.converged) {
            c.require(false, "k=" + std::to_string(k) + " " + r.failure);
            continue;
        }
        const ErrorRow& f = r.rows.back();
        c.require(within(f.rate_l2, k + 1, 0.2) && within(f.rate_h1, k, 0.2) && within(f.rate_p, k, 0.2),
                  "k=" + std::to_string(k) + " rates " + rates(f));
        c.require(secs <= 300.0, "k=" + std::to_string(k) + fmt(" %.0f s", secs));
    }
    return c;
}

Check noflow_robustness() {
    Check c;
    const ConvergenceResult rec = run_noflow(2, 3, 0.01, Method::reconstructed);
    const ConvergenceResult cls = run_noflow(2, 3, 0.01, Method::classical);
    double worst = 0.0;
    for (const auto& row : rec.rows) worst = std::max({worst, row.e_l2, row.e_h1});
    c.require(rec.converged && worst <= 1e-10, "reconstructed max velocity error " + fmt("%.2e", worst));
    c.require(cls.converged && cls.rows[1].e_l2 >= 1e-7, "classical L2 at h=1/16 " + fmt("%.3e", cls.rows[1].e_l2));
    c.require(within(rec.rows.back().rate_p, 2.0, 0.15) && within(cls.rows.back().rate_p, 2.0, 0.15),
              "pressure rates " + fmt("%.2f", rec.rows.back().rate_p.value_or(0)) + " / " +
                  fmt("%.2f", cls.rows.back().rate_p.value_or(0)));
    return c;
}

Check irrotational_robustness() {
    Check c;
    double worst = 0.0;
    for (double lambda : {1e2, 1e6}) {
        const ConvergenceResult r = run_irrotational(2, 3, lambda, Method::reconstructed);
        for (const auto& row : r.rows) worst = std::max(worst, row.e_l2);
    }
    c.require(worst <= 1e-9, "reconstructed max L2 " + fmt("%.2e", worst));
    const double c6 = run_irrotational(2, 1, 1e6, Method::classical).rows[0].e_l2;
    const double c2 = run_irrotational(2, 1, 1e2, Method::classical).rows[0].e_l2;
    c.require(c6 >= 2.87 / 5 && c6 <= 2.87 * 5, "classical lambda=1e6 h=1/8 L2 " + fmt("%.3e", c6));
    const double ratio = c6 / c2;
    c.require(ratio >= 1e4 / 3 && ratio <= 1e4 * 3, "lambda ratio " + fmt("%.4g", ratio));
    return c;
}

struct CavityOutcome {
    Check check;
    bool schedule_converged = false;
};

CavityOutcome cavity_vortex() {
    CavityOutcome out;
    CavityOptions o;
    o.k = 3;
    o.M = 40;
    o.gamma = 2.5;
    o.reynolds = {100, 400, 1000};
    o.profile_samples = 11;
    const auto steps = run_cavity(o);
    bool all = steps.size() == 3;
    for (const auto& s : steps) all = all && s.converged;
    out.schedule_converged = all;
    if (!all || !steps.back().vortex) {
        out.check.require(false, "continuation failed: " + steps.back().failure);
        return out;
    }
    const VortexInfo& v = *steps.back().vortex;
    out.check.require(std::abs(v.value - (-0.1188)) <= 0.02 * 0.1188, "phi " + fmt("%.6f", v.value));
    out.check.require((v.center - Vec2(0.530, 0.565)).norm() <= 0.01,
                      "center (" + fmt("%.4f", v.center.x()) + ", " + fmt("%.4f", v.center.y()) + ")");
    return out;
}

Check operator_properties() {
    Check c;
    const Mesh m = unit_square(4, 1.8);
    const int k = 3;
    ProblemData data;
    data.force = [](const Vec2& x) { return Vec2(std::sin(4 * x.y()), x.x() * x.y()); };
    const VectorFunction zero = [](const Vec2&) { return Vec2(0, 0); };
    for (const auto& tag : m.tags()) data.dirichlet.push_back({tag, zero});
    const FormContext ctx(m, k, SolverConfig{}, data);
    const FunctionSpace& vs = ctx.velocity();
    const Reconstruction& r = *ctx.reconstruction();
    const int n = ctx.num_velocity();

    // (a) identity on Lagrange fields
    Eigen::VectorXd lag = random_vector(n, 1);
    for (int d = 0; d < vs.scalar_dim(); ++d)
        if (!vs.is_nodal(d)) lag[d] = lag[vs.scalar_dim() + d] = 0.0;
    const DiscreteField wl(vs, lag);
    // (b) discretely divergence-free field
    const DiscreteField wd = solve_stokes(ctx).velocity(ctx);
    double ea = 0.0, eb = 0.0, ec = 0.0;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        const int ti = static_cast<int>(t);
        const MappedRule mr = map_to_physical(triangle_rule(2 * k + 2), TriangleMap::of(m, ti));
        for (const Vec2& x : mr.points) {
            ea = std::max(ea, (r.apply(wl, ti, x) - wl.value(ti, x)).norm());
            eb = std::max(eb, std::abs(r.apply_divergence(wd, ti, x)));
        }
    }
    eb /= wd.coefficients().lpNorm<Eigen::Infinity>();
    // (c) normal-trace continuity of a random continuous field
    const DiscreteField wr(vs, random_vector(n, 2));
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
        const int ei = static_cast<int>(e);
        if (m.is_boundary_edge(ei)) continue;
        const auto [t0, t1] = m.edge_triangles(ei);
        const MappedEdgeRule er = map_to_physical(edge_rule(2 * k), m.vertex(m.edge(ei)[0]), m.vertex(m.edge(ei)[1]));
        for (const Vec2& x : er.points) ec = std::max(ec, std::abs((r.apply(wr, t0, x) - r.apply(wr, t1, x)).dot(m.edge_normal(ei))));
    }
    c.require(ea <= 1e-11, "(a) " + fmt("%.1e", ea));
    c.require(eb <= 1e-10, "(b) " + fmt("%.1e", eb));
    c.require(ec <= 1e-10, "(c) " + fmt("%.1e", ec));

    // (d) skew symmetry on 50 random triples
    double ed = 0.0;
    for (unsigned i = 0; i < 50; ++i) {
        const Eigen::VectorXd w = random_vector(n, 10 + 3 * i), z = random_vector(n, 11 + 3 * i), v = random_vector(n, 12 + 3 * i);
        const double a = trilinear_form(ctx, w, z, v);
        ed = std::max(ed, std::abs(a + trilinear_form(ctx, w, v, z)) / (1.0 + std::abs(a)));
    }
    c.require(ed <= 1e-11, "(d) " + fmt("%.1e", ed));

    // (e) rot-form identity by quadrature, (f) convection relation pointwise
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto poly = [&](int deg) {
        Poly2 p(deg);
        for (const auto& [a, b] : monomial_exponents(deg)) p.set_coeff(a, b, u(gen));
        return p;
    };
    double ee = 0.0, ef = 0.0;
    const MappedRule mr = map_to_physical(triangle_rule(12), TriangleMap::of(Vec2(0, 0), Vec2(1, 0.2), Vec2(0.3, 1)));
    for (int trial = 0; trial < 10; ++trial) {
        const Poly2 w1 = poly(4), w2 = poly(4), z1 = poly(3), z2 = poly(3), v1 = poly(3), v2 = poly(3);
        const Poly2 half = (w1 * w1 + w2 * w2) * 0.5;
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t q = 0; q < mr.points.size(); ++q) {
            const Vec2& x = mr.points[q];
            const Eigen::Matrix2d G{{w1.dx()(x), w1.dy()(x)}, {w2.dx()(x), w2.dy()(x)}};
            const double rot = G(1, 0) - G(0, 1);
            const Vec2 z(z1(x), z2(x)), v(v1(x), v2(x)), w(w1(x), w2(x));
            lhs += mr.weights[q] * rot * Vec2(-z.y(), z.x()).dot(v);
            rhs += mr.weights[q] * ((G * z).dot(v) - (G * v).dot(z));
            const Vec2 conv = G * w;
            ef = std::max(ef, (rot * Vec2(-w.y(), w.x()) + half.gradient(x) - conv).norm() / (1.0 + conv.norm()));
        }
        ee = std::max(ee, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
    c.require(ee <= 1e-11, "(e) " + fmt("%.1e", ee));
    c.require(ef <= 1e-11, "(f) " + fmt("%.1e", ef));

    // (g) gradient forcing annihilates V_h
    ProblemData grad;
    grad.force = [](const Vec2& x) { return Vec2(std::exp(x.x()) * std::sin(3 * x.y()), 3 * std::exp(x.x()) * std::cos(3 * x.y())); };
    const FormContext gctx(m, k, SolverConfig{}, grad);
    const Eigen::VectorXd f = assemble_rhs(gctx);
    const double eg = std::abs(f.dot(wd.coefficients())) / (f.norm() * wd.coefficients().norm());
    c.require(eg <= 1e-10, "(g) " + fmt("%.1e", eg));
    return c;
}

Check newton_behaviour(bool schedule_converged) {
    Check c;
    // Seed with a converged discrete solution.
    DomainSpec s;
    s.x_range = {-0.5, 1.5};
    s.y_range = {0.0, 2.0};
    s.nx = s.ny = 8;
    const Mesh m = build_mesh(s);
    const AnalyticSolution sol = kovasznay(0.1);
    SolverConfig cfg;
    cfg.nu = 0.1;
    ProblemData data;
    data.force = sol.force;
    for (const auto& tag : m.tags()) data.dirichlet.push_back({tag, sol.u});
    const FormContext ctx(m, 2, cfg, data);
    const SolveReport first = newton_solve(ctx, solve_stokes(ctx).state);
    const SolveReport again = newton_solve(ctx, first.state);
    c.require(first.converged && again.converged && again.iterations == 1,
              "exact seed: " + std::to_string(again.iterations) + " step");

    CavityOptions o;
    o.k = 3;
    o.M = 40;
    o.gamma = 2.5;
    o.reynolds = {5000};
    o.diagnostics = false;
    const auto jump = run_cavity(o);
    c.require(!jump.back().converged, "direct Re=5000: " + (jump.back().converged ? std::string("converged") : jump.back().failure));
    c.require(schedule_converged, "schedule 100-400-1000 converged");
    return c;
}

Check mixed_boundary() {
    Check c;
    for (int k : {2, 3}) {
        const ConvergenceResult r = run_mms(k, 4, true, true, Method::reconstructed);
        const ConvergenceResult d = run_mms(k, 4, true, false, Method::reconstructed);
        if (!r.converged || !d.converged) {
            c.require(false, "k=" + std::to_string(k) + " " + r.failure + d.failure);
            continue;
        }
        const ErrorRow& f = r.rows.back();
        c.require(within(f.rate_l2, k + 1, 0.2) && within(f.rate_h1, k, 0.2) && within(f.rate_p, k, 0.2),
                  "k=" + std::to_string(k) + " rates " + rates(f));
        const double dropped = d.rows.back().rate_h1.value_or(0.0);
        c.require(dropped < k - 0.5, "k=" + std::to_string(k) + " without term H1 rate " + fmt("%.2f", dropped));
    }
    return c;
}

}  // namespace

int main() {
    bool all = true;
    auto run = [&](int id, double limit, const std::function<Check()>& f) {
        const auto t0 = Clock::now();
        Check c;
        try {
            c = f();
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        const double secs = seconds_since(t0);
        if (limit > 0.0) c.require(secs <= limit, fmt("runtime %.0f s", secs) + fmt(" <= %.0f s", limit));
        report(id, c, secs);
        all = all && c.ok;
    };

    run(1, 0.0, kovasznay_rates);  // per-k limit checked inside
    run(2, 120.0, noflow_robustness);
    run(3, 180.0, irrotational_robustness);
    bool schedule_ok = false;
    run(4, 1800.0, [&] {
        CavityOutcome o = cavity_vortex();
        schedule_ok = o.schedule_converged;
        return o.check;
    });
    run(5, 60.0, operator_properties);
    run(6, 0.0, [&] { return newton_behaviour(schedule_ok); });
    run(7, 180.0, mixed_boundary);
    return all ? 0 : 1;
}
