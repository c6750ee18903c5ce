#include "prns/assembly.hpp"

#include <algorithm>
#include <iostream>
#include <string>

#include "prns/error.hpp"

namespace prns {

namespace {

void check_degree(int k) {
    if (k < 2 || k > 4) throw InvalidArgument("velocity degree k=" + std::to_string(k) + " unsupported (2..4)");
}

int pick(int requested, int fallback) { return std::min(kMaxTriangleDegree, requested >= 0 ? requested : fallback); }

Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<int>& dofs) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t i = 0; i < dofs.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[dofs[i]];
    return out;
}

void scatter(std::vector<Triplet>& out, const std::vector<int>& rows, const std::vector<int>& cols,
             const Eigen::MatrixXd& local, int row_offset = 0, int col_offset = 0) {
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double v = local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (v != 0.0) out.push_back({rows[i] + row_offset, cols[j] + col_offset, v});
        }
}

std::vector<int> pressure_dofs(const FormContext& ctx, int t) {
    const auto d = ctx.pressure().element_dofs(t);
    return {d.begin(), d.end()};
}

/// Per-component stiffness block replicated on the diagonal.
Eigen::MatrixXd local_viscous(const FormContext::ElementValues& ev) {
    const Eigen::Index n = ev.basis.values.cols();
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(ev.rule.weights.data(),
                                                                static_cast<Eigen::Index>(ev.rule.weights.size()));
    const Eigen::MatrixXd K =
        ev.basis.dx.transpose() * w.asDiagonal() * ev.basis.dx + ev.basis.dy.transpose() * w.asDiagonal() * ev.basis.dy;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    out.topLeftCorner(n, n) = K;
    out.bottomRightCorner(n, n) = K;
    return out;
}

Eigen::VectorXd weights_of(const MappedRule& r) {
    return Eigen::Map<const Eigen::VectorXd>(r.weights.data(), static_cast<Eigen::Index>(r.weights.size()));
}

/// -(q_a, div phi_j), np x 2 nloc.
Eigen::MatrixXd local_div(const FormContext& ctx, int t, const FormContext::ElementValues& ev) {
    const ElementBasis pb = ctx.pressure().tabulate(t, ev.rule);
    const Eigen::VectorXd w = weights_of(ev.rule);
    const Eigen::Index n = ev.basis.values.cols();
    Eigen::MatrixXd out(pb.values.cols(), 2 * n);
    out.leftCols(n) = -pb.values.transpose() * w.asDiagonal() * ev.basis.dx;
    out.rightCols(n) = -pb.values.transpose() * w.asDiagonal() * ev.basis.dy;
    return out;
}

/// rot of the vector basis functions: [-dN/dy, dN/dx].
Eigen::MatrixXd local_rot(const ElementBasis& b) {
    const Eigen::Index n = b.values.cols();
    Eigen::MatrixXd out(b.values.rows(), 2 * n);
    out.leftCols(n) = -b.dy;
    out.rightCols(n) = b.dx;
    return out;
}

/// Newton matrix and residual of b_h at the local state u.
void local_trilinear(const FormContext::ElementValues& ev, const Eigen::VectorXd& u, Eigen::MatrixXd& mat,
                     Eigen::VectorXd& res) {
    const Eigen::VectorXd w = weights_of(ev.rule);
    const Eigen::MatrixXd rot = local_rot(ev.basis);
    const Eigen::VectorXd omega = rot * u;
    const Eigen::VectorXd z1 = ev.tx * u;
    const Eigen::VectorXd z2 = ev.ty * u;
    const Eigen::VectorXd wo = w.cwiseProduct(omega);
    mat = ev.ty.transpose() * wo.asDiagonal() * ev.tx - ev.tx.transpose() * wo.asDiagonal() * ev.ty;
    mat += (ev.ty.transpose() * w.cwiseProduct(z1).asDiagonal() - ev.tx.transpose() * w.cwiseProduct(z2).asDiagonal()) * rot;
    res = ev.ty.transpose() * wo.cwiseProduct(z1) - ev.tx.transpose() * wo.cwiseProduct(z2);
}

struct EdgeValues {
    std::vector<double> weights;
    Eigen::MatrixXd basis;  // nq x nloc scalar
    std::vector<int> dofs;
};

EdgeValues edge_values(const FormContext& ctx, const FormContext::BoundaryEdge& be, int degree) {
    const Mesh& mesh = ctx.mesh();
    const Vec2& a = mesh.vertex(mesh.edge(be.edge)[0]);
    const Vec2& b = mesh.vertex(mesh.edge(be.edge)[1]);
    const MappedEdgeRule r = map_to_physical(edge_rule(degree), a, b);
    EdgeValues ev;
    ev.weights = r.weights;
    ev.basis = ctx.velocity().tabulate_at(be.triangle, r.points).values;
    ev.dofs = ctx.vector_dofs(be.triangle);
    return ev;
}

/// c-term Newton matrix and residual on one outflow edge.
void local_outflow(const EdgeValues& ev, const Vec2& n, const Eigen::VectorXd& u, Eigen::MatrixXd& mat,
                   Eigen::VectorXd& res) {
    const Eigen::Index nl = ev.basis.cols();
    const Eigen::Index nq = ev.basis.rows();
    const Eigen::VectorXd ux = ev.basis * u.head(nl);
    const Eigen::VectorXd uy = ev.basis * u.tail(nl);
    Eigen::MatrixXd pn(nq, 2 * nl), pu(nq, 2 * nl);
    pn << n.x() * ev.basis, n.y() * ev.basis;
    pu << ux.asDiagonal() * ev.basis, uy.asDiagonal() * ev.basis;
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(ev.weights.data(), nq);
    mat = pn.transpose() * w.asDiagonal() * pu;
    res = 0.5 * pn.transpose() * w.cwiseProduct(ux.cwiseAbs2() + uy.cwiseAbs2());
}

int outflow_degree(int k) { return 3 * (k + 1); }

}  // namespace

// ---------------------------------------------------------------------------

FunctionSpace build_velocity_space(const Mesh& mesh, int k) {
    check_degree(k);
    return FunctionSpace::velocity(mesh, k);
}

FunctionSpace build_pressure_space(const Mesh& mesh, int k) {
    check_degree(k);
    return FunctionSpace::discontinuous(mesh, k - 1);
}

FormContext::FormContext(const Mesh& mesh, int k, SolverConfig config, ProblemData data)
    : mesh_(&mesh),
      k_(k),
      config_(std::move(config)),
      data_(std::move(data)),
      velocity_(build_velocity_space(mesh, k)),
      pressure_(build_pressure_space(mesh, k)) {
    set_nu(config_.nu);
    if (!(config_.tol > 0.0)) throw InvalidArgument("Newton tolerance must be positive");
    if (config_.max_newton < 1) throw InvalidArgument("max_newton must be at least 1");
    if (config_.reconstruction) recon_ = std::make_unique<Reconstruction>(velocity_, config_.interior_moments);
    deg_bilinear_ = pick(config_.quadrature.bilinear, 2 * (k + 1));
    deg_trilinear_ = pick(config_.quadrature.trilinear, 3 * (k + 1) - 1);
    deg_rhs_ = pick(config_.quadrature.rhs, 2 * (k + 1) + 4);
    for (const auto& tag : config_.outflow_tags) {
        if (!mesh.has_tag(tag)) {
            std::cerr << "warning: outflow tag '" << tag << "' has no edges\n";
            continue;
        }
        for (int e : mesh.tagged_edges(tag)) {
            const int t = mesh.edge_triangles(e)[0];
            int local = 0;
            while (mesh.triangle_edge(t, local) != e) ++local;
            outflow_edges_.push_back({e, t, mesh.edge_sign(t, local) * mesh.edge_normal(e)});
        }
    }
}

void FormContext::set_nu(double nu) {
    if (!(nu > 0.0)) throw InvalidArgument("viscosity must be positive");
    config_.nu = nu;
}

std::vector<int> FormContext::vector_dofs(int t) const {
    const auto d = velocity_.element_dofs(t);
    const int ns = velocity_.scalar_dim();
    std::vector<int> out(2 * d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        out[i] = d[i];
        out[d.size() + i] = ns + d[i];
    }
    return out;
}

FormContext::ElementValues FormContext::element_values(int t, const TriangleRule& rule) const {
    ElementValues ev;
    ev.rule = map_to_physical(rule, TriangleMap::of(*mesh_, t));
    ev.basis = velocity_.tabulate(t, ev.rule);
    ev.dofs = vector_dofs(t);
    if (recon_) {
        Reconstruction::Values rv = recon_->evaluate(t, ev.rule.points);
        ev.tx = std::move(rv.x);
        ev.ty = std::move(rv.y);
    } else {
        const Eigen::Index nq = ev.basis.values.rows(), n = ev.basis.values.cols();
        ev.tx = Eigen::MatrixXd::Zero(nq, 2 * n);
        ev.ty = Eigen::MatrixXd::Zero(nq, 2 * n);
        ev.tx.leftCols(n) = ev.basis.values;
        ev.ty.rightCols(n) = ev.basis.values;
    }
    return ev;
}

// ---------------------------------------------------------------------------
// Blocks

SparseMatrix assemble_viscous(const FormContext& ctx) {
    std::vector<Triplet> trip;
    const int nt = static_cast<int>(ctx.mesh().num_triangles());
    for (int t = 0; t < nt; ++t) {
        const auto ev = ctx.element_values(t, ctx.bilinear_rule());
        scatter(trip, ev.dofs, ev.dofs, local_viscous(ev));
    }
    return SparseMatrix::from_triplets(ctx.num_velocity(), ctx.num_velocity(), std::move(trip));
}

SparseMatrix assemble_div(const FormContext& ctx) {
    std::vector<Triplet> trip;
    const int nt = static_cast<int>(ctx.mesh().num_triangles());
    for (int t = 0; t < nt; ++t) {
        const auto ev = ctx.element_values(t, ctx.bilinear_rule());
        scatter(trip, pressure_dofs(ctx, t), ev.dofs, local_div(ctx, t, ev));
    }
    return SparseMatrix::from_triplets(ctx.num_pressure(), ctx.num_velocity(), std::move(trip));
}

SparseMatrix assemble_velocity_mass(const FormContext& ctx) {
    std::vector<Triplet> trip;
    const int nt = static_cast<int>(ctx.mesh().num_triangles());
    for (int t = 0; t < nt; ++t) {
        const MappedRule mr = map_to_physical(ctx.rhs_rule(), TriangleMap::of(ctx.mesh(), t));
        const ElementBasis b = ctx.velocity().tabulate(t, mr);
        const Eigen::MatrixXd M = b.values.transpose() * weights_of(mr).asDiagonal() * b.values;
        const Eigen::Index n = M.rows();
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        local.topLeftCorner(n, n) = M;
        local.bottomRightCorner(n, n) = M;
        const auto dofs = ctx.vector_dofs(t);
        scatter(trip, dofs, dofs, local);
    }
    return SparseMatrix::from_triplets(ctx.num_velocity(), ctx.num_velocity(), std::move(trip));
}

SparseMatrix assemble_pressure_mass(const FormContext& ctx) {
    std::vector<Triplet> trip;
    const int nt = static_cast<int>(ctx.mesh().num_triangles());
    for (int t = 0; t < nt; ++t) {
        const MappedRule mr = map_to_physical(ctx.bilinear_rule(), TriangleMap::of(ctx.mesh(), t));
        const ElementBasis b = ctx.pressure().tabulate(t, mr);
        const auto dofs = pressure_dofs(ctx, t);
        scatter(trip, dofs, dofs, b.values.transpose() * weights_of(mr).asDiagonal() * b.values);
    }
    return SparseMatrix::from_triplets(ctx.num_pressure(), ctx.num_pressure(), std::move(trip));
}

Contribution assemble_trilinear_newton(const FormContext& ctx, const Eigen::VectorXd& u) {
    if (u.size() != ctx.num_velocity()) throw InvalidArgument("velocity vector size mismatch");
    std::vector<Triplet> trip;
    Contribution out;
    out.rhs = Eigen::VectorXd::Zero(ctx.num_velocity());
    Eigen::MatrixXd mat;
    Eigen::VectorXd res;
    const int nt = static_cast<int>(ctx.mesh().num_triangles());
    for (int t = 0; t < nt; ++t) {
        const auto ev = ctx.element_values(t, ctx.trilinear_rule());
        local_trilinear(ev, gather(u, ev.dofs), mat, res);
        scatter(trip, ev.dofs, ev.dofs, mat);
        for (std::size_t i = 0; i < ev.dofs.size(); ++i) out.rhs[ev.dofs[i]] += res[static_cast<Eigen::Index>(i)];
    }
    out.matrix = SparseMatrix::from_triplets(ctx.num_velocity(), ctx.num_velocity(), std::move(trip));
    return out;
}

Contribution assemble_outflow_term(const FormContext& ctx, const Eigen::VectorXd& u) {
    if (u.size() != ctx.num_velocity()) throw InvalidArgument("velocity vector size mismatch");
    std::vector<Triplet> trip;
    Contribution out;
    out.rhs = Eigen::VectorXd::Zero(ctx.num_velocity());
    Eigen::MatrixXd mat;
    Eigen::VectorXd res;
    for (const auto& be : ctx.outflow_edges()) {
        const EdgeValues ev = edge_values(ctx, be, outflow_degree(ctx.degree()));
        local_outflow(ev, be.normal, gather(u, ev.dofs), mat, res);
        scatter(trip, ev.dofs, ev.dofs, mat);
        for (std::size_t i = 0; i < ev.dofs.size(); ++i) out.rhs[ev.dofs[i]] += res[static_cast<Eigen::Index>(i)];
    }
    out.matrix = SparseMatrix::from_triplets(ctx.num_velocity(), ctx.num_velocity(), std::move(trip));
    return out;
}

Eigen::VectorXd assemble_rhs(const FormContext& ctx) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ctx.num_velocity());
    const auto& f = ctx.data().force;
    if (!f) return out;
    const int nt = static_cast<int>(ctx.mesh().num_triangles());
    for (int t = 0; t < nt; ++t) {
        const auto ev = ctx.element_values(t, ctx.rhs_rule());
        const Eigen::Index nq = static_cast<Eigen::Index>(ev.rule.points.size());
        Eigen::VectorXd fx(nq), fy(nq);
        for (Eigen::Index q = 0; q < nq; ++q) {
            const Vec2 v = f(ev.rule.points[static_cast<std::size_t>(q)]) * ev.rule.weights[static_cast<std::size_t>(q)];
            fx[q] = v.x();
            fy[q] = v.y();
        }
        const Eigen::VectorXd local = ev.tx.transpose() * fx + ev.ty.transpose() * fy;
        for (std::size_t i = 0; i < ev.dofs.size(); ++i) out[ev.dofs[i]] += local[static_cast<Eigen::Index>(i)];
    }
    return out;
}

Eigen::VectorXd assemble_outflow_traction(const FormContext& ctx) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ctx.num_velocity());
    const auto& g = ctx.data().outflow_traction;
    if (!g) return out;
    const Mesh& mesh = ctx.mesh();
    const int deg = 2 * (ctx.degree() + 1) + 4;
    for (const auto& be : ctx.outflow_edges()) {
        const Vec2& a = mesh.vertex(mesh.edge(be.edge)[0]);
        const Vec2& b = mesh.vertex(mesh.edge(be.edge)[1]);
        const MappedEdgeRule r = map_to_physical(edge_rule(deg), a, b);
        const Eigen::MatrixXd basis = ctx.velocity().tabulate_at(be.triangle, r.points).values;
        const auto dofs = ctx.vector_dofs(be.triangle);
        const Eigen::Index nl = basis.cols();
        for (std::size_t q = 0; q < r.points.size(); ++q) {
            const Vec2 gv = g(r.points[q]) * r.weights[q];
            for (Eigen::Index i = 0; i < nl; ++i) {
                const double phi = basis(static_cast<Eigen::Index>(q), i);
                out[dofs[static_cast<std::size_t>(i)]] += gv.x() * phi;
                out[dofs[static_cast<std::size_t>(nl + i)]] += gv.y() * phi;
            }
        }
    }
    return out;
}

double trilinear_form(const FormContext& ctx, const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                      const Eigen::VectorXd& v) {
    double s = 0.0;
    const int nt = static_cast<int>(ctx.mesh().num_triangles());
    for (int t = 0; t < nt; ++t) {
        const auto ev = ctx.element_values(t, ctx.trilinear_rule());
        const Eigen::VectorXd omega = local_rot(ev.basis) * gather(w, ev.dofs);
        const Eigen::VectorXd zl = gather(z, ev.dofs), vl = gather(v, ev.dofs);
        const Eigen::VectorXd z1 = ev.tx * zl, z2 = ev.ty * zl, v1 = ev.tx * vl, v2 = ev.ty * vl;
        s += weights_of(ev.rule).dot(omega.cwiseProduct(z1.cwiseProduct(v2) - z2.cwiseProduct(v1)));
    }
    return s;
}

// ---------------------------------------------------------------------------

LinearSystem finalize_system(SparseMatrix matrix, Eigen::VectorXd rhs, const DirichletValues& constrained) {
    const int n = matrix.rows();
    if (matrix.cols() != n || rhs.size() != n) throw InvalidArgument("system dimensions are inconsistent");
    std::vector<char> fixed(static_cast<std::size_t>(n), 0);
    std::vector<double> value(static_cast<std::size_t>(n), 0.0);
    for (const auto& [dof, v] : constrained) {
        if (dof < 0 || dof >= n) throw InvalidArgument("constrained dof " + std::to_string(dof) + " out of range");
        if (matrix.find(dof, dof) < 0) throw InvalidArgument("constrained dof without stored diagonal");
        fixed[dof] = 1;
        value[dof] = v;
    }
    const auto& ptr = matrix.row_ptr();
    const auto& col = matrix.col_idx();
    auto& val = matrix.values();
    for (int r = 0; r < n; ++r) {
        if (fixed[r]) {
            for (int p = ptr[r]; p < ptr[r + 1]; ++p) val[p] = col[p] == r ? 1.0 : 0.0;
            rhs[r] = value[r];
            continue;
        }
        for (int p = ptr[r]; p < ptr[r + 1]; ++p)
            if (fixed[col[p]]) {
                rhs[r] -= val[p] * value[col[p]];
                val[p] = 0.0;
            }
    }
    return {std::move(matrix), std::move(rhs), constrained};
}

SystemAssembler::SystemAssembler(const FormContext& ctx) : ctx_(&ctx) {
    const int nv = ctx.num_velocity();
    const int np = ctx.num_pressure();
    const int n = ctx.system_size();
    const int nt = static_cast<int>(ctx.mesh().num_triangles());

    std::vector<std::vector<int>> pat(static_cast<std::size_t>(n));
    for (int t = 0; t < nt; ++t) {
        const auto vd = ctx.vector_dofs(t);
        const auto pd = pressure_dofs(ctx, t);
        for (int r : vd) {
            auto& row = pat[static_cast<std::size_t>(r)];
            row.insert(row.end(), vd.begin(), vd.end());
            for (int q : pd) row.push_back(nv + q);
        }
        for (int q : pd) {
            auto& row = pat[static_cast<std::size_t>(nv + q)];
            row.insert(row.end(), vd.begin(), vd.end());
            if (ctx.has_multiplier()) row.push_back(nv + np);
        }
        // Deduplicate occasionally to bound memory on large meshes.
        if ((t & 255) == 255)
            for (auto& row : pat) {
                std::sort(row.begin(), row.end());
                row.erase(std::unique(row.begin(), row.end()), row.end());
            }
    }
    if (ctx.has_multiplier())
        for (int q = 0; q < np; ++q) pat[static_cast<std::size_t>(nv + np)].push_back(nv + q);
    pattern_ = SparseMatrix::from_pattern(n, n, std::move(pat));

    SparseMatrix acc = pattern_;
    for (int t = 0; t < nt; ++t) {
        const auto ev = ctx.element_values(t, ctx.bilinear_rule());
        const Eigen::MatrixXd K = local_viscous(ev);
        for (std::size_t i = 0; i < ev.dofs.size(); ++i)
            for (std::size_t j = 0; j < ev.dofs.size(); ++j)
                acc.add(ev.dofs[i], ev.dofs[j], K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    viscous_ = acc.values();

    acc.set_zero();
    for (int t = 0; t < nt; ++t) {
        const auto ev = ctx.element_values(t, ctx.bilinear_rule());
        const Eigen::MatrixXd B = local_div(ctx, t, ev);
        const auto pd = pressure_dofs(ctx, t);
        for (std::size_t a = 0; a < pd.size(); ++a)
            for (std::size_t j = 0; j < ev.dofs.size(); ++j) {
                const double v = B(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j));
                acc.add(nv + pd[a], ev.dofs[j], v);
                acc.add(ev.dofs[j], nv + pd[a], v);
            }
    }
    mass_u_ = assemble_velocity_mass(ctx);
    mass_p_ = assemble_pressure_mass(ctx);
    if (ctx.has_multiplier()) {
        // Row of pressure-basis integrals enforcing a mean-zero pressure.
        for (int t = 0; t < nt; ++t) {
            const MappedRule mr = map_to_physical(ctx.bilinear_rule(), TriangleMap::of(ctx.mesh(), t));
            const ElementBasis pb = ctx.pressure().tabulate(t, mr);
            const Eigen::VectorXd integrals = pb.values.transpose() * weights_of(mr);
            const auto pd = pressure_dofs(ctx, t);
            for (std::size_t a = 0; a < pd.size(); ++a) {
                acc.add(nv + np, nv + pd[a], integrals[static_cast<Eigen::Index>(a)]);
                acc.add(nv + pd[a], nv + np, integrals[static_cast<Eigen::Index>(a)]);
            }
        }
    }
    coupling_ = acc.values();

    load_ = assemble_rhs(ctx) - assemble_outflow_traction(ctx);
}

void SystemAssembler::linearize(const Eigen::VectorXd& x, bool convection, SparseMatrix& jacobian,
                                Eigen::VectorXd& residual) const {
    const FormContext& ctx = *ctx_;
    if (x.size() != size()) throw InvalidArgument("state vector size mismatch");
    const int nv = ctx.num_velocity();
    jacobian = pattern_;
    auto& val = jacobian.values();
    const double nu = ctx.nu();
    for (std::size_t p = 0; p < val.size(); ++p) val[p] = nu * viscous_[p] + coupling_[p];
    residual = jacobian * x;
    residual.head(nv) -= load_;
    if (!convection) return;

    Eigen::MatrixXd mat;
    Eigen::VectorXd res;
    const int nt = static_cast<int>(ctx.mesh().num_triangles());
    auto add_local = [&](const std::vector<int>& dofs) {
        for (std::size_t i = 0; i < dofs.size(); ++i) {
            residual[dofs[i]] += res[static_cast<Eigen::Index>(i)];
            for (std::size_t j = 0; j < dofs.size(); ++j)
                jacobian.add(dofs[i], dofs[j], mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
    };
    for (int t = 0; t < nt; ++t) {
        const auto ev = ctx.element_values(t, ctx.trilinear_rule());
        local_trilinear(ev, gather(x, ev.dofs), mat, res);
        add_local(ev.dofs);
    }
    if (ctx.config().outflow_convection) {
        for (const auto& be : ctx.outflow_edges()) {
            const EdgeValues ev = edge_values(ctx, be, outflow_degree(ctx.degree()));
            local_outflow(ev, be.normal, gather(x, ev.dofs), mat, res);
            add_local(ev.dofs);
        }
    }
}

LinearSystem SystemAssembler::correction_system(const Eigen::VectorXd& x, bool convection,
                                                const DirichletValues& bc) const {
    SparseMatrix J;
    Eigen::VectorXd F;
    linearize(x, convection, J, F);
    DirichletValues delta;
    for (const auto& [dof, g] : bc) delta[dof] = g - x[dof];
    return finalize_system(std::move(J), -F, delta);
}

}  // namespace prns
