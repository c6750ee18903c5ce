#include "prns/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "prns/error.hpp"

namespace prns {

namespace {

std::mutex& table_mutex() {
    static std::mutex m;
    return m;
}

int interior_rule_degree(int k) { return std::min(kMaxTriangleDegree, 2 * (k + 1) + 4); }

}  // namespace

// ---------------------------------------------------------------------------
// ReferenceElement

ReferenceElement::ReferenceElement(int m, bool bubbles) : degree_(m), max_degree_(bubbles ? m + 1 : m) {
    const std::array<Vec2, 3> v{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    nodes_.assign(v.begin(), v.end());
    for (int i = 0; i < 3; ++i) {
        const Vec2& a = v[(i + 1) % 3];
        const Vec2& b = v[(i + 2) % 3];
        for (int j = 1; j < m; ++j) nodes_.push_back(a + (static_cast<double>(j) / m) * (b - a));
    }
    for (int b = 1; b < m; ++b)
        for (int a = 1; a + b < m; ++a) nodes_.emplace_back(static_cast<double>(a) / m, static_cast<double>(b) / m);

    const int nn = static_cast<int>(nodes_.size());
    const int nmono = poly_dim(max_degree_);
    const int nbub = bubbles ? m - 1 : 0;
    coeffs_ = Eigen::MatrixXd::Zero(nmono, nn + nbub);

    Eigen::MatrixXd V(nn, nn);
    Eigen::VectorXd mv(poly_dim(m)), mx(poly_dim(m)), my(poly_dim(m));
    for (int r = 0; r < nn; ++r) {
        eval_monomials(m, nodes_[r], mv, mx, my);
        V.row(r) = mv.transpose();
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
    coeffs_.topLeftCorner(nn, nn) = lu.inverse();

    if (nbub > 0) {
        const Poly2 cubic = Poly2::affine(1.0, -1.0, -1.0) * Poly2::monomial(1, 1);
        const auto exps = monomial_exponents(max_degree_);
        for (int i = 0; i < nbub; ++i) {
            const Poly2 p = cubic * Poly2::monomial(i, m - 2 - i);
            for (int r = 0; r < nmono; ++r) coeffs_(r, nn + i) = p.coeff(exps[r][0], exps[r][1]);
        }
    }
}

const ReferenceElement& ReferenceElement::lagrange(int m) {
    if (m < 1 || m > 8) throw InvalidArgument("Lagrange degree " + std::to_string(m) + " unsupported (1..8)");
    static std::array<std::unique_ptr<ReferenceElement>, 9> cache;
    std::lock_guard lock(table_mutex());
    auto& slot = cache[static_cast<std::size_t>(m)];
    if (!slot) slot.reset(new ReferenceElement(m, false));
    return *slot;
}

const ReferenceElement& ReferenceElement::lagrange_bubble(int k) {
    if (k < 2 || k > 8) throw InvalidArgument("velocity degree " + std::to_string(k) + " unsupported (2..8)");
    static std::array<std::unique_ptr<ReferenceElement>, 9> cache;
    std::lock_guard lock(table_mutex());
    auto& slot = cache[static_cast<std::size_t>(k)];
    if (!slot) slot.reset(new ReferenceElement(k, true));
    return *slot;
}

void ReferenceElement::eval(const Vec2& xi, Eigen::Ref<Eigen::VectorXd> values, Eigen::Ref<Eigen::VectorXd> dxi,
                            Eigen::Ref<Eigen::VectorXd> deta) const {
    const int nmono = poly_dim(max_degree_);
    Eigen::VectorXd mv(nmono), mx(nmono), my(nmono);
    eval_monomials(max_degree_, xi, mv, mx, my);
    values = coeffs_.transpose() * mv;
    dxi = coeffs_.transpose() * mx;
    deta = coeffs_.transpose() * my;
}

const ReferenceElement::Table& ReferenceElement::tabulate(const TriangleRule& rule) const {
    std::lock_guard lock(table_mutex());
    auto& slot = tables_[&rule];
    if (!slot) {
        const int nq = static_cast<int>(rule.points.size());
        const int nb = num_functions();
        auto t = std::make_unique<Table>();
        t->values.resize(nq, nb);
        t->dxi.resize(nq, nb);
        t->deta.resize(nq, nb);
        Eigen::VectorXd v(nb), dx(nb), dy(nb);
        for (int q = 0; q < nq; ++q) {
            eval(rule.points[q], v, dx, dy);
            t->values.row(q) = v.transpose();
            t->dxi.row(q) = dx.transpose();
            t->deta.row(q) = dy.transpose();
        }
        slot = std::move(t);
    }
    return *slot;
}

// ---------------------------------------------------------------------------
// FunctionSpace

FunctionSpace FunctionSpace::lagrange(const Mesh& mesh, int m, int components) {
    if (components != 1 && components != 2) throw InvalidArgument("components must be 1 or 2");
    FunctionSpace s;
    s.mesh_ = &mesh;
    s.kind_ = SpaceKind::lagrange;
    s.degree_ = m;
    s.components_ = components;
    s.ref_ = &ReferenceElement::lagrange(m);
    s.number_continuous();
    return s;
}

FunctionSpace FunctionSpace::velocity(const Mesh& mesh, int k) {
    FunctionSpace s;
    s.mesh_ = &mesh;
    s.kind_ = SpaceKind::lagrange_bubble;
    s.degree_ = k;
    s.components_ = 2;
    s.ref_ = &ReferenceElement::lagrange_bubble(k);
    s.number_continuous();
    return s;
}

FunctionSpace FunctionSpace::discontinuous(const Mesh& mesh, int m) {
    if (m < 0 || m > 8) throw InvalidArgument("discontinuous degree " + std::to_string(m) + " unsupported (0..8)");
    FunctionSpace s;
    s.mesh_ = &mesh;
    s.kind_ = SpaceKind::discontinuous;
    s.degree_ = m;
    s.components_ = 1;
    s.build_discontinuous();
    return s;
}

void FunctionSpace::number_continuous() {
    const Mesh& mesh = *mesh_;
    const int m = degree_;
    const int nv = static_cast<int>(mesh.num_vertices());
    const int ne = static_cast<int>(mesh.num_edges());
    const int nt = static_cast<int>(mesh.num_triangles());
    const int per_edge = m - 1;
    const int n_int = ref_->num_interior();
    local_size_ = ref_->num_functions();
    scalar_dim_ = nv + per_edge * ne + n_int * nt;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    nodal_.assign(static_cast<std::size_t>(scalar_dim_), 1);
    node_points_.assign(static_cast<std::size_t>(scalar_dim_), Vec2(nan, nan));
    for (int v = 0; v < nv; ++v) node_points_[v] = mesh.vertex(v);
    for (int e = 0; e < ne; ++e) {
        const Vec2& a = mesh.vertex(mesh.edge(e)[0]);
        const Vec2& b = mesh.vertex(mesh.edge(e)[1]);
        for (int j = 0; j < per_edge; ++j)
            node_points_[nv + per_edge * e + j] = a + (static_cast<double>(j + 1) / m) * (b - a);
    }

    dofs_.resize(static_cast<std::size_t>(local_size_) * nt);
    const int interior_base = nv + per_edge * ne;
    const int n_lagrange_interior = ref_->num_nodal() - 3 - 3 * per_edge;
    for (int t = 0; t < nt; ++t) {
        int* d = dofs_.data() + static_cast<std::size_t>(t) * local_size_;
        const auto& tri = mesh.triangle(t);
        for (int i = 0; i < 3; ++i) d[i] = tri[i];
        for (int i = 0; i < 3; ++i) {
            const int e = mesh.triangle_edge(t, i);
            const bool same = mesh.edge_sign(t, i) > 0;
            for (int j = 0; j < per_edge; ++j)
                d[3 + per_edge * i + j] = nv + per_edge * e + (same ? j : per_edge - 1 - j);
        }
        const TriangleMap map = TriangleMap::of(mesh, t);
        for (int j = 0; j < n_int; ++j) {
            const int g = interior_base + n_int * t + j;
            d[3 + 3 * per_edge + j] = g;
            if (j < n_lagrange_interior) {
                node_points_[g] = map.to_physical(ref_->nodes()[3 + 3 * per_edge + j]);
            } else {
                nodal_[g] = 0;
            }
        }
    }
}

void FunctionSpace::build_discontinuous() {
    const Mesh& mesh = *mesh_;
    const int nt = static_cast<int>(mesh.num_triangles());
    const int np = poly_dim(degree_);
    local_size_ = np;
    scalar_dim_ = np * nt;
    dofs_.resize(static_cast<std::size_t>(scalar_dim_));
    for (int i = 0; i < scalar_dim_; ++i) dofs_[i] = i;
    nodal_.assign(static_cast<std::size_t>(scalar_dim_), 0);
    node_points_.assign(static_cast<std::size_t>(scalar_dim_), Vec2::Zero());

    centers_.resize(nt);
    scales_.resize(nt);
    transforms_.resize(nt);
    const TriangleRule& rule = triangle_rule(std::min(kMaxTriangleDegree, 2 * degree_));
    Eigen::VectorXd mv(np), mx(np), my(np);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangle(t);
        centers_[t] = (mesh.vertex(tri[0]) + mesh.vertex(tri[1]) + mesh.vertex(tri[2])) / 3.0;
        scales_[t] = mesh.diameter(t);
        const MappedRule mr = map_to_physical(rule, TriangleMap::of(mesh, t));
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(np, np);
        for (std::size_t q = 0; q < mr.points.size(); ++q) {
            eval_monomials(degree_, (mr.points[q] - centers_[t]) / scales_[t], mv, mx, my);
            G.noalias() += mr.weights[q] * mv * mv.transpose();
        }
        G /= mesh.area(t);
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() != Eigen::Success) throw GeometryError("singular local pressure mass matrix");
        Eigen::MatrixXd L = llt.matrixL();
        transforms_[t] = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(np, np));
    }
}

ElementBasis FunctionSpace::tabulate(int t, const MappedRule& rule) const {
    if (kind_ == SpaceKind::discontinuous || rule.rule == nullptr) return tabulate_at(t, rule.points);
    const auto& tab = ref_->tabulate(*rule.rule);
    const Eigen::Matrix2d& G = rule.map.inverse_transpose;
    ElementBasis out;
    out.values = tab.values;
    out.dx = G(0, 0) * tab.dxi + G(0, 1) * tab.deta;
    out.dy = G(1, 0) * tab.dxi + G(1, 1) * tab.deta;
    return out;
}

ElementBasis FunctionSpace::tabulate_at(int t, std::span<const Vec2> points) const {
    const int nq = static_cast<int>(points.size());
    ElementBasis out;
    out.values.resize(nq, local_size_);
    out.dx.resize(nq, local_size_);
    out.dy.resize(nq, local_size_);
    Eigen::VectorXd v(local_size_), dx(local_size_), dy(local_size_);
    if (kind_ == SpaceKind::discontinuous) {
        const Eigen::MatrixXd& T = transforms_[t];
        const double h = scales_[t];
        for (int q = 0; q < nq; ++q) {
            eval_monomials(degree_, (points[q] - centers_[t]) / h, v, dx, dy);
            out.values.row(q) = (T * v).transpose();
            out.dx.row(q) = (T * dx).transpose() / h;
            out.dy.row(q) = (T * dy).transpose() / h;
        }
        return out;
    }
    const TriangleMap map = TriangleMap::of(*mesh_, t);
    const Eigen::Matrix2d& G = map.inverse_transpose;
    for (int q = 0; q < nq; ++q) {
        ref_->eval(map.to_reference(points[q]), v, dx, dy);
        out.values.row(q) = v.transpose();
        out.dx.row(q) = (G(0, 0) * dx + G(0, 1) * dy).transpose();
        out.dy.row(q) = (G(1, 0) * dx + G(1, 1) * dy).transpose();
    }
    return out;
}

std::vector<int> FunctionSpace::boundary_dofs(const std::string& tag) const {
    if (kind_ == SpaceKind::discontinuous) return {};
    if (!mesh_->has_tag(tag)) throw InvalidArgument("unknown boundary tag '" + tag + "'");
    const int nv = static_cast<int>(mesh_->num_vertices());
    const int per_edge = degree_ - 1;
    std::vector<int> out;
    for (int e : mesh_->tagged_edges(tag)) {
        out.push_back(mesh_->edge(e)[0]);
        out.push_back(mesh_->edge(e)[1]);
        for (int j = 0; j < per_edge; ++j) out.push_back(nv + per_edge * e + j);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// DiscreteField

DiscreteField::DiscreteField(const FunctionSpace& space)
    : space_(&space), coeffs_(Eigen::VectorXd::Zero(space.dim())) {}

DiscreteField::DiscreteField(const FunctionSpace& space, Eigen::VectorXd coefficients)
    : space_(&space), coeffs_(std::move(coefficients)) {
    if (coeffs_.size() != space.dim()) throw InvalidArgument("coefficient vector does not match space dimension");
}

Vec2 DiscreteField::value(int t, const Vec2& x) const {
    const Vec2 pts[1] = {x};
    const ElementBasis b = space_->tabulate_at(t, pts);
    const auto dofs = space_->element_dofs(t);
    Vec2 out = Vec2::Zero();
    for (int c = 0; c < space_->components(); ++c)
        for (std::size_t i = 0; i < dofs.size(); ++i)
            out[c] += coeffs_[c * space_->scalar_dim() + dofs[i]] * b.values(0, static_cast<int>(i));
    return out;
}

Eigen::Matrix2d DiscreteField::gradient(int t, const Vec2& x) const {
    const Vec2 pts[1] = {x};
    const ElementBasis b = space_->tabulate_at(t, pts);
    const auto dofs = space_->element_dofs(t);
    Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
    for (int c = 0; c < space_->components(); ++c)
        for (std::size_t i = 0; i < dofs.size(); ++i) {
            const double u = coeffs_[c * space_->scalar_dim() + dofs[i]];
            out(c, 0) += u * b.dx(0, static_cast<int>(i));
            out(c, 1) += u * b.dy(0, static_cast<int>(i));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Interpolation

namespace {

using ComponentFunction = std::function<Vec2(const Vec2&)>;

DiscreteField interpolate_impl(const FunctionSpace& space, const ComponentFunction& f) {
    DiscreteField out(space);
    Eigen::VectorXd& c = out.coefficients();
    const Mesh& mesh = space.mesh();
    const int ns = space.scalar_dim();
    const int ncomp = space.components();
    const int nt = static_cast<int>(mesh.num_triangles());

    if (space.kind() == SpaceKind::discontinuous) {
        const TriangleRule& rule = triangle_rule(interior_rule_degree(space.degree()));
        for (int t = 0; t < nt; ++t) {
            const MappedRule mr = map_to_physical(rule, TriangleMap::of(mesh, t));
            const ElementBasis b = space.tabulate(t, mr);
            const auto dofs = space.element_dofs(t);
            for (std::size_t q = 0; q < mr.points.size(); ++q) {
                const double fq = f(mr.points[q])[0] * mr.weights[q] / mesh.area(t);
                for (std::size_t i = 0; i < dofs.size(); ++i) c[dofs[i]] += fq * b.values(static_cast<int>(q), static_cast<int>(i));
            }
        }
        return out;
    }

    for (int d = 0; d < ns; ++d) {
        if (!space.is_nodal(d)) continue;
        const Vec2 v = f(space.node_point(d));
        for (int k = 0; k < ncomp; ++k) c[k * ns + d] = v[k];
    }

    const ReferenceElement& ref = *space.reference();
    const int nb = ref.num_bubbles();
    if (nb == 0) return out;
    const int nn = ref.num_nodal();
    const TriangleRule& rule = triangle_rule(interior_rule_degree(space.degree()));
    for (int t = 0; t < nt; ++t) {
        const MappedRule mr = map_to_physical(rule, TriangleMap::of(mesh, t));
        const ElementBasis b = space.tabulate(t, mr);
        const auto dofs = space.element_dofs(t);
        const int nq = static_cast<int>(mr.points.size());
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nb, nb);
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nb, ncomp);
        for (int q = 0; q < nq; ++q) {
            const Vec2 fq = f(mr.points[q]);
            for (int k = 0; k < ncomp; ++k) {
                double r = fq[k];
                for (int i = 0; i < nn; ++i) r -= c[k * ns + dofs[i]] * b.values(q, i);
                for (int i = 0; i < nb; ++i) rhs(i, k) += mr.weights[q] * r * b.values(q, nn + i);
            }
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j) M(i, j) += mr.weights[q] * b.values(q, nn + i) * b.values(q, nn + j);
        }
        const Eigen::MatrixXd sol = M.ldlt().solve(rhs);
        for (int k = 0; k < ncomp; ++k)
            for (int i = 0; i < nb; ++i) c[k * ns + dofs[nn + i]] = sol(i, k);
    }
    return out;
}

}  // namespace

DiscreteField interpolate(const FunctionSpace& space, const ScalarFunction& f) {
    if (space.components() != 1) throw InvalidArgument("scalar function given for a vector space");
    return interpolate_impl(space, [&](const Vec2& x) { return Vec2(f(x), 0.0); });
}

DiscreteField interpolate(const FunctionSpace& space, const VectorFunction& f) {
    if (space.components() != 2) throw InvalidArgument("vector function given for a scalar space");
    return interpolate_impl(space, f);
}

DirichletValues set_dirichlet_values(const FunctionSpace& space, const std::vector<DirichletData>& data) {
    DirichletValues out;
    const int ns = space.scalar_dim();
    for (const auto& d : data) {
        for (int dof : space.boundary_dofs(d.tag)) {
            const Vec2 v = d.value(space.node_point(dof));
            for (int k = 0; k < space.components(); ++k) out[k * ns + dof] = v[k];
        }
    }
    return out;
}

}  // namespace prns
