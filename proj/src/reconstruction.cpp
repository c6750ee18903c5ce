#include "prns/reconstruction.hpp"

#include <Eigen/LU>

#include "prns/error.hpp"

namespace prns {

Reconstruction::Reconstruction(const FunctionSpace& velocity, InteriorMoments moments)
    : space_(&velocity), k_(velocity.degree()), moments_(moments) {
    if (velocity.kind() != SpaceKind::lagrange_bubble)
        throw InvalidArgument("reconstruction requires the bubble-enriched velocity space");
    const Mesh& mesh = velocity.mesh();
    const int nt = static_cast<int>(mesh.num_triangles());
    centers_.resize(nt);
    scales_.resize(nt);
    ops_.resize(nt);
    for (int t = 0; t < nt; ++t) build_element(t);
}

void Reconstruction::build_element(int t) {
    const Mesh& mesh = space_->mesh();
    const int k = k_;
    const int nm = poly_dim(k);
    const int nd = 2 * nm;
    const int nloc = space_->local_size();
    const auto& tri = mesh.triangle(t);
    const Vec2 c = (mesh.vertex(tri[0]) + mesh.vertex(tri[1]) + mesh.vertex(tri[2])) / 3.0;
    const double h = mesh.diameter(t);
    centers_[t] = c;
    scales_[t] = h;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nd, nd);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nd, 2 * nloc);
    Eigen::VectorXd mv(nm), mx(nm), my(nm), leg(k + 1);

    // Edge normal moments, weights normalised by the edge length.
    const EdgeRule& er = edge_rule(2 * k + 1);
    int row = 0;
    for (int i = 0; i < 3; ++i) {
        const int e = mesh.triangle_edge(t, i);
        const Vec2& a = mesh.vertex(mesh.edge(e)[0]);
        const Vec2& b = mesh.vertex(mesh.edge(e)[1]);
        const Vec2 n = mesh.edge_normal(e);
        std::vector<Vec2> pts;
        for (double s : er.points) pts.push_back(a + s * (b - a));
        const ElementBasis vb = space_->tabulate_at(t, pts);
        for (std::size_t q = 0; q < pts.size(); ++q) {
            const double w = er.weights[q];
            shifted_legendre(k, er.points[q], leg);
            eval_monomials(k, (pts[q] - c) / h, mv, mx, my);
            for (int j = 0; j <= k; ++j) {
                const double wl = w * leg[j];
                A.row(row + j).head(nm) += wl * n.x() * mv.transpose();
                A.row(row + j).tail(nm) += wl * n.y() * mv.transpose();
                const int qi = static_cast<int>(q);
                L.row(row + j).head(nloc) += wl * n.x() * vb.values.row(qi);
                L.row(row + j).tail(nloc) += wl * n.y() * vb.values.row(qi);
            }
        }
        row += k + 1;
    }

    // Interior moments, with the test fields written in scaled coordinates.
    const TriangleMap map = TriangleMap::of(mesh, t);
    const MappedRule mr = map_to_physical(triangle_rule(2 * k + 2), map);
    const ElementBasis vb = space_->tabulate(t, mr);
    const Eigen::Matrix2d& G = map.inverse_transpose;
    const Vec2 g1 = h * G.col(0);
    const Vec2 g2 = h * G.col(1);
    const Vec2 g0 = -(g1 + g2);
    const double area = mesh.area(t);
    const int nlow = poly_dim(k - 2);
    const int ninterior = k * k - 1;
    Eigen::VectorXd zv(poly_dim(k - 1)), zx(zv.size()), zy(zv.size());
    Eigen::VectorXd wv(nlow), wx(nlow), wy(nlow);
    std::vector<Vec2> test;
    for (std::size_t q = 0; q < mr.points.size(); ++q) {
        const int qi = static_cast<int>(q);
        const double w = mr.weights[q] / area;
        const Vec2 s = (mr.points[q] - c) / h;
        eval_monomials(k, s, mv, mx, my);
        test.clear();
        eval_monomials(k - 2, s, wv, wx, wy);
        if (moments_ == InteriorMoments::nedelec) {
            for (int j = 0; j < nlow; ++j) test.emplace_back(wv[j], 0.0);
            for (int j = 0; j < nlow; ++j) test.emplace_back(0.0, wv[j]);
            // The homogeneous monomials of degree k-2 are the last k-1 entries.
            for (int j = poly_dim(k - 3); j < nlow; ++j) test.emplace_back(-s.y() * wv[j], s.x() * wv[j]);
        } else {
            eval_monomials(k - 1, s, zv, zx, zy);
            for (int j = 1; j < poly_dim(k - 1); ++j) test.emplace_back(zx[j], zy[j]);
            const Vec2 xi = mr.reference_points[q];
            const double l1 = xi.x(), l2 = xi.y(), l0 = 1.0 - l1 - l2;
            const double bt = l0 * l1 * l2;
            const Vec2 gb = l1 * l2 * g0 + l0 * l2 * g1 + l0 * l1 * g2;
            for (int j = 0; j < nlow; ++j) {
                const Vec2 gpsi = wv[j] * gb + bt * Vec2(wx[j], wy[j]);
                test.emplace_back(gpsi.y(), -gpsi.x());
            }
        }
        for (int j = 0; j < ninterior; ++j) {
            const Vec2& m = test[static_cast<std::size_t>(j)];
            A.row(row + j).head(nm) += w * m.x() * mv.transpose();
            A.row(row + j).tail(nm) += w * m.y() * mv.transpose();
            L.row(row + j).head(nloc) += w * m.x() * vb.values.row(qi);
            L.row(row + j).tail(nloc) += w * m.y() * vb.values.row(qi);
        }
    }
    row += ninterior;
    if (row != nd) throw Error("internal: BDM functional count mismatch");

    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) throw GeometryError("BDM moment matrix is singular on element " + std::to_string(t));
    ops_[t] = lu.solve(L);
}

Reconstruction::Values Reconstruction::evaluate(int t, std::span<const Vec2> points) const {
    const int nm = poly_dim(k_);
    const int nq = static_cast<int>(points.size());
    Eigen::MatrixXd M(nq, nm), Mx(nq, nm), My(nq, nm);
    Eigen::VectorXd mv(nm), mx(nm), my(nm);
    const double h = scales_[t];
    for (int q = 0; q < nq; ++q) {
        eval_monomials(k_, (points[q] - centers_[t]) / h, mv, mx, my);
        M.row(q) = mv.transpose();
        Mx.row(q) = mx.transpose() / h;
        My.row(q) = my.transpose() / h;
    }
    const Eigen::MatrixXd& R = ops_[t];
    Values out;
    out.x = M * R.topRows(nm);
    out.y = M * R.bottomRows(nm);
    out.div = Mx * R.topRows(nm) + My * R.bottomRows(nm);
    return out;
}

Eigen::VectorXd Reconstruction::local_coefficients(const DiscreteField& u, int t) const {
    const auto dofs = space_->element_dofs(t);
    const int nloc = static_cast<int>(dofs.size());
    const int ns = space_->scalar_dim();
    Eigen::VectorXd out(2 * nloc);
    for (int i = 0; i < nloc; ++i) {
        out[i] = u.coefficients()[dofs[i]];
        out[nloc + i] = u.coefficients()[ns + dofs[i]];
    }
    return out;
}

Vec2 Reconstruction::apply(const DiscreteField& u, int t, const Vec2& x) const {
    const Vec2 pts[1] = {x};
    const Values v = evaluate(t, pts);
    const Eigen::VectorXd c = local_coefficients(u, t);
    return {v.x.row(0).dot(c), v.y.row(0).dot(c)};
}

double Reconstruction::apply_divergence(const DiscreteField& u, int t, const Vec2& x) const {
    const Vec2 pts[1] = {x};
    const Values v = evaluate(t, pts);
    return v.div.row(0).dot(local_coefficients(u, t));
}

}  // namespace prns
