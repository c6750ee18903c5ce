#include "prns/postprocess.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/QR>

#include "prns/assembly.hpp"
#include "prns/error.hpp"
#include "prns/linalg.hpp"
#include "prns/quadrature.hpp"

namespace prns {

namespace {

int default_degree(const FunctionSpace& s, int degree) {
    const int k = s.kind() == SpaceKind::discontinuous ? s.degree() + 1 : s.degree();
    return std::min(kMaxTriangleDegree, degree >= 0 ? degree : 2 * (k + 1) + 4);
}

/// Values of the field's components at points of element t (nq x 2).
Eigen::MatrixXd values_at(const DiscreteField& f, const ElementBasis& b, int t) {
    const FunctionSpace& s = f.space();
    const auto dofs = s.element_dofs(t);
    const int ns = s.scalar_dim();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(b.values.rows(), 2);
    for (int c = 0; c < s.components(); ++c) {
        Eigen::VectorXd loc(static_cast<Eigen::Index>(dofs.size()));
        for (std::size_t i = 0; i < dofs.size(); ++i) loc[static_cast<Eigen::Index>(i)] = f.coefficients()[c * ns + dofs[i]];
        out.col(c) = b.values * loc;
    }
    return out;
}

void gradients_at(const DiscreteField& f, const ElementBasis& b, int t, Eigen::MatrixXd& gx, Eigen::MatrixXd& gy) {
    const FunctionSpace& s = f.space();
    const auto dofs = s.element_dofs(t);
    const int ns = s.scalar_dim();
    gx = Eigen::MatrixXd::Zero(b.values.rows(), 2);
    gy = Eigen::MatrixXd::Zero(b.values.rows(), 2);
    for (int c = 0; c < s.components(); ++c) {
        Eigen::VectorXd loc(static_cast<Eigen::Index>(dofs.size()));
        for (std::size_t i = 0; i < dofs.size(); ++i) loc[static_cast<Eigen::Index>(i)] = f.coefficients()[c * ns + dofs[i]];
        gx.col(c) = b.dx * loc;
        gy.col(c) = b.dy * loc;
    }
}

std::optional<double> value_at(const DiscreteField& f, const PointLocator& loc, const Vec2& x) {
    const auto hit = loc.locate(x);
    if (!hit) return std::nullopt;
    return f.value(hit->first, x)[0];
}

}  // namespace

ErrorNorms error_norms(const DiscreteField& u, const VectorFunction& exact, const GradientFunction& grad, int degree) {
    const FunctionSpace& s = u.space();
    const Mesh& mesh = s.mesh();
    const TriangleRule& rule = triangle_rule(default_degree(s, degree));
    double l2 = 0.0, h1 = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const MappedRule mr = map_to_physical(rule, TriangleMap::of(mesh, t));
        const ElementBasis b = s.tabulate(t, mr);
        const Eigen::MatrixXd v = values_at(u, b, t);
        Eigen::MatrixXd gx, gy;
        gradients_at(u, b, t, gx, gy);
        for (std::size_t q = 0; q < mr.points.size(); ++q) {
            const int qi = static_cast<int>(q);
            const Vec2 e = exact(mr.points[q]) - Vec2(v(qi, 0), v(qi, 1));
            const Eigen::Matrix2d g = grad(mr.points[q]);
            const double d00 = g(0, 0) - gx(qi, 0), d01 = g(0, 1) - gy(qi, 0);
            const double d10 = g(1, 0) - gx(qi, 1), d11 = g(1, 1) - gy(qi, 1);
            l2 += mr.weights[q] * e.squaredNorm();
            h1 += mr.weights[q] * (d00 * d00 + d01 * d01 + d10 * d10 + d11 * d11);
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

double relative_l2_error(const DiscreteField& p, const ScalarFunction& exact, bool zero_mean, int degree) {
    const FunctionSpace& s = p.space();
    const Mesh& mesh = s.mesh();
    const TriangleRule& rule = triangle_rule(default_degree(s, degree));
    // Accumulate integrals of p, p_h, p^2, p_h^2 and p p_h, then shift.
    double ip = 0.0, ih = 0.0, ipp = 0.0, ihh = 0.0, iph = 0.0, area = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const MappedRule mr = map_to_physical(rule, TriangleMap::of(mesh, t));
        const Eigen::MatrixXd v = values_at(p, s.tabulate(t, mr), t);
        for (std::size_t q = 0; q < mr.points.size(); ++q) {
            const double w = mr.weights[q];
            const double a = exact(mr.points[q]);
            const double b = v(static_cast<int>(q), 0);
            ip += w * a;
            ih += w * b;
            ipp += w * a * a;
            ihh += w * b * b;
            iph += w * a * b;
            area += w;
        }
    }
    double err2 = ipp - 2 * iph + ihh;
    double ref2 = ipp;
    if (zero_mean) {
        err2 -= (ip - ih) * (ip - ih) / area;
        ref2 -= ip * ip / area;
    }
    return std::sqrt(std::max(0.0, err2)) / std::sqrt(ref2);
}

double l2_norm(const DiscreteField& p) {
    const FunctionSpace& s = p.space();
    const Mesh& mesh = s.mesh();
    const TriangleRule& rule = triangle_rule(default_degree(s, -1));
    double sum = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const MappedRule mr = map_to_physical(rule, TriangleMap::of(mesh, t));
        const Eigen::MatrixXd v = values_at(p, s.tabulate(t, mr), t);
        for (std::size_t q = 0; q < mr.points.size(); ++q)
            sum += mr.weights[q] * v.row(static_cast<int>(q)).squaredNorm();
    }
    return std::sqrt(sum);
}

double mean_value(const DiscreteField& p) {
    const FunctionSpace& s = p.space();
    const Mesh& mesh = s.mesh();
    const TriangleRule& rule = triangle_rule(default_degree(s, -1));
    double sum = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const MappedRule mr = map_to_physical(rule, TriangleMap::of(mesh, t));
        const Eigen::MatrixXd v = values_at(p, s.tabulate(t, mr), t);
        for (std::size_t q = 0; q < mr.points.size(); ++q) sum += mr.weights[q] * v(static_cast<int>(q), 0);
    }
    return sum / mesh.total_area();
}

DiscreteField kinematic_pressure(const DiscreteField& u, const DiscreteField& p) {
    const FunctionSpace& ps = p.space();
    const FunctionSpace& vs = u.space();
    if (ps.kind() != SpaceKind::discontinuous) throw InvalidArgument("pressure must live in a discontinuous space");
    if (&ps.mesh() != &vs.mesh()) throw InvalidArgument("fields live on different meshes");
    const Mesh& mesh = ps.mesh();
    DiscreteField out = p;
    const TriangleRule& rule = triangle_rule(std::min(kMaxTriangleDegree, 2 * (vs.degree() + 1) + ps.degree()));
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const MappedRule mr = map_to_physical(rule, TriangleMap::of(mesh, t));
        const ElementBasis pb = ps.tabulate(t, mr);
        const Eigen::MatrixXd uv = values_at(u, vs.tabulate(t, mr), t);
        const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(mr.weights.data(), static_cast<Eigen::Index>(mr.weights.size()));
        const Eigen::MatrixXd M = pb.values.transpose() * w.asDiagonal() * pb.values;
        const Eigen::VectorXd rhs = pb.values.transpose() * w.cwiseProduct(uv.rowwise().squaredNorm());
        const Eigen::VectorXd c = M.ldlt().solve(rhs);
        const auto dofs = ps.element_dofs(t);
        for (std::size_t i = 0; i < dofs.size(); ++i) out.coefficients()[dofs[i]] -= 0.5 * c[static_cast<Eigen::Index>(i)];
    }
    return out;
}

DiscreteField streamfunction(const DiscreteField& u, const FunctionSpace& space) {
    const FunctionSpace& vs = u.space();
    if (vs.components() != 2) throw InvalidArgument("streamfunction needs a vector field");
    if (space.kind() != SpaceKind::lagrange || space.components() != 1 || &space.mesh() != &vs.mesh())
        throw InvalidArgument("streamfunction space must be scalar Lagrange on the velocity mesh");
    const Mesh& mesh = space.mesh();
    const int n = space.dim();
    const TriangleRule& rule = triangle_rule(std::min(kMaxTriangleDegree, space.degree() + vs.degree() + 2));
    std::vector<Triplet> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const MappedRule mr = map_to_physical(rule, TriangleMap::of(mesh, t));
        const ElementBasis b = space.tabulate(t, mr);
        const Eigen::MatrixXd uv = values_at(u, vs.tabulate(t, mr), t);
        const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(mr.weights.data(), static_cast<Eigen::Index>(mr.weights.size()));
        const Eigen::MatrixXd K = b.dx.transpose() * w.asDiagonal() * b.dx + b.dy.transpose() * w.asDiagonal() * b.dy;
        const Eigen::VectorXd f = b.dy.transpose() * w.cwiseProduct(uv.col(0)) - b.dx.transpose() * w.cwiseProduct(uv.col(1));
        const auto dofs = space.element_dofs(t);
        for (std::size_t i = 0; i < dofs.size(); ++i) {
            rhs[dofs[i]] += f[static_cast<Eigen::Index>(i)];
            for (std::size_t j = 0; j < dofs.size(); ++j)
                trip.push_back({dofs[i], dofs[j], K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
        }
    }
    DirichletValues bc;
    for (const auto& tag : mesh.tags())
        for (int d : space.boundary_dofs(tag)) bc[d] = 0.0;
    LinearSystem sys = finalize_system(SparseMatrix::from_triplets(n, n, std::move(trip)), std::move(rhs), bc);
    return DiscreteField(space, lu_solve(sys.matrix, sys.rhs));
}

VortexInfo vortex_center(const DiscreteField& phi, int samples) {
    if (samples < 5) throw InvalidArgument("vortex search needs at least 5 samples per side");
    const Mesh& mesh = phi.space().mesh();
    const PointLocator loc(mesh);
    const auto [lo, hi] = mesh.bounding_box();
    const double dx = (hi.x() - lo.x()) / (samples - 1);
    const double dy = (hi.y() - lo.y()) / (samples - 1);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd grid(samples, samples);
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < samples; ++j)
        for (int i = 0; i < samples; ++i) {
            const Vec2 x(lo.x() + i * dx, lo.y() + j * dy);
            const auto v = value_at(phi, loc, x);
            grid(i, j) = v ? *v : nan;
            if (v && *v < best) {
                best = *v;
                bi = i;
                bj = j;
            }
        }
    if (bi < 0) throw Error("field could not be sampled");
    if (bi == 0 || bj == 0 || bi == samples - 1 || bj == samples - 1)
        throw Error("minimum lies on the boundary; no interior vortex");

    Eigen::MatrixXd A(9, 6);
    Eigen::VectorXd b(9);
    int r = 0;
    for (int oj = -1; oj <= 1; ++oj)
        for (int oi = -1; oi <= 1; ++oi, ++r) {
            const double a = oi * dx, c = oj * dy;
            A.row(r) << 1.0, a, c, a * a, a * c, c * c;
            b[r] = grid(bi + oi, bj + oj);
        }
    Vec2 center(lo.x() + bi * dx, lo.y() + bj * dy);
    if (b.allFinite()) {
        const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
        Eigen::Matrix2d H;
        H << 2 * c[3], c[4], c[4], 2 * c[5];
        const Vec2 g(c[1], c[2]);
        if (H(0, 0) > 0.0 && H.determinant() > 0.0) {
            const Vec2 step = -H.inverse() * g;
            if (std::abs(step.x()) <= dx && std::abs(step.y()) <= dy) center += step;
        }
    }
    const auto v = value_at(phi, loc, center);
    if (!v) throw Error("refined vortex center left the mesh");
    return {center, *v};
}

std::vector<std::pair<double, Vec2>> sample_line(const DiscreteField& f, const Vec2& a, const Vec2& b, int n) {
    if (n < 2) throw InvalidArgument("sample_line needs at least two samples");
    const PointLocator loc(f.space().mesh());
    std::vector<std::pair<double, Vec2>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / (n - 1);
        const Vec2 x = a + s * (b - a);
        const auto hit = loc.locate(x);
        if (!hit) {
            std::ostringstream msg;
            msg << "sample point (" << x.x() << ", " << x.y() << ") is outside the mesh";
            throw GeometryError(msg.str());
        }
        out.emplace_back(s, f.value(hit->first, x));
    }
    return out;
}

void export_vtk(const Mesh& mesh, const std::vector<NamedField>& fields, const std::filesystem::path& path,
                int subdivisions) {
    if (subdivisions < 1) throw InvalidArgument("subdivisions must be positive");
    for (const auto& nf : fields)
        if (&nf.field->space().mesh() != &mesh) throw InvalidArgument("field '" + nf.name + "' lives on another mesh");
    const int m = subdivisions;
    const int npe = (m + 1) * (m + 2) / 2;
    const int nt = static_cast<int>(mesh.num_triangles());
    std::vector<Vec2> lattice;
    std::vector<std::vector<int>> index(static_cast<std::size_t>(m + 1), std::vector<int>(static_cast<std::size_t>(m + 1), -1));
    for (int j = 0; j <= m; ++j)
        for (int i = 0; i + j <= m; ++i) {
            index[i][j] = static_cast<int>(lattice.size());
            lattice.emplace_back(static_cast<double>(i) / m, static_cast<double>(j) / m);
        }
    std::vector<std::array<int, 3>> sub;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i + j < m; ++i) {
            sub.push_back({index[i][j], index[i + 1][j], index[i][j + 1]});
            if (i + j < m - 1) sub.push_back({index[i + 1][j], index[i + 1][j + 1], index[i][j + 1]});
        }

    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << std::setprecision(12);
    out << "# vtk DataFile Version 3.0\nprns fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << static_cast<long>(nt) * npe << " double\n";
    std::vector<std::vector<Vec2>> phys(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        const TriangleMap map = TriangleMap::of(mesh, t);
        for (const Vec2& xi : lattice) {
            const Vec2 x = map.to_physical(xi);
            phys[t].push_back(x);
            out << x.x() << ' ' << x.y() << " 0\n";
        }
    }
    const long ncells = static_cast<long>(nt) * static_cast<long>(sub.size());
    out << "CELLS " << ncells << ' ' << 4 * ncells << '\n';
    for (int t = 0; t < nt; ++t)
        for (const auto& s : sub)
            out << "3 " << t * npe + s[0] << ' ' << t * npe + s[1] << ' ' << t * npe + s[2] << '\n';
    out << "CELL_TYPES " << ncells << '\n';
    for (long c = 0; c < ncells; ++c) out << "5\n";
    if (!fields.empty()) out << "POINT_DATA " << static_cast<long>(nt) * npe << '\n';
    for (const auto& nf : fields) {
        const bool vec = nf.field->space().components() == 2;
        if (vec)
            out << "VECTORS " << nf.name << " double\n";
        else
            out << "SCALARS " << nf.name << " double 1\nLOOKUP_TABLE default\n";
        for (int t = 0; t < nt; ++t) {
            const Eigen::MatrixXd v = values_at(*nf.field, nf.field->space().tabulate_at(t, phys[t]), t);
            for (int q = 0; q < npe; ++q) {
                if (vec)
                    out << v(q, 0) << ' ' << v(q, 1) << " 0\n";
                else
                    out << v(q, 0) << '\n';
            }
        }
    }
    if (!out) throw Error("error while writing " + path.string());
}

void compute_rates(std::vector<ErrorRow>& rows) {
    auto rate = [](double e0, double e1, double h0, double h1) -> std::optional<double> {
        if (e0 < kMachineZero || e1 < kMachineZero) return std::nullopt;
        return std::log(e0 / e1) / std::log(h0 / h1);
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0) {
            rows[i].rate_l2 = rows[i].rate_h1 = rows[i].rate_p = std::nullopt;
            continue;
        }
        const auto& a = rows[i - 1];
        auto& b = rows[i];
        b.rate_l2 = rate(a.e_l2, b.e_l2, a.h, b.h);
        b.rate_h1 = rate(a.e_h1, b.e_h1, a.h, b.h);
        b.rate_p = rate(a.e_p, b.e_p, a.h, b.h);
    }
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string fmt_rate(const std::optional<double>& r) { return r ? fmt("%.2f", *r) : "--"; }

}  // namespace

std::string rate_table_csv(const std::vector<ErrorRow>& rows) {
    std::ostringstream s;
    s << "h,eL2,rateL2,eH1,rateH1,ePrel,rateP\n";
    for (const auto& r : rows)
        s << fmt("%.6g", r.h) << ',' << fmt("%.6e", r.e_l2) << ',' << fmt_rate(r.rate_l2) << ','
          << fmt("%.6e", r.e_h1) << ',' << fmt_rate(r.rate_h1) << ',' << fmt("%.6e", r.e_p) << ','
          << fmt_rate(r.rate_p) << '\n';
    return s.str();
}

std::string rate_table_text(const std::vector<ErrorRow>& rows) {
    std::ostringstream s;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %-12s %-7s %-12s %-7s %-12s %-7s\n", "h", "|u-uh|_0", "rate",
                  "|grad(u-uh)|", "rate", "|p-ph|/|p|", "rate");
    s << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-10s %-12s %-7s %-12s %-7s %-12s %-7s\n", fmt("%.6g", r.h).c_str(),
                      fmt("%.3e", r.e_l2).c_str(), fmt_rate(r.rate_l2).c_str(), fmt("%.3e", r.e_h1).c_str(),
                      fmt_rate(r.rate_h1).c_str(), fmt("%.3e", r.e_p).c_str(), fmt_rate(r.rate_p).c_str());
        s << buf;
    }
    return s.str();
}

}  // namespace prns
