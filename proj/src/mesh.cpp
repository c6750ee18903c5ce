#include "prns/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

#include <Eigen/LU>

#include "prns/error.hpp"

namespace prns {

namespace {

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

const std::string kNoTag;

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           const std::vector<BoundarySegment>& boundary)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    const int nv = static_cast<int>(vertices_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        for (int v : triangles_[t]) {
            if (v < 0 || v >= nv) {
                throw ValidationError("triangle " + std::to_string(t) + " references missing vertex " +
                                      std::to_string(v));
            }
        }
    }
    build_edges();
    attach_boundary(boundary);
    validate();
}

void Mesh::build_edges() {
    std::unordered_map<std::uint64_t, int> index;
    index.reserve(triangles_.size() * 2);
    tri_edges_.resize(triangles_.size());
    tri_edge_signs_.resize(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int i = 0; i < 3; ++i) {
            const int a = tri[(i + 1) % 3];
            const int b = tri[(i + 2) % 3];
            if (a == b) {
                throw ValidationError("triangle " + std::to_string(t) + " has repeated vertex");
            }
            auto [it, inserted] = index.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
            if (inserted) {
                edges_.push_back({std::min(a, b), std::max(a, b)});
                edge_tris_.push_back({static_cast<int>(t), -1});
            } else {
                auto& inc = edge_tris_[it->second];
                if (inc[1] >= 0) {
                    throw ValidationError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                          ") shared by more than two triangles");
                }
                inc[1] = static_cast<int>(t);
            }
            tri_edges_[t][i] = it->second;
            tri_edge_signs_[t][i] = a < b ? 1 : -1;
        }
    }
}

void Mesh::attach_boundary(const std::vector<BoundarySegment>& boundary) {
    std::unordered_map<std::uint64_t, int> index;
    index.reserve(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        index.emplace(edge_key(edges_[e][0], edges_[e][1]), static_cast<int>(e));
    }
    edge_tags_.assign(edges_.size(), std::string());
    for (const auto& seg : boundary) {
        auto it = index.find(edge_key(seg.a, seg.b));
        if (it == index.end()) {
            throw ValidationError("boundary segment (" + std::to_string(seg.a) + "," +
                                  std::to_string(seg.b) + ") is not a mesh edge");
        }
        const int e = it->second;
        if (!is_boundary_edge(e)) {
            throw ValidationError("boundary segment (" + std::to_string(seg.a) + "," +
                                  std::to_string(seg.b) + ") is an interior edge");
        }
        if (seg.tag.empty()) {
            throw ValidationError("boundary segment with empty tag");
        }
        if (!edge_tags_[e].empty() && edge_tags_[e] != seg.tag) {
            throw ValidationError("edge " + std::to_string(e) + " tagged twice");
        }
        edge_tags_[e] = seg.tag;
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (is_boundary_edge(static_cast<int>(e)) && !edge_tags_[e].empty()) {
            tag_edges_[edge_tags_[e]].push_back(static_cast<int>(e));
        }
    }
}

void Mesh::validate() const {
    std::ostringstream problems;
    int count = 0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        if (signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]) <= 0.0) {
            problems << " triangle " << t << " not counterclockwise or degenerate;";
            ++count;
        }
    }
    std::vector<int> boundary_edges;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (!is_boundary_edge(static_cast<int>(e))) continue;
        boundary_edges.push_back(static_cast<int>(e));
        if (edge_tags_[e].empty()) {
            problems << " boundary edge (" << edges_[e][0] << "," << edges_[e][1] << ") untagged;";
            ++count;
        }
    }
    // Hanging vertices can only sit on topological boundary edges.
    std::vector<int> boundary_vertices;
    for (int e : boundary_edges) {
        boundary_vertices.push_back(edges_[e][0]);
        boundary_vertices.push_back(edges_[e][1]);
    }
    std::sort(boundary_vertices.begin(), boundary_vertices.end());
    boundary_vertices.erase(std::unique(boundary_vertices.begin(), boundary_vertices.end()),
                            boundary_vertices.end());
    for (int e : boundary_edges) {
        const Vec2& a = vertices_[edges_[e][0]];
        const Vec2& b = vertices_[edges_[e][1]];
        const Vec2 d = b - a;
        const double len2 = d.squaredNorm();
        for (int v : boundary_vertices) {
            if (v == edges_[e][0] || v == edges_[e][1]) continue;
            const Vec2 r = vertices_[v] - a;
            const double s = r.dot(d) / len2;
            if (s <= 1e-12 || s >= 1.0 - 1e-12) continue;
            const double cross = std::abs(r.x() * d.y() - r.y() * d.x());
            if (cross <= 1e-12 * len2) {
                problems << " hanging vertex " << v << " on edge (" << edges_[e][0] << ","
                         << edges_[e][1] << ");";
                ++count;
            }
        }
    }
    if (count > 0) {
        throw ValidationError("invalid mesh (" + std::to_string(count) + " problems):" + problems.str());
    }
}

const std::string& Mesh::edge_tag(int e) const { return edge_tags_[e].empty() ? kNoTag : edge_tags_[e]; }

std::vector<std::string> Mesh::tags() const {
    std::vector<std::string> out;
    for (const auto& [tag, edges] : tag_edges_) out.push_back(tag);
    return out;
}

std::vector<int> Mesh::tagged_edges(const std::string& tag) const {
    auto it = tag_edges_.find(tag);
    return it == tag_edges_.end() ? std::vector<int>{} : it->second;
}

std::vector<BoundarySegment> Mesh::boundary_segments() const {
    std::vector<BoundarySegment> out;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (is_boundary_edge(static_cast<int>(e))) {
            out.push_back({edges_[e][0], edges_[e][1], edge_tags_[e]});
        }
    }
    return out;
}

double Mesh::area(int t) const {
    const auto& tri = triangles_[t];
    return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Mesh::diameter(int t) const {
    double d = 0.0;
    for (int i = 0; i < 3; ++i) d = std::max(d, edge_length(tri_edges_[t][i]));
    return d;
}

double Mesh::inradius(int t) const {
    double perimeter = 0.0;
    for (int i = 0; i < 3; ++i) perimeter += edge_length(tri_edges_[t][i]);
    return 2.0 * area(t) / perimeter;
}

double Mesh::edge_length(int e) const { return (vertices_[edges_[e][1]] - vertices_[edges_[e][0]]).norm(); }

Vec2 Mesh::edge_normal(int e) const {
    const Vec2 t = (vertices_[edges_[e][1]] - vertices_[edges_[e][0]]).normalized();
    return {t.y(), -t.x()};
}

double Mesh::total_area() const {
    double a = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) a += area(static_cast<int>(t));
    return a;
}

double Mesh::max_edge_length() const {
    double h = 0.0;
    for (std::size_t e = 0; e < edges_.size(); ++e) h = std::max(h, edge_length(static_cast<int>(e)));
    return h;
}

std::pair<Vec2, Vec2> Mesh::bounding_box() const {
    Vec2 lo = Vec2::Constant(std::numeric_limits<double>::max());
    Vec2 hi = Vec2::Constant(std::numeric_limits<double>::lowest());
    for (const auto& v : vertices_) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return {lo, hi};
}

Mesh generate_structured(const DomainSpec& spec) {
    if (spec.kind != DomainSpec::Kind::rectangle) {
        throw InvalidDomain("generate_structured requires a rectangle domain");
    }
    if (spec.nx < 1 || spec.ny < 1) {
        throw InvalidDomain("cell counts must be >= 1");
    }
    const auto [x0, x1] = spec.x_range;
    const auto [y0, y1] = spec.y_range;
    if (!(x1 > x0) || !(y1 > y0)) {
        throw InvalidDomain("degenerate rectangle range");
    }
    const int nx = spec.nx;
    const int ny = spec.ny;
    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            // Exact endpoints so tags and stretching see 0 and 1 exactly.
            const double x = i == nx ? x1 : x0 + (x1 - x0) * i / nx;
            const double y = j == ny ? y1 : y0 + (y1 - y0) * j / ny;
            vertices.emplace_back(x, y);
        }
    }
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            triangles.push_back({a, b, c});
            triangles.push_back({a, c, d});
        }
    }
    std::vector<BoundarySegment> boundary;
    for (int i = 0; i < nx; ++i) {
        boundary.push_back({id(i, 0), id(i + 1, 0), "bottom"});
        boundary.push_back({id(i, ny), id(i + 1, ny), "top"});
    }
    for (int j = 0; j < ny; ++j) {
        boundary.push_back({id(0, j), id(0, j + 1), "left"});
        boundary.push_back({id(nx, j), id(nx, j + 1), "right"});
    }
    return Mesh(std::move(vertices), std::move(triangles), boundary);
}

Mesh build_mesh(const DomainSpec& spec) {
    if (spec.kind == DomainSpec::Kind::imported) return import_mesh(spec.path);
    Mesh mesh = generate_structured(spec);
    if (spec.stretching) return apply_tanh_stretching(mesh, *spec.stretching);
    return mesh;
}

double tanh_stretch(double xi, double gamma) {
    if (!(gamma > 0.0)) throw InvalidArgument("stretching parameter gamma must be positive");
    return 0.5 + std::tanh(2.0 * gamma * (xi - 0.5)) / (2.0 * std::tanh(gamma));
}

Mesh apply_tanh_stretching(const Mesh& mesh, double gamma) {
    if (!(gamma > 0.0)) {
        throw InvalidArgument("stretching parameter gamma must be positive");
    }
    std::vector<Vec2> vertices = mesh.vertices();
    for (auto& v : vertices) {
        if (v.x() < 0.0 || v.x() > 1.0 || v.y() < 0.0 || v.y() > 1.0) {
            throw InvalidDomain("tanh stretching expects a mesh of the unit square");
        }
        // Keep the fixed points exact.
        auto map = [gamma](double s) { return (s == 0.0 || s == 1.0 || s == 0.5) ? s : tanh_stretch(s, gamma); };
        v = Vec2(map(v.x()), map(v.y()));
    }
    return Mesh(std::move(vertices), mesh.triangles(), mesh.boundary_segments());
}

Mesh refine_uniform(const Mesh& mesh) {
    std::vector<Vec2> vertices = mesh.vertices();
    const int nv = static_cast<int>(vertices.size());
    for (const auto& e : mesh.edges()) {
        vertices.push_back(0.5 * (mesh.vertex(e[0]) + mesh.vertex(e[1])));
    }
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(4 * mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& v = mesh.triangle(static_cast<int>(t));
        const int m0 = nv + mesh.triangle_edge(static_cast<int>(t), 0);
        const int m1 = nv + mesh.triangle_edge(static_cast<int>(t), 1);
        const int m2 = nv + mesh.triangle_edge(static_cast<int>(t), 2);
        triangles.push_back({v[0], m2, m1});
        triangles.push_back({m2, v[1], m0});
        triangles.push_back({m1, m0, v[2]});
        triangles.push_back({m0, m1, m2});
    }
    std::vector<BoundarySegment> boundary;
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.is_boundary_edge(static_cast<int>(e))) continue;
        const auto& ed = mesh.edge(static_cast<int>(e));
        const int m = nv + static_cast<int>(e);
        const std::string& tag = mesh.edge_tag(static_cast<int>(e));
        boundary.push_back({ed[0], m, tag});
        boundary.push_back({m, ed[1], tag});
    }
    return Mesh(std::move(vertices), std::move(triangles), boundary);
}

double shape_regularity(const Mesh& mesh) {
    double ratio = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        ratio = std::max(ratio, mesh.diameter(static_cast<int>(t)) / mesh.inradius(static_cast<int>(t)));
    }
    return ratio;
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
    out << "ns-mesh v1\n";
    out << "vertices " << mesh.num_vertices() << '\n';
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
    out << "triangles " << mesh.num_triangles() << '\n';
    for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    const auto boundary = mesh.boundary_segments();
    out << "boundary " << boundary.size() << '\n';
    for (const auto& s : boundary) out << s.a << ' ' << s.b << ' ' << s.tag << '\n';
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_mesh(mesh, out);
    if (!out) throw Error("write failed: " + path.string());
}

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::istringstream next(const char* expecting) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                return std::istringstream(line);
            }
        }
        throw ParseError(std::string("unexpected end of file, expecting ") + expecting, line_no_ + 1);
    }

    std::size_t line() const { return line_no_; }

    std::size_t section(const char* name) {
        auto ss = next(name);
        std::string word;
        long long n = -1;
        std::string extra;
        if (!(ss >> word >> n) || word != name || n < 0 || (ss >> extra)) {
            throw ParseError(std::string("expected '") + name + " <count>'", line_no_);
        }
        return static_cast<std::size_t>(n);
    }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

}  // namespace

Mesh read_mesh(std::istream& in) {
    LineReader reader(in);
    {
        auto ss = reader.next("header");
        std::string a, b, extra;
        if (!(ss >> a >> b) || a != "ns-mesh" || b != "v1" || (ss >> extra)) {
            throw ParseError("expected header 'ns-mesh v1'", reader.line());
        }
    }
    std::vector<Vec2> vertices(reader.section("vertices"));
    for (auto& v : vertices) {
        auto ss = reader.next("vertex");
        double x, y;
        std::string extra;
        if (!(ss >> x >> y) || (ss >> extra)) throw ParseError("expected 'x y'", reader.line());
        v = Vec2(x, y);
    }
    std::vector<std::array<int, 3>> triangles(reader.section("triangles"));
    for (auto& t : triangles) {
        auto ss = reader.next("triangle");
        std::string extra;
        if (!(ss >> t[0] >> t[1] >> t[2]) || (ss >> extra)) throw ParseError("expected 'i j k'", reader.line());
    }
    std::vector<BoundarySegment> boundary(reader.section("boundary"));
    for (auto& s : boundary) {
        auto ss = reader.next("boundary segment");
        std::string extra;
        if (!(ss >> s.a >> s.b >> s.tag) || (ss >> extra)) {
            throw ParseError("expected 'i j tagname'", reader.line());
        }
        const long long nv = static_cast<long long>(vertices.size());
        if (s.a < 0 || s.b < 0 || s.a >= nv || s.b >= nv) {
            throw ValidationError("boundary segment on line " + std::to_string(reader.line()) +
                                  " references missing vertex");
        }
    }
    return Mesh(std::move(vertices), std::move(triangles), boundary);
}

Mesh import_mesh(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mesh file " + path.string());
    return read_mesh(in);
}

PointLocator::PointLocator(const Mesh& mesh, int buckets_per_side) : mesh_(mesh) {
    auto [lo, hi] = mesh.bounding_box();
    const Vec2 span = (hi - lo).cwiseMax(Vec2::Constant(1e-300));
    if (buckets_per_side <= 0) {
        buckets_per_side = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.num_triangles()))));
    }
    const double aspect = span.x() / span.y();
    nbx_ = std::max(1, static_cast<int>(buckets_per_side * std::sqrt(aspect)));
    nby_ = std::max(1, static_cast<int>(buckets_per_side / std::sqrt(aspect)));
    lo_ = lo;
    cell_ = Vec2(span.x() / nbx_, span.y() / nby_);
    buckets_.assign(static_cast<std::size_t>(nbx_ * nby_), {});
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        Vec2 tlo = Vec2::Constant(std::numeric_limits<double>::max());
        Vec2 thi = Vec2::Constant(std::numeric_limits<double>::lowest());
        for (int v : mesh.triangle(static_cast<int>(t))) {
            tlo = tlo.cwiseMin(mesh.vertex(v));
            thi = thi.cwiseMax(mesh.vertex(v));
        }
        const int i0 = std::clamp(static_cast<int>((tlo.x() - lo_.x()) / cell_.x()), 0, nbx_ - 1);
        const int i1 = std::clamp(static_cast<int>((thi.x() - lo_.x()) / cell_.x()), 0, nbx_ - 1);
        const int j0 = std::clamp(static_cast<int>((tlo.y() - lo_.y()) / cell_.y()), 0, nby_ - 1);
        const int j1 = std::clamp(static_cast<int>((thi.y() - lo_.y()) / cell_.y()), 0, nby_ - 1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j * nbx_ + i)].push_back(static_cast<int>(t));
    }
}

std::optional<std::pair<int, Vec2>> PointLocator::locate(const Vec2& x) const {
    const int i = static_cast<int>(std::floor((x.x() - lo_.x()) / cell_.x()));
    const int j = static_cast<int>(std::floor((x.y() - lo_.y()) / cell_.y()));
    const double tol = 1e-10;
    int best = -1;
    double best_violation = std::numeric_limits<double>::max();
    Vec2 best_ref = Vec2::Zero();
    // Triangles are registered in every bucket their bounding box touches.
    {
        const int ii = std::clamp(i, 0, nbx_ - 1);
        const int jj = std::clamp(j, 0, nby_ - 1);
        for (int t : buckets_[static_cast<std::size_t>(jj * nbx_ + ii)]) {
            const auto& tri = mesh_.triangle(t);
            const Vec2& a = mesh_.vertex(tri[0]);
            Eigen::Matrix2d B;
            B.col(0) = mesh_.vertex(tri[1]) - a;
            B.col(1) = mesh_.vertex(tri[2]) - a;
            const Vec2 ref = B.inverse() * (x - a);
            const double violation = std::max({-ref.x(), -ref.y(), ref.x() + ref.y() - 1.0});
            if (violation < best_violation) {
                best_violation = violation;
                best = t;
                best_ref = ref;
            }
        }
    }
    if (best < 0 || best_violation > tol) return std::nullopt;
    return std::make_pair(best, best_ref);
}

}  // namespace prns
