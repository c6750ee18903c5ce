#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace prns {

using Vec2 = Eigen::Vector2d;

/// Boundary segment as given by a generator or a mesh file: two vertex
/// indices (either order) and a tag.
struct BoundarySegment {
    int a;
    int b;
    std::string tag;
};

/// Conforming triangulation of a polygonal domain.
///
/// Triangles are stored counterclockwise. Edges carry a canonical global
/// orientation from the lower to the higher vertex index. Local edge i of a
/// triangle is the one opposite local vertex i, traversed from local vertex
/// (i+1)%3 to (i+2)%3; `edge_sign(t, i)` is +1 when that traversal agrees
/// with the global orientation and -1 otherwise.
///
/// Instances are immutable after construction.
class Mesh {
public:
    Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
         const std::vector<BoundarySegment>& boundary);

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const Vec2& vertex(int v) const { return vertices_[v]; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    const std::array<int, 2>& edge(int e) const { return edges_[e]; }

    int triangle_edge(int t, int local) const { return tri_edges_[t][local]; }
    int edge_sign(int t, int local) const { return tri_edge_signs_[t][local]; }
    /// Incident triangles; the second entry is -1 for boundary edges.
    const std::array<int, 2>& edge_triangles(int e) const { return edge_tris_[e]; }
    bool is_boundary_edge(int e) const { return edge_tris_[e][1] < 0; }

    /// Tag of a boundary edge, empty for interior edges.
    const std::string& edge_tag(int e) const;
    std::vector<std::string> tags() const;
    /// Boundary edges carrying `tag`, in increasing edge index order.
    std::vector<int> tagged_edges(const std::string& tag) const;
    bool has_tag(const std::string& tag) const { return tag_edges_.count(tag) != 0; }

    /// Boundary segments in a form accepted by the constructor.
    std::vector<BoundarySegment> boundary_segments() const;

    double area(int t) const;
    double diameter(int t) const;
    double inradius(int t) const;
    double edge_length(int e) const;
    /// Unit normal obtained by rotating the global edge tangent clockwise.
    Vec2 edge_normal(int e) const;
    double total_area() const;
    double max_edge_length() const;
    std::pair<Vec2, Vec2> bounding_box() const;

private:
    void build_edges();
    void attach_boundary(const std::vector<BoundarySegment>& boundary);
    void validate() const;

    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> tri_edges_;
    std::vector<std::array<int, 3>> tri_edge_signs_;
    std::vector<std::array<int, 2>> edge_tris_;
    std::vector<std::string> edge_tags_;
    std::map<std::string, std::vector<int>> tag_edges_;
};

struct DomainSpec {
    enum class Kind { rectangle, imported };
    Kind kind = Kind::rectangle;
    std::array<double, 2> x_range{0.0, 1.0};
    std::array<double, 2> y_range{0.0, 1.0};
    int nx = 1;
    int ny = 1;
    std::optional<double> stretching;
    std::filesystem::path path;
};

/// Tensor grid of nx*ny cells, each split along its lower-left to upper-right
/// diagonal. Boundary tags: "left", "right", "bottom", "top".
Mesh generate_structured(const DomainSpec& spec);

/// Builds the mesh described by `spec`, including optional tanh stretching.
Mesh build_mesh(const DomainSpec& spec);

/// x -> 0.5 + tanh(2 gamma (x - 0.5)) / (2 tanh gamma), in each coordinate.
double tanh_stretch(double xi, double gamma);
Mesh apply_tanh_stretching(const Mesh& mesh, double gamma);

/// Splits every triangle into four through its edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

/// Max over triangles of diameter / inradius.
double shape_regularity(const Mesh& mesh);

void write_mesh(const Mesh& mesh, std::ostream& out);
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);
Mesh read_mesh(std::istream& in);
Mesh import_mesh(const std::filesystem::path& path);

/// Bucket-grid point location. Holds a reference to the mesh.
class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh, int buckets_per_side = 0);

    /// Triangle containing `x` (within a small relative tolerance) and the
    /// reference coordinates of `x` in it; nullopt when outside the mesh.
    std::optional<std::pair<int, Vec2>> locate(const Vec2& x) const;

private:
    const Mesh& mesh_;
    Vec2 lo_;
    Vec2 cell_;
    int nbx_ = 1;
    int nby_ = 1;
    std::vector<std::vector<int>> buckets_;
};

}  // namespace prns
