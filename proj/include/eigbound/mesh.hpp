#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "eigbound/geometry.hpp"

namespace eigbound {

enum class BoundaryLabel { dirichlet, neumann, steklov };

const char* to_string(BoundaryLabel label);

struct Cell {
    std::array<int, 3> v{};   // counterclockwise after normalization
    int region = 0;
};

struct BoundaryFacet {
    int a = 0;
    int b = 0;
    BoundaryLabel label = BoundaryLabel::dirichlet;
};

/// Undirected edge, oriented from lower to higher vertex index.
struct Edge {
    int a = 0;
    int b = 0;
};

/// Per-cell edge incidence. Local edge k is opposite local vertex k.
/// sign is +1 when the global edge normal (lower-to-higher tangent rotated
/// by -90 degrees) points out of the cell across that edge.
struct CellEdges {
    std::array<int, 3> edge{};
    std::array<double, 3> sign{};
    std::array<double, 3> length{};
};

struct CellGeometry {
    double area = 0.0;
    double diameter = 0.0;              // longest edge
    std::array<double, 3> edge_lengths{};  // edge k opposite vertex k
    Vec2 incenter{};
    double inradius = 0.0;
};

/// Immutable triangle mesh with labeled boundary facets and an oriented
/// edge table. All operations producing meshes return new values.
class Mesh {
public:
    static Mesh build(std::vector<Vec2> points, std::vector<Cell> cells,
                      std::vector<BoundaryFacet> boundary, int level = 0);

    const std::vector<Vec2>& points() const { return points_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<BoundaryFacet>& boundary() const { return boundary_; }
    const std::vector<Edge>& edges() const { return edges_; }
    int level() const { return level_; }

    int num_points() const { return static_cast<int>(points_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_boundary_facets() const { return static_cast<int>(boundary_.size()); }

    const CellEdges& cell_edges(int cell) const { return cell_edges_[cell]; }
    /// Edge id of boundary facet f.
    int facet_edge(int f) const { return facet_edge_[f]; }
    /// Owning cell of boundary facet f.
    int facet_cell(int f) const { return facet_cell_[f]; }
    double facet_length(int f) const;

    int edge_index(int a, int b) const;  // -1 when absent

    /// Maximum cell diameter.
    double max_diameter() const;

    bool has_label(BoundaryLabel label) const;

private:
    Mesh() = default;

    std::vector<Vec2> points_;
    std::vector<Cell> cells_;
    std::vector<BoundaryFacet> boundary_;
    std::vector<Edge> edges_;
    std::vector<CellEdges> cell_edges_;
    std::vector<int> facet_edge_;
    std::vector<int> facet_cell_;
    int level_ = 0;
};

/// Parses the line-oriented mesh text format. Throws std::runtime_error with
/// a line reference on malformed input, out-of-range indices, non-manifold
/// edges, and degenerate cells.
Mesh parse_mesh(std::istream& in);
Mesh parse_mesh(const std::string& text);

/// Writes the mesh text format with 17-significant-digit coordinates.
void write_mesh(const Mesh& mesh, std::ostream& out);
std::string write_mesh(const Mesh& mesh);

enum class BuiltinMesh { lshape_fig1, square_fig3, cook_fig4 };

/// Initial triangulations. lshape_fig1 accepts a variant flag that relabels
/// the whole boundary as steklov.
Mesh builtin_mesh(BuiltinMesh name, bool steklov_variant = false);

/// Uniform red refinement: each triangle is split into four congruent
/// children through the edge midpoints.
Mesh refine_red(const Mesh& mesh);

CellGeometry cell_geometry(const Mesh& mesh, int cell);

/// Inscribed-ball parameter d = dist(x0, boundary) / max_j |x0 - z_j| of a
/// convex polygon with corners z_j and interior point x0.
double inscribed_param_d(std::span<const Vec2> polygon, Vec2 x0);

/// d for a triangle cell with x0 fixed at the incenter.
double inscribed_param_d(const Mesh& mesh, int cell);

} // namespace eigbound
